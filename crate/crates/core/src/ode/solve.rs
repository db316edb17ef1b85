//! Adaptive shifted solves (z B - A) g = B f by the ultraspherical method.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;

use super::almost_banded;
use super::ultraspherical::{boundary_row, conversion_chain, differentiation, multiplication, Banded};
use super::{apply_operator, BoundaryConditions, End, LinDiffOp};
use crate::chebfun::{chop, tail_is_small, ChebFun, Interval};
use crate::error::{Error, Result};

/// Largest discretization size tried before giving up.
pub const MAX_SOLVE_DEGREE: usize = 1 << 15;
const START_DEGREE: usize = 64;
/// Trailing solution coefficients below this (relative) are dropped. The solve
/// tolerance only decides when the degree is large enough: chopping at it would
/// break the boundary conditions at the level of the highest derivatives.
const SOLUTION_FLOOR: f64 = 1e-40;

struct Discretization {
    lhs: Banded,
    rhs: Option<Banded>,
    convert: Banded,
    bc_rows: Vec<Vec<C64>>,
    bc_scale: Vec<f64>,
}

/// Shifted-solve engine for a fixed operator (or pencil) and boundary conditions.
/// Discretizations are cached per size, so repeated solves at different shifts
/// only pay for the factorization.
pub struct ShiftSolver {
    lhs: LinDiffOp,
    rhs: Option<LinDiffOp>,
    bcs: BoundaryConditions,
    order: usize,
    domain: Interval,
    pad: usize,
    cache: Mutex<HashMap<usize, Arc<Discretization>>>,
}

fn discretize(op: &LinDiffOp, order: usize, np: usize) -> Banded {
    let mut acc: Option<Banded> = None;
    let s = op.domain().scale();
    for (j, a) in op.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let chain = conversion_chain(np, j, order).matmul(&differentiation(np, j));
        let scaled: Vec<C64> = a.coeffs().iter().map(|c| c * s.powi(j as i32)).collect();
        let term = if scaled.len() == 1 {
            chain.scaled(scaled[0])
        } else {
            multiplication(np, order, &scaled).matmul(&chain)
        };
        let one = C64::new(1.0, 0.0);
        acc = Some(match acc {
            None => term,
            Some(m) => m.combine(one, &term, one),
        });
    }
    acc.unwrap_or_else(|| Banded::zeros(np, 0, 0))
}

fn coeff_norm(c: &[C64]) -> f64 {
    c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

impl ShiftSolver {
    /// Solver for (z I - op) g = f.
    pub fn new(op: &LinDiffOp, bcs: &BoundaryConditions) -> Result<Self> {
        Self::build(op, None, bcs)
    }

    /// Solver for (z rhs_op - lhs_op) g = rhs_op f.
    pub fn pencil(lhs: &LinDiffOp, rhs: &LinDiffOp, bcs: &BoundaryConditions) -> Result<Self> {
        lhs.domain().check_same(&rhs.domain())?;
        Self::build(lhs, Some(rhs), bcs)
    }

    fn build(lhs: &LinDiffOp, rhs: Option<&LinDiffOp>, bcs: &BoundaryConditions) -> Result<Self> {
        let order = lhs.order().max(rhs.map_or(0, |r| r.order()));
        if order == 0 {
            return Err(Error::Invalid("shifted solve needs a differential operator".into()));
        }
        bcs.check(order)?;
        let degs = lhs.max_coeff_degree().max(rhs.map_or(0, |r| r.max_coeff_degree()));
        Ok(ShiftSolver {
            lhs: lhs.clone(),
            rhs: rhs.cloned(),
            bcs: bcs.clone(),
            order,
            domain: lhs.domain(),
            pad: degs + 2 * order + 8,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_real(&self) -> bool {
        self.lhs.is_real() && self.rhs.as_ref().is_none_or(|r| r.is_real())
    }

    fn discretization(&self, n: usize) -> Arc<Discretization> {
        if let Some(d) = self.cache.lock().unwrap().get(&n) {
            return d.clone();
        }
        let np = n + self.pad;
        let lhs = discretize(&self.lhs, self.order, np);
        let rhs = self.rhs.as_ref().map(|r| discretize(r, self.order, np));
        let convert = conversion_chain(np, 0, self.order);
        let scale = self.domain.scale();
        let mut bc_rows = Vec::with_capacity(self.order);
        let mut bc_scale = Vec::with_capacity(self.order);
        for bc in &self.bcs.0 {
            let mut row = boundary_row(n, bc.end == End::Right, bc.deriv, scale);
            let m = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for v in row.iter_mut() {
                *v /= m;
            }
            bc_rows.push(row);
            bc_scale.push(m);
        }
        let d = Arc::new(Discretization {
            lhs,
            rhs,
            convert,
            bc_rows,
            bc_scale,
        });
        self.cache.lock().unwrap().entry(n).or_insert(d).clone()
    }

    /// Right-hand sides as seen by the solve: f itself, or rhs_op f for a pencil.
    pub fn prepare_rhs(&self, f: &[ChebFun]) -> Result<Vec<ChebFun>> {
        f.iter()
            .map(|fi| {
                fi.domain().check_same(&self.domain)?;
                match &self.rhs {
                    None => Ok(fi.clone()),
                    Some(op) => apply_operator(op, fi),
                }
            })
            .collect()
    }

    /// Solves for each column of `f`, where `f` has already been through [`prepare_rhs`].
    pub fn solve_prepared(&self, z: C64, f: &[ChebFun], tol: f64) -> Result<Vec<ChebFun>> {
        let mut out: Vec<Option<ChebFun>> = vec![None; f.len()];
        let mut pending: Vec<usize> = Vec::new();
        for (i, fi) in f.iter().enumerate() {
            if fi.is_zero() && self.bcs.is_homogeneous() {
                out[i] = Some(ChebFun::zero(self.domain));
            } else {
                pending.push(i);
            }
        }
        let max_len = pending.iter().map(|&i| f[i].len()).max().unwrap_or(1);
        let mut n = START_DEGREE.max((max_len + self.order + 1).next_power_of_two());
        while !pending.is_empty() {
            if n > MAX_SOLVE_DEGREE {
                return Err(Error::Resolution { cap: MAX_SOLVE_DEGREE });
            }
            let cols: Vec<&ChebFun> = pending.iter().map(|&i| &f[i]).collect();
            let sols = self.solve_at(z, &cols, n)?;
            let mut still = Vec::new();
            for (&i, mut u) in pending.iter().zip(sols) {
                if tail_is_small(&u, tol) {
                    chop(&mut u, SOLUTION_FLOOR);
                    let fnorm = coeff_norm(f[i].coeffs());
                    let unorm = coeff_norm(&u);
                    if fnorm > 0.0 && unorm > fnorm / (100.0 * f64::EPSILON) {
                        return Err(Error::IllConditionedShift {
                            re: z.re,
                            im: z.im,
                            ratio: unorm / fnorm,
                            node: None,
                        });
                    }
                    out[i] = Some(ChebFun::new(self.domain, u));
                } else {
                    still.push(i);
                }
            }
            pending = still;
            n *= 2;
        }
        Ok(out.into_iter().map(|g| g.unwrap()).collect())
    }

    /// Solves (z B - A) g = B f for each column.
    pub fn solve(&self, z: C64, f: &[ChebFun], tol: f64) -> Result<Vec<ChebFun>> {
        let prepared = self.prepare_rhs(f)?;
        self.solve_prepared(z, &prepared, tol)
    }

    fn solve_at(&self, z: C64, f: &[&ChebFun], n: usize) -> Result<Vec<Vec<C64>>> {
        let disc = self.discretization(n);
        let one = C64::new(1.0, 0.0);
        let shifted = match &disc.rhs {
            Some(b) => b.combine(z, &disc.lhs, -one),
            None => disc.convert.combine(z, &disc.lhs, -one),
        };
        let np = n + self.pad;
        let nb = self.order;
        let rhs: Vec<Vec<C64>> = f
            .iter()
            .map(|fi| {
                let mut c = fi.coeffs().to_vec();
                c.resize(np, C64::new(0.0, 0.0));
                let conv = disc.convert.matvec(&c);
                let mut v = Vec::with_capacity(n);
                for (bc, s) in self.bcs.0.iter().zip(&disc.bc_scale) {
                    v.push(bc.value / *s);
                }
                v.extend_from_slice(&conv[..n - nb]);
                v
            })
            .collect();
        let sol = almost_banded::solve(&disc.bc_rows, &shifted, n, &rhs).ok_or(Error::IllConditionedShift {
            re: z.re,
            im: z.im,
            ratio: f64::INFINITY,
            node: None,
        })?;
        Ok(sol.columns)
    }
}

/// Solves (z I - op) g = f with the given boundary conditions, column by column.
pub fn solve_shifted(op: &LinDiffOp, z: C64, rhs: &[ChebFun], bcs: &BoundaryConditions, tol: f64) -> Result<Vec<ChebFun>> {
    ShiftSolver::new(op, bcs)?.solve(z, rhs, tol)
}

/// Solves (z op2 - op1) g = op2 f with the given boundary conditions.
pub fn solve_generalized_shifted(
    op1: &LinDiffOp,
    op2: &LinDiffOp,
    z: C64,
    rhs: &[ChebFun],
    bcs: &BoundaryConditions,
    tol: f64,
) -> Result<Vec<ChebFun>> {
    ShiftSolver::pencil(op1, op2, bcs)?.solve(z, rhs, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn poisson_with_constant_forcing() {
        let dom = Interval::unit();
        let op = LinDiffOp::constant(dom, &[0.0, 0.0, -1.0]).unwrap();
        let one = ChebFun::constant(dom, c(1.0));
        let g = solve_shifted(&op, c(0.0), &[one], &BoundaryConditions::dirichlet(), 1e-13).unwrap();
        for x in [-0.8, 0.0, 0.5] {
            assert!((g[0].eval(x) - c((x * x - 1.0) / 2.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn unit_shift_closed_form() {
        let dom = Interval::unit();
        let op = LinDiffOp::constant(dom, &[0.0, 0.0, -1.0]).unwrap();
        let one = ChebFun::constant(dom, c(1.0));
        let g = solve_shifted(&op, c(1.0), &[one], &BoundaryConditions::dirichlet(), 1e-14).unwrap();
        for x in [-0.9f64, -0.3, 0.0, 0.45, 0.8] {
            let want = 1.0 - x.cos() / 1f64.cos();
            assert!((g[0].eval(x) - c(want)).norm() < 1e-13, "{x}");
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let dom = Interval::unit();
        let op = LinDiffOp::constant(dom, &[0.0, 0.0, -1.0]).unwrap();
        let x3 = LinDiffOp::multiplication(ChebFun::fit_real(|x| x * x * x, dom, 1e-15).unwrap());
        let g = solve_generalized_shifted(&op, &x3, c(3.0), &[ChebFun::zero(dom)], &BoundaryConditions::dirichlet(), 1e-12).unwrap();
        assert!(g[0].is_zero());
    }

    #[test]
    fn shift_on_eigenvalue_is_flagged() {
        let dom = Interval::unit();
        let op = LinDiffOp::constant(dom, &[0.0, 0.0, -1.0]).unwrap();
        let f = ChebFun::fit_real(|x| (std::f64::consts::FRAC_PI_2 * (x + 1.0)).sin() + 0.3 * x, dom, 1e-15).unwrap();
        let z = c(std::f64::consts::FRAC_PI_2.powi(2));
        let err = solve_shifted(&op, z, &[f], &BoundaryConditions::dirichlet(), 1e-12).unwrap_err();
        assert!(matches!(err, Error::IllConditionedShift { .. }), "{err}");
    }
}
