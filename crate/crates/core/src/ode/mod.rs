//! Linear differential operators, boundary functionals, and shifted solves.

mod almost_banded;
mod solve;
pub mod ultraspherical;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chebfun::{ChebFun, Interval};
use crate::error::{Error, Result};

pub use solve::{solve_generalized_shifted, solve_shifted, ShiftSolver, MAX_SOLVE_DEGREE};

/// sum_j a_j(x) d^j/dx^j on `domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "OperatorRecord", try_from = "OperatorRecord")]
pub struct LinDiffOp {
    domain: Interval,
    coeffs: Vec<ChebFun>,
}

#[derive(Serialize, Deserialize)]
struct OperatorRecord {
    order: usize,
    domain: [f64; 2],
    coeffs: Vec<ChebFun>,
}

impl From<LinDiffOp> for OperatorRecord {
    fn from(op: LinDiffOp) -> Self {
        OperatorRecord {
            order: op.order(),
            domain: [op.domain.a, op.domain.b],
            coeffs: op.coeffs,
        }
    }
}

impl TryFrom<OperatorRecord> for LinDiffOp {
    type Error = String;

    fn try_from(r: OperatorRecord) -> std::result::Result<Self, String> {
        if r.coeffs.len() != r.order + 1 {
            return Err(format!("order {} needs {} coefficients, got {}", r.order, r.order + 1, r.coeffs.len()));
        }
        LinDiffOp::new(Interval::new(r.domain[0], r.domain[1]), r.coeffs).map_err(|e| e.to_string())
    }
}

impl LinDiffOp {
    /// `coeffs[j]` multiplies the j-th derivative; the last entry must be nonzero.
    pub fn new(domain: Interval, coeffs: Vec<ChebFun>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("operator needs at least one coefficient".into()));
        }
        for c in &coeffs {
            c.domain().check_same(&domain)?;
        }
        if coeffs.last().unwrap().is_zero() {
            return Err(Error::Invalid("leading coefficient is identically zero".into()));
        }
        Ok(LinDiffOp { domain, coeffs })
    }

    /// Operator with constant coefficients.
    pub fn constant(domain: Interval, coeffs: &[f64]) -> Result<Self> {
        Self::new(
            domain,
            coeffs.iter().map(|&c| ChebFun::constant(domain, C64::new(c, 0.0))).collect(),
        )
    }

    /// Multiplication by a function.
    pub fn multiplication(f: ChebFun) -> Self {
        LinDiffOp {
            domain: f.domain(),
            coeffs: vec![f],
        }
    }

    pub fn identity(domain: Interval) -> Self {
        Self::multiplication(ChebFun::constant(domain, C64::new(1.0, 0.0)))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn coeffs(&self) -> &[ChebFun] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_real())
    }

    pub fn max_coeff_degree(&self) -> usize {
        self.coeffs.iter().map(|c| c.degree()).max().unwrap_or(0)
    }
}

/// Which end of the interval a boundary functional acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    #[serde(alias = "a")]
    Left,
    #[serde(alias = "b")]
    Right,
}

/// u^(deriv)(end) = value
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub end: End,
    pub deriv: usize,
    #[serde(default)]
    pub value: C64,
}

impl BoundaryCondition {
    pub fn homogeneous(end: End, deriv: usize) -> Self {
        BoundaryCondition {
            end,
            deriv,
            value: C64::new(0.0, 0.0),
        }
    }

    /// Applies the functional to a function.
    pub fn apply(&self, g: &ChebFun) -> C64 {
        let d = g.nth_derivative(self.deriv);
        let dom = g.domain();
        match self.end {
            End::Left => d.eval(dom.a),
            End::Right => d.eval(dom.b),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundaryConditions(pub Vec<BoundaryCondition>);

impl BoundaryConditions {
    /// u = 0 at both ends.
    pub fn dirichlet() -> Self {
        BoundaryConditions(vec![
            BoundaryCondition::homogeneous(End::Left, 0),
            BoundaryCondition::homogeneous(End::Right, 0),
        ])
    }

    /// u = u' = 0 at the left end, u'' = u''' = 0 at the right end.
    pub fn cantilever() -> Self {
        BoundaryConditions(vec![
            BoundaryCondition::homogeneous(End::Left, 0),
            BoundaryCondition::homogeneous(End::Left, 1),
            BoundaryCondition::homogeneous(End::Right, 2),
            BoundaryCondition::homogeneous(End::Right, 3),
        ])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.0.iter().all(|b| b.value == C64::new(0.0, 0.0))
    }

    pub fn check(&self, order: usize) -> Result<()> {
        if self.0.len() != order {
            return Err(Error::Invalid(format!(
                "operator of order {order} needs {order} boundary conditions, got {}",
                self.0.len()
            )));
        }
        if let Some(b) = self.0.iter().find(|b| b.deriv >= order) {
            return Err(Error::Invalid(format!(
                "boundary derivative order {} must be below the operator order {order}",
                b.deriv
            )));
        }
        Ok(())
    }

    /// Largest |functional - value| over all conditions.
    pub fn max_violation(&self, g: &ChebFun) -> f64 {
        self.0.iter().map(|b| (b.apply(g) - b.value).norm()).fold(0.0, f64::max)
    }
}

/// sum_j a_j g^(j)
pub fn apply_operator(op: &LinDiffOp, g: &ChebFun) -> Result<ChebFun> {
    op.domain.check_same(&g.domain())?;
    let mut out = ChebFun::zero(op.domain);
    let mut d = g.clone();
    for (j, a) in op.coeffs.iter().enumerate() {
        if j > 0 {
            d = d.derivative();
        }
        if a.is_zero() {
            continue;
        }
        let term = if a.degree() == 0 {
            d.scale(a.coeffs()[0])
        } else {
            a.mul(&d)?
        };
        out = out.axpy_unchecked(C64::new(1.0, 0.0), &term);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn second_derivative_of_first_mode() {
        let dom = Interval::unit();
        let op = LinDiffOp::constant(dom, &[0.0, 0.0, -1.0]).unwrap();
        let u = ChebFun::fit_real(|x| (PI * (x + 1.0) / 2.0).sin(), dom, 1e-15).unwrap();
        let lu = apply_operator(&op, &u).unwrap();
        let lam = (PI / 2.0).powi(2);
        for x in [-0.7, 0.0, 0.31, 0.9] {
            assert!((lu.eval(x) - u.eval(x) * lam).norm() < 1e-11);
        }
        let z = apply_operator(&op, &ChebFun::zero(dom)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn tapered_beam_kills_quadratics() {
        let dom = Interval::new(0.0, 1.0);
        let x = ChebFun::identity(dom);
        let one = ChebFun::constant(dom, C64::new(1.0, 0.0));
        let zero = ChebFun::zero(dom);
        let a4 = one.add(&x).unwrap();
        let a3 = one.scale(C64::new(2.0, 0.0));
        let op = LinDiffOp::new(dom, vec![zero.clone(), zero.clone(), zero, a3, a4]).unwrap();
        let u = x.mul(&x).unwrap();
        let lu = apply_operator(&op, &u).unwrap();
        assert!(lu.max_coeff() < 1e-12);
    }

    #[test]
    fn boundary_checks() {
        let bcs = BoundaryConditions::dirichlet();
        assert!(bcs.check(2).is_ok());
        assert!(bcs.check(4).is_err());
        let bad = BoundaryConditions(vec![BoundaryCondition::homogeneous(End::Left, 2); 2]);
        assert!(bad.check(2).is_err());
        let json = serde_json::to_string(&BoundaryConditions::cantilever()).unwrap();
        let back: BoundaryConditions = serde_json::from_str(&json).unwrap();
        assert_eq!(back, BoundaryConditions::cantilever());
        let short: BoundaryCondition = serde_json::from_str(r#"{"end":"b","deriv":1}"#).unwrap();
        assert_eq!(short, BoundaryCondition::homogeneous(End::Right, 1));
    }
}
