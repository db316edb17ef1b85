//! Quasimatrices: ordered columns of functions sharing a domain and a weighted
//! inner product, with Householder QR and SVD.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chebfun::{ChebFun, Interval};
use crate::error::{Error, Result};
use crate::weight::{QuadGrid, Weight};

/// Default relative threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-13;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quasimatrix {
    domain: Interval,
    weight: Weight,
    columns: Vec<ChebFun>,
}

/// Result of a Householder triangularization V = Q R.
#[derive(Clone, Debug)]
pub struct QrFactors {
    pub q: Quasimatrix,
    pub r: DMatrix<C64>,
    /// Columns whose new direction fell below the rank threshold.
    pub deficient: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: Quasimatrix,
    pub sigma: Vec<f64>,
    pub w: DMatrix<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankReport {
    pub singular_values: Vec<f64>,
    pub kept: usize,
    pub dropped: Vec<usize>,
}

/// Columns carried both as coefficients and as samples on a quadrature grid,
/// so that linear combinations and inner products stay cheap and exact.
struct Sampled {
    coeffs: Vec<C64>,
    vals: Vec<C64>,
}

impl Sampled {
    fn axpy(&mut self, alpha: C64, other: &Sampled) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += alpha * b;
        }
        for (a, b) in self.vals.iter_mut().zip(&other.vals) {
            *a += alpha * b;
        }
    }

    fn scale(&mut self, s: C64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        self.vals.iter_mut().for_each(|c| *c *= s);
    }
}

impl Quasimatrix {
    pub fn new(columns: Vec<ChebFun>, weight: Weight) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::Invalid("quasimatrix needs at least one column".into()))?;
        let domain = first.domain();
        for c in &columns {
            c.domain().check_same(&domain)?;
        }
        weight.check_domain(domain)?;
        Ok(Quasimatrix { domain, weight, columns })
    }

    /// A quasimatrix with no columns, used for empty results.
    pub fn empty(domain: Interval, weight: Weight) -> Self {
        Quasimatrix {
            domain,
            weight,
            columns: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn col(&self, j: usize) -> &ChebFun {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[ChebFun] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<ChebFun> {
        self.columns
    }

    pub fn max_degree(&self) -> usize {
        self.columns.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.columns.iter().all(|c| c.is_real())
    }

    /// Same weight and domain, new columns.
    pub fn with_columns(&self, columns: Vec<ChebFun>) -> Result<Self> {
        for c in &columns {
            c.domain().check_same(&self.domain)?;
        }
        Ok(Quasimatrix {
            domain: self.domain,
            weight: self.weight.clone(),
            columns,
        })
    }

    pub fn map<F: Fn(&ChebFun) -> Result<ChebFun>>(&self, f: F) -> Result<Self> {
        let cols = self.columns.iter().map(f).collect::<Result<Vec<_>>>()?;
        self.with_columns(cols)
    }

    pub fn grid(&self, deg_sum: usize) -> QuadGrid {
        self.weight.grid(self.domain, deg_sum)
    }

    /// Matrix of inner products (V_i, W_j) under the attached weight of `self`.
    pub fn gram(&self, other: &Quasimatrix) -> Result<DMatrix<C64>> {
        self.domain.check_same(&other.domain)?;
        let grid = self.grid(self.max_degree() + other.max_degree());
        let a: Vec<Vec<C64>> = self.columns.iter().map(|c| grid.sample(c)).collect();
        let b: Vec<Vec<C64>> = other.columns.iter().map(|c| grid.sample(c)).collect();
        Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| grid.dot(&a[i], &b[j])))
    }

    /// Column norms under the attached weight.
    pub fn column_norms(&self) -> Vec<f64> {
        let grid = self.grid(2 * self.max_degree());
        self.columns
            .iter()
            .map(|c| {
                let v = grid.sample(c);
                grid.dot(&v, &v).re.max(0.0).sqrt()
            })
            .collect()
    }

    /// V X, with column j equal to sum_i V_i X_ij.
    pub fn matmul(&self, x: &DMatrix<C64>) -> Result<Self> {
        if x.nrows() != self.ncols() {
            return Err(Error::Invalid(format!(
                "matmul: {} columns against a {}x{} matrix",
                self.ncols(),
                x.nrows(),
                x.ncols()
            )));
        }
        let len = self.max_degree() + 1;
        let cols = (0..x.ncols())
            .map(|j| {
                let mut c = vec![ZERO; len];
                for (i, col) in self.columns.iter().enumerate() {
                    let s = x[(i, j)];
                    if s == ZERO {
                        continue;
                    }
                    for (k, v) in col.coeffs().iter().enumerate() {
                        c[k] += s * v;
                    }
                }
                ChebFun::new(self.domain, c)
            })
            .collect();
        self.with_columns(cols)
    }

    /// `count` functions orthonormal under the attached weight: polynomials of
    /// increasing degree built by a twice-orthogonalized Krylov recurrence in x.
    fn templates(&self, count: usize, grid: &QuadGrid, len: usize) -> Vec<Sampled> {
        let x = ChebFun::identity(self.domain);
        let mut out: Vec<Sampled> = Vec::with_capacity(count);
        let mut next = ChebFun::constant(self.domain, C64::new(1.0, 0.0));
        for k in 0..count {
            let mut coeffs = next.coeffs().to_vec();
            coeffs.resize(len, ZERO);
            let mut s = Sampled {
                vals: grid.sample(&next),
                coeffs,
            };
            for _ in 0..2 {
                for e in &out {
                    let p = grid.dot(&e.vals, &s.vals);
                    s.axpy(-p, e);
                }
            }
            let nrm = grid.dot(&s.vals, &s.vals).re.sqrt();
            s.scale(C64::new(1.0 / nrm, 0.0));
            if k + 1 < count {
                let f = ChebFun::new(self.domain, s.coeffs[..=k].to_vec());
                next = x.mul(&f).expect("shared domain");
            }
            out.push(s);
        }
        out
    }

    /// Householder triangularization with R having a real nonnegative diagonal.
    pub fn householder_qr(&self) -> Result<QrFactors> {
        self.householder_qr_with_tol(RANK_TOL)
    }

    pub fn householder_qr_with_tol(&self, rank_tol: f64) -> Result<QrFactors> {
        let m = self.ncols();
        if m == 0 {
            return Err(Error::RankCollapse);
        }
        let deg = self.max_degree().max(m - 1);
        let len = deg + 1;
        let grid = self.grid(2 * deg);
        let e = self.templates(m, &grid, len);
        let mut a: Vec<Sampled> = self
            .columns
            .iter()
            .map(|c| {
                let mut coeffs = c.coeffs().to_vec();
                coeffs.resize(len, ZERO);
                Sampled {
                    vals: grid.sample(c),
                    coeffs,
                }
            })
            .collect();
        let mut r = DMatrix::<C64>::zeros(m, m);
        let mut reflectors: Vec<Option<Sampled>> = Vec::with_capacity(m);
        let mut deficient = Vec::new();
        let mut scale = 0.0f64;
        for k in 0..m {
            let mut x = Sampled {
                coeffs: a[k].coeffs.clone(),
                vals: a[k].vals.clone(),
            };
            for i in 0..k {
                r[(i, k)] = grid.dot(&e[i].vals, &x.vals);
                x.axpy(-r[(i, k)], &e[i]);
            }
            // The remainder may be tiny next to the column; make its two
            // representations agree and orthogonalize again at its own scale.
            x.vals = grid.sample(&ChebFun::new(self.domain, x.coeffs.clone()));
            for i in 0..k {
                let c = grid.dot(&e[i].vals, &x.vals);
                x.axpy(-c, &e[i]);
                r[(i, k)] += c;
            }
            let alpha = grid.dot(&x.vals, &x.vals).re.max(0.0).sqrt();
            scale = scale.max(alpha);
            if alpha <= rank_tol * scale || alpha == 0.0 {
                deficient.push(k);
                reflectors.push(None);
                continue;
            }
            let s = grid.dot(&e[k].vals, &x.vals);
            let sgn = if s.norm() == 0.0 { C64::new(1.0, 0.0) } else { s / s.norm() };
            // v = x + sgn alpha e_k maps x to -sgn alpha e_k
            let mut v = x;
            v.axpy(sgn * alpha, &e[k]);
            let vn = grid.dot(&v.vals, &v.vals).re.sqrt();
            v.scale(C64::new(1.0 / vn, 0.0));
            for col in a.iter_mut().skip(k + 1) {
                let p = grid.dot(&v.vals, &col.vals);
                col.axpy(-2.0 * p, &v);
            }
            r[(k, k)] = -sgn * alpha;
            reflectors.push(Some(v));
        }
        let mut q_cols = Vec::with_capacity(m);
        for k in 0..m {
            let mut q = Sampled {
                coeffs: e[k].coeffs.clone(),
                vals: e[k].vals.clone(),
            };
            for v in reflectors[..=k].iter().rev().flatten() {
                let p = grid.dot(&v.vals, &q.vals);
                q.axpy(-2.0 * p, v);
            }
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                let phase = d / d.norm();
                q.scale(phase);
                for j in k..m {
                    r[(k, j)] *= phase.conj();
                }
                r[(k, k)] = C64::new(r[(k, k)].norm(), 0.0);
            }
            q_cols.push(ChebFun::new(self.domain, q.coeffs));
        }
        Ok(QrFactors {
            q: self.with_columns(q_cols)?,
            r,
            deficient,
        })
    }

    /// V = U diag(sigma) W*, sigma descending.
    pub fn svd(&self) -> Result<SvdFactors> {
        let qr = self.householder_qr_with_tol(0.0)?;
        let m = self.ncols();
        let svd = qr.r.clone().svd(true, true);
        let u_r = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v requested");
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        let u_sorted = DMatrix::from_fn(m, m, |i, j| u_r[(i, order[j])]);
        let w = DMatrix::from_fn(m, m, |i, j| v_t[(order[j], i)].conj());
        Ok(SvdFactors {
            u: qr.q.matmul(&u_sorted)?,
            sigma,
            w,
        })
    }

    /// Largest singular value.
    pub fn norm2(&self) -> Result<f64> {
        Ok(self.svd()?.sigma[0])
    }

    /// Keeps the right-singular directions with sigma_i > rel_tol sigma_1 and
    /// returns U Sigma restricted to them.
    pub fn trim_by_rank(&self, rel_tol: f64) -> Result<(Quasimatrix, RankReport)> {
        let svd = self.svd()?;
        let s1 = svd.sigma[0];
        let kept = svd.sigma.iter().filter(|&&s| s > rel_tol * s1).count();
        let dropped = (kept..svd.sigma.len()).collect();
        let m = self.ncols();
        let x = DMatrix::from_fn(m, kept, |i, j| svd.w[(i, j)]);
        let q = if kept == 0 {
            Quasimatrix::empty(self.domain, self.weight.clone())
        } else {
            self.matmul(&x)?
        };
        Ok((
            q,
            RankReport {
                singular_values: svd.sigma,
                kept,
                dropped,
            },
        ))
    }
}
