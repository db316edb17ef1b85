//! QR by Givens rotations for systems made of a few dense rows on top of a
//! banded block. Each row keeps an explicit window of entries plus a
//! coefficient vector over the original dense rows standing for everything to
//! the right of the window, so fill-in stays bounded.

use num_complex::Complex64 as C64;

use super::ultraspherical::Banded;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

struct Row {
    lo: usize,
    vals: Vec<C64>,
    /// Row equals coef . dense on columns >= hi; empty when there is no tail.
    coef: Vec<C64>,
}

impl Row {
    fn hi(&self) -> usize {
        self.lo + self.vals.len()
    }

    fn tail_at(&self, dense: &[Vec<C64>], j: usize) -> C64 {
        let mut s = ZERO;
        for (c, d) in self.coef.iter().zip(dense) {
            s += c * d[j];
        }
        s
    }

    fn get(&self, dense: &[Vec<C64>], j: usize) -> C64 {
        if j < self.lo {
            ZERO
        } else if j < self.hi() {
            self.vals[j - self.lo]
        } else if self.coef.is_empty() {
            ZERO
        } else {
            self.tail_at(dense, j)
        }
    }

    /// Re-anchors the window at column k; entries left of k are known to be zero.
    fn start_at(&mut self, k: usize) {
        if self.lo < k {
            let drop = (k - self.lo).min(self.vals.len());
            self.vals.drain(..drop);
        } else if self.lo > k {
            let pad = self.lo - k;
            self.vals.splice(0..0, std::iter::repeat_n(ZERO, pad));
        }
        self.lo = k;
    }

    fn extend_to(&mut self, dense: &[Vec<C64>], hi: usize) {
        for j in self.hi()..hi {
            let v = if self.coef.is_empty() { ZERO } else { self.tail_at(dense, j) };
            self.vals.push(v);
        }
    }
}

pub(crate) struct Solution {
    /// One coefficient vector per right-hand side.
    pub columns: Vec<Vec<C64>>,
}

/// Solves [dense; band rows 0..n-d] x = rhs for each right-hand side column.
/// `dense` has d rows of length n; `band` must be at least n x n; `rhs[c]` has length n.
/// Returns None if a zero pivot is met.
pub(crate) fn solve(dense: &[Vec<C64>], band: &Banded, n: usize, rhs: &[Vec<C64>]) -> Option<Solution> {
    let d = dense.len();
    let r = rhs.len();
    let mut rows: Vec<Row> = Vec::with_capacity(n);
    for t in 0..d {
        let mut coef = vec![ZERO; d];
        coef[t] = C64::new(1.0, 0.0);
        rows.push(Row {
            lo: 0,
            vals: Vec::new(),
            coef,
        });
    }
    for i in 0..n - d {
        let (lo, hi) = band.row_range(i);
        let hi = hi.min(n);
        let vals = (lo..hi).map(|j| band.get(i, j)).collect();
        rows.push(Row {
            lo,
            vals,
            coef: Vec::new(),
        });
    }
    // right-hand sides, row-major
    let mut y = vec![ZERO; n * r];
    for (c, col) in rhs.iter().enumerate() {
        for i in 0..n {
            y[i * r + c] = col[i];
        }
    }

    let reach = d + band.lower();
    for k in 0..n {
        let last = (k + reach).min(n - 1);
        for i in k + 1..=last {
            let b = rows[i].get(dense, k);
            if b == ZERO {
                continue;
            }
            let (head, tail) = rows.split_at_mut(i);
            let pk = &mut head[k];
            let pi = &mut tail[0];
            pk.start_at(k);
            pi.start_at(k);
            let hi = pk.hi().max(pi.hi()).max(k + 1);
            pk.extend_to(dense, hi);
            pi.extend_to(dense, hi);
            let a = pk.vals[0];
            let rr = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (ca, cb) = (a.conj() / rr, b.conj() / rr);
            let (sa, sb) = (-b / rr, a / rr);
            for (u, v) in pk.vals.iter_mut().zip(pi.vals.iter_mut()) {
                let (uu, vv) = (*u, *v);
                *u = ca * uu + cb * vv;
                *v = sa * uu + sb * vv;
            }
            pk.vals[0] = C64::new(rr, 0.0);
            pi.vals[0] = ZERO;
            if !pk.coef.is_empty() || !pi.coef.is_empty() {
                if pk.coef.is_empty() {
                    pk.coef = vec![ZERO; d];
                }
                if pi.coef.is_empty() {
                    pi.coef = vec![ZERO; d];
                }
                for (u, v) in pk.coef.iter_mut().zip(pi.coef.iter_mut()) {
                    let (uu, vv) = (*u, *v);
                    *u = ca * uu + cb * vv;
                    *v = sa * uu + sb * vv;
                }
            }
            for c in 0..r {
                let (uu, vv) = (y[k * r + c], y[i * r + c]);
                y[k * r + c] = ca * uu + cb * vv;
                y[i * r + c] = sa * uu + sb * vv;
            }
        }
        let row = &mut rows[k];
        row.start_at(k);
        if row.vals.is_empty() {
            row.extend_to(dense, k + 1);
        }
        if row.vals[0] == ZERO {
            return None;
        }
    }

    // back substitution with running suffix sums dense . x
    let mut columns = Vec::with_capacity(r);
    for c in 0..r {
        let mut x = vec![ZERO; n];
        let mut suffix = vec![vec![ZERO; d]; n + 1];
        for k in (0..n).rev() {
            let row = &rows[k];
            let mut s = y[k * r + c];
            for (off, v) in row.vals.iter().enumerate().skip(1) {
                s -= v * x[k + off];
            }
            let hi = row.hi();
            if !row.coef.is_empty() && hi < n {
                for (cf, sf) in row.coef.iter().zip(&suffix[hi]) {
                    s -= cf * sf;
                }
            }
            x[k] = s / row.vals[0];
            let (lower, upper) = suffix.split_at_mut(k + 1);
            for t in 0..d {
                lower[k][t] = upper[0][t] + dense[t][k] * x[k];
            }
        }
        columns.push(x);
    }
    Some(Solution { columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn matches_dense_lu() {
        let n = 12;
        let d = 2;
        let dense: Vec<Vec<C64>> = (0..d)
            .map(|t| (0..n).map(|j| C64::new(1.0 + (t * j) as f64 * 0.3, 0.1 * t as f64)).collect())
            .collect();
        let mut band = Banded::zeros(n, 2, 3);
        for i in 0..n {
            let (lo, hi) = band.row_range(i);
            for j in lo..hi {
                band.set(i, j, C64::new(((i + 2 * j) % 5) as f64 - 1.5 + if i == j { 4.0 } else { 0.0 }, 0.2 * (i as f64 - j as f64)));
            }
        }
        let mut full = DMatrix::<C64>::zeros(n, n);
        for t in 0..d {
            for j in 0..n {
                full[(t, j)] = dense[t][j];
            }
        }
        for i in 0..n - d {
            for j in 0..n {
                full[(i + d, j)] = band.get(i, j);
            }
        }
        let rhs: Vec<C64> = (0..n).map(|i| C64::new(i as f64 - 3.0, 1.0)).collect();
        let sol = solve(&dense, &band, n, std::slice::from_ref(&rhs)).unwrap();
        let want = full.clone().lu().solve(&DVector::from_vec(rhs)).unwrap();
        for i in 0..n {
            assert!((sol.columns[0][i] - want[i]).norm() < 1e-11, "{i}");
        }
    }

    #[test]
    fn singular_pivot_detected() {
        let n = 3;
        let dense = vec![vec![c(0.0), c(0.0), c(0.0)]];
        let band = Banded::identity(n);
        // first column is entirely zero
        let mut b2 = Banded::zeros(n, 0, 1);
        for i in 0..n - 1 {
            b2.set(i, i + 1, c(1.0));
        }
        assert!(solve(&dense, &b2, n, &[vec![c(1.0); n]]).is_none());
        let _ = band;
    }
}
