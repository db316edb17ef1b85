//! Banded differentiation, conversion and multiplication operators acting on
//! Chebyshev-T and ultraspherical C^(lambda) coefficient vectors.

use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Square banded matrix, stored row-major by diagonal offset.
#[derive(Clone, Debug)]
pub struct Banded {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<C64>,
}

impl Banded {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Banded {
            n,
            lower,
            upper,
            data: vec![ZERO; n * (lower + upper + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.lower >= i && j <= i + self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + j + self.lower - i]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let w = self.width();
        self.data[i * w + j + self.lower - i] = v;
    }

    fn add_at(&mut self, i: usize, j: usize, v: C64) {
        let w = self.width();
        self.data[i * w + j + self.lower - i] += v;
    }

    /// Column range of row i inside the band.
    pub fn row_range(&self, i: usize) -> (usize, usize) {
        (i.saturating_sub(self.lower), (i + self.upper + 1).min(self.n))
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut m = self.clone();
        for v in m.data.iter_mut() {
            *v *= s;
        }
        m
    }

    /// alpha * self + beta * other
    pub fn combine(&self, alpha: C64, other: &Banded, beta: C64) -> Self {
        assert_eq!(self.n, other.n);
        let mut m = Self::zeros(self.n, self.lower.max(other.lower), self.upper.max(other.upper));
        for src in [(self, alpha), (other, beta)] {
            let (a, s) = src;
            if s == ZERO {
                continue;
            }
            for i in 0..a.n {
                let (lo, hi) = a.row_range(i);
                for j in lo..hi {
                    let v = a.get(i, j);
                    if v != ZERO {
                        m.add_at(i, j, s * v);
                    }
                }
            }
        }
        m
    }

    pub fn matmul(&self, other: &Banded) -> Self {
        assert_eq!(self.n, other.n);
        let mut m = Self::zeros(self.n, self.lower + other.lower, self.upper + other.upper);
        for i in 0..self.n {
            let (lo, hi) = self.row_range(i);
            for k in lo..hi {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                let (lo2, hi2) = other.row_range(k);
                for j in lo2..hi2 {
                    let b = other.get(k, j);
                    if b != ZERO {
                        m.add_at(i, j, a * b);
                    }
                }
            }
        }
        m
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = self.row_range(i);
            for (j, xj) in x.iter().enumerate().take(hi).skip(lo) {
                *yi += self.get(i, j) * xj;
            }
        }
        y
    }
}

/// Differentiation of order `lambda` from T coefficients to C^(lambda) coefficients.
pub fn differentiation(n: usize, lambda: usize) -> Banded {
    if lambda == 0 {
        return Banded::identity(n);
    }
    let mut fact = 1.0;
    for j in 1..lambda {
        fact *= j as f64;
    }
    let c = 2f64.powi(lambda as i32 - 1) * fact;
    let mut m = Banded::zeros(n, 0, lambda);
    for k in lambda..n {
        m.set(k - lambda, k, C64::new(c * k as f64, 0.0));
    }
    m
}

/// Conversion from C^(lambda) to C^(lambda+1), with C^(0) meaning Chebyshev T.
pub fn conversion(n: usize, lambda: usize) -> Banded {
    let mut m = Banded::zeros(n, 0, 2);
    let l = lambda as f64;
    for k in 0..n {
        let (d, off) = if lambda == 0 {
            if k == 0 {
                (1.0, 0.0)
            } else {
                (0.5, -0.5)
            }
        } else {
            let kf = k as f64;
            (l / (kf + l), -l / (kf + l))
        };
        m.set(k, k, C64::new(d, 0.0));
        if k >= 2 {
            m.set(k - 2, k, C64::new(off, 0.0));
        }
    }
    m
}

/// Conversion chain S_{to-1} ... S_{from}.
pub fn conversion_chain(n: usize, from: usize, to: usize) -> Banded {
    let mut m = Banded::identity(n);
    for lam in from..to {
        m = conversion(n, lam).matmul(&m);
    }
    m
}

/// Multiplication by x in C^(lambda) coefficients.
pub fn jacobi(n: usize, lambda: usize) -> Banded {
    let mut m = Banded::zeros(n, 1, 1);
    let l = lambda as f64;
    for k in 0..n {
        let kf = k as f64;
        if k + 1 < n {
            let v = if lambda == 0 {
                if k == 0 {
                    1.0
                } else {
                    0.5
                }
            } else {
                (kf + 1.0) / (2.0 * (kf + l))
            };
            m.set(k + 1, k, C64::new(v, 0.0));
        }
        if k >= 1 {
            let v = if lambda == 0 { 0.5 } else { (kf + 2.0 * l - 1.0) / (2.0 * (kf + l)) };
            m.set(k - 1, k, C64::new(v, 0.0));
        }
    }
    m
}

/// Multiplication by sum_k a_k T_k(x) in C^(lambda) coefficients, by matrix Clenshaw.
/// Entries are exact in the leading (n - deg a) block.
pub fn multiplication(n: usize, lambda: usize, a: &[C64]) -> Banded {
    let x = jacobi(n, lambda);
    let eye = Banded::identity(n);
    let m = a.len();
    if m == 1 {
        return eye.scaled(a[0]);
    }
    let mut b1 = Banded::zeros(n, 0, 0);
    let mut b2 = Banded::zeros(n, 0, 0);
    let two = C64::new(2.0, 0.0);
    let one = C64::new(1.0, 0.0);
    for k in (1..m).rev() {
        let b0 = x.matmul(&b1).combine(two, &b2, -one).combine(one, &eye, a[k]);
        b2 = b1;
        b1 = b0;
    }
    // a_0 + x b_1 - b_2
    x.matmul(&b1).combine(one, &b2, -one).combine(one, &eye, a[0])
}

/// u^(d)(+-1) for each T_k, k < n, scaled by `scale^d`.
pub fn boundary_row(n: usize, right: bool, d: usize, scale: f64) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let kf = k as f64;
            let mut v = 1.0;
            for j in 0..d {
                let jf = j as f64;
                v *= (kf * kf - jf * jf) / (2.0 * jf + 1.0);
            }
            if !right && (k + d) % 2 == 1 {
                v = -v;
            }
            C64::new(v * scale.powi(d as i32), 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebfun::{ChebFun, Interval};

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn conversion_of_t_coefficients_preserves_values() {
        // T_3 = (U_3 - U_1)/2
        let s = conversion(6, 0);
        let y = s.matvec(&[c(0.0), c(0.0), c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!(y[1], c(-0.5));
        assert_eq!(y[3], c(0.5));
    }

    #[test]
    fn first_derivative_in_u_basis() {
        // d/dx T_k = k U_{k-1}
        let d = differentiation(5, 1);
        assert_eq!(d.get(2, 3), c(3.0));
    }

    #[test]
    fn multiplication_matches_product_in_t_basis() {
        let dom = Interval::unit();
        let a = ChebFun::fit_real(|x| (x * 0.7).exp(), dom, 1e-15).unwrap();
        let u = ChebFun::fit_real(|x| (3.0 * x).sin(), dom, 1e-15).unwrap();
        let prod = a.mul(&u).unwrap();
        let n = 48;
        let mut uc = u.coeffs().to_vec();
        uc.resize(n, c(0.0));
        let mult = multiplication(n, 0, a.coeffs());
        let got = mult.matvec(&uc);
        for (k, g) in got.iter().take(20).enumerate() {
            let want = prod.coeffs().get(k).copied().unwrap_or_default();
            assert!((g - want).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn multiplication_commutes_with_conversion() {
        let dom = Interval::unit();
        let a = ChebFun::fit_real(f64::cosh, dom, 1e-15).unwrap();
        let n = 60;
        let left = multiplication(n, 2, a.coeffs()).matmul(&conversion_chain(n, 0, 2));
        let right = conversion_chain(n, 0, 2).matmul(&multiplication(n, 0, a.coeffs()));
        for i in 0..30 {
            for j in 0..30 {
                assert!((left.get(i, j) - right.get(i, j)).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn boundary_row_values() {
        let r = boundary_row(5, true, 1, 1.0);
        assert_eq!(r, vec![c(0.0), c(1.0), c(4.0), c(9.0), c(16.0)]);
        let l = boundary_row(4, false, 0, 1.0);
        assert_eq!(l, vec![c(1.0), c(-1.0), c(1.0), c(-1.0)]);
    }
}
