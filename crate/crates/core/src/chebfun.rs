//! Chebyshev series on an interval, constructed adaptively from samples.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for adaptive construction.
pub const DEFAULT_TOL: f64 = 1e-14;
/// Largest number of sample points tried by [`ChebFun::fit`].
pub const MAX_FIT_POINTS: usize = 1 << 17;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        assert!(a < b, "interval [{a}, {b}] is empty");
        Interval { a, b }
    }

    pub fn unit() -> Self {
        Interval { a: -1.0, b: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// d/dx = scale * d/dt for the affine map onto [-1, 1].
    pub fn scale(&self) -> f64 {
        2.0 / (self.b - self.a)
    }

    pub fn to_ref(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    pub fn from_ref(&self, t: f64) -> f64 {
        0.5 * (self.a + self.b) + 0.5 * (self.b - self.a) * t
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-14 * self.length().max(self.a.abs()).max(self.b.abs());
        x >= self.a - slack && x <= self.b + slack
    }

    pub(crate) fn check_same(&self, other: &Interval) -> Result<()> {
        let tol = 1e-14 * self.length();
        if (self.a - other.a).abs() > tol || (self.b - other.b).abs() > tol {
            return Err(Error::DomainMismatch((self.a, self.b), (other.a, other.b)));
        }
        Ok(())
    }
}

/// A function represented by complex Chebyshev-T coefficients on `domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ChebFunRecord", try_from = "ChebFunRecord")]
pub struct ChebFun {
    domain: Interval,
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct ChebFunRecord {
    domain: [f64; 2],
    coeffs_re: Vec<f64>,
    coeffs_im: Vec<f64>,
}

impl From<ChebFun> for ChebFunRecord {
    fn from(f: ChebFun) -> Self {
        ChebFunRecord {
            domain: [f.domain.a, f.domain.b],
            coeffs_re: f.coeffs.iter().map(|c| c.re).collect(),
            coeffs_im: f.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

impl TryFrom<ChebFunRecord> for ChebFun {
    type Error = String;

    fn try_from(r: ChebFunRecord) -> std::result::Result<Self, String> {
        if r.coeffs_re.len() != r.coeffs_im.len() {
            return Err("coeffs_re and coeffs_im differ in length".into());
        }
        if r.domain[0].partial_cmp(&r.domain[1]) != Some(std::cmp::Ordering::Less) {
            return Err(format!("bad domain {:?}", r.domain));
        }
        let coeffs = r.coeffs_re.iter().zip(&r.coeffs_im).map(|(&re, &im)| C64::new(re, im)).collect();
        Ok(ChebFun::new(Interval::new(r.domain[0], r.domain[1]), coeffs))
    }
}

/// Chebyshev coefficients from samples at the n+1 points cos(pi j / n), j = 0..n.
pub fn values_to_coeffs(values: &[C64]) -> Vec<C64> {
    let n = values.len() - 1;
    if n == 0 {
        return vec![values[0]];
    }
    let mut buf: Vec<C64> = Vec::with_capacity(2 * n);
    buf.extend_from_slice(values);
    buf.extend(values[1..n].iter().rev());
    let fft = FftPlanner::new().plan_fft_forward(2 * n);
    fft.process(&mut buf);
    let nf = n as f64;
    let mut c: Vec<C64> = buf[..=n].iter().map(|v| v / nf).collect();
    c[0] *= 0.5;
    c[n] *= 0.5;
    c
}

/// The n+1 Chebyshev extreme points cos(pi j / n) on [-1, 1], descending.
pub fn cheb_points(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect()
}

fn tail_len(len: usize) -> usize {
    3.max((0.05 * len as f64).ceil() as usize).min(len)
}

/// True when the trailing max(3, 5%) block is below `tol` relative to the largest coefficient.
pub fn tail_is_small(coeffs: &[C64], tol: f64) -> bool {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return true;
    }
    let t = tail_len(coeffs.len());
    coeffs[coeffs.len() - t..].iter().all(|c| c.norm() <= tol * scale)
}

/// Removes trailing coefficients at or below `tol` relative to the largest; keeps at least one.
pub fn chop(coeffs: &mut Vec<C64>, tol: f64) {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let cut = tol * scale;
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= cut {
        coeffs.pop();
    }
}

impl ChebFun {
    pub fn new(domain: Interval, mut coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        ChebFun { domain, coeffs }
    }

    pub fn from_real(domain: Interval, coeffs: &[f64]) -> Self {
        Self::new(domain, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero(domain: Interval) -> Self {
        Self::new(domain, vec![C64::new(0.0, 0.0)])
    }

    pub fn constant(domain: Interval, v: C64) -> Self {
        Self::new(domain, vec![v])
    }

    /// The identity function x on `domain`.
    pub fn identity(domain: Interval) -> Self {
        let m = 0.5 * (domain.a + domain.b);
        let h = 0.5 * domain.length();
        Self::from_real(domain, &[m, h])
    }

    /// The Chebyshev polynomial T_k of the mapped variable.
    pub fn basis(domain: Interval, k: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); k + 1];
        c[k] = C64::new(1.0, 0.0);
        Self::new(domain, c)
    }

    /// Adaptive construction with the default point cap.
    pub fn fit<F: Fn(f64) -> C64>(f: F, domain: Interval, tol: f64) -> Result<Self> {
        Self::fit_capped(f, domain, tol, MAX_FIT_POINTS)
    }

    pub fn fit_real<F: Fn(f64) -> f64>(f: F, domain: Interval, tol: f64) -> Result<Self> {
        Self::fit(|x| C64::new(f(x), 0.0), domain, tol)
    }

    pub fn fit_capped<F: Fn(f64) -> C64>(f: F, domain: Interval, tol: f64, cap: usize) -> Result<Self> {
        assert!(tol > 0.0);
        let mut n = 16usize;
        let sample = |n: usize, j: usize| {
            let t = (PI * j as f64 / n as f64).cos();
            f(domain.from_ref(t))
        };
        let mut values: Vec<C64> = (0..=n).map(|j| sample(n, j)).collect();
        loop {
            if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::Resolution { cap: n + 1 });
            }
            let mut coeffs = values_to_coeffs(&values);
            if tail_is_small(&coeffs, tol) {
                chop(&mut coeffs, tol);
                return Ok(Self::new(domain, coeffs));
            }
            if 2 * n + 1 > cap {
                return Err(Error::Resolution { cap });
            }
            let m = 2 * n;
            let mut next = Vec::with_capacity(m + 1);
            for j in 0..=m {
                if j % 2 == 0 {
                    next.push(values[j / 2]);
                } else {
                    next.push(sample(m, j));
                }
            }
            values = next;
            n = m;
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_real(&self) -> bool {
        let scale = self.max_coeff();
        self.coeffs.iter().all(|c| c.im.abs() <= 1e-15 * scale)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Value at x, rejecting points outside the domain.
    pub fn evaluate(&self, x: f64) -> Result<C64> {
        if !self.domain.contains(x) {
            return Err(Error::Domain {
                x,
                a: self.domain.a,
                b: self.domain.b,
            });
        }
        Ok(self.eval_ref(self.domain.to_ref(x).clamp(-1.0, 1.0)))
    }

    /// Value at x without the domain check.
    pub fn eval(&self, x: f64) -> C64 {
        self.eval_ref(self.domain.to_ref(x))
    }

    /// Clenshaw recurrence at reference coordinate t in [-1, 1].
    pub fn eval_ref(&self, t: f64) -> C64 {
        let mut b1 = C64::new(0.0, 0.0);
        let mut b2 = C64::new(0.0, 0.0);
        for c in self.coeffs[1..].iter().rev() {
            let b0 = c + b1 * (2.0 * t) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + b1 * t - b2
    }

    pub fn eval_many(&self, xs: &[f64]) -> Vec<C64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len() - 1;
        if n == 0 {
            return Self::zero(self.domain);
        }
        let mut d = vec![C64::new(0.0, 0.0); n + 1];
        for k in (1..=n).rev() {
            d[k - 1] = d.get(k + 1).copied().unwrap_or_default() + self.coeffs[k] * (2.0 * k as f64);
        }
        d[0] *= 0.5;
        d.truncate(n);
        let s = self.domain.scale();
        for c in d.iter_mut() {
            *c *= s;
        }
        Self::new(self.domain, d)
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        let mut g = self.clone();
        for _ in 0..k {
            g = g.derivative();
        }
        g
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.domain.check_same(&other.domain)?;
        Ok(self.axpy_unchecked(C64::new(1.0, 0.0), other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.domain.check_same(&other.domain)?;
        Ok(self.axpy_unchecked(C64::new(-1.0, 0.0), other))
    }

    /// self + alpha * other
    pub(crate) fn axpy_unchecked(&self, alpha: C64, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        for (k, v) in self.coeffs.iter().enumerate() {
            c[k] += v;
        }
        for (k, v) in other.coeffs.iter().enumerate() {
            c[k] += alpha * v;
        }
        Self::new(self.domain, c)
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self::new(self.domain, self.coeffs.iter().map(|c| c * alpha).collect())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.domain, self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn real_part(&self) -> Self {
        Self::new(self.domain, self.coeffs.iter().map(|c| C64::new(c.re, 0.0)).collect())
    }

    /// Product by the linearization T_j T_k = (T_{j+k} + T_{|j-k|}) / 2.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.domain.check_same(&other.domain)?;
        let (a, b) = (&self.coeffs, &other.coeffs);
        let mut c = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (j, &aj) in a.iter().enumerate() {
            if aj == C64::new(0.0, 0.0) {
                continue;
            }
            let h = aj * 0.5;
            for (k, &bk) in b.iter().enumerate() {
                let p = h * bk;
                c[j + k] += p;
                c[j.abs_diff(k)] += p;
            }
        }
        Ok(Self::new(self.domain, c))
    }

    /// Drops trailing coefficients at or below `tol` relative to the largest.
    pub fn trimmed(mut self, tol: f64) -> Self {
        chop(&mut self.coeffs, tol);
        self
    }

    /// Pads or truncates to exactly `len` coefficients.
    pub fn resized(mut self, len: usize) -> Self {
        self.coeffs.resize(len.max(1), C64::new(0.0, 0.0));
        self
    }

    /// Definite integral over the domain, in coefficient space.
    pub fn integral(&self) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().step_by(2) {
            s += c * (2.0 / (1.0 - (k * k) as f64));
        }
        s * (0.5 * self.domain.length())
    }

    /// Relative size of the trailing max(3, 5%) coefficient block.
    pub fn tail_ratio(&self) -> f64 {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let t = tail_len(self.coeffs.len());
        self.coeffs[self.coeffs.len() - t..].iter().map(|c| c.norm()).fold(0.0, f64::max) / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn fit_square_gives_half_half() {
        let f = ChebFun::fit_real(|x| x * x, Interval::unit(), 1e-14).unwrap();
        assert_eq!(f.len(), 3);
        assert!((f.coeffs()[0] - c(0.5)).norm() < 1e-15);
        assert!(f.coeffs()[1].norm() < 1e-15);
        assert!((f.coeffs()[2] - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn fit_reproduces_t5() {
        let f = ChebFun::fit_real(|x| (5.0 * x.acos()).cos(), Interval::unit(), 1e-14).unwrap();
        assert_eq!(f.degree(), 5);
        assert!((f.coeffs()[5] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn clenshaw_basics() {
        let t3 = ChebFun::basis(Interval::unit(), 3);
        assert!((t3.evaluate(1.0).unwrap() - c(1.0)).norm() < 1e-15);
        let sq = ChebFun::from_real(Interval::unit(), &[0.5, 0.0, 0.5]);
        assert!((sq.evaluate(0.5).unwrap() - c(0.25)).norm() < 1e-15);
        assert!(matches!(sq.evaluate(1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn derivative_and_product_of_basis() {
        let d = ChebFun::basis(Interval::unit(), 2).derivative();
        assert_eq!(d.coeffs(), &[c(0.0), c(4.0)]);
        let t1 = ChebFun::basis(Interval::unit(), 1);
        let p = t1.mul(&t1).unwrap();
        assert_eq!(p.coeffs(), &[c(0.5), c(0.0), c(0.5)]);
    }

    #[test]
    fn derivative_respects_interval_scaling() {
        let dom = Interval::new(0.0, 3.0);
        let f = ChebFun::fit_real(|x| x * x * x, dom, 1e-14).unwrap();
        let d = f.derivative();
        assert!((d.eval(2.0) - c(12.0)).norm() < 1e-12);
    }

    #[test]
    fn mismatched_domains_rejected() {
        let f = ChebFun::identity(Interval::unit());
        let g = ChebFun::identity(Interval::new(0.0, 1.0));
        assert!(matches!(f.add(&g), Err(Error::DomainMismatch(..))));
        assert!(f.mul(&g).is_err());
    }

    #[test]
    fn integral_of_cosh() {
        let f = ChebFun::fit_real(f64::cosh, Interval::unit(), 1e-15).unwrap();
        assert!((f.integral() - c(2.0 * 1f64.sinh())).norm() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let f = ChebFun::new(Interval::new(0.0, 2.0), vec![C64::new(1.0, -2.0), C64::new(0.25, 0.5)]);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("coeffs_re"));
        let g: ChebFun = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn nonconvergent_fit_names_cap() {
        let err = ChebFun::fit_capped(|x| C64::new(x.abs().sqrt(), 0.0), Interval::unit(), 1e-14, 1025).unwrap_err();
        assert!(matches!(err, Error::Resolution { cap: 1025 }), "{err}");
    }
}
