//! Weighted L2 inner products by Gauss-Legendre quadrature.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chebfun::{ChebFun, Interval};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_rule;

/// Inner-product weight on a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Weight {
    Unit,
    Function { w: ChebFun },
    /// A weight with a kink at `at`, given by a smooth piece on each side.
    Split { at: f64, left: ChebFun, right: ChebFun },
}

/// Quadrature nodes with the weight function folded into the weights.
#[derive(Clone, Debug)]
pub struct QuadGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sample(&self, f: &ChebFun) -> Vec<C64> {
        f.eval_many(&self.nodes)
    }

    /// sum_i W_i conj(u_i) v_i
    pub fn dot(&self, u: &[C64], v: &[C64]) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for ((w, a), b) in self.weights.iter().zip(u).zip(v) {
            s += a.conj() * b * *w;
        }
        s
    }
}

fn gl_points(deg_sum: usize) -> usize {
    deg_sum.div_ceil(2) + 2
}

fn panel(a: f64, b: f64, p: usize, w: Option<&ChebFun>, out: &mut QuadGrid) {
    let (x, wt) = gauss_legendre_rule(p).mapped(a, b);
    for (xi, wi) in x.into_iter().zip(wt) {
        let scale = w.map_or(1.0, |f| f.eval(xi).re);
        out.nodes.push(xi);
        out.weights.push(wi * scale);
    }
}

impl Weight {
    pub fn unit() -> Self {
        Weight::Unit
    }

    pub fn degree(&self) -> usize {
        match self {
            Weight::Unit => 0,
            Weight::Function { w } => w.degree(),
            Weight::Split { left, right, .. } => left.degree().max(right.degree()),
        }
    }

    /// Grid exact for integrands conj(g) h w with deg g + deg h <= `deg_sum`.
    pub fn grid(&self, domain: Interval, deg_sum: usize) -> QuadGrid {
        let mut g = QuadGrid {
            nodes: Vec::new(),
            weights: Vec::new(),
        };
        match self {
            Weight::Unit => panel(domain.a, domain.b, gl_points(deg_sum), None, &mut g),
            Weight::Function { w } => panel(domain.a, domain.b, gl_points(deg_sum + w.degree()), Some(w), &mut g),
            Weight::Split { at, left, right } => {
                panel(domain.a, *at, gl_points(deg_sum + left.degree()), Some(left), &mut g);
                panel(*at, domain.b, gl_points(deg_sum + right.degree()), Some(right), &mut g);
            }
        }
        g
    }

    pub fn check_domain(&self, domain: Interval) -> Result<()> {
        match self {
            Weight::Unit => Ok(()),
            Weight::Function { w } => w.domain().check_same(&domain),
            Weight::Split { at, left, right } => {
                left.domain().check_same(&Interval::new(domain.a, *at))?;
                right.domain().check_same(&Interval::new(*at, domain.b))
            }
        }
    }
}

/// (g, h)_w = integral of conj(g) h w, conjugate-linear in g.
pub fn inner_product(g: &ChebFun, h: &ChebFun, w: &Weight) -> Result<C64> {
    g.domain().check_same(&h.domain())?;
    w.check_domain(g.domain())?;
    let grid = w.grid(g.domain(), g.degree() + h.degree());
    Ok(grid.dot(&grid.sample(g), &grid.sample(h)))
}

pub fn norm(g: &ChebFun, w: &Weight) -> Result<f64> {
    Ok(inner_product(g, g, w)?.re.max(0.0).sqrt())
}

/// |x|^3 on `domain`, split at the origin.
pub fn abs_cubed(domain: Interval) -> Result<Weight> {
    if !(domain.a < 0.0 && domain.b > 0.0) {
        return Err(Error::Invalid("|x|^3 weight needs 0 inside the domain".into()));
    }
    let left = ChebFun::fit_real(|x| -x * x * x, Interval::new(domain.a, 0.0), 1e-15)?;
    let right = ChebFun::fit_real(|x| x * x * x, Interval::new(0.0, domain.b), 1e-15)?;
    Ok(Weight::Split { at: 0.0, left, right })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosh_weighted_one() {
        let dom = Interval::unit();
        let w = Weight::Function {
            w: ChebFun::fit_real(f64::cosh, dom, 1e-15).unwrap(),
        };
        let one = ChebFun::constant(dom, C64::new(1.0, 0.0));
        let v = inner_product(&one, &one, &w).unwrap();
        assert!((v.re - 2.0 * 1f64.sinh()).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn parity_and_norms() {
        let dom = Interval::unit();
        let t0 = ChebFun::basis(dom, 0);
        let t1 = ChebFun::basis(dom, 1);
        assert!(inner_product(&t1, &t0, &Weight::Unit).unwrap().norm() < 1e-16);
        assert!((norm(&t0, &Weight::Unit).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((norm(&t1, &Weight::Unit).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(norm(&ChebFun::zero(dom), &Weight::Unit).unwrap(), 0.0);
    }

    #[test]
    fn sine_has_unit_norm() {
        let dom = Interval::unit();
        let s = ChebFun::fit_real(|x| (std::f64::consts::PI * x).sin(), dom, 1e-15).unwrap();
        assert!((inner_product(&s, &s, &Weight::Unit).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn abs_cubed_integrates_exactly() {
        let dom = Interval::unit();
        let w = abs_cubed(dom).unwrap();
        let one = ChebFun::constant(dom, C64::new(1.0, 0.0));
        let x = ChebFun::identity(dom);
        // integral of |x|^3 = 1/2, of x^2 |x|^3 = 1/3
        assert!((inner_product(&one, &one, &w).unwrap().re - 0.5).abs() < 1e-15);
        assert!((inner_product(&x, &x, &w).unwrap().re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn conjugate_linear_in_first_argument() {
        let dom = Interval::unit();
        let g = ChebFun::fit_real(f64::exp, dom, 1e-15).unwrap();
        let h = ChebFun::fit_real(f64::sin, dom, 1e-15).unwrap();
        let i = C64::new(0.0, 1.0);
        let lhs = inner_product(&g.scale(i), &h, &Weight::Unit).unwrap();
        let rhs = -i * inner_product(&g, &h, &Weight::Unit).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
    }
}
