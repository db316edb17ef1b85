//! Gauss-Legendre rules by Newton iteration on the three-term recurrence.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadKind {
    GaussLegendre,
    ClenshawCurtis,
}

#[derive(Clone, Debug)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: QuadKind,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Polynomial degree integrated exactly on [-1, 1].
    pub fn exactness(&self) -> usize {
        match self.kind {
            QuadKind::GaussLegendre => 2 * self.len() - 1,
            QuadKind::ClenshawCurtis => self.len() - 1,
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Nodes and weights mapped affinely onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let h = 0.5 * (b - a);
        let m = 0.5 * (b + a);
        let x = self.nodes.iter().map(|t| m + h * t).collect();
        let w = self.weights.iter().map(|w| h * w).collect();
        (x, w)
    }
}

/// Returns (P_p(x), P_p'(x)).
fn legendre_with_derivative(p: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=p {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let pf = p as f64;
    let dp = pf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_rule(p: usize) -> QuadRule {
    assert!(p >= 1, "Gauss-Legendre rule needs at least one point");
    if p == 1 {
        return QuadRule {
            nodes: vec![0.0],
            weights: vec![2.0],
            kind: QuadKind::GaussLegendre,
        };
    }
    let pf = p as f64;
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    let half = p.div_ceil(2);
    for i in 0..half {
        // Tricomi-type initial guess for the (i+1)-th largest root
        let theta = PI * (4.0 * i as f64 + 3.0) / (4.0 * pf + 2.0);
        let mut x = (1.0 - (pf - 1.0) / (8.0 * pf * pf * pf)) * theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (v, d) = legendre_with_derivative(p, x);
            dp = d;
            let dx = v / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(p, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[p - 1 - i] = x;
        weights[i] = w;
        weights[p - 1 - i] = w;
    }
    if p % 2 == 1 {
        nodes[p / 2] = 0.0;
    }
    QuadRule {
        nodes,
        weights,
        kind: QuadKind::GaussLegendre,
    }
}

/// p-point Gauss-Legendre rule on [-1, 1], ascending nodes. Cached.
pub fn gauss_legendre_rule(p: usize) -> Arc<QuadRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&p) {
        return rule.clone();
    }
    let rule = Arc::new(compute_rule(p));
    cache.lock().unwrap().entry(p).or_insert(rule).clone()
}

/// Clenshaw-Curtis rule on n+1 Chebyshev extreme points, ascending.
pub fn clenshaw_curtis_rule(n: usize) -> QuadRule {
    assert!(n >= 1);
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let theta = PI * (n - j) as f64 / nf;
        nodes.push(theta.cos());
        let mut s = 0.0;
        for k in 0..=n / 2 {
            let b = if k == 0 || 2 * k == n { 1.0 } else { 2.0 };
            s += b / (1.0 - 4.0 * (k * k) as f64) * (2.0 * k as f64 * theta).cos();
        }
        let c = if j == 0 || j == n { 1.0 } else { 2.0 };
        weights.push(c * s / nf);
    }
    QuadRule {
        nodes,
        weights,
        kind: QuadKind::ClenshawCurtis,
    }
}
