//! Rayleigh quotient iteration on functions.

use log::{debug, warn};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::chebfun::{ChebFun, Interval};
use crate::error::{Error, Result};
use crate::ode::{apply_operator, BoundaryConditions, LinDiffOp, ShiftSolver};
use crate::weight::{inner_product, norm, Weight};

#[derive(Clone, Debug, Serialize)]
pub struct RqiTrace {
    pub shifts: Vec<C64>,
    pub residuals: Vec<f64>,
    pub eigenvalue: C64,
    pub eigenfunction: ChebFun,
    pub converged: bool,
}

impl RqiTrace {
    pub fn iterations(&self) -> usize {
        self.shifts.len()
    }
}

/// (f, L f) / (f, f)
pub fn rayleigh_quotient(op: &LinDiffOp, f: &ChebFun, weight: &Weight) -> Result<C64> {
    let lf = apply_operator(op, f)?;
    let ff = inner_product(f, f, weight)?;
    if ff.re <= 0.0 {
        return Err(Error::Invalid("Rayleigh quotient of the zero function".into()));
    }
    Ok(inner_product(f, &lf, weight)? / ff.re)
}

/// Unit-norm multiple of `g`, phase-aligned with `reference`, and the scale used.
fn normalized(g: &ChebFun, weight: &Weight, reference: Option<&ChebFun>) -> Result<(ChebFun, C64)> {
    let n = norm(g, weight)?;
    if n == 0.0 {
        return Err(Error::Invalid("iterate vanished".into()));
    }
    let mut phase = C64::new(1.0, 0.0);
    if let Some(r) = reference {
        let p = inner_product(g, r, weight)?;
        if p.norm() > 0.0 {
            phase = p / p.norm();
        }
    }
    let s = phase / n;
    Ok((g.scale(s), s))
}

/// Iterates f <- (L - beta I)^{-1} f, beta = (f, L f), until
/// ||L f - beta f|| <= tol |beta|. Stops with `converged = false` after `max_iters` shifts.
///
/// After the first step the residual is taken from the solve itself: if
/// (sigma - L) g = f_prev and f = s g, then (L - beta) f = (sigma - beta) f - s f_prev.
/// This avoids differentiating the coefficient tail of f, which for fourth-order
/// operators would put a floor far above the attainable accuracy.
pub fn rqi_iterate(
    op: &LinDiffOp,
    f0: &ChebFun,
    bcs: &BoundaryConditions,
    weight: &Weight,
    tol: f64,
    max_iters: usize,
) -> Result<RqiTrace> {
    let solver = ShiftSolver::new(op, bcs)?;
    let solve_tol = (tol / 100.0).max(1e-14);
    let (mut f, _) = normalized(f0, weight, None)?;
    let mut trace = RqiTrace {
        shifts: Vec::new(),
        residuals: Vec::new(),
        eigenvalue: C64::new(0.0, 0.0),
        eigenfunction: f.clone(),
        converged: false,
    };
    // (shift used, scale, previous iterate) from the last solve
    let mut last: Option<(C64, C64, ChebFun)> = None;
    for k in 0..max_iters {
        let lf = apply_operator(op, &f)?;
        let beta = inner_product(&f, &lf, weight)?;
        let r = match &last {
            None => norm(&lf.axpy_unchecked(-beta, &f), weight)?,
            Some((sigma, s, prev)) => norm(&f.scale(*sigma - beta).axpy_unchecked(-*s, prev), weight)?,
        };
        debug!("rqi step {k}: shift {beta}, residual {r:.3e}");
        trace.shifts.push(beta);
        trace.residuals.push(r);
        trace.eigenvalue = beta;
        trace.eigenfunction = f.clone();
        if r <= tol * beta.norm() {
            trace.converged = true;
            return Ok(trace);
        }
        let (sigma, g) = match solver.solve(beta, std::slice::from_ref(&f), solve_tol) {
            Ok(mut g) => (beta, g.remove(0)),
            Err(Error::IllConditionedShift { .. }) => {
                let nudged = beta + beta.norm().max(1.0) * 1e-10;
                warn!("shift {beta} sits on an eigenvalue; retrying at {nudged}");
                (nudged, solver.solve(nudged, std::slice::from_ref(&f), solve_tol)?.remove(0))
            }
            Err(e) => return Err(e),
        };
        let (next, s) = normalized(&g, weight, Some(&f))?;
        last = Some((sigma, s, std::mem::replace(&mut f, next)));
    }
    Ok(trace)
}

/// g(beta) = cosh(beta L) cos(beta L) + 1
pub fn cantilever_characteristic(beta: f64, length: f64) -> f64 {
    (beta * length).cosh() * (beta * length).cos() + 1.0
}

/// n-th positive root of the cantilever characteristic function, by bisection on
/// [(n - 3/4) pi / L, (n - 1/4) pi / L].
pub fn cantilever_root(n: usize, length: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Invalid("mode index starts at 1".into()));
    }
    if length <= 0.0 {
        return Err(Error::Invalid("beam length must be positive".into()));
    }
    let pi = std::f64::consts::PI;
    let mut lo = (n as f64 - 0.75) * pi / length;
    let mut hi = (n as f64 - 0.25) * pi / length;
    let glo = cantilever_characteristic(lo, length);
    if glo * cantilever_characteristic(hi, length) > 0.0 {
        return Err(Error::Invalid(format!("no sign change bracketing root {n}")));
    }
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        let gm = cantilever_characteristic(mid, length);
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mode shape of the uniform cantilever on [0, L]:
/// cosh(bx) - cos(bx) - s (sinh(bx) - sin(bx)), s = (cosh bL + cos bL) / (sinh bL + sin bL).
pub fn beam_initial_guess(n: usize, length: f64) -> Result<ChebFun> {
    let b = cantilever_root(n, length)?;
    let bl = b * length;
    let den = bl.sinh() + bl.sin();
    let s = (bl.cosh() + bl.cos()) / den;
    let one_minus_s = (bl.sin() - bl.cos() - (-bl).exp()) / den;
    let w = move |x: f64| {
        let t = b * x;
        // cosh t - s sinh t, rearranged to avoid cancellation for large t
        let hyper = 0.5 * (one_minus_s * t.exp() + (1.0 + s) * (-t).exp());
        hyper - t.cos() + s * t.sin()
    };
    ChebFun::fit_real(w, Interval::new(0.0, length), 1e-13)
}
