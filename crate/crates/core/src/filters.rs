//! Rational filters s(z) = sum_k c_k / (z_k - z) from contour quadrature, and
//! their application to quasimatrices through shifted solves.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebfun::ChebFun;
use crate::error::{Error, Result};
use crate::ode::ShiftSolver;
use crate::quadrature::gauss_legendre_rule;
use crate::quasimatrix::Quasimatrix;

pub const DEFAULT_DISK_ELL: usize = 16;
pub const DEFAULT_HALFPLANE_ELL: usize = 40;
/// Distance below which an evaluation point counts as sitting on a pole.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FilterKind {
    Disk { center: C64, radius: f64 },
    HalfPlane { a: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalFilter {
    pub poles: Vec<C64>,
    pub residues: Vec<C64>,
    pub kind: FilterKind,
}

/// Filter description as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FilterSpec {
    Disk {
        center: [f64; 2],
        radius: f64,
        #[serde(default = "default_disk_ell")]
        ell: usize,
    },
    Halfplane {
        a: f64,
        #[serde(default = "default_halfplane_ell")]
        ell: usize,
    },
}

fn default_disk_ell() -> usize {
    DEFAULT_DISK_ELL
}

fn default_halfplane_ell() -> usize {
    DEFAULT_HALFPLANE_ELL
}

impl FilterSpec {
    pub fn build(&self) -> Result<RationalFilter> {
        match *self {
            FilterSpec::Disk { center, radius, ell } => disk_filter(C64::new(center[0], center[1]), radius, ell),
            FilterSpec::Halfplane { a, ell } => halfplane_filter(a, ell),
        }
    }

    pub fn ell(&self) -> usize {
        match *self {
            FilterSpec::Disk { ell, .. } | FilterSpec::Halfplane { ell, .. } => ell,
        }
    }

    pub fn with_ell(&self, new_ell: usize) -> Self {
        let mut s = self.clone();
        match &mut s {
            FilterSpec::Disk { ell, .. } | FilterSpec::Halfplane { ell, .. } => *ell = new_ell,
        }
        s
    }
}

/// Trapezoid rule on the circle |z - center| = radius with nodes at angles 2 pi k / ell.
pub fn disk_filter(center: C64, radius: f64, ell: usize) -> Result<RationalFilter> {
    if ell < 2 {
        return Err(Error::Invalid(format!("disk filter needs ell >= 2, got {ell}")));
    }
    if radius <= 0.0 || !radius.is_finite() {
        return Err(Error::Invalid(format!("disk radius must be positive, got {radius}")));
    }
    let mut poles = Vec::with_capacity(ell);
    let mut residues = Vec::with_capacity(ell);
    for k in 0..ell {
        let e = C64::from_polar(radius, 2.0 * PI * k as f64 / ell as f64);
        poles.push(center + e);
        residues.push(e / ell as f64);
    }
    Ok(RationalFilter {
        poles,
        residues,
        kind: FilterKind::Disk { center, radius },
    })
}

/// Gauss-Legendre rule on the imaginary axis mapped to [-1, 1] by x = (2/pi) atan(y),
/// approximating 1/(lambda + a) on the right half-plane and 0 on the left.
pub fn halfplane_filter(a: f64, ell: usize) -> Result<RationalFilter> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::Invalid(format!("half-plane parameter a must be positive, got {a}")));
    }
    if ell < 4 {
        return Err(Error::Invalid(format!("half-plane filter needs ell >= 4, got {ell}")));
    }
    let rule = gauss_legendre_rule(ell);
    let mut poles = Vec::with_capacity(ell);
    let mut residues = Vec::with_capacity(ell);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let z = C64::new(0.0, (0.5 * PI * x).tan());
        poles.push(z);
        // the half-disk boundary runs down the imaginary axis, hence the minus sign
        residues.push(-0.25 * w * (1.0 - z * z) / (z + a));
    }
    Ok(RationalFilter {
        poles,
        residues,
        kind: FilterKind::HalfPlane { a },
    })
}

impl RationalFilter {
    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// s(lambda) = sum_k c_k / (z_k - lambda)
    pub fn value(&self, lambda: C64) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (k, (&z, &c)) in self.poles.iter().zip(&self.residues).enumerate() {
            let d = z - lambda;
            if d.norm() <= POLE_TOL * z.norm().max(1.0) {
                return Err(Error::PoleProximity { pole: k, distance: d.norm() });
            }
            s += c / d;
        }
        Ok(s)
    }

    /// Whether lambda belongs to the search region.
    pub fn contains(&self, lambda: C64) -> bool {
        match self.kind {
            FilterKind::Disk { center, radius } => (lambda - center).norm() < radius * (1.0 - 1e-8),
            FilterKind::HalfPlane { .. } => lambda.re > 0.0,
        }
    }

    /// For each node, the index of its conjugate partner, if the filter has one.
    pub fn conjugate_partners(&self) -> Option<Vec<usize>> {
        let scale = self.poles.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut partner = Vec::with_capacity(self.len());
        for (&z, &c) in self.poles.iter().zip(&self.residues) {
            let j = self.poles.iter().zip(&self.residues).position(|(&w, &d)| {
                (w - z.conj()).norm() <= 1e-13 * scale && (d - c.conj()).norm() <= 1e-13 * c.norm().max(1e-300)
            })?;
            partner.push(j);
        }
        Some(partner)
    }
}

/// Sum_k c_k G_k with G_k solving the shifted problem at node z_k for each column of `f`.
/// Node solves run in parallel; the sum is accumulated in ascending node order.
pub fn apply_filter(filter: &RationalFilter, solver: &ShiftSolver, f: &Quasimatrix, tol: f64) -> Result<Quasimatrix> {
    let rhs = solver.prepare_rhs(f.columns())?;
    let partners = if solver.is_real() && f.is_real() {
        filter.conjugate_partners()
    } else {
        None
    };
    // nodes to solve at, and whether each contributes twice its real part
    let mut jobs: Vec<(usize, bool)> = Vec::new();
    for k in 0..filter.len() {
        match &partners {
            Some(p) if p[k] == k => jobs.push((k, false)),
            Some(p) if p[k] > k => jobs.push((k, true)),
            Some(_) => {}
            None => jobs.push((k, false)),
        }
    }
    let solves: Vec<Result<Vec<ChebFun>>> = jobs
        .par_iter()
        .map(|&(k, _)| solver.solve_prepared(filter.poles[k], &rhs, tol).map_err(|e| e.at_node(k)))
        .collect();
    let mut acc: Vec<ChebFun> = vec![ChebFun::zero(f.domain()); f.ncols()];
    for (&(k, doubled), sol) in jobs.iter().zip(solves) {
        let sol = sol?;
        let c = filter.residues[k];
        for (a, g) in acc.iter_mut().zip(&sol) {
            let term = g.scale(c);
            let term = if doubled {
                term.real_part().scale(C64::new(2.0, 0.0))
            } else {
                term
            };
            *a = a.axpy_unchecked(C64::new(1.0, 0.0), &term);
        }
    }
    f.with_columns(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_center_value_is_one() {
        let f = disk_filter(C64::new(2.5, 0.0), 2.0, 16).unwrap();
        assert!((f.value(C64::new(2.5, 0.0)).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn disk_matches_closed_form() {
        let c = C64::new(1.0, 0.5);
        let r = 0.7;
        let ell = 12;
        let f = disk_filter(c, r, ell).unwrap();
        for lam in [C64::new(0.3, 0.1), C64::new(2.0, -1.0), C64::new(1.2, 0.9)] {
            let w = (lam - c) / r;
            let want = 1.0 / (1.0 - w.powu(ell as u32));
            assert!((f.value(lam).unwrap() - want).norm() < 1e-13);
        }
    }

    #[test]
    fn halfplane_poles_are_imaginary_and_paired() {
        let f = halfplane_filter(1.0, 40).unwrap();
        assert!(f.poles.iter().all(|z| z.re == 0.0));
        let p = f.conjugate_partners().unwrap();
        for (k, &j) in p.iter().enumerate() {
            assert_eq!(p[j], k);
        }
    }

    #[test]
    fn pole_proximity_is_an_error() {
        let f = disk_filter(C64::new(0.0, 0.0), 1.0, 8).unwrap();
        let err = f.value(f.poles[3] + 1e-14).unwrap_err();
        assert!(matches!(err, Error::PoleProximity { pole: 3, .. }));
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(disk_filter(C64::new(0.0, 0.0), -1.0, 8).is_err());
        assert!(disk_filter(C64::new(0.0, 0.0), 1.0, 1).is_err());
        assert!(halfplane_filter(0.0, 40).is_err());
        assert!(halfplane_filter(1.0, 3).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let s: FilterSpec = serde_json::from_str(r#"{"kind":"disk","center":[2.5,0],"radius":2}"#).unwrap();
        assert_eq!(s.ell(), DEFAULT_DISK_ELL);
        let h: FilterSpec = serde_json::from_str(r#"{"kind":"halfplane","a":1}"#).unwrap();
        assert_eq!(h.ell(), DEFAULT_HALFPLANE_ELL);
        assert_eq!(serde_json::from_str::<FilterSpec>(&serde_json::to_string(&h).unwrap()).unwrap(), h);
    }
}
