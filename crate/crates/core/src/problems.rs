//! Benchmark eigenproblems with their reference data.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chebfun::{ChebFun, Interval};
use crate::eigensolver::{EigenProblem, Operator};
use crate::error::{Error, Result};
use crate::filters::{FilterSpec, DEFAULT_DISK_ELL, DEFAULT_HALFPLANE_ELL};
use crate::ode::{BoundaryCondition, BoundaryConditions, End, LinDiffOp};
use crate::quadrature::gauss_legendre_rule;
use crate::weight::{abs_cubed, Weight};

pub const NAMES: [&str; 6] = [
    "oscillator",
    "regular-slep",
    "indefinite-slep",
    "beam",
    "halfplane-synthetic",
    "thin-film",
];

/// Where the reference eigenvalues of a problem come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Reference {
    ClosedForm { formula: String },
    Asymptotic { formula: String },
    Literature { values: Vec<f64>, note: String },
    None { note: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: String,
    pub description: String,
    pub problem: EigenProblem,
    pub reference: Reference,
    #[serde(default)]
    pub experimental: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlepKind {
    Regular,
    Indefinite,
}

fn cheb(domain: Interval, f: impl Fn(f64) -> f64) -> Result<ChebFun> {
    ChebFun::fit_real(f, domain, 1e-15)
}

fn constant(domain: Interval, v: f64) -> ChebFun {
    ChebFun::constant(domain, C64::new(v, 0.0))
}

/// -u'' = lambda u on [-1, 1], u(+-1) = 0.
pub fn oscillator() -> Result<ProblemSpec> {
    let dom = Interval::unit();
    Ok(ProblemSpec {
        name: "oscillator".into(),
        description: "-u'' = lambda u on [-1, 1] with Dirichlet conditions".into(),
        problem: EigenProblem {
            operator: Operator::Standard {
                op: LinDiffOp::constant(dom, &[0.0, 0.0, -1.0])?,
            },
            bcs: BoundaryConditions::dirichlet(),
            weight: Weight::Unit,
            self_adjoint: true,
        },
        reference: Reference::ClosedForm {
            formula: "lambda_k = (k pi / 2)^2".into(),
        },
        experimental: false,
    })
}

pub fn oscillator_eigenvalue(k: usize) -> f64 {
    (k as f64 * PI / 2.0).powi(2)
}

/// Normalized oscillator eigenfunction sin(k pi (x + 1) / 2).
pub fn oscillator_mode(k: usize) -> Result<ChebFun> {
    cheb(Interval::unit(), move |x| (k as f64 * PI * (x + 1.0) / 2.0).sin())
}

/// -u'' + x^2 u = lambda cosh(x) u on [-1, 1], u(+-1) = 0, written as a standard
/// problem self-adjoint in the cosh-weighted inner product.
pub fn regular_slep() -> Result<ProblemSpec> {
    let dom = Interval::unit();
    let a2 = cheb(dom, |x| -1.0 / x.cosh())?;
    let a0 = cheb(dom, |x| x * x / x.cosh())?;
    let op = LinDiffOp::new(dom, vec![a0, ChebFun::zero(dom), a2])?;
    Ok(ProblemSpec {
        name: "regular-slep".into(),
        description: "-u'' + x^2 u = lambda cosh(x) u on [-1, 1] with Dirichlet conditions".into(),
        problem: EigenProblem {
            operator: Operator::Standard { op },
            bcs: BoundaryConditions::dirichlet(),
            weight: Weight::Function { w: cheb(dom, f64::cosh)? },
            self_adjoint: true,
        },
        reference: Reference::Asymptotic {
            formula: "sqrt(lambda_n) ~ n pi / int_{-1}^{1} sqrt(cosh x) dx".into(),
        },
        experimental: false,
    })
}

/// -u'' = lambda x^3 u on [-1, 1], u(+-1) = 0, as a pencil with an |x|^3 weight.
pub fn indefinite_slep() -> Result<ProblemSpec> {
    let dom = Interval::unit();
    let lhs = LinDiffOp::constant(dom, &[0.0, 0.0, -1.0])?;
    let rhs = LinDiffOp::multiplication(cheb(dom, |x| x * x * x)?);
    Ok(ProblemSpec {
        name: "indefinite-slep".into(),
        description: "-u'' = lambda x^3 u on [-1, 1] with Dirichlet conditions (pencil form)".into(),
        problem: EigenProblem {
            operator: Operator::Pencil { lhs, rhs },
            bcs: BoundaryConditions::dirichlet(),
            weight: abs_cubed(dom)?,
            self_adjoint: false,
        },
        reference: Reference::Asymptotic {
            formula: "sqrt(lambda_n) ~ (n - 1/4) pi / (2/5) for the positive branch".into(),
        },
        experimental: false,
    })
}

/// ((1 + x) u'')'' = lambda u on [0, L], u(0) = u'(0) = 0, u''(L) = u'''(L) = 0.
pub fn beam(length: f64) -> Result<ProblemSpec> {
    if length <= 0.0 {
        return Err(Error::Invalid("beam length must be positive".into()));
    }
    let dom = Interval::new(0.0, length);
    let zero = ChebFun::zero(dom);
    let a4 = ChebFun::identity(dom).add(&constant(dom, 1.0))?;
    let op = LinDiffOp::new(dom, vec![zero.clone(), zero.clone(), zero, constant(dom, 2.0), a4])?;
    Ok(ProblemSpec {
        name: "beam".into(),
        description: format!("((1 + x) u'')'' = lambda u on [0, {length}], clamped at 0, free at {length}"),
        problem: EigenProblem {
            operator: Operator::Standard { op },
            bcs: BoundaryConditions::cantilever(),
            weight: Weight::Unit,
            self_adjoint: true,
        },
        reference: Reference::Literature {
            values: vec![3.759, 178.4, 1470.0, 5712.0],
            note: "published mode labels for the tapered cantilever".into(),
        },
        experimental: false,
    })
}

/// u'' + c u = lambda u on [-1, 1], u(+-1) = 0; eigenvalues c - (k pi / 2)^2.
pub fn halfplane_synthetic(c: f64) -> Result<ProblemSpec> {
    let dom = Interval::unit();
    Ok(ProblemSpec {
        name: "halfplane-synthetic".into(),
        description: format!("u'' + {c} u = lambda u on [-1, 1] with Dirichlet conditions"),
        problem: EigenProblem {
            operator: Operator::Standard {
                op: LinDiffOp::constant(dom, &[c, 0.0, 1.0])?,
            },
            bcs: BoundaryConditions::dirichlet(),
            weight: Weight::Unit,
            self_adjoint: true,
        },
        reference: Reference::ClosedForm {
            formula: format!("lambda_k = {c} - (k pi / 2)^2"),
        },
        experimental: false,
    })
}

pub fn synthetic_eigenvalue(c: f64, k: usize) -> f64 {
    c - oscillator_eigenvalue(k)
}

/// Closed-form solution sqrt(2 delta) tanh(x sqrt(delta / 2)) of u' + u^2 / 2 = delta, u(0) = 0.
pub fn thin_film_steady_state(delta: f64, domain: Interval) -> Result<ChebFun> {
    if delta <= 0.0 {
        return Err(Error::Invalid(format!("delta must be positive, got {delta}")));
    }
    let amp = (2.0 * delta).sqrt();
    let rate = (delta / 2.0).sqrt();
    cheb(domain, move |x| amp * (rate * x).tanh())
}

/// Linearization -(u'''' + (h u')') about the steady state h on [0, l] with
/// u = u'' = 0 at both ends.
pub fn thin_film(delta: f64, length: f64) -> Result<ProblemSpec> {
    if length <= 0.0 {
        return Err(Error::Invalid("film length must be positive".into()));
    }
    let dom = Interval::new(0.0, length);
    let h = thin_film_steady_state(delta, dom)?;
    let minus = C64::new(-1.0, 0.0);
    let zero = ChebFun::zero(dom);
    let op = LinDiffOp::new(
        dom,
        vec![zero.clone(), h.derivative().scale(minus), h.scale(minus), zero, constant(dom, -1.0)],
    )?;
    let bcs = BoundaryConditions(vec![
        BoundaryCondition::homogeneous(End::Left, 0),
        BoundaryCondition::homogeneous(End::Left, 2),
        BoundaryCondition::homogeneous(End::Right, 0),
        BoundaryCondition::homogeneous(End::Right, 2),
    ]);
    Ok(ProblemSpec {
        name: "thin-film".into(),
        description: format!("thin-film linearization about the tanh steady state, delta = {delta}, l = {length}"),
        problem: EigenProblem {
            operator: Operator::Standard { op },
            bcs,
            weight: Weight::Unit,
            self_adjoint: true,
        },
        reference: Reference::None {
            note: "demonstration only; no reference eigenvalues".into(),
        },
        experimental: true,
    })
}

/// Default parameters for the thin-film demo.
pub const THIN_FILM_DELTA: f64 = 1.0;
pub const THIN_FILM_LENGTH: f64 = 4.0;
/// Default shift for the synthetic half-plane problem: two eigenvalues in Re > 0.
pub const SYNTHETIC_C: f64 = 12.0;

pub fn catalog() -> Result<Vec<ProblemSpec>> {
    NAMES.iter().map(|n| by_name(n)).collect()
}

pub fn by_name(name: &str) -> Result<ProblemSpec> {
    match name {
        "oscillator" => oscillator(),
        "regular-slep" => regular_slep(),
        "indefinite-slep" => indefinite_slep(),
        "beam" => beam(1.0),
        "halfplane-synthetic" => halfplane_synthetic(SYNTHETIC_C),
        "thin-film" => thin_film(THIN_FILM_DELTA, THIN_FILM_LENGTH),
        other => Err(Error::Invalid(format!(
            "unknown problem '{other}'; valid names: {}",
            NAMES.join(", ")
        ))),
    }
}

/// integral over [-1, 1] of sqrt(cosh x), by a 64-point Gauss-Legendre rule.
pub fn regular_slep_denominator() -> f64 {
    gauss_legendre_rule(64).integrate(|x| x.cosh().sqrt())
}

/// Large-n eigenvalue asymptotics for the two Sturm-Liouville examples.
pub fn slep_asymptotic(n: usize, kind: SlepKind) -> f64 {
    let root = match kind {
        SlepKind::Regular => n as f64 * PI / regular_slep_denominator(),
        SlepKind::Indefinite => (n as f64 - 0.25) * PI / 0.4,
    };
    root * root
}

/// Search region for the n-th mode: a disk around the reference or asymptotic
/// value, or the right half-plane.
pub fn region(name: &str, n: usize) -> Result<FilterSpec> {
    let disk = |c: f64, r: f64| FilterSpec::Disk {
        center: [c, 0.0],
        radius: r,
        ell: DEFAULT_DISK_ELL,
    };
    match name {
        "oscillator" => Ok(disk(oscillator_eigenvalue(n), 1.0)),
        "regular-slep" => Ok(disk(slep_asymptotic(n, SlepKind::Regular), 1.0)),
        "indefinite-slep" => {
            let c = slep_asymptotic(n, SlepKind::Indefinite);
            // neighbouring eigenvalues sit about 2 sqrt(c) pi / 0.4 apart
            let spacing = 2.0 * c.sqrt() * PI / 0.4;
            Ok(disk(c, 0.25 * spacing))
        }
        "halfplane-synthetic" | "thin-film" => Ok(FilterSpec::Halfplane {
            a: 1.0,
            ell: DEFAULT_HALFPLANE_ELL,
        }),
        other => Err(Error::Invalid(format!("no search-region generator for '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::apply_operator;

    #[test]
    fn catalog_has_six_entries_that_round_trip() {
        let cat = catalog().unwrap();
        assert_eq!(cat.len(), 6);
        for p in &cat {
            let s = serde_json::to_string(p).unwrap();
            let back: ProblemSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(&back, p, "{}", p.name);
        }
    }

    #[test]
    fn oscillator_operator_on_first_mode() {
        let p = oscillator().unwrap();
        let u = oscillator_mode(1).unwrap();
        let lu = apply_operator(p.problem.operator.lhs(), &u).unwrap();
        let lam = oscillator_eigenvalue(1);
        assert!(lu.sub(&u.scale(C64::new(lam, 0.0))).unwrap().max_coeff() < 1e-12);
    }

    #[test]
    fn asymptotic_denominators() {
        let d = regular_slep_denominator();
        assert!(d > 2.0 && d < 2.2);
        let v = slep_asymptotic(1, SlepKind::Indefinite);
        assert!((v.sqrt() - 0.75 * PI / 0.4).abs() < 1e-14);
    }

    #[test]
    fn synthetic_counts() {
        let count = |c: f64| (1..20).filter(|&k| synthetic_eigenvalue(c, k) > 0.0).count();
        assert_eq!(count(7.0), 1);
        assert_eq!(count(12.0), 2);
        assert_eq!(count(0.0), 0);
    }

    #[test]
    fn thin_film_steady_state_checks() {
        let dom = Interval::new(0.0, 2.0);
        let u = thin_film_steady_state(1.0, dom).unwrap();
        assert!((u.derivative().eval(0.0).re - 1.0).abs() < 1e-12);
        assert!(thin_film_steady_state(0.0, dom).is_err());
    }

    #[test]
    fn unknown_name_lists_valid_ones() {
        let e = by_name("nope").unwrap_err().to_string();
        assert!(e.contains("oscillator") && e.contains("thin-film"));
    }
}
