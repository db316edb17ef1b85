//! Runs a configuration and writes its result files.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};
use opfeast::chebfun::ChebFun;
use opfeast::eigensolver::{contfeast, EigResult, FeastConfig};
use opfeast::filters::FilterKind;
use opfeast::problems::{self, ProblemSpec, Reference, SlepKind, SYNTHETIC_C};
use opfeast::rqi::{beam_initial_guess, rqi_iterate};
use opfeast::{Error, FilterSpec, C64};
use serde::Serialize;

use crate::config::{resolve_problem, Mode, ProblemRef, RunConfig};
use crate::expr::parse_coeff_expression;
use crate::output::{write_csv, write_json, Cell};

/// Points per eigenfunction in eigenfunctions.csv.
const SAMPLES: usize = 201;
/// Points per side of the filter grid.
const GRID: usize = 121;

#[derive(Serialize)]
pub struct Eigenpair {
    pub re: f64,
    pub im: f64,
    pub in_region: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_number: Option<f64>,
    /// Number of Chebyshev coefficients of the eigenfunction.
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
}

#[derive(Serialize)]
pub struct RunRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterSpec>,
    pub converged: bool,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub eigenvalues: Vec<Eigenpair>,
    pub residual_history: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hermitian_defects: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ranks: Vec<usize>,
    /// RQI shifts, as [re, im].
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub shifts: Vec<[f64; 2]>,
    #[serde(skip)]
    functions: Vec<ChebFun>,
}

#[derive(Serialize)]
pub struct Report {
    pub problem: String,
    pub experimental: bool,
    pub mode: Mode,
    pub settings: Settings,
    pub converged: bool,
    pub runs: Vec<RunRecord>,
}

#[derive(Serialize)]
pub struct Settings {
    pub m: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub adapt_rank: bool,
}

fn reference_value(spec: &ProblemSpec, n: usize) -> Option<f64> {
    match spec.name.as_str() {
        "oscillator" => Some(problems::oscillator_eigenvalue(n)),
        "regular-slep" => Some(problems::slep_asymptotic(n, SlepKind::Regular)),
        "indefinite-slep" => Some(problems::slep_asymptotic(n, SlepKind::Indefinite)),
        "halfplane-synthetic" => Some(problems::synthetic_eigenvalue(SYNTHETIC_C, n)),
        _ => match &spec.reference {
            Reference::Literature { values, .. } => values.get(n - 1).copied(),
            _ => None,
        },
    }
}

fn catalog_name(cfg: &RunConfig) -> Option<&str> {
    match &cfg.problem {
        ProblemRef::Catalog(n) => Some(n),
        ProblemRef::Inline(_) => None,
    }
}

fn filter_for(cfg: &RunConfig, n: Option<usize>) -> Result<FilterSpec> {
    if let Some(f) = &cfg.filter {
        return Ok(f.clone());
    }
    let name = catalog_name(cfg).ok_or_else(|| anyhow!("filter: required for an inline problem"))?;
    problems::region(name, n.unwrap_or(1)).map_err(|e| anyhow!("filter: {e}; give one in the config"))
}

fn feast_run(spec: &ProblemSpec, cfg: &RunConfig, n: Option<usize>) -> Result<RunRecord> {
    let filter = filter_for(cfg, n)?;
    let mut fc = FeastConfig::new(cfg.m, filter.clone());
    fc.tol = cfg.tol;
    fc.max_iters = cfg.max_iters;
    fc.seed = cfg.seed;
    fc.adapt_rank = cfg.adapt_rank;
    fc.reseed = cfg.reseed;
    if let Some(t) = cfg.rank_tol {
        fc.rank_tol = t;
    }
    if let Some(c) = cfg.cutoff {
        fc.cutoff = c;
    }
    let (result, error) = match contfeast(&spec.problem, &fc) {
        Ok(r) => (r, None),
        Err(Error::Stagnation(r)) => {
            let msg = Error::Stagnation(r.clone()).to_string();
            warn!("{msg}");
            (*r, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };
    Ok(feast_record(spec, n, filter, result, error))
}

fn feast_record(spec: &ProblemSpec, n: Option<usize>, filter: FilterSpec, r: EigResult, error: Option<String>) -> RunRecord {
    let reference = n.and_then(|n| reference_value(spec, n));
    let mut eigenvalues = Vec::new();
    let mut functions = Vec::new();
    for (i, v) in r.ritz_values.iter().enumerate() {
        let f = r.ritz_functions.col(i);
        let inside = r.in_region[i];
        let reference = if inside { reference } else { None };
        eigenvalues.push(Eigenpair {
            re: v.re,
            im: v.im,
            in_region: inside,
            condition_number: r.condition_numbers.get(i).copied(),
            length: f.len(),
            reference,
            relative_error: reference.map(|w| (v - w).norm() / w.abs()),
        });
        functions.push(f.clone());
    }
    RunRecord {
        n,
        filter: Some(filter),
        converged: r.converged,
        iterations: r.iterations,
        error,
        eigenvalues,
        residual_history: r.residuals,
        hermitian_defects: r.hermitian_defects,
        ranks: r.ranks,
        shifts: Vec::new(),
        functions,
    }
}

fn rqi_start(spec: &ProblemSpec, cfg: &RunConfig, n: usize) -> Result<ChebFun> {
    let domain = spec.problem.domain();
    if let Some(text) = &cfg.initial {
        return parse_coeff_expression(text, domain).context("initial");
    }
    match spec.name.as_str() {
        "beam" => Ok(beam_initial_guess(n, domain.length())?),
        "oscillator" => {
            // the exact mode polluted by its neighbour
            let u = problems::oscillator_mode(n)?;
            Ok(u.add(&problems::oscillator_mode(n + 1)?.scale(C64::new(0.1, 0.0)))?)
        }
        other => bail!("initial: no default starting function for '{other}'; give an expression"),
    }
}

fn rqi_run(spec: &ProblemSpec, cfg: &RunConfig, n: usize) -> Result<RunRecord> {
    if spec.problem.operator.rhs().is_some() {
        bail!("mode: RQI handles standard problems only, '{}' is a pencil", spec.name);
    }
    let f0 = rqi_start(spec, cfg, n)?;
    let tr = rqi_iterate(
        spec.problem.operator.lhs(),
        &f0,
        &spec.problem.bcs,
        &spec.problem.weight,
        cfg.tol,
        cfg.max_iters,
    )?;
    let reference = reference_value(spec, n);
    let mut eigenvalues = Vec::new();
    let mut functions = Vec::new();
    if !tr.shifts.is_empty() {
        let v = tr.eigenvalue;
        eigenvalues.push(Eigenpair {
            re: v.re,
            im: v.im,
            in_region: true,
            condition_number: None,
            length: tr.eigenfunction.len(),
            reference,
            relative_error: reference.map(|w| (v - w).norm() / w.abs()),
        });
        functions.push(tr.eigenfunction.clone());
    }
    Ok(RunRecord {
        n: Some(n),
        filter: None,
        converged: tr.converged,
        iterations: tr.shifts.len(),
        error: None,
        eigenvalues,
        residual_history: tr.residuals,
        hermitian_defects: Vec::new(),
        ranks: Vec::new(),
        shifts: tr.shifts.iter().map(|z| [z.re, z.im]).collect(),
        functions,
    })
}

pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let spec = resolve_problem(&cfg.problem)?;
    if spec.experimental {
        warn!("'{}' is experimental: its parameters are demonstration values", spec.name);
    }
    let indices: Vec<Option<usize>> = if cfg.n.is_empty() {
        vec![None]
    } else {
        cfg.n.iter().map(|&n| Some(n)).collect()
    };
    let mut runs = Vec::new();
    for n in indices {
        info!("running {} ({:?}) n = {n:?}", spec.name, cfg.mode);
        let run = match cfg.mode {
            Mode::Feast => feast_run(&spec, cfg, n)?,
            Mode::Rqi => rqi_run(&spec, cfg, n.unwrap_or(1))?,
        };
        runs.push(run);
    }
    Ok(Report {
        problem: spec.name.clone(),
        experimental: spec.experimental,
        mode: cfg.mode,
        settings: Settings {
            m: cfg.m,
            tol: cfg.tol,
            max_iters: cfg.max_iters,
            seed: cfg.seed,
            adapt_rank: cfg.adapt_rank,
        },
        converged: runs.iter().all(|r| r.converged),
        runs,
    })
}

/// Phase that makes the largest sample real and positive, so plots do not flip.
fn normalize_phase(f: &ChebFun, xs: &[f64]) -> Vec<C64> {
    let vals = f.eval_many(xs);
    let big = vals.iter().copied().fold(C64::new(0.0, 0.0), |a, b| if b.norm() > a.norm() { b } else { a });
    let phase = if big.norm() > 0.0 { big.conj() / big.norm() } else { C64::new(1.0, 0.0) };
    vals.into_iter().map(|v| v * phase).collect()
}

/// Values of |s| on a grid covering the filter's region.
pub fn filter_grid_rows(spec: &FilterSpec, window: Option<[f64; 4]>, points: usize) -> Result<Vec<Vec<Cell>>> {
    let filter = spec.build()?;
    let [x0, x1, y0, y1] = match (window, filter.kind) {
        (Some(w), _) => w,
        (None, FilterKind::Disk { center, radius }) => [
            center.re - 1.6 * radius,
            center.re + 1.6 * radius,
            center.im - 1.6 * radius,
            center.im + 1.6 * radius,
        ],
        (None, FilterKind::HalfPlane { a }) => {
            let h = 20.0 * a;
            [-h, h, -h, h]
        }
    };
    if points < 2 {
        bail!("grid needs at least 2 points per side");
    }
    let mut rows = Vec::with_capacity(points * points);
    for j in 0..points {
        let y = y0 + (y1 - y0) * j as f64 / (points - 1) as f64;
        for i in 0..points {
            let x = x0 + (x1 - x0) * i as f64 / (points - 1) as f64;
            // a grid point on a pole has no finite value; leave the cell empty
            let s = filter.value(C64::new(x, y)).map(|s| s.norm()).unwrap_or(f64::INFINITY);
            rows.push(vec![Cell::Real(x), Cell::Real(y), Cell::Real(s)]);
        }
    }
    Ok(rows)
}

pub const FILTER_GRID_COLUMNS: [(&str, &str); 3] = [("re", "1"), ("im", "1"), ("abs_filter", "1")];

pub fn write_outputs(report: &Report, cfg: &RunConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_json(&dir.join("results.json"), report)?;
    let emit = &cfg.emit;
    if emit.residual_history {
        let mut rows = Vec::new();
        for (r, run) in report.runs.iter().enumerate() {
            for (i, v) in run.residual_history.iter().enumerate() {
                rows.push(vec![Cell::Int(r), Cell::Int(i + 1), Cell::Real(*v)]);
            }
        }
        write_csv(
            &dir.join("residual_history.csv"),
            &[("run", "1"), ("iteration", "1"), ("residual", "relative")],
            &rows,
        )?;
    }
    if emit.eigenvalue_error {
        let mut rows = Vec::new();
        for run in &report.runs {
            for e in run.eigenvalues.iter().filter(|e| e.in_region) {
                rows.push(vec![
                    run.n.map_or(Cell::Text(String::new()), Cell::Int),
                    Cell::Real(e.re),
                    Cell::Real(e.im),
                    Cell::Real(e.reference.unwrap_or(f64::NAN)),
                    Cell::Real(e.relative_error.unwrap_or(f64::NAN)),
                ]);
            }
        }
        write_csv(
            &dir.join("eigenvalue_error.csv"),
            &[
                ("n", "1"),
                ("eigenvalue_re", "1"),
                ("eigenvalue_im", "1"),
                ("reference", "1"),
                ("relative_error", "1"),
            ],
            &rows,
        )?;
    }
    if emit.coefficients || emit.eigenfunctions {
        let mut coeff_rows = Vec::new();
        let mut fn_rows = Vec::new();
        for (r, run) in report.runs.iter().enumerate() {
            for (k, (e, f)) in run.eigenvalues.iter().zip(&run.functions).enumerate() {
                if !e.in_region {
                    continue;
                }
                let big = f.max_coeff();
                for (i, c) in f.coeffs().iter().enumerate() {
                    coeff_rows.push(vec![Cell::Int(r), Cell::Int(k), Cell::Int(i), Cell::Real(c.norm() / big)]);
                }
                let dom = f.domain();
                let xs: Vec<f64> = (0..SAMPLES)
                    .map(|j| dom.a + (dom.b - dom.a) * j as f64 / (SAMPLES - 1) as f64)
                    .collect();
                for (x, v) in xs.iter().zip(normalize_phase(f, &xs)) {
                    fn_rows.push(vec![Cell::Int(r), Cell::Int(k), Cell::Real(*x), Cell::Real(v.re), Cell::Real(v.im)]);
                }
            }
        }
        if emit.coefficients {
            write_csv(
                &dir.join("coefficients.csv"),
                &[("run", "1"), ("function", "1"), ("index", "1"), ("abs_coefficient", "relative to max")],
                &coeff_rows,
            )?;
        }
        if emit.eigenfunctions {
            write_csv(
                &dir.join("eigenfunctions.csv"),
                &[("run", "1"), ("function", "1"), ("x", "domain"), ("re", "unit L2 norm"), ("im", "unit L2 norm")],
                &fn_rows,
            )?;
        }
    }
    if emit.filter_grid {
        if let Some(filter) = report.runs.iter().find_map(|r| r.filter.clone()) {
            write_csv(&dir.join("filter_grid.csv"), &FILTER_GRID_COLUMNS, &filter_grid_rows(&filter, None, GRID)?)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_largest_inside_the_disk() {
        let spec = FilterSpec::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
            ell: 8,
        };
        let rows = filter_grid_rows(&spec, Some([-2.0, 2.0, -2.0, 2.0]), 5).unwrap();
        assert_eq!(rows.len(), 25);
        let centre = match rows[12][2] {
            Cell::Real(v) => v,
            _ => unreachable!(),
        };
        let corner = match rows[0][2] {
            Cell::Real(v) => v,
            _ => unreachable!(),
        };
        assert!((centre - 1.0).abs() < 1e-12 && corner < 1e-2);
    }
}
