//! Filtered subspace iteration with Rayleigh-Ritz projection for differential
//! operators and pencils.

use log::{debug, info};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chebfun::ChebFun;
use crate::dense::{dense_eig, eigenvector_conditions, hermitian_defect, pencil_matrix};
use crate::error::{Error, Result};
use crate::filters::{apply_filter, FilterSpec, RationalFilter};
use crate::ode::{apply_operator, BoundaryConditions, LinDiffOp, ShiftSolver};
use crate::quasimatrix::{Quasimatrix, RankReport, RANK_TOL};
use crate::random::random_bandlimited;
use crate::weight::{inner_product, norm, Weight};

/// Smallest tolerance handed to the shifted solves.
pub const MIN_SOLVE_TOL: f64 = 1e-14;

/// L u = lambda u, or L1 u = lambda L2 u.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Operator {
    Standard { op: LinDiffOp },
    Pencil { lhs: LinDiffOp, rhs: LinDiffOp },
}

impl Operator {
    pub fn lhs(&self) -> &LinDiffOp {
        match self {
            Operator::Standard { op } => op,
            Operator::Pencil { lhs, .. } => lhs,
        }
    }

    pub fn rhs(&self) -> Option<&LinDiffOp> {
        match self {
            Operator::Standard { .. } => None,
            Operator::Pencil { rhs, .. } => Some(rhs),
        }
    }

    /// L2 g for a pencil, g itself otherwise.
    pub fn apply_rhs(&self, g: &ChebFun) -> Result<ChebFun> {
        match self.rhs() {
            Some(op) => apply_operator(op, g),
            None => Ok(g.clone()),
        }
    }
}

/// An eigenproblem: operator, boundary conditions and inner-product weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenProblem {
    pub operator: Operator,
    pub bcs: BoundaryConditions,
    pub weight: Weight,
    /// Self-adjoint with respect to `weight`; enables the Hermitian dense path.
    #[serde(default)]
    pub self_adjoint: bool,
}

impl EigenProblem {
    pub fn solver(&self) -> Result<ShiftSolver> {
        match &self.operator {
            Operator::Standard { op } => ShiftSolver::new(op, &self.bcs),
            Operator::Pencil { lhs, rhs } => ShiftSolver::pencil(lhs, rhs, &self.bcs),
        }
    }

    pub fn domain(&self) -> crate::chebfun::Interval {
        self.operator.lhs().domain()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reseed {
    #[default]
    Ritz,
    Schur,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeastConfig {
    pub m: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    pub filter: FilterSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub adapt_rank: bool,
    #[serde(default)]
    pub reseed: Reseed,
    /// Relative threshold on the eigenvalues of V*V when adapting the rank.
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    /// Number of Fourier harmonics in the random starting functions.
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iters() -> usize {
    10
}

fn default_rank_tol() -> f64 {
    RANK_TOL
}

fn default_cutoff() -> usize {
    20
}

impl FeastConfig {
    pub fn new(m: usize, filter: FilterSpec) -> Self {
        FeastConfig {
            m,
            tol: default_tol(),
            max_iters: default_max_iters(),
            filter,
            seed: 0,
            adapt_rank: false,
            reseed: Reseed::Ritz,
            rank_tol: default_rank_tol(),
            cutoff: default_cutoff(),
        }
    }

    /// Tolerance for the shifted solves.
    pub fn solve_tol(&self) -> f64 {
        (self.tol / 100.0).max(MIN_SOLVE_TOL)
    }
}

#[derive(Clone, Debug)]
pub struct EigResult {
    pub ritz_values: Vec<C64>,
    pub in_region: Vec<bool>,
    pub ritz_functions: Quasimatrix,
    /// Residual after each iteration.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub condition_numbers: Vec<f64>,
    pub converged: bool,
    /// Relative Hermitian defect of the projected matrix at each iteration.
    pub hermitian_defects: Vec<f64>,
    /// Subspace dimension used at each iteration.
    pub ranks: Vec<usize>,
    pub rank_reports: Vec<RankReport>,
    pub projected: Option<DMatrix<C64>>,
}

impl EigResult {
    fn empty(f: Quasimatrix) -> Self {
        EigResult {
            ritz_values: Vec::new(),
            in_region: Vec::new(),
            ritz_functions: Quasimatrix::empty(f.domain(), f.weight().clone()),
            residuals: Vec::new(),
            iterations: 0,
            condition_numbers: Vec::new(),
            converged: false,
            hermitian_defects: Vec::new(),
            ranks: Vec::new(),
            rank_reports: Vec::new(),
            projected: None,
        }
    }

    /// Ritz values flagged as inside the search region.
    pub fn values_in_region(&self) -> Vec<C64> {
        self.ritz_values
            .iter()
            .zip(&self.in_region)
            .filter(|(_, &f)| f)
            .map(|(v, _)| *v)
            .collect()
    }
}

/// Projected matrices (Q_i, L Q_j) and, for a pencil, (Q_i, L2 Q_j).
pub fn rayleigh_ritz(q: &Quasimatrix, op: &Operator) -> Result<(DMatrix<C64>, Option<DMatrix<C64>>)> {
    let lq = q.map(|c| apply_operator(op.lhs(), c))?;
    let l = q.gram(&lq)?;
    let b = match op.rhs() {
        Some(r) => Some(q.gram(&q.map(|c| apply_operator(r, c))?)?),
        None => None,
    };
    Ok((l, b))
}

/// max_i ||L F_i - lambda_i L2 F_i|| / max_i |lambda_i|; zero when everything vanishes.
pub fn residual_norm(op: &Operator, f: &Quasimatrix, lambdas: &[C64]) -> Result<f64> {
    if f.ncols() != lambdas.len() {
        return Err(Error::Invalid("residual_norm: value and column counts differ".into()));
    }
    let mut worst: f64 = 0.0;
    for (c, &lam) in f.columns().iter().zip(lambdas) {
        let lf = apply_operator(op.lhs(), c)?;
        let bf = op.apply_rhs(c)?;
        let r = lf.axpy_unchecked(-lam, &bf);
        worst = worst.max(norm(&r, f.weight())?);
    }
    let scale = lambdas.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(if worst == 0.0 {
        0.0
    } else if scale == 0.0 {
        worst
    } else {
        worst / scale
    })
}

/// ||u|| ||w|| / |(w, u)|
pub fn eigenvalue_condition_number(u: &ChebFun, w: &ChebFun, weight: &Weight) -> Result<f64> {
    let ip = inner_product(w, u, weight)?.norm();
    let nu = norm(u, weight)?;
    let nw = norm(w, weight)?;
    if ip <= 1e-14 * nu * nw || ip == 0.0 {
        return Err(Error::Orthogonal);
    }
    Ok((nu * nw / ip).max(1.0))
}

/// Drops directions of V whose Gram eigenvalues fall below `rel_tol` relative to the largest.
pub fn adapt_rank(v: &Quasimatrix, rel_tol: f64) -> Result<(Quasimatrix, RankReport)> {
    v.trim_by_rank(rel_tol.sqrt())
}

struct Step {
    values: Vec<C64>,
    in_region: Vec<bool>,
    residual: f64,
    kappa: Vec<f64>,
    next: Quasimatrix,
    ritz: Quasimatrix,
    projected: DMatrix<C64>,
    defect: f64,
}

fn ritz_step(problem: &EigenProblem, filter: &RationalFilter, q: &Quasimatrix, reseed: Reseed) -> Result<Step> {
    let op = &problem.operator;
    let lq = q.map(|c| apply_operator(op.lhs(), c))?;
    let l = q.gram(&lq)?;
    let defect = hermitian_defect(&l);
    let (m, bq) = match op.rhs() {
        Some(r) => {
            let bq = q.map(|c| apply_operator(r, c))?;
            let b = q.gram(&bq)?;
            (pencil_matrix(&l, &b)?, bq)
        }
        None => (l.clone(), q.clone()),
    };
    let hermitian = problem.self_adjoint && op.rhs().is_none() && defect <= 1e-8;
    let eig = dense_eig(&m, hermitian)?;
    let kappa = eigenvector_conditions(&eig.vectors);
    let ritz = q.matmul(&eig.vectors)?;
    let lu = lq.matmul(&eig.vectors)?;
    let bu = bq.matmul(&eig.vectors)?;
    let in_region: Vec<bool> = eig.values.iter().map(|&v| filter.contains(v)).collect();
    let any_in = in_region.iter().any(|&b| b);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let grid = q.grid(2 * lu.max_degree().max(bu.max_degree()));
    for (i, &lam) in eig.values.iter().enumerate() {
        if any_in && !in_region[i] {
            continue;
        }
        let r = lu.col(i).axpy_unchecked(-lam, bu.col(i));
        let vals = grid.sample(&r);
        worst = worst.max(grid.dot(&vals, &vals).re.max(0.0).sqrt());
        scale = scale.max(lam.norm());
    }
    let residual = if worst == 0.0 {
        0.0
    } else if scale == 0.0 {
        worst
    } else {
        worst / scale
    };
    let next = match reseed {
        Reseed::Ritz => ritz.clone(),
        Reseed::Schur => q.matmul(&eig.schur_vectors)?,
    };
    Ok(Step {
        values: eig.values,
        in_region,
        residual,
        kappa,
        next,
        ritz,
        projected: l,
        defect,
    })
}

/// Runs the filtered subspace iteration until the residual drops below `config.tol`.
pub fn contfeast(problem: &EigenProblem, config: &FeastConfig) -> Result<EigResult> {
    if config.m == 0 {
        return Err(Error::Invalid("subspace dimension m must be at least 1".into()));
    }
    if config.tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let filter = config.filter.build()?;
    let domain = problem.domain();
    let start = random_bandlimited(config.m, domain, config.cutoff, config.seed)?;
    let mut f = Quasimatrix::new(start, problem.weight.clone())?;
    let mut result = EigResult::empty(f.clone());
    if config.max_iters == 0 {
        return Ok(result);
    }
    let solver = problem.solver()?;
    let tol = config.solve_tol();
    let mut empty_streak = 0;
    for it in 1..=config.max_iters {
        let mut v = apply_filter(&filter, &solver, &f, tol)?;
        if config.adapt_rank {
            let (trimmed, report) = adapt_rank(&v, config.rank_tol)?;
            if report.kept < v.ncols() {
                info!("iteration {it}: subspace trimmed from {} to {}", v.ncols(), report.kept);
            }
            result.rank_reports.push(report);
            if trimmed.ncols() == 0 {
                return Err(Error::RankCollapse);
            }
            v = trimmed;
        }
        let qr = v.householder_qr()?;
        if !qr.deficient.is_empty() {
            debug!("iteration {it}: rank-deficient columns {:?}", qr.deficient);
        }
        let step = ritz_step(problem, &filter, &qr.q, config.reseed)?;
        info!(
            "iteration {it}: residual {:.3e}, {} of {} Ritz values in region",
            step.residual,
            step.in_region.iter().filter(|&&b| b).count(),
            step.values.len()
        );
        result.iterations = it;
        result.residuals.push(step.residual);
        result.hermitian_defects.push(step.defect);
        result.ranks.push(v.ncols());
        result.ritz_values = step.values;
        result.in_region = step.in_region;
        result.condition_numbers = step.kappa;
        result.ritz_functions = step.ritz;
        result.projected = Some(step.projected);
        f = step.next;

        if result.in_region.iter().any(|&b| b) {
            empty_streak = 0;
            if step.residual <= config.tol {
                result.converged = true;
                return Ok(result);
            }
        } else {
            empty_streak += 1;
            if empty_streak >= 2 {
                info!("no Ritz values in the search region after {it} iterations");
                result.converged = true;
                return Ok(result);
            }
        }
        if it >= 4 && result.residuals[it - 1] > 0.5 * result.residuals[it - 4] {
            return Err(Error::Stagnation(Box::new(result)));
        }
    }
    Ok(result)
}
