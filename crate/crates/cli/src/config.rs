//! Run configuration files.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use opfeast::eigensolver::{EigenProblem, Operator};
use opfeast::problems::{self, ProblemSpec, Reference};
use opfeast::{BoundaryConditions, ChebFun, FilterSpec, Interval, LinDiffOp, Reseed, Weight};
use serde::{Deserialize, Serialize};

use crate::expr::parse_coeff_expression;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Feast,
    Rqi,
}

/// A coefficient given as a number or as an expression in x.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Number(f64),
    Text(String),
}

impl Coeff {
    fn fit(&self, domain: Interval) -> Result<ChebFun> {
        match self {
            Coeff::Number(v) => Ok(ChebFun::constant(domain, opfeast::C64::new(*v, 0.0))),
            Coeff::Text(s) => parse_coeff_expression(s, domain),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bcs {
    Named(String),
    List(BoundaryConditions),
}

/// An operator written out in the configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineProblem {
    #[serde(default = "default_name")]
    pub name: String,
    pub domain: [f64; 2],
    /// `coefficients[j]` multiplies the j-th derivative.
    pub coefficients: Vec<Coeff>,
    /// Right-hand operator of a pencil L1 u = lambda L2 u.
    #[serde(default)]
    pub rhs_coefficients: Option<Vec<Coeff>>,
    pub bcs: Bcs,
    #[serde(default)]
    pub weight: Option<Coeff>,
    #[serde(default)]
    pub self_adjoint: bool,
}

fn default_name() -> String {
    "inline".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemRef {
    Catalog(String),
    Inline(InlineProblem),
}

/// Which optional data files to write next to results.json.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Emit {
    pub eigenfunctions: bool,
    pub coefficients: bool,
    pub filter_grid: bool,
    pub residual_history: bool,
    pub eigenvalue_error: bool,
}

impl Emit {
    pub fn all() -> Self {
        Emit {
            eigenfunctions: true,
            coefficients: true,
            filter_grid: true,
            residual_history: true,
            eigenvalue_error: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemRef,
    #[serde(default)]
    pub mode: Mode,
    /// Search region; derived from the mode index for catalog problems when absent.
    #[serde(default)]
    pub filter: Option<FilterSpec>,
    /// Mode indices, one run each.
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub adapt_rank: bool,
    #[serde(default)]
    pub reseed: Reseed,
    #[serde(default)]
    pub rank_tol: Option<f64>,
    #[serde(default)]
    pub cutoff: Option<usize>,
    /// Starting function for RQI, as an expression in x.
    #[serde(default)]
    pub initial: Option<String>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub emit: Emit,
}

fn default_m() -> usize {
    2
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iters() -> usize {
    10
}

impl RunConfig {
    /// Configuration for a catalog problem with the defaults used by `demo`.
    pub fn demo(name: &str, mode: Mode, n: Vec<usize>) -> Result<Self> {
        problems::by_name(name)?;
        let m = match name {
            "halfplane-synthetic" | "thin-film" => 4,
            _ => 2,
        };
        // The thin-film mode sits at |lambda| ~ 0.25 while the fourth-order operator
        // turns rounding-level traces of modes near -1000 into residuals of ~1e-9;
        // relative to the small eigenvalue that is a floor near 1e-8.
        let tol = if name == "thin-film" { 1e-7 } else { default_tol() };
        Ok(RunConfig {
            problem: ProblemRef::Catalog(name.into()),
            mode,
            filter: None,
            n,
            m,
            tol,
            max_iters: default_max_iters(),
            seed: 0,
            adapt_rank: true,
            reseed: Reseed::Ritz,
            rank_tol: None,
            cutoff: None,
            initial: None,
            output: None,
            emit: Emit::all(),
        })
    }
}

/// Line (1-based) of the first occurrence of `"key"` in the file text.
fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1)
}

/// Reads and validates a configuration file. Errors carry `path:line:column`.
pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow!("{}: cannot read config: {e}", path.display()))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))?;
    let at = |key: &str, msg: String| anyhow!("{}:{}: {msg}", path.display(), line_of(&text, key));
    if let ProblemRef::Catalog(name) = &cfg.problem {
        problems::by_name(name).map_err(|e| at("problem", e.to_string()))?;
    }
    validate(&cfg).map_err(|e| {
        let key = e.to_string().split(':').next().unwrap_or("").to_string();
        at(&key, e.to_string())
    })?;
    Ok(cfg)
}

/// Checks that do not depend on the file layout; messages start with the offending key.
pub fn validate(cfg: &RunConfig) -> Result<()> {
    if cfg.m == 0 {
        bail!("m: subspace dimension must be at least 1");
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        bail!("tol: must be positive, got {}", cfg.tol);
    }
    if let Some(f) = &cfg.filter {
        f.build().map_err(|e| anyhow!("filter: {e}"))?;
    }
    if cfg.n.contains(&0) {
        bail!("n: mode indices start at 1");
    }
    Ok(())
}

fn fit_all(coeffs: &[Coeff], domain: Interval) -> Result<LinDiffOp> {
    let fitted = coeffs.iter().map(|c| c.fit(domain)).collect::<Result<Vec<_>>>()?;
    Ok(LinDiffOp::new(domain, fitted)?)
}

impl InlineProblem {
    pub fn build(&self) -> Result<ProblemSpec> {
        let domain = Interval::new(self.domain[0], self.domain[1]);
        if domain.a.is_nan() || domain.b.is_nan() || domain.a >= domain.b {
            bail!("domain: [{}, {}] is empty", domain.a, domain.b);
        }
        let lhs = fit_all(&self.coefficients, domain)?;
        let operator = match &self.rhs_coefficients {
            Some(r) => Operator::Pencil {
                lhs,
                rhs: fit_all(r, domain)?,
            },
            None => Operator::Standard { op: lhs },
        };
        let bcs = match &self.bcs {
            Bcs::Named(s) if s == "dirichlet" => BoundaryConditions::dirichlet(),
            Bcs::Named(s) if s == "cantilever" => BoundaryConditions::cantilever(),
            Bcs::Named(s) => bail!("bcs: unknown boundary condition set '{s}' (dirichlet, cantilever, or a list)"),
            Bcs::List(b) => b.clone(),
        };
        bcs.check(operator.lhs().order())?;
        let weight = match &self.weight {
            None => Weight::Unit,
            Some(w) => Weight::Function { w: w.fit(domain)? },
        };
        Ok(ProblemSpec {
            name: self.name.clone(),
            description: "operator given in the run configuration".into(),
            problem: EigenProblem {
                operator,
                bcs,
                weight,
                self_adjoint: self.self_adjoint,
            },
            reference: Reference::None {
                note: "no reference values".into(),
            },
            experimental: false,
        })
    }
}

pub fn resolve_problem(p: &ProblemRef) -> Result<ProblemSpec> {
    match p {
        ProblemRef::Catalog(name) => Ok(problems::by_name(name)?),
        ProblemRef::Inline(i) => i.build(),
    }
}
