//! opfeast: eigenvalues of differential operators from the command line.
//!
//! Exit status: 0 when every run converged, 2 when a run did not converge
//! (results are still written), 1 on configuration or runtime errors.

mod config;
mod driver;
mod expr;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use opfeast::problems;
use opfeast::FilterSpec;

use config::{Mode, RunConfig};
use output::{to_json, write_csv};

#[derive(Parser)]
#[command(name = "opfeast", version, about = "Eigenvalues of differential operators in a region of the complex plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Convergence tolerance on the relative residual.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of filter nodes.
    #[arg(long)]
    ell: Option<usize>,
    /// Subspace dimension.
    #[arg(long)]
    m: Option<usize>,
    /// Iteration limit.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Seed for the random starting subspace.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the filter solves (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a catalog problem with its default settings.
    Demo {
        name: String,
        #[arg(long, value_enum, default_value_t = Mode::Feast)]
        mode: Mode,
        /// Mode indices: a list such as 1,2,10 or a range such as 25-200:25.
        #[arg(long)]
        n: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List the catalog or show one problem as JSON.
    Problems {
        #[command(subcommand)]
        what: ProblemsCmd,
    },
    /// Tabulate |s| of a rational filter on a grid (filter_grid.csv).
    FilterGrid {
        /// Filter as JSON, e.g. '{"kind":"disk","center":[2.5,0],"radius":2}'.
        #[arg(long, conflicts_with = "problem")]
        filter: Option<String>,
        /// Use the search region of a catalog problem.
        #[arg(long)]
        problem: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// re_min,re_max,im_min,im_max
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        window: Option<Vec<f64>>,
        #[arg(long, default_value_t = 121)]
        points: usize,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ProblemsCmd {
    List,
    Show { name: String },
}

/// Parses "1,2,10", "5-8" or "25-200:25" (step) and mixtures separated by commas.
fn parse_indices(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (range, step) = match part.split_once(':') {
            Some((r, s)) => (r, s.parse::<usize>().map_err(|_| anyhow!("bad step in '{part}'"))?),
            None => (part, 1),
        };
        if step == 0 {
            bail!("step must be positive in '{part}'");
        }
        match range.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (
                    a.parse().map_err(|_| anyhow!("bad index '{a}'"))?,
                    b.parse().map_err(|_| anyhow!("bad index '{b}'"))?,
                );
                if a > b {
                    bail!("empty range '{part}'");
                }
                out.extend((a..=b).step_by(step));
            }
            None => out.push(range.parse().map_err(|_| anyhow!("bad index '{range}'"))?),
        }
    }
    if out.is_empty() {
        bail!("no mode indices in '{text}'");
    }
    Ok(out)
}

fn apply_overrides(cfg: &mut RunConfig, o: &Overrides) {
    if let Some(t) = o.tol {
        cfg.tol = t;
    }
    if let Some(m) = o.m {
        cfg.m = m;
    }
    if let Some(k) = o.max_iter {
        cfg.max_iters = k;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(d) = &o.out {
        cfg.output = Some(d.clone());
    }
    if let Some(ell) = o.ell {
        let name = match &cfg.problem {
            config::ProblemRef::Catalog(n) => Some(n.clone()),
            _ => None,
        };
        // a derived region gets the override when it is built, so materialize it here
        let base = cfg
            .filter
            .clone()
            .or_else(|| name.and_then(|n| problems::region(&n, cfg.n.first().copied().unwrap_or(1)).ok()));
        if cfg.n.len() > 1 && cfg.filter.is_none() {
            log::warn!("--ell applies to the first region only when several mode indices are given");
        }
        cfg.filter = base.map(|f| f.with_ell(ell));
    }
}

fn init_threads(o: &Overrides) -> Result<()> {
    if let Some(t) = o.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn run_config(mut cfg: RunConfig, o: &Overrides) -> Result<ExitCode> {
    init_threads(o)?;
    apply_overrides(&mut cfg, o);
    config::validate(&cfg)?;
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
    let report = driver::execute(&cfg)?;
    driver::write_outputs(&report, &cfg, &dir)?;
    for run in &report.runs {
        for e in run.eigenvalues.iter().filter(|e| e.in_region) {
            let n = run.n.map(|n| format!("n={n} ")).unwrap_or_default();
            println!("{n}{} {:+.16e} {:+.16e}i", report.problem, e.re, e.im);
        }
    }
    println!("results written to {}", dir.join("results.json").display());
    if report.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("warning: not every run converged");
        Ok(ExitCode::from(2))
    }
}

fn real_main(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = config::load(&config)?;
            run_config(cfg, &overrides)
        }
        Command::Demo {
            name,
            mode,
            n,
            overrides,
        } => {
            let n = match n {
                Some(t) => parse_indices(&t)?,
                None if name == "halfplane-synthetic" || name == "thin-film" => Vec::new(),
                None => vec![1],
            };
            let mode = if name == "beam" && mode == Mode::Feast {
                log::info!("beam has no search region generator; using RQI");
                Mode::Rqi
            } else {
                mode
            };
            let cfg = RunConfig::demo(&name, mode, n)?;
            run_config(cfg, &overrides)
        }
        Command::Problems { what } => {
            match what {
                ProblemsCmd::List => {
                    let list: Vec<serde_json::Value> = problems::catalog()?
                        .iter()
                        .map(|p| {
                            serde_json::json!({
                                "name": p.name,
                                "description": p.description,
                                "experimental": p.experimental,
                            })
                        })
                        .collect();
                    print!("{}", to_json(&list)?);
                }
                ProblemsCmd::Show { name } => print!("{}", to_json(&problems::by_name(&name)?)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::FilterGrid {
            filter,
            problem,
            n,
            window,
            points,
            ell,
            out,
        } => {
            let mut spec: FilterSpec = match (filter, problem) {
                (Some(text), _) => serde_json::from_str(&text).context("--filter")?,
                (None, Some(name)) => problems::region(&name, n)?,
                (None, None) => bail!("give --filter or --problem"),
            };
            if let Some(ell) = ell {
                spec = spec.with_ell(ell);
            }
            let window = match window.as_deref() {
                None => None,
                Some(&[a, b, c, d]) if a < b && c < d => Some([a, b, c, d]),
                Some(w) => bail!("--window wants re_min,re_max,im_min,im_max with min < max, got {w:?}"),
            };
            let rows = driver::filter_grid_rows(&spec, window, points)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("filter_grid.csv");
            write_csv(&path, &driver::FILTER_GRID_COLUMNS, &rows)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OPFEAST_LOG", "warn")).init();
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_lists_and_ranges() {
        assert_eq!(parse_indices("1,2,10").unwrap(), vec![1, 2, 10]);
        assert_eq!(parse_indices("25-200:25").unwrap(), vec![25, 50, 75, 100, 125, 150, 175, 200]);
        assert_eq!(parse_indices("3-5, 9").unwrap(), vec![3, 4, 5, 9]);
        assert!(parse_indices("5-3").is_err());
        assert!(parse_indices("a").is_err());
        assert!(parse_indices("1-4:0").is_err());
    }
}
