//! The `invit` command-line harness.
//!
//! `invit run` executes one experiment and writes CSV tables to `--out`.
//! `invit compare --config a.cfg --config b.cfg` runs several experiments on
//! the same problem and adds `comparison.csv`. `invit spectrum` prints the
//! analytic spectrum of a generator problem, which helps place `--sigma`.

mod config;
mod output;
mod problem;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::eig::{inverse_iteration, subspace_iteration, OuterTrace};
use crate::linalg::generators::gen_convdiff;

pub use config::{
    config_file_tokens, parse_run_args, EmitSet, MassSource, PrecondArg, ProblemSource, RunArgs,
    RunConfig, SchemeArg,
};
pub use output::{
    num, SummaryRow, COMPARISON_HEADER, INNER_HEADER, OUTER_BLOCK_HEADER, OUTER_HEADER,
    SUMMARY_HEADER,
};
pub use problem::{build_problem, Problem};

use output::OutputDir;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] crate::Error),
    #[error("outer iteration did not converge in {0} steps")]
    NotConverged(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use crate::Error as E;
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(
                E::Parse { .. } | E::Io(_) | E::Dimension(_) | E::InvalidArgument(_) | E::InvalidBasis(_),
            ) => 1,
            CliError::Numerical(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "invit", version, about = "Inexact inverse iteration experiments", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment
    Run {
        /// key = value file; command-line flags take precedence
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Run several experiments on one problem and write comparison.csv
    Compare {
        /// One config file per experiment (at least two)
        #[arg(long = "config")]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Print the analytic spectrum of a generator problem
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        gen: String,
    },
}

/// Result of a single run.
pub struct RunOutcome {
    pub trace: OuterTrace,
    pub summary: SummaryRow,
}

fn execute(cfg: &RunConfig) -> Result<(OuterTrace, Problem), CliError> {
    let problem = build_problem(cfg)?;
    let trace = if cfg.block == 1 {
        inverse_iteration(&problem.spec, problem.basis.as_ref())?
    } else {
        let y0 = problem.initial_block(cfg.block);
        subspace_iteration(&problem.spec, cfg.block, &y0, problem.basis.as_ref())?
    };
    Ok((trace, problem))
}

/// Run one experiment and write its tables to `cfg.out`.
///
/// Non-convergence still writes all tables; it is reported through the
/// returned trace.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let (trace, problem) = execute(cfg)?;
    let summary = SummaryRow::new(cfg, &trace);
    let mut out = OutputDir::create(&cfg.out)?;
    if let Err(e) = output::write_outputs(&mut out, cfg, &trace, problem.basis.as_ref(), &summary) {
        out.cleanup();
        return Err(e);
    }
    Ok(RunOutcome { trace, summary })
}

/// Run each `(name, config)` into `out/<name>/` and write `out/comparison.csv`.
pub fn compare(out: &Path, runs: &[(String, RunConfig)]) -> Result<Vec<RunOutcome>, CliError> {
    if runs.len() < 2 {
        return Err(CliError::Config("compare needs at least two configs".into()));
    }
    if let Some((name, _)) = runs[1..].iter().find(|(_, c)| !c.same_problem(&runs[0].1)) {
        return Err(CliError::Config(format!(
            "config '{name}' uses a different problem source than '{}'",
            runs[0].0
        )));
    }
    let mut outcomes = Vec::with_capacity(runs.len());
    for (name, cfg) in runs {
        let mut cfg = cfg.clone();
        cfg.out = out.join(name);
        outcomes.push(run(&cfg)?);
    }
    let rows: Vec<String> = runs
        .iter()
        .zip(&outcomes)
        .map(|((name, _), o)| o.summary.comparison_csv(name))
        .collect();
    let mut dir = OutputDir::create(out)?;
    if let Err(e) = dir.write("comparison.csv", COMPARISON_HEADER, &rows) {
        dir.cleanup();
        return Err(e);
    }
    Ok(outcomes)
}

/// Flag tokens after the subcommand, without `--config` pairs.
fn strip_config(tokens: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = tokens.iter();
    while let Some(t) = it.next() {
        if t == "--config" {
            it.next();
        } else if !t.starts_with("--config=") {
            out.push(t.clone());
        }
    }
    out
}

fn unique_names(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths
        .iter()
        .map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into()))
        .collect();
    stems
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if stems.iter().filter(|t| *t == s).count() > 1 {
                format!("{i}_{s}")
            } else {
                s.clone()
            }
        })
        .collect()
}

/// Print to stdout, ignoring a closed pipe.
fn emit(lines: &[String]) {
    use std::io::Write;
    let mut text = lines.join("\n");
    text.push('\n');
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn dispatch(args: &[String]) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(CliError::Config(e.to_string()));
        }
    };
    let flags = strip_config(args.get(2..).unwrap_or(&[]));
    match cli.cmd {
        Command::Run { config, .. } => {
            let cfg = parse_run_args(config.as_deref(), &flags)?.resolve()?;
            let o = run(&cfg)?;
            emit(&[SUMMARY_HEADER.to_string(), o.summary.csv()]);
            if !o.trace.converged {
                return Err(CliError::NotConverged(o.trace.outer_iterations()));
            }
        }
        Command::Compare { configs, args } => {
            if configs.len() < 2 {
                return Err(CliError::Config("compare needs at least two --config files".into()));
            }
            let names = unique_names(&configs);
            let mut runs = Vec::new();
            for (name, path) in names.into_iter().zip(&configs) {
                runs.push((name, parse_run_args(Some(path), &flags)?.resolve()?));
            }
            let outcomes = compare(&args.out, &runs)?;
            let mut lines = vec![COMPARISON_HEADER.to_string()];
            for ((name, _), o) in runs.iter().zip(&outcomes) {
                lines.push(o.summary.comparison_csv(name));
            }
            emit(&lines);
            if let Some(o) = outcomes.iter().find(|o| !o.trace.converged) {
                return Err(CliError::NotConverged(o.trace.outer_iterations()));
            }
        }
        Command::Spectrum { gen } => {
            let src = config::parse_gen(&gen)?;
            let ProblemSource::Generator { m, x, y } = src else {
                unreachable!()
            };
            let (_, basis) = gen_convdiff(m, x, y)?;
            let mut eigs: Vec<f64> = basis.eigenvalues().iter().map(|z| z.re).collect();
            eigs.sort_by(f64::total_cmp);
            let mut lines = vec!["j,re".to_string()];
            lines.extend(eigs.iter().enumerate().map(|(j, e)| format!("{},{}", j + 1, num(*e))));
            emit(&lines);
        }
    }
    Ok(())
}

/// Entry point used by the `invit` binary; returns the process exit code.
pub fn run_with_args(args: &[String]) -> i32 {
    match dispatch(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("invit: {e}");
            e.exit_code()
        }
    }
}

pub fn run_from_env() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run_with_args(&args)
}
