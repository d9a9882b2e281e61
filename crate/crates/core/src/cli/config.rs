use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};

use crate::eig::PrecondRegime;
use crate::linalg::generators::Stencil;
use crate::precond::{PolyScheme, TuningTarget};
use crate::C64;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecondArg {
    None,
    Ilu,
    #[value(name = "tuned-i")]
    TunedI,
    #[value(name = "tuned-a")]
    TunedA,
    #[value(name = "tuned-b")]
    TunedB,
    #[value(name = "tuned-l")]
    TunedL,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Auto,
    Cheb,
    Contour,
}

/// Flags shared by `run` and `compare`. Every flag may also appear as
/// `key = value` in a config file (`precond = ilu`).
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Matrix Market file for A
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Mass matrix: a Matrix Market file or `tridiag:a,b,c`
    #[arg(long)]
    pub mass: Option<String>,
    /// EIGB1 eigen-basis sidecar
    #[arg(long)]
    pub eig: Option<PathBuf>,
    /// Convection–diffusion generator `m,ax,bx,gx,ay,by,gy`
    #[arg(long, allow_hyphen_values = true)]
    pub gen: Option<String>,
    /// Shift `RE[,IM]`
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 50)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub outer_tol: f64,
    #[arg(long, value_enum, default_value = "none")]
    pub precond: PrecondArg,
    /// ILU drop tolerance (also the base of tuned preconditioners)
    #[arg(long, default_value_t = 1e-2)]
    pub droptol: f64,
    /// Polynomial degree
    #[arg(long, default_value_t = 10)]
    pub degree: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub poly_scheme: SchemeArg,
    /// Block width (1 = inverse iteration)
    #[arg(long, default_value_t = 1)]
    pub block: usize,
    /// Comma-separated subset of summary,outer,inner,weights
    #[arg(long, default_value = "summary,outer,inner,weights")]
    pub emit: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Parser)]
#[command(no_binary_name = true, args_override_self = true)]
struct RunArgsParser {
    #[command(flatten)]
    args: RunArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Generator { m: usize, x: Stencil, y: Stencil },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MassSource {
    File(PathBuf),
    Tridiag(f64, f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmitSet {
    pub summary: bool,
    pub outer: bool,
    pub inner: bool,
    pub weights: bool,
}

impl EmitSet {
    pub fn all() -> Self {
        Self {
            summary: true,
            outer: true,
            inner: true,
            weights: true,
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        let mut e = Self::default();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "summary" => e.summary = true,
                "outer" => e.outer = true,
                "inner" => e.inner = true,
                "weights" => e.weights = true,
                "all" => e = Self::all(),
                other => return Err(CliError::Config(format!("unknown emit item '{other}'"))),
            }
        }
        Ok(e)
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: ProblemSource,
    pub mass: Option<MassSource>,
    pub eig: Option<PathBuf>,
    pub sigma: C64,
    pub delta: f64,
    pub max_outer: usize,
    pub outer_tol: f64,
    pub precond: PrecondRegime,
    pub block: usize,
    pub emit: EmitSet,
    pub out: PathBuf,
}

impl RunConfig {
    /// Label used in `summary.csv`.
    pub fn precond_label(&self) -> &'static str {
        match self.precond {
            PrecondRegime::None => "none",
            PrecondRegime::Ilu { .. } => "ilu",
            PrecondRegime::Tuned { target, .. } => match target {
                TuningTarget::Identity => "tuned-i",
                TuningTarget::A => "tuned-a",
                TuningTarget::B => "tuned-b",
                TuningTarget::Lambda => "tuned-l",
            },
            PrecondRegime::Poly { .. } => "poly",
        }
    }

    /// `θ` for ILU-based regimes, `d` for polynomials.
    pub fn theta_or_d(&self) -> Option<f64> {
        match self.precond {
            PrecondRegime::None => None,
            PrecondRegime::Ilu { droptol } => Some(droptol),
            PrecondRegime::Tuned { base_droptol, .. } => base_droptol,
            PrecondRegime::Poly { degree, .. } => Some(degree as f64),
        }
    }

    pub fn same_problem(&self, other: &RunConfig) -> bool {
        self.source == other.source && self.mass == other.mass && self.eig == other.eig
    }
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad number '{}' in {what}", t.trim())))
        })
        .collect()
}

pub(super) fn parse_gen(s: &str) -> Result<ProblemSource, CliError> {
    let v = parse_floats(s, "--gen")?;
    if v.len() != 7 || v[0] < 2.0 || v[0].fract() != 0.0 {
        return Err(CliError::Config(
            "--gen expects m,ax,bx,gx,ay,by,gy with integer m >= 2".into(),
        ));
    }
    Ok(ProblemSource::Generator {
        m: v[0] as usize,
        x: Stencil::new(v[1], v[2], v[3]),
        y: Stencil::new(v[4], v[5], v[6]),
    })
}

fn parse_mass(s: &str) -> Result<MassSource, CliError> {
    match s.strip_prefix("tridiag:") {
        Some(rest) => {
            let v = parse_floats(rest, "--mass tridiag")?;
            if v.len() != 3 {
                return Err(CliError::Config("--mass tridiag:a,b,c needs three values".into()));
            }
            Ok(MassSource::Tridiag(v[0], v[1], v[2]))
        }
        None => Ok(MassSource::File(PathBuf::from(s))),
    }
}

fn parse_sigma(s: &str) -> Result<C64, CliError> {
    let v = parse_floats(s, "--sigma")?;
    match v.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err(CliError::Config("--sigma expects RE or RE,IM".into())),
    }
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let source = match (&self.gen, &self.matrix) {
            (Some(g), None) => parse_gen(g)?,
            (None, Some(p)) => ProblemSource::File(p.clone()),
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either --gen or --matrix, not both".into()))
            }
            (None, None) => return Err(CliError::Config("a problem source (--gen or --matrix) is required".into())),
        };
        let sigma = match &self.sigma {
            Some(s) => parse_sigma(s)?,
            None => return Err(CliError::Config("--sigma is required".into())),
        };
        if self.block == 0 {
            return Err(CliError::Config("--block must be >= 1".into()));
        }
        if !(self.delta > 0.0) {
            return Err(CliError::Config("--delta must be > 0".into()));
        }
        if !(self.droptol >= 0.0) {
            return Err(CliError::Config("--droptol must be >= 0".into()));
        }
        let scheme = match self.poly_scheme {
            SchemeArg::Auto => PolyScheme::Auto,
            SchemeArg::Cheb => PolyScheme::Cheb,
            SchemeArg::Contour => PolyScheme::Contour,
        };
        let tuned = |target| PrecondRegime::Tuned {
            target,
            base_droptol: Some(self.droptol),
        };
        let precond = match self.precond {
            PrecondArg::None => PrecondRegime::None,
            PrecondArg::Ilu => PrecondRegime::Ilu { droptol: self.droptol },
            PrecondArg::TunedI => tuned(TuningTarget::Identity),
            PrecondArg::TunedA => tuned(TuningTarget::A),
            PrecondArg::TunedB => tuned(TuningTarget::B),
            PrecondArg::TunedL => tuned(TuningTarget::Lambda),
            PrecondArg::Poly => PrecondRegime::Poly {
                degree: self.degree,
                scheme,
            },
        };
        Ok(RunConfig {
            source,
            mass: self.mass.as_deref().map(parse_mass).transpose()?,
            eig: self.eig.clone(),
            sigma,
            delta: self.delta,
            max_outer: self.max_outer,
            outer_tol: self.outer_tol,
            precond,
            block: self.block,
            emit: EmitSet::parse(&self.emit)?,
            out: self.out.clone(),
        })
    }
}

/// Turn `key = value` lines into `--key value` tokens.
pub fn config_file_tokens(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{}:{}: expected key = value", path.display(), lno + 1))
        })?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key == "config" {
            return Err(CliError::Config("config files cannot include other config files".into()));
        }
        out.push(format!("--{key}"));
        out.push(v.trim().to_string());
    }
    Ok(out)
}

/// Parse flags, with an optional config file whose values the flags override.
pub fn parse_run_args(config: Option<&Path>, flags: &[String]) -> Result<RunArgs, CliError> {
    let mut tokens = match config {
        Some(p) => config_file_tokens(p)?,
        None => Vec::new(),
    };
    tokens.extend(flags.iter().cloned());
    RunArgsParser::try_parse_from(tokens)
        .map(|p| p.args)
        .map_err(|e| CliError::Config(e.to_string()))
}
