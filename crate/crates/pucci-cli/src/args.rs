//! Flag definitions, the flat key=value config file, and resolution into
//! validated run configurations.  Every flag may be pre-populated from the
//! config file; explicit flags win.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pucci::spectrum::Sign;
use pucci::{IntegratorConfig, Nonlinearity, OperatorKind, PucciParams};

use crate::AppError;

#[derive(Parser, Debug)]
#[command(
    name = "pucci",
    version,
    about = "Radial half-spectrum, eigenfunctions and bifurcation branches of Pucci extremal operators on the unit ball",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the first eigenvalues of both half-spectra
    Spectrum(SpectrumArgs),
    /// Sample one eigenfunction on [0, 1]
    Eigenfunction(EigenfunctionArgs),
    /// Trace a bifurcation branch by amplitude continuation
    Branch(BranchArgs),
    /// Run a verification suite and report PASS/FAIL per check
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Interlacing,
    Gap,
    Monotonicity,
    Bounds,
    Maxprinciple,
    Crosscheck,
    Envelope,
    All,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Lower ellipticity constant (positive)
    #[arg(long = "lambda", value_name = "REAL")]
    pub lambda: Option<f64>,
    /// Upper ellipticity constant (>= lambda)
    #[arg(long = "Lambda", value_name = "REAL")]
    pub lambda_hi: Option<f64>,
    /// Space dimension N >= 1
    #[arg(long, value_name = "INT")]
    pub dim: Option<u32>,
    /// Extremal operator selector
    #[arg(long, value_enum)]
    pub operator: Option<OperatorArg>,
    /// Relative integration tolerance
    #[arg(long, value_name = "REAL")]
    pub rel_tol: Option<f64>,
    /// Absolute integration tolerance
    #[arg(long, value_name = "REAL")]
    pub abs_tol: Option<f64>,
    /// Step-size cap for the integrator
    #[arg(long, value_name = "REAL")]
    pub max_step: Option<f64>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output path (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Flat key=value file pre-populating any flag (explicit flags win)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// How many eigenvalues per sign
    #[arg(long, value_name = "INT")]
    pub count: Option<usize>,
    /// Which half-spectrum
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,
}

#[derive(Args, Debug)]
pub struct EigenfunctionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Eigenvalue index (1-based)
    #[arg(long, value_name = "INT")]
    pub k: Option<usize>,
    /// Which half-spectrum (plus or minus)
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,
    /// Number of sample intervals on [0, 1]
    #[arg(long, value_name = "INT")]
    pub samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BranchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Branch index (1-based)
    #[arg(long, value_name = "INT")]
    pub k: Option<usize>,
    /// Branch sign (plus or minus)
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,
    /// Forcing term: zero, oddpower:c=<c>,p=<p>, or lions:p=<p>
    #[arg(long, value_name = "SPEC")]
    pub nonlinearity: Option<String>,
    /// Smallest origin amplitude
    #[arg(long, value_name = "REAL")]
    pub alpha_min: Option<f64>,
    /// Largest origin amplitude
    #[arg(long, value_name = "REAL")]
    pub alpha_max: Option<f64>,
    /// Number of branch points
    #[arg(long, value_name = "INT")]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which suite to run
    #[arg(long, value_enum)]
    pub suite: Option<SuiteArg>,
    /// Seed for the deterministic trial generator
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
    /// Grid resolution for finite-difference suites
    #[arg(long, value_name = "INT")]
    pub n: Option<usize>,
}

/// Flat key=value config file; `#` starts a comment.
pub fn load_config(path: &PathBuf) -> Result<BTreeMap<String, String>, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(AppError::Usage(format!(
                "config line {} is not key=value: {raw:?}",
                line_no + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_from<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, AppError> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            AppError::Usage(format!("config key {key} has invalid value {raw:?}"))
        }),
    }
}

/// Everything a subcommand needs after flag/config resolution.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: PucciParams,
    pub integ: IntegratorConfig,
    pub format: FormatArg,
    pub out: Option<PathBuf>,
    pub file: BTreeMap<String, String>,
}

impl CommonArgs {
    /// Merge flags with the config file and validate; problem parameters are
    /// required unless `require_params` is false (verification suites have
    /// built-in grids).
    pub fn resolve(&self, require_params: bool) -> Result<Resolved, AppError> {
        let file = match &self.config {
            Some(path) => load_config(path)?,
            None => BTreeMap::new(),
        };
        let lambda = match self.lambda {
            Some(v) => Some(v),
            None => parse_from::<f64>(&file, "lambda")?,
        };
        let lambda_hi = match self.lambda_hi {
            Some(v) => Some(v),
            None => parse_from::<f64>(&file, "Lambda")?,
        };
        let dim = match self.dim {
            Some(v) => Some(v),
            None => parse_from::<u32>(&file, "dim")?,
        };
        let operator = match self.operator {
            Some(v) => v,
            None => match file.get("operator").map(|s| s.as_str()) {
                None => OperatorArg::Max,
                Some("max") => OperatorArg::Max,
                Some("min") => OperatorArg::Min,
                Some(other) => {
                    return Err(AppError::Usage(format!(
                        "config key operator must be max or min, got {other:?}"
                    )))
                }
            },
        };

        let params = if require_params || (lambda.is_some() && lambda_hi.is_some() && dim.is_some())
        {
            let lambda =
                lambda.ok_or_else(|| AppError::Usage("missing required flag --lambda".into()))?;
            let lambda_hi = lambda_hi
                .ok_or_else(|| AppError::Usage("missing required flag --Lambda".into()))?;
            let dim = dim.ok_or_else(|| AppError::Usage("missing required flag --dim".into()))?;
            let kind = match operator {
                OperatorArg::Max => OperatorKind::Max,
                OperatorArg::Min => OperatorKind::Min,
            };
            PucciParams::new(lambda, lambda_hi, dim, kind)
                .map_err(|e| AppError::Usage(e.to_string()))?
        } else {
            // Placeholder for grid-driven suites; never used directly.
            PucciParams::max_op(1.0, 1.0, 1).expect("valid placeholder")
        };

        let defaults = IntegratorConfig::default();
        let integ = IntegratorConfig {
            rel_tol: match self.rel_tol {
                Some(v) => v,
                None => parse_from::<f64>(&file, "rel-tol")?.unwrap_or(defaults.rel_tol),
            },
            abs_tol: match self.abs_tol {
                Some(v) => v,
                None => parse_from::<f64>(&file, "abs-tol")?.unwrap_or(defaults.abs_tol),
            },
            max_step: match self.max_step {
                Some(v) => v,
                None => parse_from::<f64>(&file, "max-step")?.unwrap_or(defaults.max_step),
            },
            max_r: defaults.max_r,
        };
        if !integ.is_valid() {
            return Err(AppError::Usage(
                "tolerances must lie in (0, 1) and max-step must be positive".into(),
            ));
        }

        let format = match self.format {
            Some(f) => f,
            None => match file.get("format").map(|s| s.as_str()) {
                None => FormatArg::Csv,
                Some("csv") => FormatArg::Csv,
                Some("json") => FormatArg::Json,
                Some(other) => {
                    return Err(AppError::Usage(format!(
                        "config key format must be csv or json, got {other:?}"
                    )))
                }
            },
        };
        let out = match &self.out {
            Some(p) => Some(p.clone()),
            None => file.get("out").map(PathBuf::from),
        };
        Ok(Resolved {
            params,
            integ,
            format,
            out,
            file,
        })
    }

    /// True when a full (λ, Λ, N) triple was given on the command line or in
    /// the config file.
    pub fn has_explicit_triple(&self, file: &BTreeMap<String, String>) -> bool {
        (self.lambda.is_some() || file.contains_key("lambda"))
            && (self.lambda_hi.is_some() || file.contains_key("Lambda"))
            && (self.dim.is_some() || file.contains_key("dim"))
    }
}

pub fn resolve_sign(arg: Option<SignArg>, file: &BTreeMap<String, String>) -> Result<SignArg, AppError> {
    match arg {
        Some(s) => Ok(s),
        None => match file.get("sign").map(|s| s.as_str()) {
            None => Ok(SignArg::Both),
            Some("plus") => Ok(SignArg::Plus),
            Some("minus") => Ok(SignArg::Minus),
            Some("both") => Ok(SignArg::Both),
            Some(other) => Err(AppError::Usage(format!(
                "config key sign must be plus, minus or both, got {other:?}"
            ))),
        },
    }
}

pub fn single_sign(arg: SignArg) -> Result<Sign, AppError> {
    match arg {
        SignArg::Plus => Ok(Sign::Plus),
        SignArg::Minus => Ok(Sign::Minus),
        SignArg::Both => Err(AppError::Usage(
            "--sign both is not valid here; pick plus or minus".into(),
        )),
    }
}

/// Parse `zero`, `oddpower:c=<c>,p=<p>` or `lions:p=<p>`.
pub fn parse_nonlinearity(spec: &str) -> Result<Nonlinearity, AppError> {
    let (family, rest) = match spec.split_once(':') {
        Some((f, r)) => (f, r),
        None => (spec, ""),
    };
    let mut kv = BTreeMap::new();
    for part in rest.split(',').filter(|s| !s.is_empty()) {
        let Some((k, v)) = part.split_once('=') else {
            return Err(AppError::Usage(format!(
                "nonlinearity parameter {part:?} is not key=value"
            )));
        };
        let value: f64 = v.parse().map_err(|_| {
            AppError::Usage(format!("nonlinearity parameter {k} has invalid value {v:?}"))
        })?;
        kv.insert(k.to_string(), value);
    }
    match family {
        "zero" => Ok(Nonlinearity::Zero),
        "oddpower" => {
            let c = *kv
                .get("c")
                .ok_or_else(|| AppError::Usage("oddpower needs c=<coeff>".into()))?;
            let p = *kv
                .get("p")
                .ok_or_else(|| AppError::Usage("oddpower needs p=<exponent>".into()))?;
            Nonlinearity::odd_power(c, p).map_err(|e| AppError::Usage(e.to_string()))
        }
        "lions" => {
            let p = *kv
                .get("p")
                .ok_or_else(|| AppError::Usage("lions needs p=<exponent>".into()))?;
            Nonlinearity::lions_power(p).map_err(|e| AppError::Usage(e.to_string()))
        }
        other => Err(AppError::Usage(format!(
            "unknown nonlinearity family {other:?} (expected zero, oddpower or lions)"
        ))),
    }
}
