//! Command-line front end: spectrum computation, eigenfunction export,
//! branch tracing and the verification suites.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure,
//! 3 verification failure.

mod args;
mod output;
mod verify;

use clap::Parser;
use pucci::bifurcation::{trace_branch, BifurcationError};
use pucci::crosscheck::CrosscheckError;
use pucci::spectrum::{eigenfunction, half_eigenvalues, Sign, SpectrumError};
use pucci::IntegrateError;

use args::{
    parse_nonlinearity, resolve_sign, single_sign, Cli, Command, SignArg, SuiteArg,
};
use output::{Cell, Meta, Table};

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Numerical(String),
    VerifyFailed,
}

impl From<SpectrumError> for AppError {
    fn from(e: SpectrumError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<IntegrateError> for AppError {
    fn from(e: IntegrateError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<BifurcationError> for AppError {
    fn from(e: BifurcationError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<CrosscheckError> for AppError {
    fn from(e: CrosscheckError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful outcomes; everything
            // else is a usage error (exit 1).
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    let code = match run(cli) {
        Ok(()) => 0,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(AppError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            2
        }
        Err(AppError::VerifyFailed) => 3,
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Spectrum(a) => run_spectrum(a),
        Command::Eigenfunction(a) => run_eigenfunction(a),
        Command::Branch(a) => run_branch(a),
        Command::Verify(a) => run_verify(a),
    }
}

fn run_spectrum(a: args::SpectrumArgs) -> Result<(), AppError> {
    let resolved = a.common.resolve(true)?;
    let count = match a.count {
        Some(c) => c,
        None => resolved
            .file
            .get("count")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid count".into())))
            .transpose()?
            .unwrap_or(5),
    };
    if count == 0 {
        return Err(AppError::Usage("count must be at least 1".into()));
    }
    let sign = resolve_sign(a.sign, &resolved.file)?;
    let signs: &[Sign] = match sign {
        SignArg::Plus => &[Sign::Plus],
        SignArg::Minus => &[Sign::Minus],
        SignArg::Both => &[Sign::Plus, Sign::Minus],
    };
    let mut rows = Vec::new();
    for &s in signs {
        for rec in half_eigenvalues(s, count, &resolved.params, &resolved.integ)? {
            rows.push(vec![
                Cell::Label(s.label().to_string()),
                Cell::Int(rec.k as i64),
                Cell::Real(rec.beta),
                Cell::Real(rec.mu),
                Cell::Real(rec.dw_at_beta),
            ]);
        }
    }
    let table = Table {
        meta: Meta::new("spectrum", &resolved.params, &resolved.integ),
        columns: &["sign", "k", "beta", "mu", "dw_at_beta"],
        rows,
        preamble: Vec::new(),
        trailing: Vec::new(),
    };
    table.emit(resolved.format, &resolved.out)
}

fn run_eigenfunction(a: args::EigenfunctionArgs) -> Result<(), AppError> {
    let resolved = a.common.resolve(true)?;
    let k = match a.k {
        Some(k) => k,
        None => resolved
            .file
            .get("k")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid k".into())))
            .transpose()?
            .unwrap_or(1),
    };
    if k == 0 {
        return Err(AppError::Usage("k must be at least 1".into()));
    }
    let samples = match a.samples {
        Some(s) => s,
        None => resolved
            .file
            .get("samples")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid samples".into())))
            .transpose()?
            .unwrap_or(1000),
    };
    if samples == 0 {
        return Err(AppError::Usage("samples must be at least 1".into()));
    }
    let sign_arg = resolve_sign(a.sign.or(Some(SignArg::Plus)), &resolved.file)?;
    let sign = single_sign(sign_arg)?;

    let records = half_eigenvalues(sign, k, &resolved.params, &resolved.integ)?;
    let phi = eigenfunction(&records[k - 1], samples, &resolved.params, &resolved.integ)?;
    let rows = phi
        .samples
        .iter()
        .map(|&(r, v)| vec![Cell::Real(r), Cell::Real(v)])
        .collect();
    let mut meta = Meta::new("eigenfunction", &resolved.params, &resolved.integ);
    meta.mu = Some(phi.parent.mu);
    meta.boundary_derivative = Some(phi.boundary_derivative);
    let preamble = vec![format!(
        "mu={} boundary_derivative={}",
        output::fmt_f64(phi.parent.mu),
        output::fmt_f64(phi.boundary_derivative)
    )];
    let table = Table {
        meta,
        columns: &["r", "value"],
        rows,
        preamble,
        trailing: Vec::new(),
    };
    table.emit(resolved.format, &resolved.out)
}

fn run_branch(a: args::BranchArgs) -> Result<(), AppError> {
    let resolved = a.common.resolve(true)?;
    let file = &resolved.file;
    let k = match a.k {
        Some(k) => k,
        None => file
            .get("k")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid k".into())))
            .transpose()?
            .unwrap_or(1),
    };
    if k == 0 {
        return Err(AppError::Usage("k must be at least 1".into()));
    }
    let sign = single_sign(resolve_sign(a.sign.or(Some(SignArg::Plus)), file)?)?;
    let spec = match &a.nonlinearity {
        Some(s) => s.clone(),
        None => file
            .get("nonlinearity")
            .cloned()
            .unwrap_or_else(|| "zero".to_string()),
    };
    let nl = parse_nonlinearity(&spec)?;
    let alpha_min = match a.alpha_min {
        Some(v) => v,
        None => file
            .get("alpha-min")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid alpha-min".into())))
            .transpose()?
            .unwrap_or(1e-4),
    };
    let alpha_max = match a.alpha_max {
        Some(v) => v,
        None => file
            .get("alpha-max")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid alpha-max".into())))
            .transpose()?
            .unwrap_or(1.0),
    };
    let steps = match a.steps {
        Some(v) => v,
        None => file
            .get("steps")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid steps".into())))
            .transpose()?
            .unwrap_or(10),
    };
    if !(alpha_min > 0.0 && alpha_min < alpha_max) {
        return Err(AppError::Usage(
            "alpha-min must be positive and smaller than alpha-max".into(),
        ));
    }
    if steps < 2 {
        return Err(AppError::Usage("steps must be at least 2".into()));
    }

    let branch = trace_branch(
        k,
        sign,
        &nl,
        alpha_min,
        alpha_max,
        steps,
        &resolved.params,
        &resolved.integ,
    )?;
    let rows = branch
        .points
        .iter()
        .map(|p| {
            vec![
                Cell::Real(p.alpha),
                Cell::Real(p.mu),
                Cell::Real(p.sup_norm),
                Cell::Int(p.nodal_count as i64),
                Cell::Real(p.boundary_derivative),
            ]
        })
        .collect();
    let mut meta = Meta::new("branch", &resolved.params, &resolved.integ);
    meta.nonlinearity = Some(spec);
    meta.termination_reason = Some(branch.termination_reason.label().to_string());
    let trailing = vec![format!(
        "termination_reason={}",
        branch.termination_reason.label()
    )];
    let table = Table {
        meta,
        columns: &["alpha", "mu", "sup_norm", "nodal_count", "boundary_derivative"],
        rows,
        preamble: Vec::new(),
        trailing,
    };
    table.emit(resolved.format, &resolved.out)
}

fn run_verify(a: args::VerifyArgs) -> Result<(), AppError> {
    let resolved = a.common.resolve(false)?;
    let suite = match a.suite {
        Some(s) => s,
        None => match resolved.file.get("suite").map(|s| s.as_str()) {
            None => SuiteArg::All,
            Some(name) => match name {
                "interlacing" => SuiteArg::Interlacing,
                "gap" => SuiteArg::Gap,
                "monotonicity" => SuiteArg::Monotonicity,
                "bounds" => SuiteArg::Bounds,
                "maxprinciple" => SuiteArg::Maxprinciple,
                "crosscheck" => SuiteArg::Crosscheck,
                "envelope" => SuiteArg::Envelope,
                "all" => SuiteArg::All,
                other => {
                    return Err(AppError::Usage(format!("unknown suite {other:?}")));
                }
            },
        },
    };
    let seed = match a.seed {
        Some(s) => s,
        None => resolved
            .file
            .get("seed")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid seed".into())))
            .transpose()?
            .unwrap_or(0),
    };
    let n = match a.n {
        Some(v) => Some(v),
        None => resolved
            .file
            .get("n")
            .map(|s| s.parse().map_err(|_| AppError::Usage("invalid n".into())))
            .transpose()?,
    };

    let explicit = a.common.has_explicit_triple(&resolved.file);
    let triples = verify::triples_for(if explicit {
        Some((
            resolved.params.lambda_lo,
            resolved.params.lambda_hi,
            resolved.params.dim,
        ))
    } else {
        None
    });
    let ctx = verify::VerifyContext {
        triples,
        integ: resolved.integ,
        seed,
        n,
    };
    let outcome = verify::run_suite(suite, &ctx)?;
    let mut text = String::new();
    for line in &outcome.lines {
        text.push_str(line);
        text.push('\n');
    }
    match &resolved.out {
        None => print!("{text}"),
        Some(path) => std::fs::write(path, &text).map_err(|e| {
            AppError::Usage(format!("cannot write output file {}: {e}", path.display()))
        })?,
    }
    if outcome.failures > 0 {
        return Err(AppError::VerifyFailed);
    }
    Ok(())
}
