//! Verification suites: each check prints one PASS/FAIL line with its
//! measured margin.  Suites reuse the library's structural check routines so
//! the CLI and the test suite exercise one implementation.

use pucci::bessel;
use pucci::crosscheck::{
    first_half_eigenvalue_fd, linear_principal_eigenvalue, max_principle_trial,
    random_linear_eigenvalue, CoefficientField, GridProblem, MaxPrincipleSide,
};
use pucci::spectrum::{check_interlacing, gap_ratio, half_eigenvalues, lambda_sweep, Sign};
use pucci::{IntegratorConfig, PucciParams};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::SuiteArg;
use crate::AppError;

pub struct Outcome {
    pub lines: Vec<String>,
    pub failures: usize,
}

impl Outcome {
    fn new() -> Self {
        Self {
            lines: Vec::new(),
            failures: 0,
        }
    }

    fn check(&mut self, passed: bool, text: String) {
        if passed {
            self.lines.push(format!("PASS {text}"));
        } else {
            self.failures += 1;
            self.lines.push(format!("FAIL {text}"));
        }
    }
}

/// The canonical parameter grid used when no explicit triple is given.
fn default_triples() -> Vec<(f64, f64, u32)> {
    let mut v = Vec::new();
    for (lo, hi) in [(1.0, 2.0), (1.0, 5.0), (0.5, 1.0)] {
        for dim in [2u32, 3, 5] {
            v.push((lo, hi, dim));
        }
    }
    v
}

pub struct VerifyContext {
    pub triples: Vec<(f64, f64, u32)>,
    pub integ: IntegratorConfig,
    pub seed: u64,
    pub n: Option<usize>,
}

impl VerifyContext {
    fn single_or_default(&self, fallback: (f64, f64, u32)) -> (f64, f64, u32) {
        if self.triples.len() == 1 {
            self.triples[0]
        } else {
            fallback
        }
    }
}

pub fn run_suite(suite: SuiteArg, ctx: &VerifyContext) -> Result<Outcome, AppError> {
    let mut outcome = Outcome::new();
    match suite {
        SuiteArg::Interlacing => interlacing(ctx, &mut outcome)?,
        SuiteArg::Gap => gap(ctx, &mut outcome)?,
        SuiteArg::Monotonicity => monotonicity(ctx, &mut outcome)?,
        SuiteArg::Bounds => bounds(ctx, &mut outcome)?,
        SuiteArg::Maxprinciple => maxprinciple(ctx, &mut outcome)?,
        SuiteArg::Crosscheck => crosscheck(ctx, &mut outcome)?,
        SuiteArg::Envelope => envelope(ctx, &mut outcome)?,
        SuiteArg::All => {
            interlacing(ctx, &mut outcome)?;
            gap(ctx, &mut outcome)?;
            monotonicity(ctx, &mut outcome)?;
            bounds(ctx, &mut outcome)?;
            maxprinciple(ctx, &mut outcome)?;
            crosscheck(ctx, &mut outcome)?;
            envelope(ctx, &mut outcome)?;
        }
    }
    Ok(outcome)
}

pub fn triples_for(ctx_triple: Option<(f64, f64, u32)>) -> Vec<(f64, f64, u32)> {
    match ctx_triple {
        Some(t) => vec![t],
        None => default_triples(),
    }
}

fn params_of(t: (f64, f64, u32)) -> Result<PucciParams, AppError> {
    PucciParams::max_op(t.0, t.1, t.2).map_err(|e| AppError::Usage(e.to_string()))
}

fn interlacing(ctx: &VerifyContext, out: &mut Outcome) -> Result<(), AppError> {
    for &t in &ctx.triples {
        let params = params_of(t)?;
        let plus = half_eigenvalues(Sign::Plus, 7, &params, &ctx.integ)?;
        let minus = half_eigenvalues(Sign::Minus, 7, &params, &ctx.integ)?;
        match check_interlacing(&plus, &minus, &params) {
            Ok(report) => out.check(
                report.min_margin > 0.0,
                format!(
                    "interlacing lambda={} Lambda={} dim={}: min margin {:.6e}",
                    t.0, t.1, t.2, report.min_margin
                ),
            ),
            Err(e) => out.check(
                false,
                format!("interlacing lambda={} Lambda={} dim={}: {e}", t.0, t.1, t.2),
            ),
        }
    }
    Ok(())
}

fn gap(ctx: &VerifyContext, out: &mut Outcome) -> Result<(), AppError> {
    for &t in &ctx.triples {
        let params = params_of(t)?;
        let (r1, r2) = gap_ratio(&params, &ctx.integ)?;
        out.check(
            r1 - r2 >= -1e-10,
            format!(
                "gap lambda={} Lambda={} dim={}: ratios ({:.12}, {:.12}), slack {:.3e}",
                t.0,
                t.1,
                t.2,
                r1,
                r2,
                r1 - r2
            ),
        );
    }
    Ok(())
}

fn monotonicity(ctx: &VerifyContext, out: &mut Outcome) -> Result<(), AppError> {
    let (_, lambda_hi, dim) = ctx.single_or_default((1.0, 2.0, 3));
    let coarse: Vec<f64> = (1..=8).map(|i| lambda_hi * 0.125 * i as f64).collect();
    let finer: Vec<f64> = (4..=32).map(|i| lambda_hi * 0.03125 * i as f64).collect();
    let max_jump = |s: &[(f64, f64)]| {
        s.windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .fold(0.0f64, f64::max)
    };
    for sign in [Sign::Plus, Sign::Minus] {
        let sweep = lambda_sweep(sign, 1, &coarse, lambda_hi, dim, &ctx.integ)?;
        let monotone = match sign {
            Sign::Plus => sweep.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-10),
            Sign::Minus => sweep.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-10),
        };
        out.check(
            monotone,
            format!(
                "monotonicity {} Lambda={lambda_hi} dim={dim}: mu_1({:.3}) = {:.6} ... mu_1({:.3}) = {:.6}",
                sign.label(),
                sweep[0].0,
                sweep[0].1,
                sweep.last().unwrap().0,
                sweep.last().unwrap().1
            ),
        );
        let refined = lambda_sweep(sign, 1, &finer, lambda_hi, dim, &ctx.integ)?;
        let shrink = max_jump(&sweep) / max_jump(&refined);
        out.check(
            shrink >= 1.8,
            format!(
                "continuity {} Lambda={lambda_hi} dim={dim}: max jump shrink {:.3} after two refinements",
                sign.label(),
                shrink
            ),
        );
    }
    Ok(())
}

fn bounds(ctx: &VerifyContext, out: &mut Outcome) -> Result<(), AppError> {
    for &t in &ctx.triples {
        let params = params_of(t)?;
        let mu_plus = half_eigenvalues(Sign::Plus, 1, &params, &ctx.integ)?[0].mu;
        let mu_minus = half_eigenvalues(Sign::Minus, 1, &params, &ctx.integ)?[0].mu;
        let laplacian = bessel::laplacian_ball_eigenvalue(t.2, 1);
        let scale = t.1 * laplacian;
        let order_ok = if t.0 < t.1 {
            mu_plus < mu_minus
        } else {
            (mu_plus - mu_minus).abs() <= 1e-12 * mu_plus
        };
        let upper = t.0 * laplacian - mu_plus;
        let lower = mu_minus - t.1 * laplacian;
        out.check(
            order_ok && upper >= -1e-10 * scale && lower >= -1e-10 * scale,
            format!(
                "bounds lambda={} Lambda={} dim={}: mu+_1 = {:.8} <= {:.8}, mu-_1 = {:.8} >= {:.8}",
                t.0,
                t.1,
                t.2,
                mu_plus,
                t.0 * laplacian,
                mu_minus,
                t.1 * laplacian
            ),
        );
    }
    Ok(())
}

fn maxprinciple(ctx: &VerifyContext, out: &mut Outcome) -> Result<(), AppError> {
    let t = ctx.single_or_default((1.0, 2.0, 3));
    let n = ctx.n.unwrap_or(1000);
    let params = params_of(t)?;
    let grid = GridProblem::new(params, n)?;
    let (mu_plus, _) = first_half_eigenvalue_fd(true, &grid)?;
    let (mu_minus, _) = first_half_eigenvalue_fd(false, &grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let trials = 100;
    let mut ok_upper = 0;
    let mut ok_lower = 0;
    for _ in 0..trials {
        let mut g: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        *g.last_mut().unwrap() = 0.0;
        if max_principle_trial(0.9 * mu_plus, &g, &grid, MaxPrincipleSide::NonnegativeData).is_ok()
        {
            ok_upper += 1;
        }
        let g_neg: Vec<f64> = g.iter().map(|v| -v).collect();
        if max_principle_trial(
            0.9 * mu_minus,
            &g_neg,
            &grid,
            MaxPrincipleSide::NonpositiveData,
        )
        .is_ok()
        {
            ok_lower += 1;
        }
    }
    out.check(
        ok_upper == trials,
        format!(
            "maxprinciple nonnegative data at 0.9*mu+_1 (n={n}, seed={}): {ok_upper}/{trials} trials",
            ctx.seed
        ),
    );
    out.check(
        ok_lower == trials,
        format!(
            "maxprinciple nonpositive data at 0.9*mu-_1 (n={n}, seed={}): {ok_lower}/{trials} trials",
            ctx.seed
        ),
    );
    // Sharpness probe above the eigenvalue: reported, never asserted.
    let mut g: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
    *g.last_mut().unwrap() = 0.0;
    let probe = max_principle_trial(1.01 * mu_plus, &g, &grid, MaxPrincipleSide::NonnegativeData);
    out.lines.push(format!(
        "INFO maxprinciple sharpness probe at 1.01*mu+_1: {}",
        match probe {
            Ok(v) => format!("no violation (worst {:.3e})", v.worst_value),
            Err(e) => format!("{e}"),
        }
    ));
    Ok(())
}

fn crosscheck(ctx: &VerifyContext, out: &mut Outcome) -> Result<(), AppError> {
    let triples = if ctx.triples.len() == 1 {
        ctx.triples.clone()
    } else {
        vec![(1.0, 2.0, 2), (1.0, 2.0, 3), (1.0, 5.0, 3)]
    };
    let n = ctx.n.unwrap_or(2000);
    for &t in &triples {
        let params = params_of(t)?;
        let grid = GridProblem::new(params, n)?;
        for positive in [true, false] {
            let sign = if positive { Sign::Plus } else { Sign::Minus };
            let mu_ref = half_eigenvalues(sign, 1, &params, &ctx.integ)?[0].mu;
            let (mu_fd, _) = first_half_eigenvalue_fd(positive, &grid)?;
            let rel = (mu_fd - mu_ref).abs() / mu_ref;
            out.check(
                rel <= 5e-3,
                format!(
                    "crosscheck lambda={} Lambda={} dim={} {} (n={n}): shooting {:.8}, grid {:.8}, rel diff {:.3e}",
                    t.0,
                    t.1,
                    t.2,
                    sign.label(),
                    mu_ref,
                    mu_fd,
                    rel
                ),
            );
        }
    }
    Ok(())
}

fn envelope(ctx: &VerifyContext, out: &mut Outcome) -> Result<(), AppError> {
    let t = ctx.single_or_default((1.0, 2.0, 2));
    let n = ctx.n.unwrap_or(1000);
    let params = params_of(t)?;
    let grid = GridProblem::new(params, n)?;
    let mu_plus = half_eigenvalues(Sign::Plus, 1, &params, &ctx.integ)?[0].mu;
    let mu_minus = half_eigenvalues(Sign::Minus, 1, &params, &ctx.integ)?[0].mu;
    let tol = 1e-2;
    let mut inside = 0;
    let trials = 100;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for k in 0..trials {
        let mu = random_linear_eigenvalue(&grid, ctx.seed.wrapping_add(k))?;
        if mu >= mu_plus - tol && mu <= mu_minus + tol {
            inside += 1;
        }
        lo = lo.min(mu);
        hi = hi.max(mu);
    }
    out.check(
        inside == trials,
        format!(
            "envelope lambda={} Lambda={} dim={} (n={n}, seed={}): {inside}/{trials} inside [{:.6}, {:.6}], observed [{:.6}, {:.6}]",
            t.0, t.1, t.2, ctx.seed, mu_plus, mu_minus, lo, hi
        ),
    );
    let laplacian = bessel::laplacian_ball_eigenvalue(t.2, 1);
    let low = linear_principal_eigenvalue(&grid, &CoefficientField::constant(&grid, t.0, t.0))?;
    let high = linear_principal_eigenvalue(&grid, &CoefficientField::constant(&grid, t.1, t.1))?;
    let rel_low = (low - t.0 * laplacian).abs() / (t.0 * laplacian);
    let rel_high = (high - t.1 * laplacian).abs() / (t.1 * laplacian);
    out.check(
        rel_low <= 1e-3 && rel_high <= 1e-3,
        format!(
            "envelope constant fields: lambda side rel err {:.3e}, Lambda side rel err {:.3e}",
            rel_low, rel_high
        ),
    );
    Ok(())
}
