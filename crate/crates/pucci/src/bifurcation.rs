//! Amplitude-parameterized continuation of the radial solution branches of
//! `-M⁺(D²u) = μu + f(u, μ)`.
//!
//! Each branch point fixes the origin amplitude `α = u(0)` and solves for the
//! `μ` at which the shot `u(·; α, μ)` satisfies `u(1) = 0` with the branch's
//! nodal count.  Because `f(s, μ) = o(|s|)`, the branch with `k-1` interior
//! zeros emanates from `(μ^sign_k, 0)`; the solver brackets `μ` around the
//! eigenvalue (or around the previous branch point) and keeps only roots with
//! the right nodal count.  Folds are detected and reported, not traversed:
//! amplitude is the natural parameter here and an exhausted bracket expansion
//! terminates the branch.

use crate::integrate::{integrate, locate_sign_change, IntegrateError, IntegratorConfig, Trajectory};
use crate::operator::{Nonlinearity, OperatorKind, PucciParams, RadialState};
use crate::spectrum::{half_eigenvalues, Sign, SpectrumError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BifurcationError {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("no terminal root with nodal count {target} in ({lo}, {hi}) after bracket expansion")]
    RootLost { target: usize, lo: f64, hi: f64 },
    #[error("degenerate zero near r = {r}: profile and derivative both vanish")]
    DegenerateZero { r: f64 },
    #[error("amplitude {alpha} does not match branch sign {sign:?}")]
    SignMismatch { alpha: f64, sign: Sign },
}

/// Result of one shot of the boundary value problem on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Shot {
    /// `u(1)`, the boundary residual.
    pub terminal_value: f64,
    pub trajectory: Trajectory,
    /// Interior sign changes of `u` on `(0, 1)`.
    pub nodal_count: usize,
}

/// Zeros closer to `r_hi` than this relative margin are treated as the
/// boundary zero produced by the terminal root solve, not interior nodes.
const BOUNDARY_ZONE: f64 = 1e-3;

/// Count the interior sign changes of the trajectory on `(0, r_hi)`.
///
/// Every crossing is refined to a simple zero; a crossing whose derivative
/// falls below the simplicity floor can only come from the trivial solution
/// and is reported as [`BifurcationError::DegenerateZero`].
pub fn nodal_count(traj: &Trajectory, r_hi: f64) -> Result<usize, BifurcationError> {
    let max_abs = traj.sup_abs_u(0.0, r_hi);
    if max_abs < 1e-100 {
        return Err(BifurcationError::DegenerateZero { r: 0.0 });
    }
    let cutoff = r_hi * (1.0 - BOUNDARY_ZONE);
    let mut count = 0;
    let states = traj.states();
    for w in states.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.r >= r_hi {
            break;
        }
        if a.u != 0.0 && b.u != 0.0 && a.u.signum() != b.u.signum() {
            let r_star = locate_sign_change(traj, (a.r, b.r.min(r_hi)))?;
            if r_star <= 0.0 || r_star >= cutoff {
                continue;
            }
            let slope = traj.derivative(r_star);
            if slope.abs() < 1e-6 * max_abs {
                return Err(BifurcationError::DegenerateZero { r: r_star });
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Integrate `u(0) = α`, `u'(0) = 0` across the unit ball and report the
/// boundary residual together with the nodal count.
///
/// The maximal operator only; minimal-operator branches are handled by the
/// sign flip in [`trace_branch`].
pub fn shoot_evb(
    alpha: f64,
    mu: f64,
    nl: &Nonlinearity,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Shot, BifurcationError> {
    assert_eq!(
        params.operator,
        OperatorKind::Max,
        "shoot_evb expects the maximal operator; flip the sign for the minimal one"
    );
    let traj = integrate(
        RadialState::new(0.0, alpha, 0.0),
        mu,
        nl,
        params,
        &cfg.with_max_r(1.0),
    )?;
    let terminal_value = traj.value(1.0);
    let nodal = if alpha == 0.0 { 0 } else { nodal_count(&traj, 1.0)? };
    Ok(Shot {
        terminal_value,
        trajectory: traj,
        nodal_count: nodal,
    })
}

/// Eigenvalue bracket data shared across branch points.
struct SpectralWindow {
    mu_k: f64,
    half_width: f64,
}

fn spectral_window(
    k: usize,
    sign: Sign,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<SpectralWindow, BifurcationError> {
    let records = half_eigenvalues(sign, k + 1, params, cfg)?;
    let mu_k = records[k - 1].mu;
    let below = if k >= 2 {
        mu_k - records[k - 2].mu
    } else {
        mu_k
    };
    let above = records[k].mu - mu_k;
    Ok(SpectralWindow {
        mu_k,
        half_width: 0.25 * below.min(above),
    })
}

/// Boundary residual at a trial `μ`; `None` marks a blow-up sample.
fn residual(
    alpha: f64,
    mu: f64,
    nl: &Nonlinearity,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Option<Shot>, BifurcationError> {
    match shoot_evb(alpha, mu, nl, params, cfg) {
        Ok(shot) => Ok(Some(shot)),
        Err(BifurcationError::Integrate(IntegrateError::NonFinite { .. })) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Polish one bracketed root of `μ ↦ u(1; α, μ)`.
fn converge_root(
    alpha: f64,
    mut lo: f64,
    mut f_lo: f64,
    mut hi: f64,
    mut f_hi: f64,
    nl: &Nonlinearity,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Option<(f64, Shot)>, BifurcationError> {
    let mut best: Option<(f64, Shot)> = None;
    for iter in 0..80 {
        let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        let mu = if secant.is_finite() && secant > lo && secant < hi && iter % 3 != 2 {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let shot = match residual(alpha, mu, nl, params, cfg)? {
            Some(s) => s,
            None => return Ok(None), // blow-up inside the bracket
        };
        let f = shot.terminal_value;
        let sup = shot.trajectory.sup_abs_u(0.0, 1.0);
        let tol = 1e-10 * (1.0 + sup);
        if best.as_ref().map_or(true, |(_, b)| f.abs() < b.terminal_value.abs()) {
            best = Some((mu, shot));
        }
        let width_ok = hi - lo <= 1e-12 * (1.0 + mu.abs());
        if (f.abs() <= tol && width_ok) || f == 0.0 {
            break;
        }
        if f.signum() == f_lo.signum() {
            lo = mu;
            f_lo = f;
        } else {
            hi = mu;
            f_hi = f;
        }
    }
    Ok(best)
}

fn mu_for_alpha_in_window(
    alpha: f64,
    k: usize,
    window: &SpectralWindow,
    center: f64,
    nl: &Nonlinearity,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<f64, BifurcationError> {
    let target = k - 1;
    const SCAN: usize = 16;
    const MAX_EXPANSIONS: u32 = 8;
    let mut lo = center;
    let mut hi = center;
    for expansion in 0..=MAX_EXPANSIONS {
        let half = window.half_width * f64::powi(2.0, expansion as i32);
        lo = center - half;
        hi = center + half;
        let mut samples: Vec<(f64, Option<f64>)> = Vec::with_capacity(SCAN + 1);
        for j in 0..=SCAN {
            let mu = lo + (hi - lo) * j as f64 / SCAN as f64;
            let value = residual(alpha, mu, nl, params, cfg)?.map(|s| s.terminal_value);
            samples.push((mu, value));
        }
        let mut candidates: Vec<(f64, Shot)> = Vec::new();
        for pair in samples.windows(2) {
            let ((mu_a, va), (mu_b, vb)) = (pair[0], pair[1]);
            let (Some(va), Some(vb)) = (va, vb) else { continue };
            if va == 0.0 || va.signum() == vb.signum() {
                continue;
            }
            if let Some((mu, shot)) =
                converge_root(alpha, mu_a, va, mu_b, vb, nl, params, cfg)?
            {
                if shot.nodal_count == target {
                    candidates.push((mu, shot));
                }
            }
        }
        if let Some((mu, _)) = candidates
            .into_iter()
            .min_by(|a, b| (a.0 - center).abs().total_cmp(&(b.0 - center).abs()))
        {
            return Ok(mu);
        }
    }
    Err(BifurcationError::RootLost { target, lo, hi })
}

/// Solve for the `μ` at which the shot from amplitude `alpha` hits the
/// boundary with `k-1` interior zeros.
///
/// The search bracket is centered on `bracket_hint` when given (warm start
/// from the previous branch point) and on `μ^sign_k` otherwise, with an
/// initial half-width of a quarter of the adjacent spectral gap, doubled up
/// to eight times.
pub fn mu_for_alpha(
    alpha: f64,
    k: usize,
    sign: Sign,
    nl: &Nonlinearity,
    params: &PucciParams,
    cfg: &IntegratorConfig,
    bracket_hint: Option<f64>,
) -> Result<f64, BifurcationError> {
    assert!(k >= 1);
    if alpha == 0.0 || alpha.signum() != sign.value() {
        return Err(BifurcationError::SignMismatch { alpha, sign });
    }
    let window = spectral_window(k, sign, params, cfg)?;
    let center = bracket_hint.unwrap_or(window.mu_k);
    mu_for_alpha_in_window(alpha, k, &window, center, nl, params, cfg)
}

/// One computed point of a branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    /// Origin amplitude `u(0)`.
    pub alpha: f64,
    pub mu: f64,
    /// `max |u|` on `[0, 1]`; may exceed `|alpha|` for off-center peaks.
    pub sup_norm: f64,
    pub nodal_count: usize,
    /// `u'(1)`.
    pub boundary_derivative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// The amplitude schedule was exhausted.
    AmplitudeLimit,
    /// A previously tracked root vanished from the expanded bracket.
    FoldDetected,
    /// No starting root was found at all.
    RootLost,
}

impl TerminationReason {
    pub fn label(self) -> &'static str {
        match self {
            TerminationReason::AmplitudeLimit => "AmplitudeLimit",
            TerminationReason::FoldDetected => "FoldDetected",
            TerminationReason::RootLost => "RootLost",
        }
    }
}

/// A traced branch: amplitude-ordered points with a constant nodal count.
#[derive(Debug, Clone)]
pub struct Branch {
    pub sign: Sign,
    pub k: usize,
    pub nonlinearity: Nonlinearity,
    pub points: Vec<BranchPoint>,
    pub termination_reason: TerminationReason,
}

/// Trace the branch through `(μ^sign_k, 0)` over a geometric amplitude
/// schedule from `alpha_min` to `alpha_max` (sign-adjusted), warm-starting
/// each root solve from the previous point.
///
/// Minimal-operator parameters are handled by tracing the flipped branch of
/// the maximal operator (the forcing family is odd) and negating amplitudes
/// and boundary derivatives on the way out.
pub fn trace_branch(
    k: usize,
    sign: Sign,
    nl: &Nonlinearity,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Branch, BifurcationError> {
    assert!(0.0 < alpha_min && alpha_min < alpha_max);
    assert!(steps >= 2);

    if params.operator == OperatorKind::Min {
        let max_params = PucciParams {
            operator: OperatorKind::Max,
            ..*params
        };
        let flipped_sign = match sign {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        };
        let mut branch = trace_branch(
            k,
            flipped_sign,
            nl,
            alpha_min,
            alpha_max,
            steps,
            &max_params,
            cfg,
        )?;
        for p in &mut branch.points {
            p.alpha = -p.alpha;
            p.boundary_derivative = -p.boundary_derivative;
        }
        branch.sign = sign;
        return Ok(branch);
    }

    let window = spectral_window(k, sign, params, cfg)?;
    let ratio = (alpha_max / alpha_min).powf(1.0 / (steps as f64 - 1.0));
    let mut points = Vec::with_capacity(steps);
    let mut termination = TerminationReason::AmplitudeLimit;
    let mut hint = window.mu_k;
    for j in 0..steps {
        let alpha = sign.value() * alpha_min * ratio.powi(j as i32);
        match mu_for_alpha_in_window(alpha, k, &window, hint, nl, params, cfg) {
            Ok(mu) => {
                let shot = shoot_evb(alpha, mu, nl, params, cfg)?;
                points.push(BranchPoint {
                    alpha,
                    mu,
                    sup_norm: shot.trajectory.sup_abs_u(0.0, 1.0),
                    nodal_count: shot.nodal_count,
                    boundary_derivative: shot.trajectory.derivative(1.0),
                });
                hint = mu;
            }
            Err(BifurcationError::RootLost { .. }) => {
                termination = if points.is_empty() {
                    TerminationReason::RootLost
                } else {
                    TerminationReason::FoldDetected
                };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Branch {
        sign,
        k,
        nonlinearity: *nl,
        points,
        termination_reason: termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    fn params() -> PucciParams {
        PucciParams::max_op(1.0, 2.0, 3).unwrap()
    }

    fn mu_k(sign: Sign, k: usize) -> f64 {
        half_eigenvalues(sign, k, &params(), &cfg()).unwrap()[k - 1].mu
    }

    #[test]
    fn zero_forcing_reduces_to_the_eigenproblem() {
        let mu1 = mu_k(Sign::Plus, 1);
        let shot = shoot_evb(1.0, mu1, &Nonlinearity::Zero, &params(), &cfg()).unwrap();
        assert!(shot.terminal_value.abs() <= 1e-9);
        assert_eq!(shot.nodal_count, 0);
    }

    #[test]
    fn homogeneity_doubles_the_trajectory() {
        let mu1 = mu_k(Sign::Plus, 1);
        let one = shoot_evb(1.0, mu1, &Nonlinearity::Zero, &params(), &cfg()).unwrap();
        let two = shoot_evb(2.0, mu1, &Nonlinearity::Zero, &params(), &cfg()).unwrap();
        for j in 0..=50 {
            let r = j as f64 / 50.0;
            let diff = two.trajectory.value(r) - 2.0 * one.trajectory.value(r);
            assert!(diff.abs() <= 1e-9, "r = {r}: {diff}");
        }
    }

    #[test]
    fn cubic_forcing_perturbs_at_third_order() {
        let mu1 = mu_k(Sign::Plus, 1);
        let nl = Nonlinearity::odd_power(-1.0, 3.0).unwrap();
        let t = |alpha: f64| {
            shoot_evb(alpha, mu1, &nl, &params(), &cfg())
                .unwrap()
                .terminal_value
                .abs()
        };
        // Calibrate the cubic constant at alpha = 1e-2, then check the bound
        // |u(1)| <= C·alpha³ down the sequence; 1e-9 absorbs the residual of
        // the f = 0 run at the same eigenvalue.
        let c_cal = t(1e-2) / 1e-6;
        assert!(c_cal > 0.0 && c_cal.is_finite());
        for alpha in [1e-3f64, 1e-4] {
            let bound = 1.5 * c_cal * alpha.powi(3) + 1e-9;
            let val = t(alpha);
            assert!(val <= bound, "alpha = {alpha}: |u(1)| = {val} vs bound {bound}");
        }
    }

    #[test]
    fn zero_forcing_root_is_the_eigenvalue() {
        for (k, sign, alpha) in [(1, Sign::Plus, 0.8), (2, Sign::Minus, -1.3)] {
            let mu = mu_for_alpha(alpha, k, sign, &Nonlinearity::Zero, &params(), &cfg(), None)
                .unwrap();
            let expected = mu_k(sign, k);
            assert!(
                (mu - expected).abs() <= 1e-8 * expected,
                "k = {k}: {mu} vs {expected}"
            );
        }
    }

    #[test]
    fn small_amplitude_root_approaches_the_eigenvalue() {
        let nl = Nonlinearity::odd_power(-1.0, 3.0).unwrap();
        let mu1 = mu_k(Sign::Plus, 1);
        let mu = mu_for_alpha(1e-3, 1, Sign::Plus, &nl, &params(), &cfg(), None).unwrap();
        assert!((mu - mu1).abs() <= 1e-4, "mu = {mu} vs {mu1}");

        // Decreasing amplitudes must close in on the bifurcation point.
        let mut prev = f64::INFINITY;
        for alpha in [1e-2, 1e-3, 1e-4] {
            let mu = mu_for_alpha(alpha, 1, Sign::Plus, &nl, &params(), &cfg(), None).unwrap();
            let gap = (mu - mu1).abs();
            assert!(gap <= prev, "gap must shrink along alpha -> 0");
            prev = gap;
        }
    }

    #[test]
    fn second_minus_branch_keeps_one_interior_zero() {
        let nl = Nonlinearity::odd_power(-1.0, 3.0).unwrap();
        let mu = mu_for_alpha(-1e-2, 2, Sign::Minus, &nl, &params(), &cfg(), None).unwrap();
        let shot = shoot_evb(-1e-2, mu, &nl, &params(), &cfg()).unwrap();
        assert_eq!(shot.nodal_count, 1);
    }

    #[test]
    fn sign_mismatch_is_rejected() {
        assert!(matches!(
            mu_for_alpha(-1.0, 1, Sign::Plus, &Nonlinearity::Zero, &params(), &cfg(), None),
            Err(BifurcationError::SignMismatch { .. })
        ));
    }

    #[test]
    fn zero_forcing_branch_is_vertical() {
        let branch = trace_branch(
            1,
            Sign::Plus,
            &Nonlinearity::Zero,
            1e-3,
            1.0,
            6,
            &params(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(branch.termination_reason, TerminationReason::AmplitudeLimit);
        assert_eq!(branch.points.len(), 6);
        let mu1 = mu_k(Sign::Plus, 1);
        for p in &branch.points {
            assert!((p.mu - mu1).abs() <= 1e-8 * mu1, "vertical branch: {}", p.mu);
            assert_eq!(p.nodal_count, 0);
        }
        for w in branch.points.windows(2) {
            assert!(w[0].alpha < w[1].alpha, "alpha strictly monotone");
        }
    }

    #[test]
    fn lions_branch_bifurcates_from_first_eigenvalue_with_positive_profiles() {
        let nl = Nonlinearity::lions_power(2.0).unwrap();
        let branch = trace_branch(1, Sign::Plus, &nl, 1e-4, 0.5, 5, &params(), &cfg()).unwrap();
        assert_eq!(branch.termination_reason, TerminationReason::AmplitudeLimit);
        let mu1 = mu_k(Sign::Plus, 1);
        assert!((branch.points[0].mu - mu1).abs() <= 1e-3 * mu1);
        for p in &branch.points {
            assert_eq!(p.nodal_count, 0, "positive profile along the branch");
            assert!(p.sup_norm > 0.0);
        }
        // Verify positivity of the largest-amplitude profile pointwise.
        let last = branch.points.last().unwrap();
        let shot = shoot_evb(last.alpha, last.mu, &nl, &params(), &cfg()).unwrap();
        for j in 0..100 {
            let r = j as f64 / 100.0;
            assert!(shot.trajectory.value(r) > 0.0, "u({r}) > 0");
        }
    }

    #[test]
    fn minimal_operator_branch_is_the_flipped_maximal_branch() {
        let nl = Nonlinearity::odd_power(-1.0, 3.0).unwrap();
        let min_params = PucciParams::min_op(1.0, 2.0, 3).unwrap();
        let min_branch =
            trace_branch(1, Sign::Plus, &nl, 1e-3, 1e-1, 3, &min_params, &cfg()).unwrap();
        let max_branch =
            trace_branch(1, Sign::Minus, &nl, 1e-3, 1e-1, 3, &params(), &cfg()).unwrap();
        assert_eq!(min_branch.sign, Sign::Plus);
        for (a, b) in min_branch.points.iter().zip(&max_branch.points) {
            assert_eq!(a.mu, b.mu);
            assert_eq!(a.alpha, -b.alpha);
            assert!(a.alpha > 0.0);
        }
    }

    #[test]
    fn nodal_count_counts_interior_zeros_only() {
        let p = params();
        let recs = half_eigenvalues(Sign::Plus, 3, &p, &cfg()).unwrap();
        // Third eigenfunction: two interior zeros on (0, 1).
        let shot = shoot_evb(1.0, recs[2].mu, &Nonlinearity::Zero, &p, &cfg()).unwrap();
        assert_eq!(shot.nodal_count, 2);
        // Normalized profile up to its first zero: none.
        let traj = spectrum::normalized_solution(Sign::Plus, &p, &cfg().with_max_r(recs[0].beta))
            .unwrap();
        assert_eq!(nodal_count(&traj, recs[0].beta).unwrap(), 0);
    }

    #[test]
    fn trivial_trajectory_raises_degenerate_zero() {
        let traj = integrate(
            RadialState::new(0.0, 0.0, 0.0),
            1.0,
            &Nonlinearity::Zero,
            &params(),
            &cfg().with_max_r(1.0),
        )
        .unwrap();
        assert!(matches!(
            nodal_count(&traj, 1.0),
            Err(BifurcationError::DegenerateZero { .. })
        ));
    }
}
