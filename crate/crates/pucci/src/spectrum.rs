//! The radial half-spectrum on the unit ball, computed by shooting.
//!
//! The normalized profile `w^ν` solves `w'' = M(-(N-1)/r·m(w') - w)` with
//! `w(0) = ν1`, `w'(0) = 0`.  It is oscillatory; its zeros `β^ν_k` are all
//! simple, and rescaling gives the complete radial spectrum:
//! `μ^ν_k = (β^ν_k)²` with eigenfunction `φ^ν_k(r) = w^ν(β^ν_k r)`, which has
//! exactly `k-1` interior zeros.  Structural facts (interlacing of the two
//! sequences, the shrinking first-gap ratio, monotonicity in λ) are exposed
//! as check routines so the command-line verifier and the test suite share
//! one implementation.

use crate::integrate::{integrate, locate_sign_change, IntegrateError, IntegratorConfig, Trajectory};
use crate::operator::{Nonlinearity, PucciParams, RadialState};
use thiserror::Error;

/// Sign of the normalized profile at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("found only {found} zeros before the horizon cap (requested {requested})")]
    HorizonExceeded { requested: usize, found: usize },
    #[error("zero at beta = {beta} is not simple: |w'| = {dw} below floor {floor}")]
    DegenerateZero { beta: f64, dw: f64, floor: f64 },
    #[error("interlacing violated: {relation} with lhs = {lhs}, rhs = {rhs} (k = {k})")]
    ViolationFound {
        relation: &'static str,
        k: usize,
        lhs: f64,
        rhs: f64,
    },
    #[error("lambda grid must be strictly increasing inside (0, lambda_hi]")]
    InvalidGrid,
}

/// One record of the half-spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfEigenvalue {
    pub sign: Sign,
    /// Index, starting at 1.
    pub k: usize,
    /// k-th zero of the normalized profile.
    pub beta: f64,
    /// Eigenvalue `beta²`.
    pub mu: f64,
    /// `w'(beta)`, the simplicity witness.
    pub dw_at_beta: f64,
    /// Largest |w| over the lobe ending at `beta`; the natural scale for the
    /// simplicity floor since the oscillation amplitude decays in r.
    pub lobe_max: f64,
}

/// Eigenfunction samples on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub parent: HalfEigenvalue,
    /// `(r, φ(r))` at equispaced radii including both endpoints.
    pub samples: Vec<(f64, f64)>,
    /// `φ'(1) = β·w'(β)`.
    pub boundary_derivative: f64,
}

impl Eigenfunction {
    /// Number of interior sign changes among the samples.
    pub fn interior_sign_changes(&self) -> usize {
        let floor = 1e-9
            * self
                .samples
                .iter()
                .fold(0.0f64, |acc, &(_, v)| acc.max(v.abs()));
        let mut count = 0;
        let mut prev = 0.0f64;
        for &(r, v) in &self.samples {
            if r >= 1.0 - 1e-9 || v.abs() <= floor {
                continue;
            }
            if prev != 0.0 && v.signum() != prev.signum() {
                count += 1;
            }
            prev = v;
        }
        count
    }
}

/// Integrate the normalized profile `w^ν` over `[0, cfg.max_r]`.
pub fn normalized_solution(
    sign: Sign,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, SpectrumError> {
    let initial = RadialState::new(0.0, sign.value(), 0.0);
    Ok(integrate(initial, 1.0, &Nonlinearity::Zero, params, cfg)?)
}

/// Relative floor below which a zero's derivative flags a degenerate zero.
pub const SIMPLICITY_FLOOR: f64 = 1e-6;

/// Polish a bracketed zero of the dense output: safeguarded bracketing first,
/// then two Newton steps so `|w(β)|` drops to interpolant roundoff.
fn refine_zero(traj: &Trajectory, bracket: (f64, f64)) -> Result<f64, IntegrateError> {
    let mut beta = locate_sign_change(traj, bracket)?;
    let (lo, hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    for _ in 0..2 {
        let (u, du) = traj.eval(beta);
        if du == 0.0 {
            break;
        }
        let next = beta - u / du;
        if next > lo && next < hi {
            beta = next;
        }
    }
    Ok(beta)
}

fn scan_zeros(
    traj: &Trajectory,
    count: usize,
    sign: Sign,
) -> Result<Vec<HalfEigenvalue>, SpectrumError> {
    let mut records = Vec::with_capacity(count);
    let mut lobe_max: f64 = 0.0;
    let states = traj.states();
    for w in states.windows(2) {
        let (a, b) = (w[0], w[1]);
        lobe_max = lobe_max.max(a.u.abs());
        let crossing = if b.u == 0.0 {
            Some(b.r)
        } else if a.u != 0.0 && a.u.signum() != b.u.signum() {
            Some(refine_zero(traj, (a.r, b.r))?)
        } else {
            None
        };
        if let Some(beta) = crossing {
            let dw = traj.derivative(beta);
            let floor = SIMPLICITY_FLOOR * lobe_max;
            if dw.abs() < floor {
                return Err(SpectrumError::DegenerateZero { beta, dw, floor });
            }
            records.push(HalfEigenvalue {
                sign,
                k: records.len() + 1,
                beta,
                mu: beta * beta,
                dw_at_beta: dw,
                lobe_max,
            });
            if records.len() == count {
                break;
            }
            lobe_max = 0.0;
        }
    }
    Ok(records)
}

/// The first `count` half-eigenvalues of the given sign on the unit ball.
///
/// The horizon starts at `(count+1)·π/√(min(1, λ))` and doubles (at most ten
/// times) until enough zeros are found; oscillation guarantees termination,
/// so exhausting the cap signals a parameter or integrator pathology.
pub fn half_eigenvalues(
    sign: Sign,
    count: usize,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Vec<HalfEigenvalue>, SpectrumError> {
    assert!(count >= 1);
    let horizon0 =
        (count as f64 + 1.0) * std::f64::consts::PI / params.lambda_lo.min(1.0).sqrt();
    let mut found = 0;
    for doubling in 0..=10 {
        let horizon = horizon0 * f64::powi(2.0, doubling);
        let traj = normalized_solution(sign, params, &cfg.with_max_r(horizon))?;
        let records = scan_zeros(&traj, count, sign)?;
        found = records.len();
        if found >= count {
            return Ok(records);
        }
    }
    Err(SpectrumError::HorizonExceeded {
        requested: count,
        found,
    })
}

/// Half-eigenvalues on the ball of radius `radius`: `μ_k(B_R) = (β_k/R)²`
/// by the rescaling `z(r) = z(0)·w(√μ r)`.
pub fn ball_eigenvalues(
    sign: Sign,
    count: usize,
    radius: f64,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>, SpectrumError> {
    assert!(radius > 0.0);
    let records = half_eigenvalues(sign, count, params, cfg)?;
    Ok(records
        .iter()
        .map(|rec| (rec.beta / radius).powi(2))
        .collect())
}

/// Sample the eigenfunction `φ(r) = w^ν(β·r)` at `n_samples+1` equispaced
/// radii via dense-output interpolation.
pub fn eigenfunction(
    record: &HalfEigenvalue,
    n_samples: usize,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Eigenfunction, SpectrumError> {
    assert!(n_samples >= 1);
    let traj = normalized_solution(record.sign, params, &cfg.with_max_r(record.beta))?;
    let beta = record.beta;
    let samples = (0..=n_samples)
        .map(|j| {
            let r = j as f64 / n_samples as f64;
            (r, traj.value(beta * r))
        })
        .collect();
    Ok(Eigenfunction {
        parent: *record,
        samples,
        boundary_derivative: beta * traj.derivative(beta),
    })
}

/// One verified inequality with its measured margin.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingCheck {
    pub relation: String,
    pub margin: f64,
}

/// Outcome of [`check_interlacing`]: every pairwise inequality with margins.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingReport {
    pub checks: Vec<InterlacingCheck>,
    pub min_margin: f64,
}

/// Verify `μ⁻_k < μ⁺_{k+1}` and `μ⁺_k < μ⁻_{k+1}` for all available k, plus
/// the first-pair ordering `μ⁺₁ ≤ μ⁻₁` (strict when λ < Λ).
pub fn check_interlacing(
    plus: &[HalfEigenvalue],
    minus: &[HalfEigenvalue],
    params: &PucciParams,
) -> Result<InterlacingReport, SpectrumError> {
    assert!(plus.len() >= 2 && minus.len() >= 2);
    let mut checks = Vec::new();
    let mut push = |relation: String, lhs: f64, rhs: f64, strict: bool, k: usize| {
        let margin = rhs - lhs;
        if margin < 0.0 || (strict && margin <= 0.0) {
            return Err(SpectrumError::ViolationFound {
                relation: "interlacing",
                k,
                lhs,
                rhs,
            });
        }
        checks.push(InterlacingCheck { relation, margin });
        Ok(())
    };

    let strict_first = params.lambda_lo < params.lambda_hi;
    push(
        "mu+_1 <= mu-_1".to_string(),
        plus[0].mu,
        minus[0].mu,
        strict_first,
        1,
    )?;
    for k in 0..plus.len().min(minus.len()).saturating_sub(1) {
        push(
            format!("mu-_{} < mu+_{}", k + 1, k + 2),
            minus[k].mu,
            plus[k + 1].mu,
            true,
            k + 1,
        )?;
        push(
            format!("mu+_{} < mu-_{}", k + 1, k + 2),
            plus[k].mu,
            minus[k + 1].mu,
            true,
            k + 1,
        )?;
    }
    let min_margin = checks
        .iter()
        .fold(f64::INFINITY, |acc, c| acc.min(c.margin));
    Ok(InterlacingReport { checks, min_margin })
}

/// The first two gap ratios `(μ⁻₁/μ⁺₁, μ⁻₂/μ⁺₂)`; the first dominates.
pub fn gap_ratio(
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64), SpectrumError> {
    let plus = half_eigenvalues(Sign::Plus, 2, params, cfg)?;
    let minus = half_eigenvalues(Sign::Minus, 2, params, cfg)?;
    Ok((minus[0].mu / plus[0].mu, minus[1].mu / plus[1].mu))
}

/// `μ^sign_k` along a strictly increasing grid of λ values at fixed Λ.
///
/// For k = 1 the result is nondecreasing in λ for the plus sign and
/// nonincreasing for the minus sign.
pub fn lambda_sweep(
    sign: Sign,
    k: usize,
    lambda_grid: &[f64],
    lambda_hi: f64,
    dim: u32,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, f64)>, SpectrumError> {
    let increasing = lambda_grid.windows(2).all(|w| w[0] < w[1]);
    let in_range = lambda_grid
        .iter()
        .all(|&l| l > 0.0 && l <= lambda_hi && l.is_finite());
    if lambda_grid.is_empty() || !increasing || !in_range {
        return Err(SpectrumError::InvalidGrid);
    }
    let mut out = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let params = PucciParams::max_op(lambda, lambda_hi, dim).expect("validated grid");
        let records = half_eigenvalues(sign, k, &params, cfg)?;
        out.push((lambda, records[k - 1].mu));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel;
    use std::f64::consts::PI;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn laplacian_spectrum_dimension_three() {
        let params = PucciParams::max_op(1.0, 1.0, 3).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let recs = half_eigenvalues(sign, 3, &params, &cfg()).unwrap();
            for (i, rec) in recs.iter().enumerate() {
                let expected = ((i + 1) as f64 * PI).powi(2);
                assert!(
                    (rec.mu - expected).abs() <= 1e-8 * expected,
                    "mu_{} = {} vs {}",
                    i + 1,
                    rec.mu,
                    expected
                );
                assert_eq!(rec.mu, rec.beta * rec.beta);
                assert!(rec.dw_at_beta.abs() > 1e-6 * rec.lobe_max);
            }
        }
    }

    #[test]
    fn laplacian_spectrum_dimension_one() {
        let params = PucciParams::max_op(1.0, 1.0, 1).unwrap();
        let recs = half_eigenvalues(Sign::Plus, 2, &params, &cfg()).unwrap();
        for (i, rec) in recs.iter().enumerate() {
            let expected = ((2.0 * (i + 1) as f64 - 1.0) * PI / 2.0).powi(2);
            assert!((rec.mu - expected).abs() <= 1e-8 * expected);
        }
    }

    // For N = 1 the profile is a chain of half-cosine arcs whose frequency
    // switches between 1/√λ (where w > 0) and 1/√Λ (where w < 0), giving the
    // zeros in closed form.  This pins down the piecewise branch switching.
    #[test]
    fn one_dimensional_zeros_have_closed_form() {
        let params = PucciParams::max_op(1.0, 4.0, 1).unwrap();
        let plus = half_eigenvalues(Sign::Plus, 3, &params, &cfg()).unwrap();
        let expected_plus = [PI / 2.0, PI / 2.0 + 2.0 * PI, PI / 2.0 + 3.0 * PI];
        for (rec, want) in plus.iter().zip(expected_plus) {
            assert!((rec.beta - want).abs() <= 1e-9 * want, "{} vs {want}", rec.beta);
        }
        let minus = half_eigenvalues(Sign::Minus, 3, &params, &cfg()).unwrap();
        let expected_minus = [PI, 2.0 * PI, 4.0 * PI];
        for (rec, want) in minus.iter().zip(expected_minus) {
            assert!((rec.beta - want).abs() <= 1e-9 * want, "{} vs {want}", rec.beta);
        }
    }

    #[test]
    fn first_plus_eigenvalue_is_bounded_by_scaled_laplacian() {
        let params = PucciParams::max_op(1.0, 2.0, 2).unwrap();
        let recs = half_eigenvalues(Sign::Plus, 1, &params, &cfg()).unwrap();
        let bound = bessel::laplacian_ball_eigenvalue(2, 1); // λ = 1 scale
        assert!(recs[0].mu > 0.0);
        assert!(recs[0].mu <= bound + 1e-10, "mu+_1 = {} vs {bound}", recs[0].mu);
    }

    #[test]
    fn minus_profile_of_max_op_is_flipped_plus_profile_of_min_op() {
        let max = PucciParams::max_op(1.0, 2.0, 3).unwrap();
        let min = PucciParams::min_op(1.0, 2.0, 3).unwrap();
        let c = cfg().with_max_r(10.0);
        let w_minus = normalized_solution(Sign::Minus, &max, &c).unwrap();
        let w_plus_min = normalized_solution(Sign::Plus, &min, &c).unwrap();
        for j in 0..=100 {
            let r = 10.0 * j as f64 / 100.0;
            let diff = w_minus.value(r) + w_plus_min.value(r);
            assert!(diff.abs() <= 1e-10, "r = {r}: {diff}");
        }
    }

    #[test]
    fn interlacing_holds_strictly_for_distinct_ellipticity() {
        let params = PucciParams::max_op(1.0, 2.0, 3).unwrap();
        let plus = half_eigenvalues(Sign::Plus, 5, &params, &cfg()).unwrap();
        let minus = half_eigenvalues(Sign::Minus, 5, &params, &cfg()).unwrap();
        let report = check_interlacing(&plus, &minus, &params).unwrap();
        assert!(report.min_margin > 0.0);
    }

    #[test]
    fn interlacing_with_equal_ellipticity_collapses_to_one_sequence() {
        let params = PucciParams::max_op(2.0, 2.0, 2).unwrap();
        let plus = half_eigenvalues(Sign::Plus, 3, &params, &cfg()).unwrap();
        let minus = half_eigenvalues(Sign::Minus, 3, &params, &cfg()).unwrap();
        for (p, m) in plus.iter().zip(&minus) {
            assert_eq!(p.mu, m.mu, "lambda = Lambda spectra must coincide");
        }
        assert!(check_interlacing(&plus, &minus, &params).is_ok());
    }

    #[test]
    fn gap_ratio_decreases_from_first_to_second() {
        for (lambda, lambda_hi, dim) in [(1.0, 2.0, 3), (1.0, 10.0, 2)] {
            let params = PucciParams::max_op(lambda, lambda_hi, dim).unwrap();
            let (r1, r2) = gap_ratio(&params, &cfg()).unwrap();
            assert!(r1 >= r2 - 1e-12, "ratios ({r1}, {r2})");
        }
        let params = PucciParams::max_op(1.5, 1.5, 3).unwrap();
        let (r1, r2) = gap_ratio(&params, &cfg()).unwrap();
        assert_eq!((r1, r2), (1.0, 1.0));
    }

    #[test]
    fn lambda_sweep_is_monotone_and_matches_scaled_laplacian_endpoint() {
        let grid = [0.5, 1.0, 1.5, 2.0];
        let plus = lambda_sweep(Sign::Plus, 1, &grid, 2.0, 3, &cfg()).unwrap();
        for w in plus.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-10, "plus sweep must be nondecreasing");
        }
        let minus = lambda_sweep(Sign::Minus, 1, &grid, 2.0, 3, &cfg()).unwrap();
        for w in minus.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-10, "minus sweep must be nonincreasing");
        }
        // λ = Λ endpoint: both operators collapse to Λ·(-Δ).
        let expected = 2.0 * bessel::laplacian_ball_eigenvalue(3, 1);
        assert!((plus[3].1 - expected).abs() <= 1e-8 * expected);
        assert!((minus[3].1 - expected).abs() <= 1e-8 * expected);
    }

    #[test]
    fn invalid_lambda_grids_are_rejected() {
        assert!(matches!(
            lambda_sweep(Sign::Plus, 1, &[1.0, 0.5], 2.0, 3, &cfg()),
            Err(SpectrumError::InvalidGrid)
        ));
        assert!(matches!(
            lambda_sweep(Sign::Plus, 1, &[1.0, 3.0], 2.0, 3, &cfg()),
            Err(SpectrumError::InvalidGrid)
        ));
    }

    #[test]
    fn eigenfunction_matches_sinc_profile() {
        let params = PucciParams::max_op(1.0, 1.0, 3).unwrap();
        let recs = half_eigenvalues(Sign::Plus, 3, &params, &cfg()).unwrap();
        let phi = eigenfunction(&recs[0], 4, &params, &cfg()).unwrap();
        for &(r, v) in &phi.samples {
            let expected = if r == 0.0 {
                1.0
            } else {
                (PI * r).sin() / (PI * r)
            };
            assert!((v - expected).abs() <= 1e-8, "phi({r}) = {v} vs {expected}");
        }
        assert!(phi.samples.last().unwrap().1.abs() <= 1e-9);
        assert_eq!(phi.interior_sign_changes(), 0);
        assert!(phi.boundary_derivative < 0.0);

        let phi3 = eigenfunction(&recs[2], 1000, &params, &cfg()).unwrap();
        assert_eq!(phi3.interior_sign_changes(), 2);
    }

    #[test]
    fn eigenfunction_of_pucci_operator_keeps_nodal_structure() {
        let params = PucciParams::max_op(1.0, 2.0, 3).unwrap();
        let recs = half_eigenvalues(Sign::Minus, 3, &params, &cfg()).unwrap();
        for (i, rec) in recs.iter().enumerate() {
            let phi = eigenfunction(rec, 800, &params, &cfg()).unwrap();
            assert_eq!(phi.interior_sign_changes(), i, "k = {}", i + 1);
            assert!((phi.samples[0].1 - (-1.0)).abs() <= 1e-12);
            assert!(phi.samples.last().unwrap().1.abs() <= 1e-9);
        }
    }

    #[test]
    fn rescaled_balls_follow_inverse_square_law() {
        let params = PucciParams::max_op(1.0, 2.0, 3).unwrap();
        let unit: Vec<f64> = half_eigenvalues(Sign::Plus, 3, &params, &cfg())
            .unwrap()
            .iter()
            .map(|r| r.mu)
            .collect();
        for radius in [0.5, 2.0] {
            // Different tolerances force a different integration path, so the
            // agreement below is a genuine convergence statement.
            let alt = IntegratorConfig {
                rel_tol: 5e-13,
                abs_tol: 1e-14,
                max_step: 0.7,
                max_r: 50.0,
            };
            let scaled = ball_eigenvalues(Sign::Plus, 3, radius, &params, &alt).unwrap();
            for (k, (&got, &mu1)) in scaled.iter().zip(&unit).enumerate() {
                let expected = mu1 / (radius * radius);
                assert!(
                    (got - expected).abs() <= 1e-10 * expected,
                    "k = {}: {} vs {}",
                    k + 1,
                    got,
                    expected
                );
            }
        }
    }

    #[test]
    fn twenty_zeros_within_finite_horizon() {
        let params = PucciParams::max_op(0.5, 1.0, 5).unwrap();
        let recs = half_eigenvalues(Sign::Plus, 20, &params, &cfg()).unwrap();
        assert_eq!(recs.len(), 20);
        for w in recs.windows(2) {
            assert!(w[0].beta < w[1].beta);
            assert!(w[0].mu < w[1].mu);
        }
    }
}
