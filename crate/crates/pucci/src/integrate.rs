//! Adaptive embedded Runge-Kutta 5(4) integration of the radial ODE with
//! dense output.
//!
//! The right-hand side is globally Lipschitz but only piecewise smooth (the
//! slope maps switch at `u' = 0` and where the argument of the inverse map
//! crosses zero).  Kinks are not event-located; the error estimator shrinks
//! steps across them, which is enough for accuracy because stability is not
//! at stake.  Step sizes are additionally capped so that no step can contain
//! more than one zero of `u`, keeping sign-change bracketing exhaustive.

use crate::operator::{radial_rhs, Nonlinearity, PucciParams, RadialState};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("state left the finite range near r = {r} (blow-up)")]
    NonFinite { r: f64 },
    #[error("step size collapsed or step budget exhausted near r = {r}")]
    StepLimit { r: f64 },
    #[error("sign-change bracket ({a}, {b}) has equal signs at the endpoints")]
    NoBracket { a: f64, b: f64 },
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Integration horizon.
    pub max_r: f64,
}

impl Default for IntegratorConfig {
    // rel 1e-12 rather than the more obvious 1e-10: zero locations inherit
    // the integration error, and downstream consumers compare eigenvalues
    // from different integration paths at 1e-10 relative.
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-13,
            max_step: 1.0,
            max_r: 50.0,
        }
    }
}

impl IntegratorConfig {
    pub fn with_max_r(self, max_r: f64) -> Self {
        Self { max_r, ..self }
    }

    pub fn is_valid(&self) -> bool {
        self.rel_tol > 0.0
            && self.rel_tol < 1.0
            && self.abs_tol > 0.0
            && self.abs_tol < 1.0
            && self.max_step > 0.0
            && self.max_r > 0.0
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// Error weights (5th minus embedded 4th order).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_ALPHA: f64 = 0.17;
const PI_BETA: f64 = 0.04;
const MAX_STEPS: usize = 20_000_000;

type Vec2 = [f64; 2];

/// One accepted step with the quartic interpolation coefficients of both
/// components.
#[derive(Debug, Clone, Copy)]
struct DenseSegment {
    r0: f64,
    h: f64,
    cont: [Vec2; 5],
}

impl DenseSegment {
    fn eval(&self, r: f64) -> Vec2 {
        let theta = ((r - self.r0) / self.h).clamp(0.0, 1.0);
        let omt = 1.0 - theta;
        let mut out = [0.0; 2];
        for i in 0..2 {
            let c = &self.cont;
            out[i] = c[0][i] + theta * (c[1][i] + omt * (c[2][i] + theta * (c[3][i] + omt * c[4][i])));
        }
        out
    }
}

/// Immutable solution of one initial value problem on `[r0, max_r]`.
///
/// Stores the accepted states plus per-step dense-output coefficients, so
/// `u` and `u'` can be evaluated anywhere inside the covered interval.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<RadialState>,
    segments: Vec<DenseSegment>,
}

impl Trajectory {
    pub fn states(&self) -> &[RadialState] {
        &self.states
    }

    pub fn start_r(&self) -> f64 {
        self.states.first().map_or(0.0, |s| s.r)
    }

    pub fn end_r(&self) -> f64 {
        self.states.last().map_or(0.0, |s| s.r)
    }

    fn segment_for(&self, r: f64) -> Option<&DenseSegment> {
        if self.segments.is_empty() {
            return None;
        }
        let idx = self
            .segments
            .partition_point(|seg| seg.r0 + seg.h < r)
            .min(self.segments.len() - 1);
        Some(&self.segments[idx])
    }

    /// Dense evaluation of `(u, u')`; clamps outside the covered interval.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self.segment_for(r) {
            Some(seg) => {
                let v = seg.eval(r);
                (v[0], v[1])
            }
            None => {
                let s = self.states[0];
                (s.u, s.du)
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.eval(r).1
    }

    /// Largest |u| over accepted nodes.
    pub fn max_abs_u(&self) -> f64 {
        self.states.iter().fold(0.0, |acc, s| acc.max(s.u.abs()))
    }

    /// Largest |u| on `[a, b]`, scanning nodes plus a fixed number of dense
    /// subsamples per step.
    pub fn sup_abs_u(&self, a: f64, b: f64) -> f64 {
        let mut sup: f64 = 0.0;
        for seg in &self.segments {
            let lo = seg.r0.max(a);
            let hi = (seg.r0 + seg.h).min(b);
            if lo > hi {
                continue;
            }
            for j in 0..=8 {
                let r = lo + (hi - lo) * j as f64 / 8.0;
                sup = sup.max(seg.eval(r)[0].abs());
            }
        }
        if self.segments.is_empty() {
            sup = sup.max(self.states[0].u.abs());
        }
        sup
    }
}

/// Step cap guaranteeing at most one zero of `u` per accepted step: a tenth
/// of the shortest oscillation wavelength compatible with the parameters.
fn oscillation_step_cap(mu: f64, params: &PucciParams) -> f64 {
    std::f64::consts::PI / (10.0 * (1.0 + mu.max(0.0) / params.lambda_lo).sqrt())
}

struct Ode<'a> {
    mu: f64,
    nl: &'a Nonlinearity,
    params: &'a PucciParams,
}

impl Ode<'_> {
    fn eval(&self, r: f64, y: Vec2) -> Vec2 {
        let (du, ddu) = radial_rhs(RadialState::new(r, y[0], y[1]), self.mu, self.nl, self.params);
        [du, ddu]
    }
}

fn initial_step(ode: &Ode, r0: f64, y0: Vec2, f0: Vec2, cfg: &IntegratorConfig, h_cap: f64) -> f64 {
    let sc = |y: Vec2| {
        [
            cfg.abs_tol + cfg.rel_tol * y[0].abs(),
            cfg.abs_tol + cfg.rel_tol * y[1].abs(),
        ]
    };
    let norm = |v: Vec2, s: Vec2| ((v[0] / s[0]).powi(2) + (v[1] / s[1]).powi(2)).sqrt();
    let s0 = sc(y0);
    let d0 = norm(y0, s0);
    let d1 = norm(f0, s0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(h_cap);
    let y1 = [y0[0] + h0 * f0[0], y0[1] + h0 * f0[1]];
    let f1 = ode.eval(r0 + h0, y1);
    let d2 = norm([f1[0] - f0[0], f1[1] - f0[1]], s0) / h0;
    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    h1.min(100.0 * h0).min(h_cap)
}

/// Integrate the radial ODE from `initial` to `cfg.max_r`.
pub fn integrate(
    initial: RadialState,
    mu: f64,
    nl: &Nonlinearity,
    params: &PucciParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrateError> {
    assert!(cfg.is_valid(), "invalid integrator configuration");
    assert!(initial.r >= 0.0, "radius must be nonnegative");

    let ode = Ode { mu, nl, params };
    let h_cap = cfg.max_step.min(oscillation_step_cap(mu, params));

    let mut r = initial.r;
    let mut y: Vec2 = [initial.u, initial.du];
    let mut traj = Trajectory {
        states: vec![initial],
        segments: Vec::new(),
    };
    if r >= cfg.max_r {
        return Ok(traj);
    }

    let mut k1 = ode.eval(r, y);
    let mut h = initial_step(&ode, r, y, k1, cfg, h_cap);
    let mut err_prev: f64 = 1e-4;
    let mut rejected = false;
    // A step-size collapse with the state far above its initial scale is a
    // finite-radius singularity, not an integrator failure.
    let blowup_scale = 1e8 * (1.0 + y[0].abs() + y[1].abs());

    for _ in 0..MAX_STEPS {
        if r + h >= cfg.max_r {
            h = cfg.max_r - r;
        }
        if h <= 1e-14 * (1.0 + r.abs()) {
            if cfg.max_r - r <= 1e-12 * (1.0 + r.abs()) {
                return Ok(traj);
            }
            if y[0].abs().max(y[1].abs()) > blowup_scale {
                return Err(IntegrateError::NonFinite { r });
            }
            return Err(IntegrateError::StepLimit { r });
        }

        let stage = |c: &[(f64, Vec2)]| {
            let mut ys = y;
            for &(a, k) in c {
                ys[0] += h * a * k[0];
                ys[1] += h * a * k[1];
            }
            ys
        };
        let k2 = ode.eval(r + C2 * h, stage(&[(A21, k1)]));
        let k3 = ode.eval(r + C3 * h, stage(&[(A31, k1), (A32, k2)]));
        let k4 = ode.eval(r + C4 * h, stage(&[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = ode.eval(
            r + C5 * h,
            stage(&[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]),
        );
        let k6 = ode.eval(
            r + h,
            stage(&[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]),
        );
        let y_new = stage(&[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        let k7 = ode.eval(r + h, y_new);

        if !(y_new[0].is_finite() && y_new[1].is_finite() && k7[0].is_finite() && k7[1].is_finite())
            || y_new[0].abs().max(y_new[1].abs()) > 1e150
        {
            return Err(IntegrateError::NonFinite { r });
        }

        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / 2.0).sqrt();

        if err <= 1.0 {
            let ydiff = [y_new[0] - y[0], y_new[1] - y[1]];
            let mut cont = [[0.0; 2]; 5];
            for i in 0..2 {
                let bspl = h * k1[i] - ydiff[i];
                cont[0][i] = y[i];
                cont[1][i] = ydiff[i];
                cont[2][i] = bspl;
                cont[3][i] = ydiff[i] - h * k7[i] - bspl;
                cont[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]);
            }
            traj.segments.push(DenseSegment { r0: r, h, cont });
            r += h;
            y = y_new;
            k1 = k7;
            traj.states.push(RadialState::new(r, y[0], y[1]));
            if r >= cfg.max_r {
                return Ok(traj);
            }

            let fac = if err < 1e-300 {
                FAC_MAX
            } else {
                SAFETY * err.powf(-PI_ALPHA) * err_prev.powf(PI_BETA)
            };
            let fac = fac.clamp(FAC_MIN, if rejected { 1.0 } else { FAC_MAX });
            err_prev = err.max(1e-10);
            rejected = false;
            h = (h * fac).min(h_cap);
        } else {
            rejected = true;
            let fac = (SAFETY * err.powf(-PI_ALPHA)).clamp(FAC_MIN, 1.0);
            h *= fac;
        }
    }
    Err(IntegrateError::StepLimit { r })
}

/// Refine a sign change of the dense output `u` inside `bracket` to a root.
///
/// Safeguarded secant/bisection; the result lies within `1e-12·(1+r)` of the
/// root of the interpolant.
pub fn locate_sign_change(traj: &Trajectory, bracket: (f64, f64)) -> Result<f64, IntegrateError> {
    let (a, b) = bracket;
    let fa = traj.value(a);
    let fb = traj.value(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(IntegrateError::NoBracket { a, b });
    }

    let (mut lo, mut hi, mut f_lo, mut f_hi) = if a < b { (a, b, fa, fb) } else { (b, a, fb, fa) };
    for iter in 0..200 {
        // Secant through the current bracket, bisection as fallback.
        let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        let x = if secant.is_finite() && secant > lo && secant < hi && iter % 3 != 2 {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let fx = traj.value(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        if hi - lo <= 1e-13 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
