//! Pucci extremal operators in the radial reduction.
//!
//! For a radial function `u(x) = v(|x|)` the Hessian has eigenvalues `v''`
//! (simple) and `v'/r` (multiplicity N-1), so the extremal operator collapses
//! to a scalar piecewise-linear expression.  The eigenvalue equation
//! `-M⁺(D²u) = μu + f(u, μ)` becomes the second-order ODE
//!
//! ```text
//!     v'' = M(-(N-1)/r · m(v') - μv - f(v, μ))
//! ```
//!
//! with the piecewise slope maps `m(s) = Λs (s>0), λs (s≤0)` and its inverse
//! `M(s) = s/Λ (s>0), s/λ (s≤0)`.  The minimal operator is evaluated through
//! the identity `M⁺(-A) = -M⁻(A)`, never as a separate right-hand side.

use thiserror::Error;

/// Radius below which the right-hand side switches to the analytic r→0 limit.
pub const R_EPS: f64 = 1e-8;

/// Which extremal operator the parameters select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Maximal operator: Λ on positive Hessian eigenvalues, λ on negative.
    Max,
    /// Minimal operator: λ on positive Hessian eigenvalues, Λ on negative.
    Min,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("ellipticity pair must satisfy 0 < lambda_lo <= lambda_hi, got ({lambda_lo}, {lambda_hi})")]
    InvalidEllipticity { lambda_lo: f64, lambda_hi: f64 },
    #[error("space dimension must be >= 1, got {dim}")]
    InvalidDimension { dim: u32 },
    #[error("nonlinearity exponent must satisfy p > 1, got {exponent}")]
    InvalidExponent { exponent: f64 },
}

/// Ellipticity pair, dimension and operator selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PucciParams {
    /// Lower ellipticity constant λ.
    pub lambda_lo: f64,
    /// Upper ellipticity constant Λ.
    pub lambda_hi: f64,
    /// Space dimension N.
    pub dim: u32,
    /// Maximal or minimal operator.
    pub operator: OperatorKind,
}

impl PucciParams {
    pub fn new(
        lambda_lo: f64,
        lambda_hi: f64,
        dim: u32,
        operator: OperatorKind,
    ) -> Result<Self, ParamError> {
        if !(lambda_lo.is_finite() && lambda_hi.is_finite())
            || lambda_lo <= 0.0
            || lambda_lo > lambda_hi
        {
            return Err(ParamError::InvalidEllipticity {
                lambda_lo,
                lambda_hi,
            });
        }
        if dim < 1 {
            return Err(ParamError::InvalidDimension { dim });
        }
        Ok(Self {
            lambda_lo,
            lambda_hi,
            dim,
            operator,
        })
    }

    /// Maximal-operator parameters.
    pub fn max_op(lambda_lo: f64, lambda_hi: f64, dim: u32) -> Result<Self, ParamError> {
        Self::new(lambda_lo, lambda_hi, dim, OperatorKind::Max)
    }

    /// Minimal-operator parameters.
    pub fn min_op(lambda_lo: f64, lambda_hi: f64, dim: u32) -> Result<Self, ParamError> {
        Self::new(lambda_lo, lambda_hi, dim, OperatorKind::Min)
    }

    /// Effective dimension `Ñ⁺ = λ(N-1)/Λ + 1`; satisfies `Ñ⁺ ≤ N`.
    pub fn tilde_n_plus(&self) -> f64 {
        self.lambda_lo * (self.dim as f64 - 1.0) / self.lambda_hi + 1.0
    }

    /// Effective dimension `Ñ⁻ = Λ(N-1)/λ + 1`; satisfies `Ñ⁻ ≥ N`.
    pub fn tilde_n_minus(&self) -> f64 {
        self.lambda_hi * (self.dim as f64 - 1.0) / self.lambda_lo + 1.0
    }

    /// Piecewise slope map `m(s) = Λs` for `s > 0`, `λs` for `s ≤ 0`.
    ///
    /// Positively homogeneous of degree one and strictly increasing.
    pub fn m(&self, s: f64) -> f64 {
        if s > 0.0 {
            self.lambda_hi * s
        } else {
            self.lambda_lo * s
        }
    }

    /// Inverse of [`m`](Self::m): `M(s) = s/Λ` for `s > 0`, `s/λ` for `s ≤ 0`.
    pub fn m_inv(&self, s: f64) -> f64 {
        if s > 0.0 {
            s / self.lambda_hi
        } else {
            s / self.lambda_lo
        }
    }
}

/// Phase point of the radial ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialState {
    /// Radius, `r ≥ 0`.
    pub r: f64,
    /// Function value `v(r)`.
    pub u: f64,
    /// Derivative `v'(r)`.
    pub du: f64,
}

impl RadialState {
    pub fn new(r: f64, u: f64, du: f64) -> Self {
        Self { r, u, du }
    }
}

/// Closed family of forcing terms for the bifurcation problem.
///
/// Every member is odd in `s` and satisfies `f(s, μ) = o(|s|)` as `s → 0`,
/// which keeps the trivial branch at every eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// `f = 0`: the pure eigenvalue problem.
    Zero,
    /// `f(s, μ) = c · sign(s) · |s|^p`.
    OddPower { coeff: f64, exponent: f64 },
    /// `f(s, μ) = -μ · |s|^{p-1} s`.
    LionsPower { exponent: f64 },
}

impl Nonlinearity {
    pub fn odd_power(coeff: f64, exponent: f64) -> Result<Self, ParamError> {
        if !(exponent > 1.0) {
            return Err(ParamError::InvalidExponent { exponent });
        }
        Ok(Self::OddPower { coeff, exponent })
    }

    pub fn lions_power(exponent: f64) -> Result<Self, ParamError> {
        if !(exponent > 1.0) {
            return Err(ParamError::InvalidExponent { exponent });
        }
        Ok(Self::LionsPower { exponent })
    }

    /// Evaluate `f(s, μ)`.
    pub fn eval(&self, s: f64, mu: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::OddPower { coeff, exponent } => coeff * s.signum() * s.abs().powf(exponent),
            Self::LionsPower { exponent } => -mu * s.abs().powf(exponent - 1.0) * s,
        }
    }
}

/// Limiting second derivative `v''(0)` of the radial equation.
///
/// At the origin all Hessian eigenvalues coincide with `v''(0)`, so the limit
/// is the unique fixed point of `s = M(-(N-1)·m(s) - q)` with
/// `q = μ·u0 + f_val`.  Solving the two consistent sign branches gives
/// `s = -q/(λN)` for `q > 0` and `s = -q/(ΛN)` for `q < 0`.
pub fn curvature_at_origin(u0: f64, mu: f64, f_val: f64, params: &PucciParams) -> f64 {
    match params.operator {
        OperatorKind::Max => curvature_at_origin_max(u0, mu, f_val, params),
        // M⁺(-A) = -M⁻(A); the forcing family is odd, so f flips with u0.
        OperatorKind::Min => -curvature_at_origin_max(-u0, mu, -f_val, params),
    }
}

fn curvature_at_origin_max(u0: f64, mu: f64, f_val: f64, params: &PucciParams) -> f64 {
    let n = params.dim as f64;
    let q = mu * u0 + f_val;
    if q > 0.0 {
        -q / (params.lambda_lo * n)
    } else if q < 0.0 {
        -q / (params.lambda_hi * n)
    } else {
        0.0
    }
}

/// Right-hand side of the radial ODE: returns `(v', v'')`.
///
/// For `r < R_EPS` the 1/r singularity is replaced by the analytic limit
/// [`curvature_at_origin`].  The minimal operator evaluates the maximal
/// right-hand side on the sign-flipped state and negates the result.
pub fn radial_rhs(state: RadialState, mu: f64, nl: &Nonlinearity, params: &PucciParams) -> (f64, f64) {
    match params.operator {
        OperatorKind::Max => rhs_max(state, mu, nl, params),
        OperatorKind::Min => {
            let flipped = RadialState::new(state.r, -state.u, -state.du);
            let (_, ddu) = rhs_max(flipped, mu, nl, params);
            (state.du, -ddu)
        }
    }
}

fn rhs_max(state: RadialState, mu: f64, nl: &Nonlinearity, params: &PucciParams) -> (f64, f64) {
    let f_val = nl.eval(state.u, mu);
    if state.r < R_EPS {
        let max_params = PucciParams {
            operator: OperatorKind::Max,
            ..*params
        };
        return (
            state.du,
            curvature_at_origin(state.u, mu, f_val, &max_params),
        );
    }
    let n_minus_1 = params.dim as f64 - 1.0;
    let arg = -n_minus_1 / state.r * params.m(state.du) - mu * state.u - f_val;
    (state.du, params.m_inv(arg))
}
