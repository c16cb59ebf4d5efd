//! Radial spectral theory and bifurcation for Pucci extremal operators on
//! the unit ball.
//!
//! The library computes the complete radial half-spectrum `{μ±_k}` of the
//! eigenvalue problem `-M⁺(D²u) = μu` by shooting, traces bifurcation
//! branches of `-M⁺(D²u) = μu + f(u, μ)` by amplitude continuation, and
//! crosschecks everything against an independent finite-difference
//! discretization solved by Howard policy iteration.

pub mod bessel;
pub mod bifurcation;
pub mod crosscheck;
pub mod integrate;
pub mod operator;
pub mod spectrum;

pub use integrate::{integrate, locate_sign_change, IntegrateError, IntegratorConfig, Trajectory};
pub use operator::{
    curvature_at_origin, radial_rhs, Nonlinearity, OperatorKind, ParamError, PucciParams,
    RadialState,
};
