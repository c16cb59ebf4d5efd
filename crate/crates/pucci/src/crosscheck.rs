//! Independent finite-difference oracle on the radial grid.
//!
//! Discretizes the radial maximal operator with central differences (ghost
//! node at the origin encodes `u'(0) = 0`, Dirichlet at `r = 1`) and solves
//! the resulting Bellman systems by Howard policy iteration: alternate
//! per-node coefficient selection with an exact tridiagonal solve until the
//! selected field is stationary.  A direct marching solver (the discrete
//! equation is a scalar recurrence in the radial index) provides a second,
//! policy-free route to the same systems and backs Howard up when individual
//! frozen policies are indefinite.  On top of these sit a cone-constrained
//! inverse power iteration for the first half-eigenvalues, principal
//! eigenvalues of random frozen-coefficient operators (the discrete inf/sup
//! envelope), a Rayleigh-quotient lower bound, and executable maximum
//! principles.  Nothing here shares code with the shooting path.

use crate::operator::{OperatorKind, PucciParams};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrosscheckError {
    #[error("grid needs at least 16 interior nodes, got {n}")]
    GridTooCoarse { n: usize },
    #[error("grid function must have {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("singular tridiagonal system at elimination step {step}")]
    SingularSystem { step: usize },
    #[error("policy iteration did not converge after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("iterate left the sign cone at node {node} (value {value})")]
    ConeEscape { node: usize, value: f64 },
    #[error("input must be positive at interior nodes; node {node} has value {value}")]
    NonPositiveInput { node: usize, value: f64 },
    #[error("maximum principle violated at node {node}: value {value} exceeds tolerance {tolerance}")]
    Violation {
        node: usize,
        value: f64,
        tolerance: f64,
    },
}

/// Uniform radial grid `r_i = i·h`, `i = 0..n`, with `h = 1/n`.
///
/// Grid functions are vectors of `n+1` values; the Dirichlet condition pins
/// the last entry to zero and symmetry at the origin is encoded by a ghost
/// node `u_{-1} = u_1`.
#[derive(Debug, Clone)]
pub struct GridProblem {
    pub params: PucciParams,
    pub n: usize,
    pub h: f64,
}

impl GridProblem {
    pub fn new(params: PucciParams, n: usize) -> Result<Self, CrosscheckError> {
        if n < 16 {
            return Err(CrosscheckError::GridTooCoarse { n });
        }
        assert_eq!(
            params.operator,
            OperatorKind::Max,
            "the grid oracle discretizes the maximal operator"
        );
        Ok(Self {
            params,
            n,
            h: 1.0 / n as f64,
        })
    }

    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Number of entries of a grid function (`n+1`, boundary included).
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The parabola `±(1 - r²)`, the canonical cone seed.
    pub fn parabolic_seed(&self, positive: bool) -> Vec<f64> {
        let s = if positive { 1.0 } else { -1.0 };
        (0..=self.n)
            .map(|i| s * (1.0 - self.radius(i).powi(2)))
            .collect()
    }

    fn check_len(&self, u: &[f64]) -> Result<(), CrosscheckError> {
        if u.len() != self.len() {
            return Err(CrosscheckError::DimensionMismatch {
                expected: self.len(),
                actual: u.len(),
            });
        }
        Ok(())
    }

    /// Central second difference at node `i` (ghost `u_{-1} = u_1` at 0).
    fn d2(&self, u: &[f64], i: usize) -> f64 {
        let h2 = self.h * self.h;
        if i == 0 {
            2.0 * (u[1] - u[0]) / h2
        } else {
            (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2
        }
    }

    /// Central first difference at node `i ≥ 1`.
    fn d1(&self, u: &[f64], i: usize) -> f64 {
        (u[i + 1] - u[i - 1]) / (2.0 * self.h)
    }
}

/// Per-node coefficient pair `(a_i, b_i) ∈ [λ, Λ]²` weighting the second-
/// and first-difference terms; the radial Hessian eigenvalues decouple, so
/// the pair acting independently realizes the full coefficient family.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    /// Weight of the second-difference term at nodes `0..n`.
    pub on_d2: Vec<f64>,
    /// Weight of the first-difference term at nodes `0..n` (entry 0 unused).
    pub on_d1: Vec<f64>,
}

impl CoefficientField {
    pub fn constant(grid: &GridProblem, a: f64, b: f64) -> Self {
        let lo = grid.params.lambda_lo;
        let hi = grid.params.lambda_hi;
        assert!(a >= lo && a <= hi && b >= lo && b <= hi);
        Self {
            on_d2: vec![a; grid.n],
            on_d1: vec![b; grid.n],
        }
    }

    /// Uniform draw of every pair from `[λ, Λ]²`.
    pub fn random(grid: &GridProblem, rng: &mut impl Rng) -> Self {
        let lo = grid.params.lambda_lo;
        let hi = grid.params.lambda_hi;
        Self {
            on_d2: (0..grid.n).map(|_| rng.gen_range(lo..=hi)).collect(),
            on_d1: (0..grid.n).map(|_| rng.gen_range(lo..=hi)).collect(),
        }
    }
}

/// The maximizing coefficient at slope `s`: the argmax of `c·s` over `[λ, Λ]`.
fn arg_max_coeff(s: f64, lo: f64, hi: f64) -> f64 {
    if s > 0.0 {
        hi
    } else {
        lo
    }
}

fn select_field(u: &[f64], grid: &GridProblem) -> CoefficientField {
    let lo = grid.params.lambda_lo;
    let hi = grid.params.lambda_hi;
    let mut on_d2 = Vec::with_capacity(grid.n);
    let mut on_d1 = Vec::with_capacity(grid.n);
    for i in 0..grid.n {
        on_d2.push(arg_max_coeff(grid.d2(u, i), lo, hi));
        on_d1.push(if i == 0 {
            lo
        } else {
            arg_max_coeff(grid.d1(u, i), lo, hi)
        });
    }
    CoefficientField { on_d2, on_d1 }
}

/// The coefficient field at which the discrete maximal operator attains its
/// envelope on `u`.
pub fn optimal_field(u: &[f64], grid: &GridProblem) -> Result<CoefficientField, CrosscheckError> {
    grid.check_len(u)?;
    Ok(select_field(u, grid))
}

/// Discrete maximal operator: `θ(d2_i) + (N-1)/r_i·θ(d1_i)` at interior
/// nodes (with `θ(s) = Λs` for `s > 0`, `λs` otherwise) and `N·θ(d2_0)` at
/// the center.  The boundary entry of the result is zero.
pub fn apply_pucci(u: &[f64], grid: &GridProblem) -> Result<Vec<f64>, CrosscheckError> {
    grid.check_len(u)?;
    let theta = |s: f64| grid.params.m(s);
    let n_f = grid.params.dim as f64;
    let mut out = vec![0.0; grid.len()];
    out[0] = n_f * theta(grid.d2(u, 0));
    for i in 1..grid.n {
        out[i] = theta(grid.d2(u, i)) + (n_f - 1.0) / grid.radius(i) * theta(grid.d1(u, i));
    }
    Ok(out)
}

/// Linear frozen-coefficient operator `a_i·d2_i + (N-1)/r_i·b_i·d1_i`.
pub fn apply_linear(
    u: &[f64],
    field: &CoefficientField,
    grid: &GridProblem,
) -> Result<Vec<f64>, CrosscheckError> {
    grid.check_len(u)?;
    if field.on_d2.len() != grid.n || field.on_d1.len() != grid.n {
        return Err(CrosscheckError::DimensionMismatch {
            expected: grid.n,
            actual: field.on_d2.len().min(field.on_d1.len()),
        });
    }
    let n_f = grid.params.dim as f64;
    let mut out = vec![0.0; grid.len()];
    out[0] = n_f * field.on_d2[0] * grid.d2(u, 0);
    for i in 1..grid.n {
        out[i] = field.on_d2[i] * grid.d2(u, i)
            + (n_f - 1.0) / grid.radius(i) * field.on_d1[i] * grid.d1(u, i);
    }
    Ok(out)
}

/// Tridiagonal solve with partial pivoting (the near-origin convection rows
/// are not diagonally dominant, so plain Thomas elimination is unsafe).
fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>, CrosscheckError> {
    let m = diag.len();
    assert!(m >= 2 && sub.len() == m - 1 && sup.len() == m - 1 && rhs.len() == m);
    let dl = sub;
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; m.saturating_sub(2)];
    let mut b = rhs.to_vec();

    for i in 0..m - 1 {
        if dl[i].abs() <= d[i].abs() {
            if d[i] == 0.0 {
                return Err(CrosscheckError::SingularSystem { step: i });
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            if i < m - 2 {
                du2[i] = 0.0;
            }
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i < m - 2 {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            b.swap(i, i + 1);
            b[i + 1] -= fact * b[i];
        }
    }
    if d[m - 1] == 0.0 {
        return Err(CrosscheckError::SingularSystem { step: m - 1 });
    }
    b[m - 1] /= d[m - 1];
    if m > 1 {
        b[m - 2] = (b[m - 2] - du[m - 2] * b[m - 1]) / d[m - 2];
    }
    for i in (0..m.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
    Ok(b)
}

/// Solve the frozen-policy linear system `(-L_{a,b} - mu)·u = rhs` at the
/// interior nodes, Dirichlet at the boundary.
fn solve_policy_system(
    field: &CoefficientField,
    grid: &GridProblem,
    mu: f64,
    rhs: &[f64],
) -> Result<Vec<f64>, CrosscheckError> {
    let m = grid.n;
    let h2 = grid.h * grid.h;
    let n_f = grid.params.dim as f64;
    let mut sub = vec![0.0; m - 1];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m - 1];

    diag[0] = 2.0 * n_f * field.on_d2[0] / h2 - mu;
    sup[0] = -2.0 * n_f * field.on_d2[0] / h2;
    for i in 1..m {
        let a = field.on_d2[i];
        let conv = field.on_d1[i] * (n_f - 1.0) / (2.0 * grid.h * grid.radius(i));
        sub[i - 1] = -a / h2 + conv;
        diag[i] = 2.0 * a / h2 - mu;
        if i < m - 1 {
            sup[i] = -a / h2 - conv;
        }
    }
    let interior = solve_tridiagonal(&sub, &diag, &sup, &rhs[..m])?;
    let mut u = interior;
    u.push(0.0);
    Ok(u)
}

fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Max-norm residual of `-M⁺(D²u) - mu·u = rhs` over the interior nodes.
fn bellman_residual(
    u: &[f64],
    grid: &GridProblem,
    mu: f64,
    rhs: &[f64],
) -> Result<f64, CrosscheckError> {
    let op = apply_pucci(u, grid)?;
    let mut worst: f64 = 0.0;
    for i in 0..grid.n {
        worst = worst.max((-op[i] - mu * u[i] - rhs[i]).abs());
    }
    Ok(worst)
}

/// Solve the node equation `-θ(d2_i) - c_i·θ(d1_i) - mu·u_i = rhs_i` for
/// `u_{i+1}` given `u_{i-1}, u_i`.
///
/// The left side is strictly decreasing and piecewise linear in `u_{i+1}`
/// with kinks where `d2` and `d1` change sign, so the root follows from
/// locating the active segment and one linear solve.
fn solve_node(
    grid: &GridProblem,
    mu: f64,
    rhs_i: f64,
    u_prev: f64,
    u_cur: f64,
    i: usize,
) -> f64 {
    let h = grid.h;
    let h2 = h * h;
    let c = (grid.params.dim as f64 - 1.0) / grid.radius(i);
    let target = rhs_i + mu * u_cur;
    let f = |x: f64| {
        -grid.params.m((x - 2.0 * u_cur + u_prev) / h2)
            - c * grid.params.m((x - u_prev) / (2.0 * h))
            - target
    };
    let lo = grid.params.lambda_lo;
    let hi = grid.params.lambda_hi;
    let slope_at = |x: f64| {
        let a = arg_max_coeff(x - (2.0 * u_cur - u_prev), lo, hi);
        let b = arg_max_coeff(x - u_prev, lo, hi);
        -(a / h2 + c * b / (2.0 * h))
    };
    let kink_a = 2.0 * u_cur - u_prev; // d2 sign change
    let kink_b = u_prev; // d1 sign change
    let (x1, x2) = if kink_a <= kink_b {
        (kink_a, kink_b)
    } else {
        (kink_b, kink_a)
    };
    let f1 = f(x1);
    let shift = 1.0 + x1.abs() + x2.abs();
    let (x_ref, f_ref, probe) = if f1 <= 0.0 {
        (x1, f1, x1 - shift) // root left of both kinks
    } else {
        let f2 = f(x2);
        if f2 >= 0.0 {
            (x2, f2, x2 + shift) // root right of both kinks
        } else {
            (x1, f1, 0.5 * (x1 + x2)) // root between the kinks
        }
    };
    x_ref - f_ref / slope_at(probe)
}

/// March the discrete equation outward from a trial center value; the last
/// entry is the boundary residual (not forced to zero).
fn march_from_center(grid: &GridProblem, mu: f64, rhs: &[f64], u0: f64) -> Vec<f64> {
    let n_f = grid.params.dim as f64;
    let mut u = vec![0.0; grid.len()];
    u[0] = u0;
    let d2_center = grid.params.m_inv(-(rhs[0] + mu * u0) / n_f);
    u[1] = u0 + 0.5 * grid.h * grid.h * d2_center;
    for i in 1..grid.n {
        u[i + 1] = solve_node(grid, mu, rhs[i], u[i - 1], u[i], i);
    }
    u
}

/// Direct solve of the Bellman boundary value problem by shooting on the
/// center value: the interior equations determine the vector recursively, so
/// only the scalar boundary residual remains to be driven to zero.
fn solve_by_marching(
    grid: &GridProblem,
    mu: f64,
    rhs: &[f64],
) -> Result<Vec<f64>, CrosscheckError> {
    let boundary = |u0: f64| -> f64 { *march_from_center(grid, mu, rhs, u0).last().unwrap() };
    let scale = 1.0 + sup_norm(rhs);
    let b0 = boundary(0.0);
    let mut bracket = None;
    if b0 == 0.0 {
        bracket = Some((0.0, b0, 0.0, b0));
    } else {
        'rays: for dir in [1.0, -1.0] {
            let mut prev = (0.0, b0);
            for k in -10..60 {
                let u0 = dir * scale * f64::powi(2.0, k);
                let b = boundary(u0);
                if !b.is_finite() {
                    break;
                }
                if b == 0.0 || b.signum() != prev.1.signum() {
                    bracket = Some((prev.0, prev.1, u0, b));
                    break 'rays;
                }
                prev = (u0, b);
            }
        }
    }
    let Some((mut lo, mut f_lo, mut hi, mut f_hi)) = bracket else {
        return Err(CrosscheckError::NoConvergence {
            iterations: 0,
            residual: b0,
        });
    };
    let mut u0 = 0.5 * (lo + hi);
    for iter in 0..220 {
        let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        u0 = if secant.is_finite() && (secant - lo) * (secant - hi) < 0.0 && iter % 3 != 2 {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let b = boundary(u0);
        if b == 0.0 || (hi - lo).abs() <= 1e-15 * (1.0 + u0.abs()) {
            break;
        }
        if b.signum() == f_lo.signum() {
            lo = u0;
            f_lo = b;
        } else {
            hi = u0;
            f_hi = b;
        }
    }
    let mut u = march_from_center(grid, mu, rhs, u0);
    *u.last_mut().unwrap() = 0.0;
    Ok(u)
}

const HOWARD_PURE_ITERS: usize = 60;

/// Howard iteration for `-M⁺(D²u) - mu·u = rhs` with zero boundary data.
///
/// Pure policy iteration converges finitely whenever every frozen policy is
/// safely invertible, which holds for `mu` below the first plus
/// half-eigenvalue.  Should the sweep cycle, the problem is solved directly
/// by marching and the policy sweeps only polish, keeping the best-residual
/// iterate.
fn solve_bellman(grid: &GridProblem, mu: f64, rhs: &[f64]) -> Result<Vec<f64>, CrosscheckError> {
    grid.check_len(rhs)?;
    let mut u = vec![0.0; grid.len()];
    let mut field = select_field(&u, grid);
    for _ in 0..HOWARD_PURE_ITERS {
        u = solve_policy_system(&field, grid, mu, rhs)?;
        if !u.iter().all(|v| v.is_finite()) {
            break;
        }
        let next = select_field(&u, grid);
        if next == field {
            return Ok(u);
        }
        field = next;
    }

    let mut best = solve_by_marching(grid, mu, rhs)?;
    let mut best_res = bellman_residual(&best, grid, mu, rhs)?;
    let mut u = best.clone();
    for _ in 0..30 {
        let field = select_field(&u, grid);
        u = solve_policy_system(&field, grid, mu, rhs)?;
        if !u.iter().all(|v| v.is_finite()) {
            break;
        }
        let res = bellman_residual(&u, grid, mu, rhs)?;
        if res < best_res {
            best_res = res;
            best = u.clone();
        }
    }
    let scale = sup_norm(rhs) + mu.abs() * sup_norm(&best) + 1e-300;
    if best_res <= 1e-11 * scale {
        Ok(best)
    } else {
        Err(CrosscheckError::NoConvergence {
            iterations: HOWARD_PURE_ITERS + 30,
            residual: best_res,
        })
    }
}

/// Solve the maximal-operator Dirichlet problem `-M⁺(D²u) - mu·u = g`.
pub fn policy_solve(grid: &GridProblem, mu: f64, g: &[f64]) -> Result<Vec<f64>, CrosscheckError> {
    solve_bellman(grid, mu, g)
}

/// As [`policy_solve`] but additionally reporting the Bellman residual after
/// every sweep (for monotonicity diagnostics).
pub fn policy_solve_with_history(
    grid: &GridProblem,
    mu: f64,
    g: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), CrosscheckError> {
    grid.check_len(g)?;
    let mut u = vec![0.0; grid.len()];
    let mut field = select_field(&u, grid);
    let mut history = Vec::new();
    for _ in 0..HOWARD_PURE_ITERS {
        u = solve_policy_system(&field, grid, mu, g)?;
        history.push(bellman_residual(&u, grid, mu, g)?);
        let next = select_field(&u, grid);
        if next == field {
            return Ok((u, history));
        }
        field = next;
    }
    Err(CrosscheckError::NoConvergence {
        iterations: HOWARD_PURE_ITERS,
        residual: history.last().copied().unwrap_or(f64::INFINITY),
    })
}

const POWER_ITER_MAX: usize = 500;

fn power_iteration(
    grid: &GridProblem,
    mut iterate: impl FnMut(&[f64]) -> Result<Vec<f64>, CrosscheckError>,
    seed: Vec<f64>,
    cone_sign: Option<f64>,
) -> Result<(f64, Vec<f64>), CrosscheckError> {
    let mut u = seed;
    let norm = sup_norm(&u);
    u.iter_mut().for_each(|v| *v /= norm);
    let mut mu_prev = f64::NAN;
    for _ in 0..POWER_ITER_MAX {
        let v = iterate(&u)?;
        let norm = sup_norm(&v);
        if !norm.is_finite() || norm == 0.0 {
            return Err(CrosscheckError::NoConvergence {
                iterations: POWER_ITER_MAX,
                residual: norm,
            });
        }
        if let Some(sign) = cone_sign {
            for i in 0..grid.n {
                if v[i] * sign < -1e-8 * norm {
                    return Err(CrosscheckError::ConeEscape {
                        node: i,
                        value: v[i],
                    });
                }
            }
        }
        let mu = 1.0 / norm; // previous iterate had unit sup-norm
        u = v;
        u.iter_mut().for_each(|x| *x /= norm);
        if (mu - mu_prev).abs() < 1e-10 {
            return Ok((mu, u));
        }
        mu_prev = mu;
    }
    Err(CrosscheckError::NoConvergence {
        iterations: POWER_ITER_MAX,
        residual: f64::NAN,
    })
}

/// First half-eigenvalue and eigenvector of the discrete maximal operator by
/// inverse power iteration confined to the positive (`positive = true`) or
/// negative cone.
pub fn first_half_eigenvalue_fd(
    positive: bool,
    grid: &GridProblem,
) -> Result<(f64, Vec<f64>), CrosscheckError> {
    let sign = if positive { 1.0 } else { -1.0 };
    power_iteration(
        grid,
        |u| policy_solve(grid, 0.0, u),
        grid.parabolic_seed(positive),
        Some(sign),
    )
}

/// Principal Dirichlet eigenvalue of the frozen-coefficient linear operator.
pub fn linear_principal_eigenvalue(
    grid: &GridProblem,
    field: &CoefficientField,
) -> Result<f64, CrosscheckError> {
    let (mu, _) = power_iteration(
        grid,
        |u| solve_policy_system(field, grid, 0.0, u),
        grid.parabolic_seed(true),
        None,
    )?;
    Ok(mu)
}

/// Draw a coefficient field from the seeded generator and return the
/// principal eigenvalue of its linear operator; by the envelope
/// characterization the value lands between the two first half-eigenvalues
/// (up to discretization error).
pub fn random_linear_eigenvalue(grid: &GridProblem, seed: u64) -> Result<f64, CrosscheckError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = CoefficientField::random(grid, &mut rng);
    linear_principal_eigenvalue(grid, &field)
}

/// Lower bound `min_i (-M⁺(D²u)_i / u_i)` for the first plus half-eigenvalue
/// from any positive trial function.
pub fn rayleigh_lower_bound(u: &[f64], grid: &GridProblem) -> Result<f64, CrosscheckError> {
    grid.check_len(u)?;
    for i in 0..grid.n {
        if u[i] <= 0.0 {
            return Err(CrosscheckError::NonPositiveInput {
                node: i,
                value: u[i],
            });
        }
    }
    let op = apply_pucci(u, grid)?;
    let mut bound = f64::INFINITY;
    for i in 0..grid.n {
        bound = bound.min(-op[i] / u[i]);
    }
    Ok(bound)
}

/// Which one-signed data regime a maximum-principle trial exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxPrincipleSide {
    /// `g ≥ 0`, `mu` below the plus half-eigenvalue: solutions obey `u ≤ 0`.
    NonnegativeData,
    /// `g ≤ 0`, `mu` below the minus half-eigenvalue: solutions obey `u ≥ 0`.
    NonpositiveData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPrincipleVerdict {
    pub side: MaxPrincipleSide,
    /// Worst signed violation observed (≤ tolerance on success).
    pub worst_value: f64,
    pub worst_node: usize,
    pub tolerance: f64,
}

const MONOTONE_ITER_MAX: usize = 20_000;

/// Monotone cone iteration for the nonpositive-data problem at `0 ≤ mu`
/// below the minus half-eigenvalue: `v ≤ 0` solving `-M⁺(D²v) = mu·v + g`.
///
/// The resolvent at shift zero preserves the negative cone and the composed
/// map contracts at rate `mu/μ⁻₁`, so the iterates decrease monotonically to
/// the one-signed solution.
fn solve_nonpositive_cone(
    grid: &GridProblem,
    mu: f64,
    g: &[f64],
) -> Result<Vec<f64>, CrosscheckError> {
    let mut v = vec![0.0; grid.len()];
    let mut rhs = vec![0.0; grid.len()];
    for iter in 0..MONOTONE_ITER_MAX {
        for i in 0..grid.n {
            rhs[i] = g[i] + mu * v[i];
        }
        let next = solve_bellman(grid, 0.0, &rhs)?;
        let mut delta: f64 = 0.0;
        for i in 0..grid.n {
            delta = delta.max((next[i] - v[i]).abs());
        }
        v = next;
        if delta <= 1e-13 * (1.0 + sup_norm(&v)) {
            return Ok(v);
        }
        let _ = iter;
    }
    Err(CrosscheckError::NoConvergence {
        iterations: MONOTONE_ITER_MAX,
        residual: f64::NAN,
    })
}

/// Executable maximum principle with zero boundary data.
///
/// The nonnegative-data side solves `M⁺(D²u) + mu·u = g` directly and checks
/// `u ≤ tol`.  For one-signed `g ≤ 0` the same equality has no solution once
/// `mu` exceeds the plus half-eigenvalue (any solution would be nonnegative
/// and would push the Rayleigh characterization of `μ⁺₁` above `mu`), so the
/// nonpositive-data side tests the mirrored statement instead: `u = -v` with
/// `M⁻(D²u) + mu·u = g`, solvable for all `mu < μ⁻₁`, and checks `u ≥ -tol`.
pub fn max_principle_trial(
    mu: f64,
    g: &[f64],
    grid: &GridProblem,
    side: MaxPrincipleSide,
) -> Result<MaxPrincipleVerdict, CrosscheckError> {
    grid.check_len(g)?;
    let tolerance = 1e-10 * sup_norm(g);
    let (u, check_upper) = match side {
        MaxPrincipleSide::NonnegativeData => {
            assert!(g.iter().all(|&v| v >= 0.0), "this side requires g >= 0");
            // M⁺(D²u) + mu·u = g  <=>  -M⁺(D²u) - mu·u = -g
            let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
            (solve_bellman(grid, mu, &neg_g)?, true)
        }
        MaxPrincipleSide::NonpositiveData => {
            assert!(g.iter().all(|&v| v <= 0.0), "this side requires g <= 0");
            let v = if mu < 0.0 {
                solve_bellman(grid, mu, g)?
            } else {
                solve_nonpositive_cone(grid, mu, g)?
            };
            (v.iter().map(|x| -x).collect(), false)
        }
    };
    let mut worst_value: f64 = 0.0;
    let mut worst_node = 0;
    for (i, &value) in u.iter().enumerate() {
        let excess = if check_upper { value } else { -value };
        if excess > worst_value {
            worst_value = excess;
            worst_node = i;
        }
    }
    if worst_value > tolerance {
        return Err(CrosscheckError::Violation {
            node: worst_node,
            value: worst_value,
            tolerance,
        });
    }
    Ok(MaxPrincipleVerdict {
        side,
        worst_value,
        worst_node,
        tolerance,
    })
}
