//! Bessel functions of half-integer order and their zeros.
//!
//! Independent reference for the Laplacian limit λ = Λ, where the radial
//! Dirichlet eigenvalues of `-κΔ` on the unit ball are `κ · j²_{N/2-1,k}`.
//! Everything here is computed from the ascending series plus Newton
//! refinement and shares no code with the shooting or finite-difference
//! paths.

/// Reciprocal gamma `1/Γ(z)` for half-integer `z = two_z/2`.
///
/// Returns 0 at the poles (non-positive integers), which is the convention
/// that makes the ascending Bessel series valid for negative integer order.
fn rgamma_half(two_z: i64) -> f64 {
    if two_z % 2 == 0 {
        let z = two_z / 2;
        if z <= 0 {
            return 0.0;
        }
        let mut acc = 1.0;
        for j in 1..z {
            acc *= j as f64;
        }
        1.0 / acc
    } else {
        // Walk up or down from Γ(1/2) = √π.
        let mut acc = std::f64::consts::PI.sqrt();
        let mut cur = 1i64; // two_z currently represented by acc
        while cur < two_z {
            acc *= cur as f64 / 2.0;
            cur += 2;
        }
        while cur > two_z {
            cur -= 2;
            acc /= cur as f64 / 2.0;
        }
        1.0 / acc
    }
}

/// Bessel function `J_ν(x)` for half-integer order `ν = two_nu/2`, `x > 0`.
///
/// Ascending series; cancellation limits the accuracy to roughly 1e-10
/// absolute for `x ≤ 16`, which covers the first few zeros at every order
/// the library uses.
pub fn jnu(two_nu: i64, x: f64) -> f64 {
    assert!(x > 0.0, "series evaluation requires x > 0");
    let nu = two_nu as f64 / 2.0;
    let half_x = 0.5 * x;
    let x2 = half_x * half_x;
    let mut sum = 0.0;
    // term_m = (-1)^m / (m! Γ(m+ν+1)) (x/2)^{2m+ν}
    let mut coeff = half_x.powf(nu);
    let mut m = 0i64;
    loop {
        let term = coeff * rgamma_half(2 * m + two_nu + 2);
        sum += if m % 2 == 0 { term } else { -term };
        m += 1;
        coeff *= x2 / m as f64;
        if m > 200 {
            break;
        }
        if m as f64 > half_x && term.abs() < 1e-18 * (1.0 + sum.abs()) {
            break;
        }
    }
    sum
}

/// Derivative `J'_ν(x) = (J_{ν-1}(x) - J_{ν+1}(x)) / 2`.
pub fn jnu_prime(two_nu: i64, x: f64) -> f64 {
    0.5 * (jnu(two_nu - 2, x) - jnu(two_nu + 2, x))
}

/// The k-th positive zero `j_{ν,k}` (k ≥ 1) of `J_ν` for `ν = two_nu/2 ≥ -1/2`.
///
/// McMahon's expansion places the seed within ~0.01 of the zero, well inside
/// the Newton basin (neighbouring zeros are at least π/2 away), so a damped
/// Newton iteration converges without further safeguarding.
pub fn jnu_zero(two_nu: i64, k: usize) -> f64 {
    assert!(k >= 1);
    assert!(two_nu >= -1, "order must be >= -1/2");
    let nu = two_nu as f64 / 2.0;
    let beta = (k as f64 + 0.5 * nu - 0.25) * std::f64::consts::PI;
    let mu4 = 4.0 * nu * nu;
    let mut x = beta - (mu4 - 1.0) / (8.0 * beta);
    for _ in 0..60 {
        let step = jnu(two_nu, x) / jnu_prime(two_nu, x);
        let step = step.clamp(-0.5, 0.5);
        x -= step;
        if step.abs() <= 1e-15 * x {
            break;
        }
    }
    x
}

/// k-th radial Dirichlet eigenvalue of `-Δ` on the unit ball in dimension
/// `dim`: the square of `j_{dim/2-1,k}`.
pub fn laplacian_ball_eigenvalue(dim: u32, k: usize) -> f64 {
    let z = jnu_zero(dim as i64 - 2, k);
    z * z
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_series_matches_closed_forms() {
        // J_{1/2}(x) = sqrt(2/(πx)) sin x, J_{-1/2}(x) = sqrt(2/(πx)) cos x
        for &x in &[0.3, 1.0, 2.5, 7.0, 11.0] {
            let scale = (2.0 / (PI * x)).sqrt();
            assert!((jnu(1, x) - scale * x.sin()).abs() < 1e-11);
            assert!((jnu(-1, x) - scale * x.cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn zeros_of_half_orders_are_multiples_of_pi() {
        for k in 1..=5 {
            assert!((jnu_zero(1, k) - k as f64 * PI).abs() < 1e-10);
            assert!((jnu_zero(-1, k) - (2.0 * k as f64 - 1.0) * PI / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn first_zero_of_j0_matches_reference_digits() {
        let z = jnu_zero(0, 1);
        assert!((z - 2.404825557695773).abs() < 1e-12);
        assert!(jnu(0, z).abs() < 1e-13);
        assert!((z * z - 5.783185962946785).abs() < 1e-11);
    }

    #[test]
    fn zeros_increase_in_index_and_order() {
        let j01 = jnu_zero(0, 1);
        let j02 = jnu_zero(0, 2);
        let j11 = jnu_zero(2, 1);
        assert!(j01 < j11 && j11 < j02, "interlacing j01={j01} j11={j11} j02={j02}");
    }

    #[test]
    fn laplacian_eigenvalues_for_odd_dimensions() {
        assert!((laplacian_ball_eigenvalue(3, 2) - 4.0 * PI * PI).abs() < 1e-9);
        assert!((laplacian_ball_eigenvalue(1, 1) - PI * PI / 4.0).abs() < 1e-10);
    }
}
