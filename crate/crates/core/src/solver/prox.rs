//! Scalar proximity operators used by the fixed-point iteration.
//!
//! Both operators act componentwise on complex vectors. The proximity
//! operator of `λ|·|` is soft-thresholding of the modulus; the proximity
//! operator of the indicator of a disk is the Euclidean projection onto it.

use num_complex::Complex64;

/// prox of `λ|·|` at `u`: shrinks the modulus by `λ`, with 0 mapping to 0.
#[inline]
pub fn soft_threshold_scalar(u: Complex64, lambda: f64) -> Complex64 {
    let mag = u.norm();
    if mag <= lambda {
        Complex64::new(0.0, 0.0)
    } else {
        u * ((mag - lambda) / mag)
    }
}

/// Euclidean projection of `u` onto the disk of radius `delta` around
/// `gamma`; `u = gamma` maps to itself.
#[inline]
pub fn project_feasible_scalar(u: Complex64, gamma: Complex64, delta: f64) -> Complex64 {
    let diff = u - gamma;
    let dist = diff.norm();
    if dist <= delta {
        u
    } else {
        gamma + diff * (delta / dist)
    }
}

/// Componentwise soft-thresholding.
pub fn soft_threshold(u: &[Complex64], lambda: f64) -> Vec<Complex64> {
    assert!(lambda > 0.0, "threshold must be positive");
    u.iter()
        .map(|&v| soft_threshold_scalar(v, lambda))
        .collect()
}

/// Componentwise projection onto `{v : |v_i - gamma_i| <= delta}`.
pub fn project_feasible(u: &[Complex64], gamma: &[Complex64], delta: f64) -> Vec<Complex64> {
    assert_eq!(u.len(), gamma.len(), "length mismatch");
    assert!(delta >= 0.0, "radius must be nonnegative");
    u.iter()
        .zip(gamma.iter())
        .map(|(&ui, &gi)| project_feasible_scalar(ui, gi, delta))
        .collect()
}
