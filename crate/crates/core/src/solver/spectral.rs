//! Power-iteration bound on the top eigenvalue of a self-adjoint PSD operator.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Fixed seed for the start vector so solves are deterministic.
const START_SEED: u64 = 0x9d1c_52f7_03b4_8e65;

/// Estimates the largest eigenvalue of a self-adjoint PSD operator by power
/// iteration and returns `(1 + 1e-3)` times the converged Rayleigh quotient.
///
/// The Rayleigh quotient approaches the top eigenvalue from below, so the
/// multiplier turns the estimate into a usable upper bound once the relative
/// change between iterations falls under `tol`. Fails with
/// [`Error::NoConvergence`] if `max_applies` operator applications are
/// exhausted first.
pub fn spectral_bound<F>(mut op: F, dim: usize, tol: f64, max_applies: usize) -> Result<f64>
where
    F: FnMut(&DVector<Complex64>) -> DVector<Complex64>,
{
    assert!(dim > 0 && tol > 0.0);
    let mut rng = rng_from_seed(START_SEED);
    let mut v = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);

    let mut rho_prev = f64::NAN;
    for _ in 0..max_applies {
        let w = op(&v);
        let rho = w
            .iter()
            .zip(v.iter())
            .map(|(wi, vi)| wi * vi.conj())
            .sum::<Complex64>()
            .re
            .max(0.0);
        let w_norm = w.norm();
        if w_norm == 0.0 {
            return Ok(0.0);
        }
        if (rho - rho_prev).abs() <= tol * rho.max(f64::MIN_POSITIVE) {
            return Ok((1.0 + 1e-3) * rho);
        }
        rho_prev = rho;
        v = w / Complex64::new(w_norm, 0.0);
    }
    Err(Error::NoConvergence(max_applies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn matrix_op(m: DMatrix<Complex64>) -> impl FnMut(&DVector<Complex64>) -> DVector<Complex64> {
        move |v| &m * v
    }

    #[test]
    fn identity_spectrum() {
        let m = DMatrix::from_diagonal_element(6, 6, Complex64::new(1.0, 0.0));
        let b = spectral_bound(matrix_op(m), 6, 1e-9, 1000).unwrap();
        assert!((b - 1.001).abs() <= 1e-6);
    }

    #[test]
    fn known_diagonal_spectrum() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, 0.0),
        ]));
        let b = spectral_bound(matrix_op(m), 2, 1e-10, 10_000).unwrap();
        assert!((4.0..=4.004).contains(&b), "bound {b}");
    }

    #[test]
    fn random_psd_bound_is_tight() {
        let mut rng = rng_from_seed(31);
        let r = DMatrix::from_fn(50, 50, |_, _| rng.gen_range(-1.0..1.0));
        let psd = r.transpose() * &r;
        let sigma_max = psd.clone().symmetric_eigen().eigenvalues.max();
        let psd_c = psd.map(|v| Complex64::new(v, 0.0));
        let b = spectral_bound(matrix_op(psd_c), 50, 1e-10, 20_000).unwrap();
        let ratio = b / sigma_max;
        assert!((1.0..=1.005).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn zero_operator_bound_is_zero() {
        let m = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
        assert_eq!(spectral_bound(matrix_op(m), 4, 1e-9, 100).unwrap(), 0.0);
    }

    #[test]
    fn exhausted_budget_is_an_error() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.999_999, 0.0),
        ]));
        // One application can never satisfy the change criterion.
        assert!(matches!(
            spectral_bound(matrix_op(m), 2, 1e-12, 1),
            Err(Error::NoConvergence(1))
        ));
    }
}
