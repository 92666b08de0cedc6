//! Least-squares refit on the recovered support.
//!
//! The selector shrinks values inside the true support, so the estimate is
//! refit by solving `min_c || Xᵀ(X B_Λ c - y) ||_2` over the support Λ and
//! zero elsewhere. A rank-revealing SVD with a relative singular-value
//! cutoff handles collinear support columns.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dictionary::Dictionary;
use crate::sensing::SensingMatrix;

const SV_CUTOFF_REL: f64 = 1e-12;

/// Indices of the exactly nonzero entries (soft-thresholding produces exact
/// zeros, so no epsilon is involved).
pub fn support_of(c: &DVector<Complex64>) -> Vec<usize> {
    c.iter()
        .enumerate()
        .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Debiases `c_raw` on its own support; an empty support yields the zero
/// vector.
pub fn debias(
    c_raw: &DVector<Complex64>,
    x: &SensingMatrix,
    dict: &Dictionary,
    y: &DVector<Complex64>,
) -> DVector<Complex64> {
    let support = support_of(c_raw);
    debias_on_support(&support, c_raw.len(), x, dict, y)
}

pub(crate) fn debias_on_support(
    support: &[usize],
    q: usize,
    x: &SensingMatrix,
    dict: &Dictionary,
    y: &DVector<Complex64>,
) -> DVector<Complex64> {
    let mut c_hat = DVector::from_element(q, Complex64::new(0.0, 0.0));
    if support.is_empty() {
        return c_hat;
    }

    // Design matrix N = XᵀX B_Λ, one column per support index.
    let p = x.p();
    let mut design = DMatrix::from_element(p, support.len(), Complex64::new(0.0, 0.0));
    for (col, &idx) in support.iter().enumerate() {
        let b_col = dict.column(idx);
        let xb = x.apply(&b_col).expect("column length matches dictionary");
        let xtxb = x.adjoint(&xb).expect("row length matches sensing matrix");
        for (row, v) in xtxb.into_iter().enumerate() {
            design[(row, col)] = v;
        }
    }
    let rhs = DVector::from_vec(x.adjoint(y.as_slice()).expect("observation length"));

    let svd = design.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = SV_CUTOFF_REL * sigma_max;
    let fitted = svd
        .solve(&rhs, eps)
        .expect("SVD computed both factor sets");
    for (col, &idx) in support.iter().enumerate() {
        c_hat[idx] = fitted[col];
    }
    c_hat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{Dictionary, TransformBlock};
    use crate::sensing::{gaussian_sensing, SensingMatrix};
    use rand::Rng;

    fn identity_sensing(p: usize) -> SensingMatrix {
        SensingMatrix::from_dense(DMatrix::identity(p, p)).unwrap()
    }

    #[test]
    fn empty_support_yields_zero() {
        let p = 4;
        let x = identity_sensing(p);
        let dict = Dictionary::concat(vec![TransformBlock::identity(p)]).unwrap();
        let y = DVector::from_element(p, Complex64::new(1.0, 0.0));
        let c_raw = DVector::from_element(p, Complex64::new(0.0, 0.0));
        let c_hat = debias(&c_raw, &x, &dict, &y);
        assert!(c_hat.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn scalar_support_recovers_observation() {
        let p = 5;
        let x = identity_sensing(p);
        let dict = Dictionary::concat(vec![TransformBlock::identity(p)]).unwrap();
        let y = DVector::from_fn(p, |i, _| Complex64::new(i as f64 + 1.0, 0.0));
        let mut c_raw = DVector::from_element(p, Complex64::new(0.0, 0.0));
        c_raw[2] = Complex64::new(0.1, 0.0);
        let c_hat = debias(&c_raw, &x, &dict, &y);
        assert!((c_hat[2] - y[2]).norm() < 1e-12);
        for i in (0..p).filter(|&i| i != 2) {
            assert_eq!(c_hat[i], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let (n, p) = (12, 16);
        let x = gaussian_sensing(n, p, 44).unwrap();
        let dict = Dictionary::concat(vec![
            TransformBlock::identity(p),
            TransformBlock::dft(p),
        ])
        .unwrap();
        let mut rng = crate::rng::rng_from_seed(13);
        let mut c_raw = DVector::from_element(2 * p, Complex64::new(0.0, 0.0));
        for &idx in &[3usize, 9, 17, 30] {
            c_raw[idx] = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        }
        let y = DVector::from_vec(
            x.apply(&dict.apply(c_raw.as_slice()).unwrap()).unwrap(),
        );

        let c_hat = debias(&c_raw, &x, &dict, &y);

        // Oracle: dense pseudo-inverse of the same design via normal equations.
        let dense_b = dict.to_dense();
        let xc = x.data().map(|v| Complex64::new(v, 0.0));
        let design_full = &xc.transpose() * &xc * dense_b;
        let support = support_of(&c_raw);
        let mut design = DMatrix::from_element(p, support.len(), Complex64::new(0.0, 0.0));
        for (col, &idx) in support.iter().enumerate() {
            design.set_column(col, &design_full.column(idx));
        }
        let rhs = xc.transpose() * &y;
        let gram = design.adjoint() * &design;
        let target = design.adjoint() * rhs;
        let oracle = gram.lu().solve(&target).unwrap();
        for (col, &idx) in support.iter().enumerate() {
            assert!(
                (c_hat[idx] - oracle[col]).norm() < 1e-8,
                "support column {idx}"
            );
        }
    }

    #[test]
    fn support_never_grows_and_residual_never_worsens() {
        let (n, p) = (10, 20);
        let x = gaussian_sensing(n, p, 91).unwrap();
        let dict = Dictionary::concat(vec![TransformBlock::dct(p)]).unwrap();
        let mut rng = crate::rng::rng_from_seed(17);
        for _ in 0..20 {
            let mut c_raw = DVector::from_element(p, Complex64::new(0.0, 0.0));
            for _ in 0..4 {
                let idx = rng.gen_range(0..p);
                c_raw[idx] = Complex64::new(rng.gen_range(-3.0..3.0), 0.0);
            }
            let beta = DVector::from_vec(dict.apply(c_raw.as_slice()).unwrap());
            let noise = DVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-0.1..0.1), 0.0));
            let y = DVector::from_vec(x.apply(beta.as_slice()).unwrap()) + noise;

            let c_hat = debias(&c_raw, &x, &dict, &y);
            let supp_raw = support_of(&c_raw);
            let supp_hat = support_of(&c_hat);
            assert!(supp_hat.iter().all(|i| supp_raw.contains(i)));

            let fitted_residual = |c: &DVector<Complex64>| {
                let xb = x.apply(&dict.apply(c.as_slice()).unwrap()).unwrap();
                let r: Vec<Complex64> = xb.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
                DVector::from_vec(x.adjoint(&r).unwrap()).norm()
            };
            assert!(fitted_residual(&c_hat) <= fitted_residual(&c_raw) + 1e-10);
        }
    }
}
