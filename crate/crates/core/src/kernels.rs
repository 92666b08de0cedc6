//! Column-major matrix/vector kernels for real matrices acting on complex
//! vectors. These are the solver's inner loops; they avoid materializing
//! complex copies of real operators.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// y += A x for a real column-major (rows x cols) matrix.
pub fn gemv_real_acc(a: &DMatrix<f64>, x: &[Complex64], y: &mut [Complex64]) {
    let rows = a.nrows();
    debug_assert_eq!(a.ncols(), x.len());
    debug_assert_eq!(rows, y.len());
    for (col, &xj) in a.as_slice().chunks_exact(rows).zip(x.iter()) {
        if xj.re == 0.0 && xj.im == 0.0 {
            continue;
        }
        for (yi, &aij) in y.iter_mut().zip(col.iter()) {
            yi.re += aij * xj.re;
            yi.im += aij * xj.im;
        }
    }
}

/// y = Aᵀ x for a real column-major matrix (the adjoint of a real operator).
pub fn gemv_real_adjoint(a: &DMatrix<f64>, x: &[Complex64], y: &mut [Complex64]) {
    let rows = a.nrows();
    debug_assert_eq!(rows, x.len());
    debug_assert_eq!(a.ncols(), y.len());
    for (col, yj) in a.as_slice().chunks_exact(rows).zip(y.iter_mut()) {
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for (&aij, xi) in col.iter().zip(x.iter()) {
            acc_re += aij * xi.re;
            acc_im += aij * xi.im;
        }
        *yj = Complex64::new(acc_re, acc_im);
    }
}

/// y = H x for a complex column-major matrix.
pub fn gemv_complex(h: &DMatrix<Complex64>, x: &[Complex64], y: &mut [Complex64]) {
    let rows = h.nrows();
    debug_assert_eq!(h.ncols(), x.len());
    debug_assert_eq!(rows, y.len());
    y.fill(Complex64::new(0.0, 0.0));
    for (col, &xj) in h.as_slice().chunks_exact(rows).zip(x.iter()) {
        if xj.re == 0.0 && xj.im == 0.0 {
            continue;
        }
        for (yi, &hij) in y.iter_mut().zip(col.iter()) {
            yi.re += hij.re * xj.re - hij.im * xj.im;
            yi.im += hij.re * xj.im + hij.im * xj.re;
        }
    }
}

/// Real gemv for a real vector (used when the input has no imaginary part).
pub fn gemv_real(a: &DMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let rows = a.nrows();
    debug_assert_eq!(a.ncols(), x.len());
    debug_assert_eq!(rows, y.len());
    y.fill(0.0);
    for (col, &xj) in a.as_slice().chunks_exact(rows).zip(x.iter()) {
        if xj == 0.0 {
            continue;
        }
        for (yi, &aij) in y.iter_mut().zip(col.iter()) {
            *yi += aij * xj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn kernels_match_nalgebra() {
        let a = DMatrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64 * 0.5 - 1.0);
        let x: Vec<Complex64> = (0..3)
            .map(|i| Complex64::new(i as f64 + 0.5, -(i as f64)))
            .collect();
        let xc = DVector::from_iterator(3, x.iter().copied());
        let ac = a.map(|v| Complex64::new(v, 0.0));

        let mut y = vec![Complex64::new(0.0, 0.0); 4];
        gemv_real_acc(&a, &x, &mut y);
        let want = &ac * &xc;
        for i in 0..4 {
            assert!((y[i] - want[i]).norm() < 1e-12);
        }

        let xt: Vec<Complex64> = (0..4).map(|i| Complex64::new(1.0, i as f64)).collect();
        let mut yt = vec![Complex64::new(0.0, 0.0); 3];
        gemv_real_adjoint(&a, &xt, &mut yt);
        let want_t = ac.transpose() * DVector::from_iterator(4, xt.iter().copied());
        for j in 0..3 {
            assert!((yt[j] - want_t[j]).norm() < 1e-12);
        }

        let mut yh = vec![Complex64::new(0.0, 0.0); 4];
        gemv_complex(&ac, &x, &mut yh);
        for i in 0..4 {
            assert!((yh[i] - want[i]).norm() < 1e-12);
        }
    }
}
