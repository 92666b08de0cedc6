//! Seeded random sensing matrices and the observation model `y = Xβ + z`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::kernels;
use crate::rng::rng_from_seed;

/// Distribution family of a sensing matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensingKind {
    /// i.i.d. standard normal entries, then each column rescaled to unit norm.
    GaussianUnitColumns,
    /// i.i.d. entries uniform on {+1/sqrt(n), -1/sqrt(n)}.
    BernoulliSigned,
    /// Supplied by the caller (e.g. loaded from a file); no generation seed.
    External,
}

/// An n x p real sensing matrix with n <= p.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    kind: SensingKind,
    n: usize,
    p: usize,
    seed: u64,
    data: DMatrix<f64>,
}

/// Additive white Gaussian noise: std deviation and generation seed.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl SensingMatrix {
    pub fn kind(&self) -> SensingKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Wraps an externally supplied dense matrix.
    pub fn from_dense(data: DMatrix<f64>) -> Result<Self> {
        let (n, p) = (data.nrows(), data.ncols());
        if n == 0 || p == 0 || n > p {
            return Err(Error::dim(format!(
                "sensing matrix must satisfy 1 <= n <= p, got {n} x {p}"
            )));
        }
        Ok(SensingMatrix {
            kind: SensingKind::External,
            n,
            p,
            seed: 0,
            data,
        })
    }

    /// X v for a complex vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.p {
            return Err(Error::dim(format!(
                "sensing matrix expects {} entries, got {}",
                self.p,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        kernels::gemv_real_acc(&self.data, v, &mut out);
        Ok(out)
    }

    /// Xᵀ u for a complex vector.
    pub fn adjoint(&self, u: &[Complex64]) -> Result<Vec<Complex64>> {
        if u.len() != self.n {
            return Err(Error::dim(format!(
                "sensing matrix expects {} observations, got {}",
                self.n,
                u.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.p];
        kernels::gemv_real_adjoint(&self.data, u, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        kernels::gemv_real_acc(&self.data, v, out);
    }

    pub(crate) fn adjoint_into(&self, u: &[Complex64], out: &mut [Complex64]) {
        kernels::gemv_real_adjoint(&self.data, u, out);
    }
}

/// Gaussian sensing matrix with unit-norm columns, deterministic in `seed`.
pub fn gaussian_sensing(n: usize, p: usize, seed: u64) -> Result<SensingMatrix> {
    check_dims(n, p)?;
    let mut rng = rng_from_seed(seed);
    let mut data = DMatrix::zeros(n, p);
    // Column-major fill so the draw order matches the storage order.
    for j in 0..p {
        let mut norm_sq = 0.0;
        for i in 0..n {
            let v: f64 = rng.sample(StandardNormal);
            data[(i, j)] = v;
            norm_sq += v * v;
        }
        let norm = norm_sq.sqrt();
        for i in 0..n {
            data[(i, j)] /= norm;
        }
    }
    Ok(SensingMatrix {
        kind: SensingKind::GaussianUnitColumns,
        n,
        p,
        seed,
        data,
    })
}

/// Signed Bernoulli sensing matrix with entries exactly ±1/sqrt(n).
pub fn bernoulli_sensing(n: usize, p: usize, seed: u64) -> Result<SensingMatrix> {
    check_dims(n, p)?;
    let mut rng = rng_from_seed(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let data = DMatrix::from_fn(n, p, |_, _| if rng.gen::<bool>() { scale } else { -scale });
    Ok(SensingMatrix {
        kind: SensingKind::BernoulliSigned,
        n,
        p,
        seed,
        data,
    })
}

fn check_dims(n: usize, p: usize) -> Result<()> {
    if n == 0 || n > p {
        return Err(Error::dim(format!(
            "sensing matrix must satisfy 1 <= n <= p, got {n} x {p}"
        )));
    }
    Ok(())
}

/// Observes `y = Xβ + z` with z i.i.d. N(0, σ²). When β has a nonzero
/// imaginary part, independent noise is added to the real and imaginary
/// parts; a real β yields a real observation.
pub fn observe(
    x: &SensingMatrix,
    beta: &DVector<Complex64>,
    noise: &NoiseSpec,
) -> Result<DVector<Complex64>> {
    let clean = x.apply(beta.as_slice())?;
    let complex_signal = beta.iter().any(|z| z.im != 0.0);
    Ok(add_noise(&clean, noise, complex_signal))
}

/// Adds seeded Gaussian noise to a clean observation vector.
pub fn add_noise(clean: &[Complex64], noise: &NoiseSpec, complex_signal: bool) -> DVector<Complex64> {
    let mut rng = rng_from_seed(noise.seed);
    let mut y = DVector::from_iterator(clean.len(), clean.iter().copied());
    if noise.sigma > 0.0 {
        for v in y.iter_mut() {
            let e: f64 = rng.sample(StandardNormal);
            v.re += noise.sigma * e;
        }
        if complex_signal {
            for v in y.iter_mut() {
                let e: f64 = rng.sample(StandardNormal);
                v.im += noise.sigma * e;
            }
        }
    }
    y
}
