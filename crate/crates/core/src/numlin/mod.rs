//! Dense complex linear algebra: matrices, SVD, QR, Schatten norms and Haar
//! sampling.

mod matrix;
mod qr;
mod svd;

pub use matrix::{ComplexMatrix, MatrixWire};
pub use qr::{orthonormalize, qr_thin, RANK_TOL};
pub use svd::{singular_values, svd, SingularSpectrum, SVD_TOL};

use crate::error::{Error, Result};
use crate::rng::{complex_normal, substream, Rng};

pub use num_complex::Complex64;

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `Σ_l σ_l^p` for a spectrum.
pub fn spectrum_pow_sum(values: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        values.iter().map(|s| s * s).sum()
    } else if p == 1.0 {
        values.iter().sum()
    } else {
        values.iter().filter(|&&s| s > 0.0).map(|s| s.powf(p)).sum()
    }
}

/// `‖M‖_{S_p}^p = Σ_l σ_l^p`.
pub fn schatten_norm_pow(m: &ComplexMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(spectrum_pow_sum(&singular_values(m)?, p))
}

/// `‖M‖_{S_p} = (Σ_l σ_l^p)^{1/p}`.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    Ok(schatten_norm_pow(m, p)?.powf(1.0 / p))
}

/// Complex Gaussian `rows × cols` matrix with i.i.d. standard entries.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed `n × n` unitary drawn from `rng`.
///
/// QR of a complex Gaussian matrix with `R` normalized to a positive
/// diagonal; that normalization is what makes the law exactly Haar.
pub fn haar_unitary_from(n: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("unitary of size 0".into()));
    }
    haar_isometry_from(n, n, rng)
}

/// Haar unitary keyed by `seed`.
pub fn haar_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    haar_unitary_from(n, &mut substream(seed, 0))
}

/// `n × k` matrix with orthonormal columns spanning a Haar-random
/// `k`-dimensional subspace.
pub fn haar_isometry_from(n: usize, k: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    if k == 0 || k > n {
        return Err(Error::InvalidDimension(format!("isometry {n}x{k}")));
    }
    loop {
        let g = gaussian_matrix(n, k, rng);
        match orthonormalize(&g) {
            Ok(q) => return Ok(q),
            // probability zero; redraw rather than fail
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}
