use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::svd::singular_values;
use crate::error::{Error, Result};

/// Relative threshold on `σ_min / σ_max` below which a basis is rejected.
pub const RANK_TOL: f64 = 1e-10;

/// Thin Householder QR, normalized so that `R` has a nonnegative real
/// diagonal. With that normalization `Q` is unique for full-rank input.
///
/// Requires `rows >= cols`. Returns `(Q, R)` with `Q` `rows × cols`.
pub fn qr_thin(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (m, k) = (a.rows(), a.cols());
    if m < k {
        return Err(Error::ShapeMismatch(format!(
            "thin QR needs rows >= cols, got {m}x{k}"
        )));
    }
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(k);

    for j in 0..k {
        let x: Vec<Complex64> = (j..m).map(|i| r[(i, j)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // R <- (I - 2 v v*) R on rows j.., columns j..
        for c in j..k {
            let proj: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * r[(j + t, c)])
                .sum();
            for (t, vt) in v.iter().enumerate() {
                r[(j + t, c)] -= vt * proj * 2.0;
            }
        }
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of the identity.
    let mut q = ComplexMatrix::from_fn(m, k, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    for j in (0..k).rev() {
        let v = &reflectors[j];
        if v.is_empty() {
            continue;
        }
        for c in 0..k {
            let proj: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * q[(j + t, c)])
                .sum();
            for (t, vt) in v.iter().enumerate() {
                q[(j + t, c)] -= vt * proj * 2.0;
            }
        }
    }

    let mut r_thin = ComplexMatrix::from_fn(k, k, |i, j| if i <= j { r[(i, j)] } else { Complex64::new(0.0, 0.0) });
    // Move the phase of each diagonal entry of R into Q.
    for j in 0..k {
        let d = r_thin[(j, j)];
        let n = d.norm();
        if n == 0.0 {
            continue;
        }
        let ph = d / n;
        for i in 0..m {
            q[(i, j)] *= ph;
        }
        for c in 0..k {
            r_thin[(j, c)] *= ph.conj();
        }
    }
    Ok((q, r_thin))
}

/// Orthonormal basis for the column span of `a`.
///
/// Fails with [`Error::RankDeficient`] when `σ_min(a) <= RANK_TOL · σ_max(a)`.
pub fn orthonormalize(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols() == 0 || a.rows() < a.cols() {
        return Err(Error::RankDeficient {
            smallest: 0.0,
            threshold: RANK_TOL,
        });
    }
    let sv = singular_values(a)?;
    let smax = sv[0];
    let smin = *sv.last().unwrap();
    let threshold = RANK_TOL * smax;
    if smax == 0.0 || smin <= threshold {
        return Err(Error::RankDeficient {
            smallest: smin,
            threshold,
        });
    }
    Ok(qr_thin(a)?.0)
}
