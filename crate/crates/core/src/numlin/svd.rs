//! One-sided (Hestenes) Jacobi SVD for dense complex matrices.
//!
//! Columns of a working copy are rotated pairwise until mutually orthogonal;
//! the column norms are then the singular values. Accurate to roughly machine
//! precision relative to `σ_max`, which is all the callers here need.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Default relative reconstruction tolerance.
pub const SVD_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;
const ORTHO_EPS: f64 = 1e-15;

/// Singular values in nonincreasing order, with optional singular vectors.
///
/// When present, `u` is `rows × r` and `v` is `cols × r` with
/// `r = min(rows, cols)`, so that `M = u · diag(values) · v*`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    pub u: Option<ComplexMatrix>,
    pub v: Option<ComplexMatrix>,
}

impl SingularSpectrum {
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `U · diag(values) · V*`; `None` if vectors were not computed.
    pub fn reconstruct(&self) -> Option<ComplexMatrix> {
        let (u, v) = (self.u.as_ref()?, self.v.as_ref()?);
        let mut us = u.clone();
        for j in 0..self.values.len() {
            for i in 0..us.rows() {
                us[(i, j)] *= self.values[j];
            }
        }
        us.matmul(&v.adjoint()).ok()
    }
}

/// Full thin SVD.
pub fn svd(m: &ComplexMatrix) -> Result<SingularSpectrum> {
    check_finite(m)?;
    if m.rows() >= m.cols() {
        let (values, u, v) = jacobi(m, true);
        Ok(SingularSpectrum {
            values,
            u,
            v,
        })
    } else {
        // M* = U' Σ V'*  =>  M = V' Σ U'*
        let (values, u, v) = jacobi(&m.adjoint(), true);
        Ok(SingularSpectrum {
            values,
            u: v,
            v: u,
        })
    }
}

/// Singular values only; skips the right-vector accumulation.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    let (values, _, _) = if m.rows() >= m.cols() {
        jacobi(m, false)
    } else {
        jacobi(&m.adjoint(), false)
    };
    Ok(values)
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidMatrix("non-finite entry passed to svd".into()))
    }
}

type JacobiOutput = (Vec<f64>, Option<ComplexMatrix>, Option<ComplexMatrix>);

/// Requires `a.rows() >= a.cols()`.
fn jacobi(a: &ComplexMatrix, vectors: bool) -> JacobiOutput {
    let (rows, cols) = (a.rows(), a.cols());
    let mut work: Vec<Vec<Complex64>> = (0..cols).map(|j| a.column(j)).collect();
    let mut right: Vec<Vec<Complex64>> = if vectors {
        (0..cols)
            .map(|j| {
                let mut e = vec![Complex64::new(0.0, 0.0); cols];
                e[j] = Complex64::new(1.0, 0.0);
                e
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut norms: Vec<f64> = work.iter().map(|c| norm_sqr(c)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha = norms[i];
                let beta = norms[j];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&work[i], &work[j]);
                let g = gamma.norm();
                if g <= ORTHO_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Reduce to a real rotation on (a_i, e^{-iφ} a_j).
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut work, i, j, c, s, phase);
                if vectors {
                    rotate(&mut right, i, j, c, s, phase);
                }
                norms[i] = norm_sqr(&work[i]);
                norms[j] = norm_sqr(&work[j]);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let sigma: Vec<f64> = norms.iter().map(|n| n.sqrt()).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]).then(x.cmp(&y)));
    let values: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();

    if !vectors {
        return (values, None, None);
    }

    let mut u = ComplexMatrix::zeros(rows, cols);
    let mut v = ComplexMatrix::zeros(cols, cols);
    let scale_floor = values.first().copied().unwrap_or(0.0) * f64::EPSILON * rows as f64;
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        v.set_column(dst, &right[src]);
        if sigma[src] > scale_floor && sigma[src] > 0.0 {
            let inv = 1.0 / sigma[src];
            let col: Vec<Complex64> = work[src].iter().map(|&z| z * inv).collect();
            u.set_column(dst, &col);
        } else {
            missing.push(dst);
        }
    }
    complete_orthonormal(&mut u, &missing);
    (values, Some(u), Some(v))
}

/// Fills the listed columns of `u` with unit vectors orthogonal to all other
/// columns (Gram–Schmidt against the standard basis).
fn complete_orthonormal(u: &mut ComplexMatrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let rows = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &dst in missing {
        while candidate < rows {
            let mut e = vec![Complex64::new(0.0, 0.0); rows];
            e[candidate] = Complex64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let col = u.column(j);
                    let proj = dot(&col, &e);
                    for (x, c) in e.iter_mut().zip(&col) {
                        *x -= proj * c;
                    }
                }
            }
            let n = norm_sqr(&e).sqrt();
            if n > 1e-8 {
                let col: Vec<Complex64> = e.iter().map(|&z| z / n).collect();
                u.set_column(dst, &col);
                filled.push(dst);
                break;
            }
        }
    }
}

#[inline]
fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `x* y`.
#[inline]
fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// a_i <- c a_i - s e^{-iφ} a_j,  a_j <- s e^{iφ} a_i + c a_j
#[inline]
fn rotate(cols: &mut [Vec<Complex64>], i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    let (left, right) = cols.split_at_mut(j);
    let (ci, cj) = (&mut left[i], &mut right[0]);
    let sp = phase * s;
    let spc = phase.conj() * s;
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = xi * c - spc * yj;
        *y = sp * xi + yj * c;
    }
}
