//! Bistochastic tuples, the unital channel they induce, and the per-subspace
//! expansion ratios.
//!
//! For a tuple `B = (B_1, …, B_d)` of `n × n` matrices and a subspace `V` of
//! dimension `k`, the restriction `B_i|_{V⊥,V} = P_V B_i (Id − P_V)` measures
//! flow from the complement into `V`. The ratios here are the bodies of the
//! minima that define the expansion constants:
//!
//! * Schatten:  `Σ_i ‖B_i|_{V⊥,V}‖_{S_p}^p / (d k)`
//! * dimension: `Σ_i rank(B_i|_{V⊥,V}) / (d k)`
//! * quantum:   `⟨Id − P_V, Σ_i B_i P_V B_i*⟩ / (d k)`
//!
//! The quantum ratio uses the unnormalized sum, which makes it coincide with
//! the Schatten-2 ratio for every bistochastic tuple.

mod subspace;
mod tuple;

pub use subspace::Subspace;
pub(crate) use tuple::check_permutation;
pub use tuple::{validate_bistochastic, BistochasticTuple, Permutation, ValidationReport, BISTOCH_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{check_exponent, singular_values, spectrum_pow_sum, ComplexMatrix};

/// Default rank threshold, relative to the `√d` scale of the singular values.
pub const RANK_TOL: f64 = 1e-8;

/// Which functional a ratio evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RatioKind {
    Schatten { p: f64 },
    Dim,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioValue {
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub kind: RatioKind,
}

impl RatioValue {
    fn new(numerator: f64, denominator: f64, kind: RatioKind) -> Self {
        RatioValue {
            value: numerator / denominator,
            numerator,
            denominator,
            kind,
        }
    }
}

/// `(1/d) Σ_i B_i X B_i*` when `normalized`, otherwise the plain sum.
pub fn channel_apply(t: &BistochasticTuple, x: &ComplexMatrix, normalized: bool) -> Result<ComplexMatrix> {
    let n = t.n();
    if x.rows() != n || x.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "channel on {n}x{n} matrices applied to {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for b in t.matrices() {
        let bx = b.matmul(x)?;
        let bxb = bx.matmul(&b.adjoint())?;
        out.axpy(num_complex::Complex64::new(1.0, 0.0), &bxb);
    }
    if normalized {
        out = out.scale_real(1.0 / t.d() as f64);
    }
    Ok(out)
}

/// `P_V · B · (Id − P_V)` as a full `n × n` matrix.
pub fn restrict(b: &ComplexMatrix, v: &Subspace) -> Result<ComplexMatrix> {
    let n = v.ambient_dim();
    if b.rows() != n || b.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "restricting {}x{} matrix to a subspace of C^{n}",
            b.rows(),
            b.cols()
        )));
    }
    let p = v.projector();
    let complement = &ComplexMatrix::identity(n) - &p;
    Ok(&(&p * b) * &complement)
}

/// `Q* B (Id − Q Q*)`, the `k × n` block carrying the same nonzero singular
/// values as [`restrict`] at a fraction of the cost.
pub(crate) fn compressed_restriction(b: &ComplexMatrix, v: &Subspace) -> Result<ComplexMatrix> {
    let q = v.basis();
    let qb = q.adjoint_mul(b)?;
    let qbq = qb.matmul(q)?;
    let correction = qbq.matmul(&q.adjoint())?;
    qb.try_sub(&correction)
}

fn check_subspace(t: &BistochasticTuple, v: &Subspace) -> Result<usize> {
    let n = t.n();
    if v.ambient_dim() != n {
        return Err(Error::ShapeMismatch(format!(
            "subspace of C^{} used with a tuple on C^{n}",
            v.ambient_dim()
        )));
    }
    let k = v.dim();
    if k == 0 {
        return Err(Error::InvalidDimension("subspace of dimension 0".into()));
    }
    if k > n / 2 {
        return Err(Error::DimensionTooLarge { k, n, max: n / 2 });
    }
    Ok(k)
}

/// Singular values of each `B_i|_{V⊥,V}` (the `min(k, n)` leading ones; the
/// rest are zero).
pub fn restriction_spectra(t: &BistochasticTuple, v: &Subspace) -> Result<Vec<Vec<f64>>> {
    t.matrices()
        .iter()
        .map(|b| singular_values(&compressed_restriction(b, v)?))
        .collect()
}

/// Schatten ratio from precomputed restriction spectra.
pub fn sp_ratio_from_spectra(spectra: &[Vec<f64>], d: usize, k: usize, p: f64) -> Result<RatioValue> {
    check_exponent(p)?;
    let numerator = spectra.iter().map(|s| spectrum_pow_sum(s, p)).sum();
    Ok(RatioValue::new(numerator, (d * k) as f64, RatioKind::Schatten { p }))
}

/// Dimension ratio from precomputed restriction spectra.
pub fn dim_ratio_from_spectra(spectra: &[Vec<f64>], d: usize, k: usize, rank_tol: f64) -> RatioValue {
    let threshold = rank_tol * (d as f64).sqrt();
    let numerator = spectra
        .iter()
        .map(|s| s.iter().filter(|&&x| x > threshold).count())
        .sum::<usize>() as f64;
    RatioValue::new(numerator, (d * k) as f64, RatioKind::Dim)
}

/// `Σ_i ‖B_i|_{V⊥,V}‖_{S_p}^p / (d · dim V)`.
pub fn expansion_ratio_sp(t: &BistochasticTuple, v: &Subspace, p: f64) -> Result<RatioValue> {
    check_exponent(p)?;
    let k = check_subspace(t, v)?;
    sp_ratio_from_spectra(&restriction_spectra(t, v)?, t.d(), k, p)
}

/// `Σ_i rank(B_i|_{V⊥,V}) / (d · dim V)`; a singular value counts toward the
/// rank when it exceeds `rank_tol · √d`.
pub fn expansion_ratio_dim(t: &BistochasticTuple, v: &Subspace, rank_tol: f64) -> Result<RatioValue> {
    let k = check_subspace(t, v)?;
    Ok(dim_ratio_from_spectra(&restriction_spectra(t, v)?, t.d(), k, rank_tol))
}

/// `⟨Id − P_V, Σ_i B_i P_V B_i*⟩ / (d · dim V)`.
pub fn quantum_edge_ratio(t: &BistochasticTuple, v: &Subspace) -> Result<RatioValue> {
    let k = check_subspace(t, v)?;
    let n = t.n();
    let p = v.projector();
    let image = channel_apply(t, &p, false)?;
    let complement = &ComplexMatrix::identity(n) - &p;
    // Tr[(Id − P)* Φ(P)]; (Id − P) is Hermitian
    let numerator = complement.real_inner(&image).max(0.0);
    Ok(RatioValue::new(numerator, (t.d() * k) as f64, RatioKind::Q))
}

/// Evaluates the ratio selected by `kind`.
pub fn expansion_ratio(t: &BistochasticTuple, v: &Subspace, kind: RatioKind) -> Result<RatioValue> {
    match kind {
        RatioKind::Schatten { p } => expansion_ratio_sp(t, v, p),
        RatioKind::Dim => expansion_ratio_dim(t, v, RANK_TOL),
        RatioKind::Q => quantum_edge_ratio(t, v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c4() -> BistochasticTuple {
        BistochasticTuple::from_permutations(&[vec![1, 2, 3, 0], vec![3, 0, 1, 2]]).unwrap()
    }

    fn e12() -> Subspace {
        Subspace::coordinate(4, &[0, 1]).unwrap()
    }

    #[test]
    fn identity_tuple_fixes_every_input() {
        let t = BistochasticTuple::identity(3, 2).unwrap();
        let x = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64));
        assert_eq!(channel_apply(&t, &x, true).unwrap(), x);
    }

    #[test]
    fn c4_channel_spreads_mass_to_neighbours() {
        let x = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]);
        let y = channel_apply(&c4(), &x, true).unwrap();
        let expected = ComplexMatrix::diag_real(&[0.0, 0.5, 0.0, 0.5]);
        assert!((&y - &expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn channel_is_unital() {
        let t = BistochasticTuple::random_unitary(5, 3, 11).unwrap();
        let y = channel_apply(&t, &ComplexMatrix::identity(5), true).unwrap();
        assert!((&y - &ComplexMatrix::identity(5)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn channel_rejects_wrong_shape() {
        let t = BistochasticTuple::identity(3, 1).unwrap();
        assert!(matches!(
            channel_apply(&t, &ComplexMatrix::identity(2), true),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn restriction_of_identity_vanishes() {
        let v = Subspace::coordinate(4, &[1, 3]).unwrap();
        assert!(restrict(&ComplexMatrix::identity(4), &v).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn restriction_of_shift_has_single_entry() {
        let t = c4();
        let r = restrict(&t.matrices()[0], &e12()).unwrap();
        let r3 = restrict(&t.matrices()[1], &e12()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (0, 3) { 1.0 } else { 0.0 };
                assert_eq!(r[(i, j)], Complex64::new(want, 0.0));
                let want3 = if (i, j) == (1, 2) { 1.0 } else { 0.0 };
                assert_eq!(r3[(i, j)], Complex64::new(want3, 0.0));
            }
        }
    }

    #[test]
    fn c4_ratios() {
        let (t, v) = (c4(), e12());
        for p in [1.0, 2.0, 3.0, 4.0] {
            assert_eq!(expansion_ratio_sp(&t, &v, p).unwrap().value, 0.5);
        }
        assert_eq!(expansion_ratio_dim(&t, &v, RANK_TOL).unwrap().value, 0.5);
        let q = quantum_edge_ratio(&t, &v).unwrap();
        assert_eq!(q.value, 0.5);
        // |∂W| = 2 edges leave the arc {0, 1}
        assert_eq!(q.numerator, 2.0);
    }

    #[test]
    fn identity_tuple_has_zero_ratios() {
        let t = BistochasticTuple::identity(6, 3).unwrap();
        let v = Subspace::coordinate(6, &[0, 4]).unwrap();
        assert_eq!(expansion_ratio_sp(&t, &v, 1.5).unwrap().value, 0.0);
        assert_eq!(expansion_ratio_dim(&t, &v, RANK_TOL).unwrap().value, 0.0);
        assert_eq!(quantum_edge_ratio(&t, &v).unwrap().value, 0.0);
    }

    #[test]
    fn dimension_limits() {
        let t = c4();
        let v = Subspace::coordinate(4, &[0, 1, 2]).unwrap();
        assert!(matches!(
            expansion_ratio_sp(&t, &v, 2.0),
            Err(Error::DimensionTooLarge { k: 3, n: 4, max: 2 })
        ));
        // odd n: floor(5/2) = 2
        let t5 = BistochasticTuple::identity(5, 1).unwrap();
        let v5 = Subspace::coordinate(5, &[0, 1, 2]).unwrap();
        assert!(expansion_ratio_dim(&t5, &v5, RANK_TOL).is_err());
        assert!(expansion_ratio_sp(&t, &e12(), 0.9).is_err());
    }

    #[test]
    fn haar_tuple_with_line_has_full_dimension_ratio() {
        for seed in 0..10 {
            let t = BistochasticTuple::random_unitary(8, 3, seed).unwrap();
            let v = Subspace::haar(8, 1, seed + 100).unwrap();
            let spectra = restriction_spectra(&t, &v).unwrap();
            assert!(spectra.iter().all(|s| s[0] > RANK_TOL * 3f64.sqrt()));
            assert_eq!(expansion_ratio_dim(&t, &v, RANK_TOL).unwrap().value, 1.0);
        }
    }
}
