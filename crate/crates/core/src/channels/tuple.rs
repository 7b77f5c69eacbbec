use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{haar_unitary_from, ComplexMatrix};
use crate::rng::substream;

/// Default bistochasticity tolerance (scaled by `d·√n`).
pub const BISTOCH_TOL: f64 = 1e-9;

/// A permutation of `0..n`, `perm[j]` is the image of `j`.
pub type Permutation = Vec<usize>;

/// `d` square matrices of a common size `n`.
///
/// Construction checks shapes only; call [`BistochasticTuple::validate`] to
/// check `Σ B_i* B_i = Σ B_i B_i* = d·Id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TupleWire", into = "TupleWire")]
pub struct BistochasticTuple {
    n: usize,
    matrices: Vec<ComplexMatrix>,
}

/// On-disk form: `{n, d, matrices: [matrix, ...]}`.
#[derive(Serialize, Deserialize)]
pub struct TupleWire {
    pub n: usize,
    pub d: usize,
    pub matrices: Vec<ComplexMatrix>,
}

impl TryFrom<TupleWire> for BistochasticTuple {
    type Error = Error;

    fn try_from(w: TupleWire) -> Result<Self> {
        if w.matrices.len() != w.d {
            return Err(Error::ShapeMismatch(format!(
                "header says d = {} but {} matrices were given",
                w.d,
                w.matrices.len()
            )));
        }
        let t = BistochasticTuple::new(w.matrices)?;
        if t.n != w.n {
            return Err(Error::ShapeMismatch(format!("header says n = {} but matrices are {}x{}", w.n, t.n, t.n)));
        }
        Ok(t)
    }
}

impl From<BistochasticTuple> for TupleWire {
    fn from(t: BistochasticTuple) -> Self {
        TupleWire {
            n: t.n,
            d: t.matrices.len(),
            matrices: t.matrices,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    /// `‖Σ B_i* B_i − d·Id‖_F`
    pub left_deviation: f64,
    /// `‖Σ B_i B_i* − d·Id‖_F`
    pub right_deviation: f64,
    pub threshold: f64,
}

impl BistochasticTuple {
    pub fn new(matrices: Vec<ComplexMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidDimension("tuple with d = 0".into()))?;
        let n = first.rows();
        if n == 0 {
            return Err(Error::InvalidDimension("tuple of 0x0 matrices".into()));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {i} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(BistochasticTuple { n, matrices })
    }

    /// Builds the tuple and rejects it unless it validates at `tol`.
    pub fn new_validated(matrices: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let t = Self::new(matrices)?;
        let report = t.validate(tol);
        if !report.pass {
            return Err(Error::InvalidMatrix(format!(
                "not bistochastic: deviations {:e} / {:e} exceed {:e}",
                report.left_deviation, report.right_deviation, report.threshold
            )));
        }
        Ok(t)
    }

    /// `(Id, …, Id)`.
    pub fn identity(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![ComplexMatrix::identity(n); d])
    }

    /// Permutation matrices with `B[perm[j]][j] = 1`.
    pub fn from_permutations(perms: &[Permutation]) -> Result<Self> {
        let n = perms
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidDimension("no permutations given".into()))?;
        let mut matrices = Vec::with_capacity(perms.len());
        for perm in perms {
            check_permutation(perm, n)?;
            let mut m = ComplexMatrix::zeros(n, n);
            for (j, &i) in perm.iter().enumerate() {
                m[(i, j)] = Complex64::new(1.0, 0.0);
            }
            matrices.push(m);
        }
        Self::new(matrices)
    }

    /// `d` independent Haar unitaries; matrix `i` comes from substream `i`.
    pub fn random_unitary(n: usize, d: usize, seed: u64) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidDimension(format!("n = {n}, d = {d}")));
        }
        let matrices = (0..d)
            .map(|i| haar_unitary_from(n, &mut substream(seed, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(matrices)
    }

    /// `B'_i = Σ_j W_ij B_j` for a `d × d` unitary `W`.
    ///
    /// Bistochasticity is preserved, but the mixed matrices are no longer
    /// unitary, so their singular values spread over `[0, √d]`.
    pub fn mixed(&self, w: &ComplexMatrix) -> Result<Self> {
        let d = self.d();
        if w.rows() != d || w.cols() != d {
            return Err(Error::ShapeMismatch(format!("mixing matrix must be {d}x{d}")));
        }
        let matrices = (0..d)
            .map(|i| {
                let mut acc = ComplexMatrix::zeros(self.n, self.n);
                for (j, b) in self.matrices.iter().enumerate() {
                    acc.axpy(w[(i, j)], b);
                }
                acc
            })
            .collect();
        Self::new(matrices)
    }

    /// `(U B_i U*)_i`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let ua = u.adjoint();
        let matrices = self
            .matrices
            .iter()
            .map(|b| u.matmul(b)?.matmul(&ua))
            .collect::<Result<Vec<_>>>()?;
        Self::new(matrices)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_bistochastic(&self.matrices, tol).expect("shapes checked at construction")
    }
}

/// Both deviation norms and the pass flag (`≤ tol·d·√n` each).
pub fn validate_bistochastic(matrices: &[ComplexMatrix], tol: f64) -> Result<ValidationReport> {
    let d = matrices.len();
    let n = matrices.first().map_or(0, ComplexMatrix::rows);
    if matrices.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::ShapeMismatch("tuple matrices must share one square shape".into()));
    }
    let mut left = ComplexMatrix::identity(n).scale_real(-(d as f64));
    let mut right = left.clone();
    let one = Complex64::new(1.0, 0.0);
    for b in matrices {
        left.axpy(one, &b.adjoint_mul(b)?);
        right.axpy(one, &b.matmul(&b.adjoint())?);
    }
    let threshold = tol * d as f64 * (n as f64).sqrt();
    let (l, r) = (left.frobenius_norm(), right.frobenius_norm());
    Ok(ValidationReport {
        pass: l <= threshold && r <= threshold,
        left_deviation: l,
        right_deviation: r,
        threshold,
    })
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation {
            n,
            detail: format!("length {}", perm.len()),
        });
    }
    let mut seen = vec![false; n];
    for (j, &i) in perm.iter().enumerate() {
        if i >= n || seen[i] {
            return Err(Error::InvalidPermutation {
                n,
                detail: format!("entry {j} maps to {i}"),
            });
        }
        seen[i] = true;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_tuple_is_exactly_bistochastic() {
        let r = BistochasticTuple::identity(4, 3).unwrap().validate(BISTOCH_TOL);
        assert!(r.pass);
        assert_eq!((r.left_deviation, r.right_deviation), (0.0, 0.0));
    }

    #[test]
    fn scaled_identity_fails() {
        let t = BistochasticTuple::new(vec![
            ComplexMatrix::identity(3),
            ComplexMatrix::identity(3).scale_real(2.0),
        ])
        .unwrap();
        let r = t.validate(BISTOCH_TOL);
        assert!(!r.pass);
        // Σ B*B = 5 Id against 2 Id
        assert!((r.left_deviation - 3.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn haar_tuples_validate() {
        assert!(BistochasticTuple::random_unitary(6, 4, 3).unwrap().validate(1e-10).pass);
        assert!(BistochasticTuple::random_unitary(8, 3, 1).unwrap().validate(1e-10).pass);
    }

    #[test]
    fn random_tuple_is_reproducible() {
        let a = BistochasticTuple::random_unitary(5, 2, 42).unwrap();
        let b = BistochasticTuple::random_unitary(5, 2, 42).unwrap();
        assert_eq!(a, b);
        let scalars = BistochasticTuple::random_unitary(1, 2, 0).unwrap();
        for m in scalars.matrices() {
            assert!((m[(0, 0)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixing_preserves_bistochasticity() {
        let t = BistochasticTuple::random_unitary(6, 3, 8).unwrap();
        let w = crate::numlin::haar_unitary(3, 9).unwrap();
        assert!(t.mixed(&w).unwrap().validate(1e-10).pass);
    }

    #[test]
    fn permutations_are_checked() {
        assert!(matches!(
            BistochasticTuple::from_permutations(&[vec![0, 0, 1]]),
            Err(Error::InvalidPermutation { .. })
        ));
        assert!(BistochasticTuple::from_permutations(&[vec![0, 1], vec![0, 1, 2]]).is_err());
        let t = BistochasticTuple::from_permutations(&vec![vec![0, 1, 2]; 3]).unwrap();
        assert_eq!(t, BistochasticTuple::identity(3, 3).unwrap());
    }

    #[test]
    fn permutation_sum_is_adjacency() {
        let t = BistochasticTuple::from_permutations(&[vec![1, 2, 3, 0], vec![3, 0, 1, 2]]).unwrap();
        let validation = t.validate(0.0);
        assert!(validation.pass);
        let mut sum = ComplexMatrix::zeros(4, 4);
        for m in t.matrices() {
            sum = &sum + m;
        }
        for i in 0..4 {
            for j in 0..4 {
                let adjacent = (i + 1) % 4 == j || (j + 1) % 4 == i;
                assert_eq!(sum[(i, j)].re, if adjacent { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let err = BistochasticTuple::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]);
        assert!(matches!(err, Err(Error::ShapeMismatch(_))));
        assert!(validate_bistochastic(&[ComplexMatrix::zeros(2, 3)], 1e-9).is_err());
    }
}
