use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{haar_isometry_from, orthonormalize, ComplexMatrix};
use crate::rng::{substream, Rng};

const ORTHONORMAL_TOL: f64 = 1e-10;

/// A subspace `V < C^n`, held as an `n × k` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceWire", into = "SubspaceWire")]
pub struct Subspace {
    basis: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
pub struct SubspaceWire {
    basis: ComplexMatrix,
}

impl TryFrom<SubspaceWire> for Subspace {
    type Error = Error;

    fn try_from(w: SubspaceWire) -> Result<Self> {
        Subspace::new(w.basis)
    }
}

impl From<Subspace> for SubspaceWire {
    fn from(s: Subspace) -> Self {
        SubspaceWire { basis: s.basis }
    }
}

impl Subspace {
    /// Wraps a basis, checking `basis* basis = Id_k` within `1e-10`.
    pub fn new(basis: ComplexMatrix) -> Result<Self> {
        let (n, k) = (basis.rows(), basis.cols());
        if k == 0 || k > n {
            return Err(Error::InvalidDimension(format!("subspace basis of shape {n}x{k}")));
        }
        let gram = basis.adjoint_mul(&basis)?;
        let dev = (&gram - &ComplexMatrix::identity(k)).frobenius_norm();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::InvalidMatrix(format!(
                "basis columns are not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Subspace { basis })
    }

    /// Span of arbitrary full-rank columns.
    pub fn spanned_by(columns: &ComplexMatrix) -> Result<Self> {
        Ok(Subspace {
            basis: orthonormalize(columns)?,
        })
    }

    /// `span{e_i : i ∈ indices}` (0-based).
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidDimension(format!("coordinate index out of range for C^{n}")));
        }
        let mut basis = ComplexMatrix::zeros(n, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            basis[(i, j)] = Complex64::new(1.0, 0.0);
        }
        Subspace::new(basis)
    }

    pub fn haar_from(n: usize, k: usize, rng: &mut Rng) -> Result<Self> {
        Ok(Subspace {
            basis: haar_isometry_from(n, k, rng)?,
        })
    }

    pub fn haar(n: usize, k: usize, seed: u64) -> Result<Self> {
        Self::haar_from(n, k, &mut substream(seed, 0))
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    /// `P_V = Q Q*`.
    pub fn projector(&self) -> ComplexMatrix {
        self.basis.matmul(&self.basis.adjoint()).expect("square by construction")
    }

    /// `U · V` for a unitary `U`.
    pub fn transformed(&self, u: &ComplexMatrix) -> Result<Self> {
        Subspace::new(u.matmul(&self.basis)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_orthonormal_basis() {
        let b = ComplexMatrix::from_real_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert!(Subspace::new(b.clone()).is_err());
        assert_eq!(Subspace::spanned_by(&b).unwrap().dim(), 1);
    }

    #[test]
    fn projector_is_idempotent() {
        let v = Subspace::haar(7, 3, 2).unwrap();
        let p = v.projector();
        assert!((&(&p * &p) - &p).frobenius_norm() < 1e-12);
        assert!((p.trace().re - 3.0).abs() < 1e-12);
    }
}
