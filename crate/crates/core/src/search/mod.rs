//! Minimizing the expansion ratios over subspaces.
//!
//! Three strategies produce upper bounds on `min_V ratio(V)`:
//!
//! * `coordinate-exhaustive`: every coordinate subspace `span{e_w : w ∈ W}`;
//!   exact over that class, and equal to `h(G)` for permutation tuples.
//! * `random-sample`: Haar-random subspaces.
//! * `riemannian`: multi-restart descent on orthonormal bases.
//!
//! Every reported value is the exact ratio at the returned witness.

mod coordinate;
mod random;
mod riemannian;

pub use coordinate::minimize_coordinate;
pub use random::minimize_random;
pub use riemannian::{
    descend, objective_and_gradient, objective_and_gradient_at, minimize_riemannian, DescentRun,
};

use serde::{Deserialize, Serialize};

use crate::channels::{expansion_ratio, BistochasticTuple, RatioKind, Subspace};
use crate::error::{Error, Result};
use crate::numlin::{check_exponent, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    CoordinateExhaustive,
    RandomSample,
    Riemannian,
}

/// Which ratio is minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Schatten-p ratio.
    Sp,
    /// Dimension (rank) ratio.
    Dim,
    /// Quantum edge ratio.
    Q,
}

impl Mode {
    pub fn ratio_kind(self, p: f64) -> RatioKind {
        match self {
            Mode::Sp => RatioKind::Schatten { p },
            Mode::Dim => RatioKind::Dim,
            Mode::Q => RatioKind::Q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Target dimension; `None` sweeps `1..=⌊n/2⌋`.
    pub k: Option<usize>,
    pub samples: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    /// Step shrink factor in `(0, 1)`.
    pub backtrack: f64,
    pub grad_tol: f64,
    /// Smoothing for `p < 2`.
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::CoordinateExhaustive,
            k: None,
            samples: 200,
            restarts: 8,
            max_iters: 500,
            initial_step: 0.5,
            backtrack: 0.5,
            grad_tol: 1e-8,
            epsilon: 1e-10,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        SearchConfig {
            strategy,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameters("samples, restarts and max_iters must be >= 1".into()));
        }
        if !(self.epsilon >= 0.0) || !(self.grad_tol > 0.0) || !(self.initial_step > 0.0) {
            return Err(Error::InvalidParameters(
                "epsilon must be >= 0; grad_tol and initial_step must be > 0".into(),
            ));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidParameters("backtrack factor must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Dimensions to search for an ambient dimension `n`.
    pub(crate) fn dims(&self, n: usize) -> Result<Vec<usize>> {
        let max = n / 2;
        match self.k {
            Some(0) => Err(Error::InvalidDimension("k = 0".into())),
            Some(k) if k > max => Err(Error::DimensionTooLarge { k, n, max }),
            Some(k) => Ok(vec![k]),
            None if max == 0 => Err(Error::InvalidDimension(format!("no admissible subspace for n = {n}"))),
            None => Ok((1..=max).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Witness {
    Subspace { basis: ComplexMatrix },
    /// Sorted 0-based vertex set of a coordinate subspace.
    Subset { vertices: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionEstimate {
    pub value: f64,
    pub witness: Witness,
    pub k: usize,
    pub p: f64,
    pub mode: Mode,
    pub strategy: Strategy,
    /// Ratio evaluations (coordinate, random) or descent iterations.
    pub evaluations: usize,
    pub seed: u64,
}

impl ExpansionEstimate {
    pub fn witness_subspace(&self, n: usize) -> Result<Subspace> {
        match &self.witness {
            Witness::Subspace { basis } => Subspace::new(basis.clone()),
            Witness::Subset { vertices } => Subspace::coordinate(n, vertices),
        }
    }

    /// The ratio at the witness, evaluated from scratch.
    pub fn recompute(&self, t: &BistochasticTuple) -> Result<f64> {
        let v = self.witness_subspace(t.n())?;
        Ok(expansion_ratio(t, &v, self.mode.ratio_kind(self.p))?.value)
    }
}

/// Runs the configured strategy for `mode` and returns the overall minimum
/// across the admissible dimensions.
pub fn estimate(t: &BistochasticTuple, mode: Mode, p: f64, cfg: &SearchConfig) -> Result<ExpansionEstimate> {
    cfg.validate()?;
    if mode == Mode::Sp {
        check_exponent(p)?;
    }
    match cfg.strategy {
        Strategy::CoordinateExhaustive => minimize_coordinate(t, p, mode, cfg.k),
        Strategy::RandomSample => minimize_random(t, p, mode, cfg),
        Strategy::Riemannian => minimize_riemannian(t, p, mode, cfg),
    }
}

/// Schatten-p expansion estimate.
pub fn estimate_h(t: &BistochasticTuple, p: f64, cfg: &SearchConfig) -> Result<ExpansionEstimate> {
    estimate(t, Mode::Sp, p, cfg)
}

/// Effective `p` for a mode; the quantum ratio coincides with the S_2 ratio.
pub(crate) fn effective_p(mode: Mode, p: f64) -> f64 {
    match mode {
        Mode::Q => 2.0,
        _ => p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_with_defaults() {
        let cfg: SearchConfig = serde_json_like();
        assert_eq!(cfg.strategy, Strategy::Riemannian);
        assert_eq!(cfg.restarts, 3);
        assert_eq!(cfg.samples, SearchConfig::default().samples);
    }

    fn serde_json_like() -> SearchConfig {
        serde_json::from_str(r#"{"strategy": "riemannian", "restarts": 3, "k": 2}"#).unwrap()
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = SearchConfig::default();
        cfg.restarts = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SearchConfig::default();
        cfg.epsilon = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SearchConfig::default();
        cfg.backtrack = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn dimension_sweep_bounds() {
        let mut cfg = SearchConfig::default();
        assert_eq!(cfg.dims(7).unwrap(), vec![1, 2, 3]);
        cfg.k = Some(4);
        assert!(matches!(cfg.dims(7), Err(Error::DimensionTooLarge { .. })));
        cfg.k = None;
        assert!(cfg.dims(1).is_err());
    }
}
