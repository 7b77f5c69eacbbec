//! Pointwise checks of the Schatten-norm comparison inequalities and the
//! rank relation, and randomized sweeps over them.
//!
//! Each checker evaluates both sides for one `(tuple, V)` and passes when
//! `rhs − lhs ≥ −tol`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    dim_ratio_from_spectra, restriction_spectra, sp_ratio_from_spectra, BistochasticTuple, Subspace, RANK_TOL,
};
use crate::error::{Error, Result};
use crate::numlin::{check_exponent, haar_unitary_from};
use crate::rng::{substream, Rng};

/// Tolerance for the two exponent comparisons and the rank relation.
pub const RATIO_TOL: f64 = 1e-9;
/// Tolerance for the singular-value bound.
pub const SINGULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Checker {
    Thm1I,
    Thm1Ii,
    SingularBound,
    HdRelations,
}

impl Checker {
    pub const ALL: [Checker; 4] = [Checker::Thm1I, Checker::Thm1Ii, Checker::SingularBound, Checker::HdRelations];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub p: f64,
    pub q: f64,
    /// Sweep seed; `None` for standalone checks.
    pub seed: Option<u64>,
    /// Position in the sweep.
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub checker: Checker,
    pub instance: InstanceDescriptor,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
}

impl InequalityReport {
    fn new(checker: Checker, instance: InstanceDescriptor, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        InequalityReport {
            checker,
            instance,
            lhs,
            rhs,
            slack,
            tol,
            // NaN slack fails
            pass: slack >= -tol,
        }
    }
}

fn check_order(p: f64, q: f64) -> Result<()> {
    check_exponent(p)?;
    check_exponent(q)?;
    if p < q {
        return Err(Error::InvalidExponentOrder { p, q });
    }
    Ok(())
}

/// Spectra of the restrictions, shared by all checkers of one instance.
struct Prepared {
    spectra: Vec<Vec<f64>>,
    d: usize,
    k: usize,
    desc: InstanceDescriptor,
}

impl Prepared {
    fn new(t: &BistochasticTuple, v: &Subspace, p: f64, q: f64) -> Result<Self> {
        if v.ambient_dim() != t.n() {
            return Err(Error::ShapeMismatch(format!(
                "subspace of C^{} used with a tuple on C^{}",
                v.ambient_dim(),
                t.n()
            )));
        }
        let k = v.dim();
        if k == 0 || k > t.n() / 2 {
            return Err(Error::DimensionTooLarge { k, n: t.n(), max: t.n() / 2 });
        }
        Ok(Prepared {
            spectra: restriction_spectra(t, v)?,
            d: t.d(),
            k,
            desc: InstanceDescriptor {
                n: t.n(),
                d: t.d(),
                k,
                p,
                q,
                seed: None,
                index: None,
            },
        })
    }

    fn sp(&self, p: f64) -> Result<f64> {
        Ok(sp_ratio_from_spectra(&self.spectra, self.d, self.k, p)?.value)
    }

    fn thm1_i(&self) -> Result<InequalityReport> {
        let (p, q) = (self.desc.p, self.desc.q);
        check_order(p, q)?;
        let lhs = self.sp(p)?;
        let rhs = (self.d as f64).powf((p - q) / 2.0) * self.sp(q)?;
        Ok(InequalityReport::new(Checker::Thm1I, self.desc, lhs, rhs, RATIO_TOL))
    }

    fn thm1_ii(&self) -> Result<InequalityReport> {
        let (p, q) = (self.desc.p, self.desc.q);
        check_order(p, q)?;
        let lhs = self.sp(q)?;
        let rhs = self.sp(p)?.powf(q / p);
        Ok(InequalityReport::new(Checker::Thm1Ii, self.desc, lhs, rhs, RATIO_TOL))
    }

    fn singular_bound(&self) -> InequalityReport {
        let lhs = self.spectra.iter().flat_map(|s| s.first().copied()).fold(0.0, f64::max);
        let rhs = (self.d as f64).sqrt();
        InequalityReport::new(Checker::SingularBound, self.desc, lhs, rhs, SINGULAR_TOL)
    }

    fn hd_relations(&self, rank_tol: f64) -> Result<InequalityReport> {
        let p = self.desc.p;
        check_exponent(p)?;
        let lhs = self.sp(p)?;
        let dim = dim_ratio_from_spectra(&self.spectra, self.d, self.k, rank_tol).value;
        let rhs = (self.d as f64).powf(p / 2.0) * dim;
        Ok(InequalityReport::new(Checker::HdRelations, self.desc, lhs, rhs, RATIO_TOL))
    }
}

/// `ratio_p(V) ≤ d^{(p−q)/2} ratio_q(V)` for `p ≥ q`.
pub fn check_thm1_i(t: &BistochasticTuple, v: &Subspace, p: f64, q: f64) -> Result<InequalityReport> {
    check_order(p, q)?;
    Prepared::new(t, v, p, q)?.thm1_i()
}

/// `ratio_q(V) ≤ ratio_p(V)^{q/p}` for `p ≥ q`.
pub fn check_thm1_ii(t: &BistochasticTuple, v: &Subspace, p: f64, q: f64) -> Result<InequalityReport> {
    check_order(p, q)?;
    Prepared::new(t, v, p, q)?.thm1_ii()
}

/// `max_i σ_max(B_i|_{V⊥,V}) ≤ √d`.
pub fn check_singular_bound(t: &BistochasticTuple, v: &Subspace) -> Result<InequalityReport> {
    Ok(Prepared::new(t, v, 2.0, 2.0)?.singular_bound())
}

/// `ratio_p(V) ≤ d^{p/2} ratio_dim(V)`.
pub fn check_hd_relations(t: &BistochasticTuple, v: &Subspace, p: f64) -> Result<InequalityReport> {
    check_exponent(p)?;
    Prepared::new(t, v, p, p)?.hd_relations(RANK_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub instances: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub exponent_min: f64,
    pub exponent_max: f64,
    pub rank_tol: f64,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            instances: 1000,
            n_min: 4,
            n_max: 16,
            d_min: 2,
            d_max: 5,
            exponent_min: 1.0,
            exponent_max: 6.0,
            rank_tol: RANK_TOL,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_min < 2 || self.n_min > self.n_max {
            return Err(Error::InvalidParameters(format!(
                "need 2 <= n_min <= n_max, got {}..={}",
                self.n_min, self.n_max
            )));
        }
        if self.d_min < 1 || self.d_min > self.d_max {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= d_min <= d_max, got {}..={}",
                self.d_min, self.d_max
            )));
        }
        if !(self.exponent_min >= 1.0 && self.exponent_min <= self.exponent_max && self.exponent_max.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= exponent_min <= exponent_max < inf, got [{}, {}]",
                self.exponent_min, self.exponent_max
            )));
        }
        if !(self.rank_tol > 0.0) {
            return Err(Error::InvalidParameters("rank_tol must be > 0".into()));
        }
        Ok(())
    }
}

/// One random instance: a bistochastic tuple and a subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub index: usize,
    pub p: f64,
    pub q: f64,
    pub tuple: BistochasticTuple,
    pub subspace: Subspace,
}

/// Instance `index` of the sweep, drawn from its own substream.
///
/// The tuple is `d` Haar unitaries mixed by a Haar `d × d` unitary, which is
/// bistochastic but has restriction singular values spread over `[0, √d]`
/// rather than pinned to the extremes.
pub fn generate_instance(cfg: &SweepConfig, index: usize) -> Result<Instance> {
    use rand::Rng as _;
    let mut rng: Rng = substream(cfg.seed, index as u64);
    let n = rng.random_range(cfg.n_min..=cfg.n_max);
    let d = rng.random_range(cfg.d_min..=cfg.d_max);
    let k = rng.random_range(1..=n / 2);
    let mut draw = || {
        if cfg.exponent_min == cfg.exponent_max {
            cfg.exponent_min
        } else {
            rng.random_range(cfg.exponent_min..cfg.exponent_max)
        }
    };
    let (a, b) = (draw(), draw());
    let (p, q) = if a >= b { (a, b) } else { (b, a) };
    let unitaries = (0..d)
        .map(|_| haar_unitary_from(n, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let mixing = haar_unitary_from(d, &mut rng)?;
    let tuple = BistochasticTuple::new(unitaries)?.mixed(&mixing)?;
    let subspace = Subspace::haar_from(n, k, &mut rng)?;
    Ok(Instance {
        index,
        p,
        q,
        tuple,
        subspace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureDump {
    pub report: InequalityReport,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckerSummary {
    pub checker: Checker,
    pub total: usize,
    pub failures: usize,
    /// `None` for an empty sweep.
    pub worst_slack: Option<f64>,
    pub failing_instances: Vec<FailureDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub all_pass: bool,
    pub checkers: Vec<CheckerSummary>,
}

/// Runs every checker on `cfg.instances` generated instances.
///
/// Instances are evaluated in parallel and aggregated in index order, so the
/// report depends only on the configuration.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let per_instance: Vec<(Instance, [InequalityReport; 4])> = (0..cfg.instances)
        .into_par_iter()
        .map(|index| {
            let inst = generate_instance(cfg, index)?;
            let mut prep = Prepared::new(&inst.tuple, &inst.subspace, inst.p, inst.q)?;
            prep.desc.seed = Some(cfg.seed);
            prep.desc.index = Some(index);
            let reports = [
                prep.thm1_i()?,
                prep.thm1_ii()?,
                prep.singular_bound(),
                prep.hd_relations(cfg.rank_tol)?,
            ];
            Ok((inst, reports))
        })
        .collect::<Result<_>>()?;

    let checkers = Checker::ALL
        .iter()
        .enumerate()
        .map(|(c, &checker)| {
            let mut summary = CheckerSummary {
                checker,
                total: 0,
                failures: 0,
                worst_slack: None,
                failing_instances: Vec::new(),
            };
            for (inst, reports) in &per_instance {
                let r = &reports[c];
                summary.total += 1;
                summary.worst_slack = Some(summary.worst_slack.map_or(r.slack, |w| w.min(r.slack)));
                if !r.pass {
                    summary.failures += 1;
                    summary.failing_instances.push(FailureDump {
                        report: r.clone(),
                        instance: inst.clone(),
                    });
                }
            }
            summary
        })
        .collect::<Vec<_>>();
    Ok(SweepReport {
        config: cfg.clone(),
        all_pass: checkers.iter().all(|c| c.failures == 0),
        checkers,
    })
}
