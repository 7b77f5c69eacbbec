use rayon::prelude::*;

use super::{effective_p, ExpansionEstimate, Mode, SearchConfig, Strategy, Witness};
use crate::channels::{expansion_ratio, BistochasticTuple, Subspace};
use crate::error::Result;
use crate::rng::substream2;

/// Minimum over `cfg.samples` Haar-random subspaces per admissible dimension.
///
/// Sample `j` of dimension `k` draws from its own stream, so raising
/// `samples` only adds candidates and the estimate is non-increasing in it.
pub fn minimize_random(t: &BistochasticTuple, p: f64, mode: Mode, cfg: &SearchConfig) -> Result<ExpansionEstimate> {
    cfg.validate()?;
    let n = t.n();
    let kind = mode.ratio_kind(p);
    let jobs: Vec<(usize, usize)> = cfg
        .dims(n)?
        .into_iter()
        .flat_map(|k| (0..cfg.samples).map(move |j| (k, j)))
        .collect();
    let results: Vec<(f64, Subspace)> = jobs
        .par_iter()
        .map(|&(k, j)| {
            let mut rng = substream2(cfg.seed, k as u64, j as u64);
            let v = Subspace::haar_from(n, k, &mut rng)?;
            Ok((expansion_ratio(t, &v, kind)?.value, v))
        })
        .collect::<Result<_>>()?;

    // first strict minimum in job order
    let (value, best) = results
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("dims() is never empty");
    Ok(ExpansionEstimate {
        value,
        k: best.dim(),
        witness: Witness::Subspace {
            basis: best.basis().clone(),
        },
        p: effective_p(mode, p),
        mode,
        strategy: Strategy::RandomSample,
        evaluations: jobs.len(),
        seed: cfg.seed,
    })
}
