use std::cmp::Ordering;

use rayon::prelude::*;

use super::{effective_p, ExpansionEstimate, Mode, SearchConfig, Strategy, Witness};
use crate::channels::{BistochasticTuple, RANK_TOL};
use crate::error::{Error, Result};
use crate::graphs::cuts::{lex_cmp, mask_to_subset, EXHAUSTIVE_LIMIT};
use crate::numlin::{check_exponent, singular_values, spectrum_pow_sum};

/// Minimum of the ratio over coordinate subspaces `span{e_w : w ∈ W}`.
///
/// With `k = None` every `1 ≤ |W| ≤ ⌊n/2⌋` is tried. Ties are broken by the
/// lexicographically smallest sorted `W`, so the result does not depend on
/// how the work is split across threads.
pub fn minimize_coordinate(
    t: &BistochasticTuple,
    p: f64,
    mode: Mode,
    k: Option<usize>,
) -> Result<ExpansionEstimate> {
    let n = t.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::InstanceTooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if mode == Mode::Sp {
        check_exponent(p)?;
    }
    let dims = SearchConfig { k, ..SearchConfig::default() }.dims(n)?;
    let (lo, hi) = (dims[0] as u32, *dims.last().unwrap() as u32);
    let d = t.d();

    let evaluate = |mask: u64| -> Result<f64> {
        let inside: Vec<usize> = mask_to_subset(mask);
        let outside: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 0).collect();
        let size = inside.len() as f64;
        let num = match mode {
            Mode::Q => t
                .matrices()
                .iter()
                .map(|b| {
                    outside
                        .iter()
                        .flat_map(|&r| inside.iter().map(move |&c| b[(r, c)].norm_sqr()))
                        .sum::<f64>()
                })
                .sum(),
            Mode::Sp | Mode::Dim => {
                let mut total = 0.0;
                for b in t.matrices() {
                    let s = singular_values(&b.select(&inside, &outside))?;
                    total += match mode {
                        Mode::Sp => spectrum_pow_sum(&s, p),
                        _ => {
                            let threshold = RANK_TOL * (d as f64).sqrt();
                            s.iter().filter(|&&x| x > threshold).count() as f64
                        }
                    };
                }
                total
            }
        };
        Ok(num / (d as f64 * size))
    };

    let better = |a: &(f64, u64), b: &(f64, u64)| match a.0.total_cmp(&b.0) {
        Ordering::Equal => lex_cmp(a.1, b.1) == Ordering::Less,
        o => o == Ordering::Less,
    };
    let count = (1u64..1u64 << n)
        .filter(|m| (lo..=hi).contains(&m.count_ones()))
        .count();
    let best = (1u64..1u64 << n)
        .into_par_iter()
        .filter(|m| (lo..=hi).contains(&m.count_ones()))
        .map(|m| evaluate(m).map(|v| (v, m)))
        .try_reduce_with(|a, b| Ok(if better(&b, &a) { b } else { a }))
        .expect("at least one admissible subset")?;

    let subset = mask_to_subset(best.1);
    Ok(ExpansionEstimate {
        value: best.0,
        k: subset.len(),
        witness: Witness::Subset { vertices: subset },
        p: effective_p(mode, p),
        mode,
        strategy: Strategy::CoordinateExhaustive,
        evaluations: count,
        seed: 0,
    })
}

