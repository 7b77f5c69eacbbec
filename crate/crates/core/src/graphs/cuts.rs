//! Exhaustive cut enumeration: exact edge expansion and the exact ℓ_1
//! embedding ratio.
//!
//! Both minimize over vertex sets `W` with `1 ≤ |W| ≤ ⌊n/2⌋`, walked in Gray
//! code order so each step updates `Σ_{i,j∈W} A_ij` in `O(|W|)`. Values are
//! compared as exact integer cross products; ties go to the lexicographically
//! smallest sorted vertex list.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::RegularGraph;
use crate::error::{Error, Result};

/// Largest `n` accepted by the `2^n` sweeps.
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutWitness {
    pub value: f64,
    /// Sorted, 0-based.
    pub subset: Vec<usize>,
    /// `|∂W|` with multiplicity.
    pub boundary: u64,
}

/// `h(G) = min |∂W| / (d |W|)`.
pub fn edge_expansion_bruteforce(g: &RegularGraph) -> Result<CutWitness> {
    let d = g.d() as u128;
    // b1/(d s1) < b2/(d s2)  <=>  b1 s2 < b2 s1
    let best = sweep(g, |b, s| (b as u128, d * s as u128))?;
    Ok(witness(best, |b, s| b as f64 / (g.d() * s) as f64))
}

/// Exact `h_{ℓ_1}(G)`: the minimum over cuts `S` of
/// `(|∂S| / |E|) / (2 |S| |S̄| / n²)`.
///
/// Cut semimetrics generate the cone of ℓ_1-embeddable semimetrics, and a
/// ratio of two linear functionals on a cone is minimized on an extreme ray,
/// so this finite minimum equals the infimum over all maps into ℓ_1.
pub fn cut_oracle_l1(g: &RegularGraph) -> Result<CutWitness> {
    let n = g.n() as u128;
    let best = sweep(g, |b, s| (b as u128, (s as u128) * (n - s as u128)))?;
    let nf = g.n() as f64;
    let edges = g.edge_count();
    Ok(witness(best, |b, s| {
        (b as f64 / edges) / (2.0 * s as f64 * (nf - s as f64) / (nf * nf))
    }))
}

struct Best {
    mask: u64,
    boundary: u64,
    size: usize,
}

fn witness(best: Best, value: impl Fn(u64, usize) -> f64) -> CutWitness {
    CutWitness {
        value: value(best.boundary, best.size),
        subset: mask_to_subset(best.mask),
        boundary: best.boundary,
    }
}

pub(crate) fn mask_to_subset(mask: u64) -> Vec<usize> {
    (0..64).filter(|&b| mask >> b & 1 == 1).collect()
}

/// Lexicographic order of the sorted index lists encoded by two masks.
pub(crate) fn lex_cmp(a: u64, b: u64) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let t = diff.trailing_zeros();
    let a_has = a >> t & 1 == 1;
    let other = if a_has { b } else { a };
    // the list missing t either ends before t (a proper prefix, so smaller)
    // or continues with something larger than t
    let other_is_prefix = other >> t == 0;
    match (a_has, other_is_prefix) {
        (true, true) | (false, false) => Ordering::Greater,
        (true, false) | (false, true) => Ordering::Less,
    }
}

/// Walks all `W` with `1 ≤ |W| ≤ ⌊n/2⌋`; `key(boundary, size)` returns the
/// value as a fraction `(num, den)` to minimize.
fn sweep(g: &RegularGraph, key: impl Fn(u64, usize) -> (u128, u128)) -> Result<Best> {
    g.require_symmetric()?;
    let n = g.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::InstanceTooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameters("need at least two vertices".into()));
    }
    let adj: Vec<Vec<u64>> = g
        .adjacency()
        .iter()
        .map(|row| row.iter().map(|&c| c as u64).collect())
        .collect();
    let d = g.d() as u64;
    let half = n / 2;

    let mut best: Option<(Best, (u128, u128))> = None;
    let mut mask: u64 = 0;
    let mut internal: u64 = 0;
    let mut size = 0usize;
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let row = &adj[v];
        if mask & bit == 0 {
            internal += row[v] + 2 * row_sum_over(row, mask);
            mask |= bit;
            size += 1;
        } else {
            mask &= !bit;
            internal -= row[v] + 2 * row_sum_over(row, mask);
            size -= 1;
        }
        if size == 0 || size > half {
            continue;
        }
        let boundary = d * size as u64 - internal;
        let frac = key(boundary, size);
        let better = match &best {
            None => true,
            Some((b, bf)) => {
                // frac < bf  <=>  num1 den2 < num2 den1
                match (frac.0 * bf.1).cmp(&(bf.0 * frac.1)) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => lex_cmp(mask, b.mask) == Ordering::Less,
                }
            }
        };
        if better {
            best = Some((
                Best {
                    mask,
                    boundary,
                    size,
                },
                frac,
            ));
        }
    }
    Ok(best.expect("n >= 2 yields at least one candidate").0)
}

#[inline]
fn row_sum_over(row: &[u64], mut mask: u64) -> u64 {
    let mut s = 0;
    while mask != 0 {
        let j = mask.trailing_zeros() as usize;
        s += row[j];
        mask &= mask - 1;
    }
    s
}
