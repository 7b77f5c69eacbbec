use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::RegularGraph;
use crate::error::{Error, Result};

/// Pairwise distances on `n` points, in hops for graph metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix {
    pub n: usize,
    pub dist: Vec<Vec<f64>>,
}

impl MetricMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    /// Zero diagonal, symmetry and the triangle inequality on every triple.
    pub fn is_metric(&self, tol: f64) -> bool {
        let n = self.n;
        for i in 0..n {
            if self.dist[i][i].abs() > tol {
                return false;
            }
            for j in 0..n {
                if (self.dist[i][j] - self.dist[j][i]).abs() > tol {
                    return false;
                }
                for k in 0..n {
                    if self.dist[i][k] > self.dist[i][j] + self.dist[j][k] + tol {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Unit-length BFS distances.
pub fn shortest_path_metric(g: &RegularGraph) -> Result<MetricMatrix> {
    g.require_symmetric()?;
    let n = g.n();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (s, row) in dist.iter_mut().enumerate() {
        row[s] = 0.0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for w in g.neighbours(v) {
                if row[w].is_infinite() {
                    row[w] = row[v] + 1.0;
                    queue.push_back(w);
                }
            }
        }
        if row.iter().any(|x| x.is_infinite()) {
            return Err(Error::DisconnectedGraph);
        }
    }
    Ok(MetricMatrix { n, dist })
}

/// `((1/|E|) Σ_E ρ^p, (1/n²) Σ_{i,j} ρ^p)`, the two averages inside `R_ρ`.
///
/// Edges count with multiplicity and loops contribute zero; the pair sum runs
/// over all `n²` ordered pairs, diagonal included.
pub fn metric_ratio_parts(g: &RegularGraph, rho: &MetricMatrix, p: f64) -> Result<(f64, f64)> {
    crate::numlin::check_exponent(p)?;
    let n = g.n();
    if rho.n != n {
        return Err(Error::DegenerateMetric(format!(
            "metric on {} points used with a graph on {n} vertices",
            rho.n
        )));
    }
    let pow = |x: f64| if p == 1.0 { x } else { x.powf(p) };
    let edge_sum: f64 = g
        .edges()
        .iter()
        .map(|&(i, j, m)| m as f64 * pow(rho.get(i, j)))
        .sum();
    let pair_sum: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| pow(rho.get(i, j)))
        .sum();
    Ok((edge_sum / g.edge_count(), pair_sum / (n * n) as f64))
}

/// `R_ρ = (edge average / pair average)^{1/p}`.
pub fn metric_ratio_r(g: &RegularGraph, rho: &MetricMatrix, p: f64) -> Result<f64> {
    let (num, den) = metric_ratio_parts(g, rho, p)?;
    if den <= 0.0 {
        return Err(Error::DegenerateMetric("all pairwise distances vanish".into()));
    }
    Ok((num / den).powf(1.0 / p))
}
