//! Regular multigraphs and the classical expansion quantities.
//!
//! Graphs are stored as integer count matrices. Loops and parallel edges are
//! allowed; `|∂W|` and `|E|` count multiplicity and loops never cross a cut.

pub(crate) mod cuts;
mod matching;
mod metric;

pub use cuts::{cut_oracle_l1, edge_expansion_bruteforce, CutWitness, EXHAUSTIVE_LIMIT};
pub use matching::decompose_permutations;
pub use metric::{metric_ratio_parts, metric_ratio_r, shortest_path_metric, MetricMatrix};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::channels::Permutation;
use crate::error::{Error, Result};
use crate::numlin::{singular_values, ComplexMatrix};
use crate::rng::substream;

/// `n`-vertex `d`-regular multigraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphWire", into = "GraphWire")]
pub struct RegularGraph {
    n: usize,
    d: usize,
    symmetric: bool,
    adjacency: Vec<Vec<u32>>,
}

/// On-disk form: `{n, d, symmetric, adjacency: [[counts]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphWire {
    pub n: usize,
    pub d: usize,
    pub symmetric: bool,
    pub adjacency: Vec<Vec<u32>>,
}

impl TryFrom<GraphWire> for RegularGraph {
    type Error = Error;

    fn try_from(w: GraphWire) -> Result<Self> {
        let g = RegularGraph::from_adjacency(w.adjacency, w.symmetric)?;
        if g.n != w.n || g.d != w.d {
            return Err(Error::NotRegular(format!(
                "header claims n = {}, d = {} but adjacency gives n = {}, d = {}",
                w.n, w.d, g.n, g.d
            )));
        }
        Ok(g)
    }
}

impl From<RegularGraph> for GraphWire {
    fn from(g: RegularGraph) -> Self {
        GraphWire {
            n: g.n,
            d: g.d,
            symmetric: g.symmetric,
            adjacency: g.adjacency,
        }
    }
}

impl RegularGraph {
    /// Checks squareness, equal row and column sums, and symmetry when
    /// `symmetric` is set.
    pub fn from_adjacency(adjacency: Vec<Vec<u32>>, symmetric: bool) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidParameters("graph with no vertices".into()));
        }
        if let Some(i) = adjacency.iter().position(|row| row.len() != n) {
            return Err(Error::NotRegular(format!("row {i} has length {}", adjacency[i].len())));
        }
        let d = adjacency[0].iter().map(|&c| c as usize).sum::<usize>();
        for (i, row) in adjacency.iter().enumerate() {
            let s: usize = row.iter().map(|&c| c as usize).sum();
            if s != d {
                return Err(Error::NotRegular(format!("row {i} sums to {s}, row 0 to {d}")));
            }
        }
        for j in 0..n {
            let s: usize = adjacency.iter().map(|row| row[j] as usize).sum();
            if s != d {
                return Err(Error::NotRegular(format!("column {j} sums to {s}, expected {d}")));
            }
        }
        if symmetric {
            for i in 0..n {
                for j in (i + 1)..n {
                    if adjacency[i][j] != adjacency[j][i] {
                        return Err(Error::InvalidParameters(format!(
                            "symmetric flag set but A[{i}][{j}] != A[{j}][{i}]"
                        )));
                    }
                }
            }
        }
        Ok(RegularGraph {
            n,
            d,
            symmetric,
            adjacency,
        })
    }

    /// Sum of the permutation matrices `P[perm[j]][j] = 1`.
    pub fn from_permutations(perms: &[Permutation], symmetric: bool) -> Result<Self> {
        let n = perms
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParameters("no permutations".into()))?;
        let mut adjacency = vec![vec![0u32; n]; n];
        for perm in perms {
            crate::channels::check_permutation(perm, n)?;
            for (j, &i) in perm.iter().enumerate() {
                adjacency[i][j] += 1;
            }
        }
        Self::from_adjacency(adjacency, symmetric)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    #[inline]
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.adjacency[i][j]
    }

    /// Undirected non-loop edges `(i, j, multiplicity)` with `i < j`. Loops
    /// are left out; they contribute zero to every edge sum used here.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adjacency[i][j] > 0 {
                    out.push((i, j, self.adjacency[i][j]));
                }
            }
        }
        out
    }

    /// `|E| = n d / 2`, loops included.
    pub fn edge_count(&self) -> f64 {
        (self.n * self.d) as f64 / 2.0
    }

    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i]
            .iter()
            .enumerate()
            .filter(move |&(j, &c)| c > 0 && j != i)
            .map(|(j, _)| j)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
            // in-neighbours matter for non-symmetric graphs
            for w in 0..self.n {
                if !seen[w] && self.adjacency[w][v] > 0 {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Combinatorial Laplacian `d·Id − A`.
    pub fn laplacian(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let diag = if i == j { self.d as f64 } else { 0.0 };
                        diag - self.adjacency[i][j] as f64
                    })
                    .collect()
            })
            .collect()
    }

    pub(crate) fn require_symmetric(&self) -> Result<()> {
        if self.symmetric {
            Ok(())
        } else {
            Err(Error::InvalidParameters("operation needs an undirected (symmetric) graph".into()))
        }
    }
}

/// The cycle `C_n`, `n >= 3`.
pub fn build_cycle(n: usize) -> Result<RegularGraph> {
    if n < 3 {
        return Err(Error::InvalidParameters(format!("cycle needs n >= 3, got {n}")));
    }
    let mut a = vec![vec![0u32; n]; n];
    for i in 0..n {
        a[i][(i + 1) % n] += 1;
        a[(i + 1) % n][i] += 1;
    }
    RegularGraph::from_adjacency(a, true)
}

/// The complete graph `K_n`, `n >= 2`.
pub fn build_complete(n: usize) -> Result<RegularGraph> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("complete graph needs n >= 2, got {n}")));
    }
    let a = (0..n)
        .map(|i| (0..n).map(|j| u32::from(i != j)).collect())
        .collect();
    RegularGraph::from_adjacency(a, true)
}

/// The hypercube `Q_k` on `2^k` vertices.
pub fn build_hypercube(k: usize) -> Result<RegularGraph> {
    if k == 0 || k > 16 {
        return Err(Error::InvalidParameters(format!("hypercube dimension must be in 1..=16, got {k}")));
    }
    let n = 1usize << k;
    let mut a = vec![vec![0u32; n]; n];
    for (v, row) in a.iter_mut().enumerate() {
        for b in 0..k {
            row[v ^ (1 << b)] = 1;
        }
    }
    RegularGraph::from_adjacency(a, true)
}

/// Random symmetric `d`-regular multigraph: `⌊d/2⌋` random permutations each
/// paired with its inverse, plus one random perfect matching when `d` is odd
/// (which needs `n` even).
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameters(format!("n = {n}, d = {d}")));
    }
    if d % 2 == 1 && n % 2 == 1 {
        return Err(Error::InvalidParameters(format!(
            "no {d}-regular graph on {n} vertices (n·d odd)"
        )));
    }
    let mut perms = Vec::with_capacity(d);
    for s in 0..d / 2 {
        let perm = random_permutation(n, &mut substream(seed, s as u64));
        let mut inverse = vec![0; n];
        for (j, &i) in perm.iter().enumerate() {
            inverse[i] = j;
        }
        perms.push(perm);
        perms.push(inverse);
    }
    if d % 2 == 1 {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut substream(seed, (d / 2) as u64));
        let mut matching = vec![0; n];
        for pair in order.chunks(2) {
            matching[pair[0]] = pair[1];
            matching[pair[1]] = pair[0];
        }
        perms.push(matching);
    }
    RegularGraph::from_permutations(&perms, true)
}

/// `d` independent uniform permutations summed; generally not symmetric.
pub fn random_regular_directed(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameters(format!("n = {n}, d = {d}")));
    }
    let perms: Vec<Permutation> = (0..d)
        .map(|s| random_permutation(n, &mut substream(seed, s as u64)))
        .collect();
    let g = RegularGraph::from_permutations(&perms, false)?;
    let symmetric = (0..n).all(|i| (0..n).all(|j| g.adjacency[i][j] == g.adjacency[j][i]));
    Ok(RegularGraph { symmetric, ..g })
}

pub fn random_permutation(n: usize, rng: &mut crate::rng::Rng) -> Permutation {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// `√(λ₂ / d)` with `λ₂` the second-smallest Laplacian eigenvalue; the exact
/// value of the ℓ_2 embedding expansion.
pub fn spectral_l2_expansion(g: &RegularGraph) -> Result<f64> {
    g.require_symmetric()?;
    if g.n < 2 {
        return Err(Error::InvalidParameters("need at least two vertices".into()));
    }
    // The Laplacian is PSD, so its singular values are its eigenvalues.
    let lap = ComplexMatrix::from_real_rows(&g.laplacian())?;
    let values = singular_values(&lap)?;
    let lambda2 = values[g.n - 2];
    Ok((lambda2 / g.d as f64).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_adjacency() {
        let g = build_cycle(4).unwrap();
        assert_eq!(g.d(), 2);
        for i in 0..4 {
            for j in 0..4 {
                let want = u32::from((i + 1) % 4 == j || (j + 1) % 4 == i);
                assert_eq!(g.count(i, j), want);
            }
        }
        assert!(build_cycle(2).is_err());
    }

    #[test]
    fn hypercube_counts() {
        let g = build_hypercube(3).unwrap();
        assert_eq!((g.n(), g.d()), (8, 3));
        assert_eq!(g.edges().len(), 12);
        assert_eq!(g.edge_count(), 12.0);
    }

    #[test]
    fn complete_graph_degree() {
        let g = build_complete(5).unwrap();
        assert_eq!(g.d(), 4);
        assert!(g.is_connected());
    }

    #[test]
    fn random_regular_row_and_column_sums() {
        for seed in 0..5 {
            let g = random_regular(10, 4, seed).unwrap();
            assert_eq!(g.d(), 4);
            assert!(g.is_symmetric());
            let g3 = random_regular(10, 3, seed).unwrap();
            assert_eq!(g3.d(), 3);
            assert_eq!(g3.edge_count(), 15.0);
        }
        assert!(random_regular(7, 3, 0).is_err());
        let dg = random_regular_directed(9, 3, 1).unwrap();
        assert_eq!(dg.d(), 3);
    }

    #[test]
    fn rejects_irregular_input() {
        let a = vec![vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 0]];
        assert!(matches!(RegularGraph::from_adjacency(a, true), Err(Error::NotRegular(_))));
        let asym = vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]];
        assert!(RegularGraph::from_adjacency(asym.clone(), false).is_ok());
        assert!(RegularGraph::from_adjacency(asym, true).is_err());
    }

    #[test]
    fn loops_count_once_as_edges() {
        // vertex 0 has a loop (stored as 2), vertices 1-2 joined by a double edge
        let a = vec![vec![2, 0, 0], vec![0, 0, 2], vec![0, 2, 0]];
        let g = RegularGraph::from_adjacency(a, true).unwrap();
        assert_eq!(g.edges(), vec![(1, 2, 2)]);
        assert_eq!(g.edge_count(), 3.0);
    }

    #[test]
    fn spectral_value_of_c4() {
        let h = spectral_l2_expansion(&build_cycle(4).unwrap()).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
    }
}
