//! Splitting a regular count matrix into permutation matrices.
//!
//! A `d`-regular bipartite multigraph always has a perfect matching (Hall's
//! condition holds), and removing one leaves a `(d−1)`-regular multigraph, so
//! `d` rounds of Hopcroft–Karp peel off `d` permutations.

use std::collections::VecDeque;

use super::RegularGraph;
use crate::channels::Permutation;
use crate::error::{Error, Result};

const FREE: usize = usize::MAX;

/// Permutations `π_1, …, π_d` with `Σ_s [π_s(j) = i] = A[i][j]`.
pub fn decompose_permutations(g: &RegularGraph) -> Result<Vec<Permutation>> {
    let n = g.n();
    let mut counts: Vec<Vec<u32>> = g.adjacency().to_vec();
    let mut perms = Vec::with_capacity(g.d());
    for round in 0..g.d() {
        // column j (left side) -> rows i (right side) with a remaining edge
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|j| (0..n).filter(|&i| counts[i][j] > 0).collect())
            .collect();
        let matching = hopcroft_karp(n, &adj);
        if matching.iter().any(|&i| i == FREE) {
            return Err(Error::NotRegular(format!(
                "no perfect matching in round {round}; the count matrix is not regular"
            )));
        }
        for (j, &i) in matching.iter().enumerate() {
            counts[i][j] -= 1;
        }
        perms.push(matching);
    }
    debug_assert!(counts.iter().all(|row| row.iter().all(|&c| c == 0)));
    Ok(perms)
}

/// Maximum matching on a bipartite graph with `n` vertices per side.
/// Returns `mate[left] = right` or `FREE`.
fn hopcroft_karp(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut mate_left = vec![FREE; n];
    let mut mate_right = vec![FREE; n];
    let mut dist = vec![0usize; n];

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n {
            if mate_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = mate_right[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next_edge = vec![0usize; n];
        for u in 0..n {
            if mate_left[u] == FREE {
                augment(u, adj, &mut mate_left, &mut mate_right, &mut dist, &mut next_edge);
            }
        }
    }
    mate_left
}

/// Iterative layered DFS for one augmenting path starting at `root`.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    mate_left: &mut [usize],
    mate_right: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next_edge[u] == adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][next_edge[u]];
        next_edge[u] += 1;
        let w = mate_right[v];
        if w == FREE {
            // flip the path root -> ... -> u -> v
            let mut right = v;
            while let Some(left) = stack.pop() {
                let prev = mate_left[left];
                mate_left[left] = right;
                mate_right[right] = left;
                right = prev;
            }
            return true;
        }
        if dist[w] == dist[u] + 1 {
            stack.push(w);
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_complete, build_cycle, random_regular, random_regular_directed};

    fn reconstruct(n: usize, perms: &[Permutation]) -> Vec<Vec<u32>> {
        let mut a = vec![vec![0u32; n]; n];
        for p in perms {
            for (j, &i) in p.iter().enumerate() {
                a[i][j] += 1;
            }
        }
        a
    }

    #[test]
    fn cycle_splits_into_two_permutations() {
        let g = build_cycle(4).unwrap();
        let perms = decompose_permutations(&g).unwrap();
        assert_eq!(perms.len(), 2);
        assert_eq!(reconstruct(4, &perms), g.adjacency());
    }

    #[test]
    fn triangle_splits_into_three_cycles() {
        let g = build_complete(3).unwrap();
        let perms = decompose_permutations(&g).unwrap();
        assert_eq!(perms.len(), 2);
        for p in &perms {
            // fixed-point free on 3 points means a 3-cycle
            assert!(p.iter().enumerate().all(|(j, &i)| i != j));
        }
        assert_eq!(reconstruct(3, &perms), g.adjacency());
    }

    #[test]
    fn multigraphs_reconstruct() {
        for seed in 0..10 {
            let g = random_regular(50, 6, seed).unwrap();
            let perms = decompose_permutations(&g).unwrap();
            assert_eq!(perms.len(), 6);
            assert_eq!(reconstruct(50, &perms), g.adjacency());
            let dg = random_regular_directed(31, 5, seed).unwrap();
            assert_eq!(reconstruct(31, &decompose_permutations(&dg).unwrap()), dg.adjacency());
        }
    }
}
