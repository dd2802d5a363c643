//! Deterministic exact minimum coloring for small graphs.
//!
//! For `k` from a clique lower bound upward, a backtracking search looks for a
//! `k`-coloring and the first one found is returned. The search always picks
//! the uncolored vertex with the most distinct neighbor colors (ties: most
//! uncolored neighbors, then smallest ID) and tries colors in ascending order,
//! never opening more than one new color at a time. Nothing depends on
//! anything but the labeled graph, so every vertex that runs this on the same
//! cluster gets the same answer.

use super::AlgoError;
use crate::graph::{Graph, LabelAssignment};

pub const DEFAULT_CLUSTER_CAP: usize = 20;

/// Minimum coloring of `g` with colors `1..=chi`, and `chi`.
///
/// ```
/// use localsim::algorithms::exact_min_coloring;
/// use localsim::graph::petersen_graph;
///
/// let (coloring, chi) = exact_min_coloring(&petersen_graph(), 20).unwrap();
/// assert_eq!(chi, 3);
/// assert_eq!(coloring.max_label(), 3);
/// ```
pub fn exact_min_coloring(g: &Graph, cap: usize) -> Result<(LabelAssignment, usize), AlgoError> {
    if g.n() > cap {
        return Err(AlgoError::ClusterTooLarge { size: g.n(), cap });
    }
    if g.is_empty() {
        return Ok((LabelAssignment::default(), 0));
    }
    let adj: Vec<&[usize]> = (0..g.n()).map(|i| g.neighbor_indices(i)).collect();
    let lower = clique_lower_bound(&adj);
    let upper = Search::new(&adj, g.n()).run().expect("n colors always suffice");
    let upper_k = *upper.iter().max().unwrap() as usize;
    let colors = (lower..upper_k)
        .find_map(|k| Search::new(&adj, k).run())
        .unwrap_or(upper);
    let chi = *colors.iter().max().unwrap() as usize;
    let labels = colors
        .iter()
        .enumerate()
        .map(|(i, &c)| (g.id_at(i), c as u64))
        .collect();
    Ok((LabelAssignment::new(labels)?, chi))
}

/// Largest clique found by growing one greedily from every vertex.
fn clique_lower_bound(adj: &[&[usize]]) -> usize {
    let n = adj.len();
    let mut matrix = vec![false; n * n];
    for (u, nb) in adj.iter().enumerate() {
        for &w in nb.iter() {
            matrix[u * n + w] = true;
        }
    }
    let mut best = 1;
    for v in 0..n {
        let mut candidates: Vec<usize> = adj[v].to_vec();
        candidates.sort_by_key(|&u| (std::cmp::Reverse(adj[u].len()), u));
        let mut clique = vec![v];
        for u in candidates {
            if clique.iter().all(|&w| matrix[u * n + w]) {
                clique.push(u);
            }
        }
        best = best.max(clique.len());
    }
    best
}

struct Search<'a> {
    adj: &'a [&'a [usize]],
    k: usize,
    color: Vec<u32>,
    /// `seen[v * (k + 1) + c]`: neighbors of `v` currently colored `c`.
    seen: Vec<u32>,
    saturation: Vec<u32>,
    free_degree: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(adj: &'a [&'a [usize]], k: usize) -> Self {
        let n = adj.len();
        Search {
            adj,
            k,
            color: vec![0; n],
            seen: vec![0; n * (k + 1)],
            saturation: vec![0; n],
            free_degree: adj.iter().map(|nb| nb.len() as u32).collect(),
        }
    }

    fn run(mut self) -> Option<Vec<u32>> {
        self.extend(0, 0).then_some(self.color)
    }

    fn pick(&self) -> usize {
        let mut best = usize::MAX;
        for v in 0..self.adj.len() {
            if self.color[v] != 0 {
                continue;
            }
            if best == usize::MAX
                || (self.saturation[v], self.free_degree[v]) > (self.saturation[best], self.free_degree[best])
            {
                best = v;
            }
        }
        best
    }

    fn set(&mut self, v: usize, c: u32) {
        self.color[v] = c;
        let stride = self.k + 1;
        for &w in self.adj[v] {
            self.free_degree[w] -= 1;
            let slot = &mut self.seen[w * stride + c as usize];
            *slot += 1;
            if *slot == 1 {
                self.saturation[w] += 1;
            }
        }
    }

    fn unset(&mut self, v: usize) {
        let c = self.color[v];
        self.color[v] = 0;
        let stride = self.k + 1;
        for &w in self.adj[v] {
            self.free_degree[w] += 1;
            let slot = &mut self.seen[w * stride + c as usize];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[w] -= 1;
            }
        }
    }

    fn extend(&mut self, colored: usize, used: u32) -> bool {
        if colored == self.adj.len() {
            return true;
        }
        let v = self.pick();
        let limit = (used + 1).min(self.k as u32);
        let stride = self.k + 1;
        for c in 1..=limit {
            if self.seen[v * stride + c as usize] != 0 {
                continue;
            }
            self.set(v, c);
            if self.extend(colored + 1, used.max(c)) {
                return true;
            }
            self.unset(v);
        }
        false
    }
}
