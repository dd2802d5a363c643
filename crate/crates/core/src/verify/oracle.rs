//! Chromatic number by dynamic programming over vertex subsets.
//!
//! `best[S]` is the fewest independent sets covering `S`. The lowest vertex
//! of `S` must lie in some independent subset `I` of `S`, so
//! `best[S] = 1 + min best[S \ I]` over those `I`. Enumerating submasks of
//! every mask costs `O(3^n)`. This shares no code with the backtracking
//! solver it is checked against.

use super::VerifyError;
use crate::graph::{Graph, LabelAssignment};

/// Hard upper limit on the cap; `3^22` submask steps is already minutes.
pub const ORACLE_MAX_VERTICES: usize = 22;

/// Returns `chi(g)` and a coloring with colors `1..=chi`.
///
/// ```
/// use localsim::graph::cycle_graph;
/// use localsim::verify::brute_force_chromatic;
///
/// let (chi, _) = brute_force_chromatic(&cycle_graph(5), 16).unwrap();
/// assert_eq!(chi, 3);
/// ```
pub fn brute_force_chromatic(g: &Graph, cap: usize) -> Result<(usize, LabelAssignment), VerifyError> {
    let n = g.n();
    let cap = cap.min(ORACLE_MAX_VERTICES);
    if n > cap {
        return Err(VerifyError::CapExceeded { size: n, cap });
    }
    if n == 0 {
        return Ok((0, LabelAssignment::default()));
    }
    let nb: Vec<u32> = (0..n)
        .map(|i| g.neighbor_indices(i).iter().fold(0u32, |m, &j| m | 1 << j))
        .collect();
    let full = (1u32 << n) - 1;
    let size = 1usize << n;

    let mut independent = vec![false; size];
    independent[0] = true;
    for s in 1..size as u32 {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        independent[s as usize] = independent[rest as usize] && nb[low] & rest == 0;
    }

    let mut best = vec![u8::MAX; size];
    let mut choice = vec![0u32; size];
    best[0] = 0;
    for s in 1..size as u32 {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        // submasks of `rest`, each extended by `low`
        let mut sub = rest;
        loop {
            let i = sub | low;
            if independent[i as usize] {
                let cand = best[(s ^ i) as usize].saturating_add(1);
                if cand < best[s as usize] {
                    best[s as usize] = cand;
                    choice[s as usize] = i;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    let mut colors = vec![0u64; n];
    let mut s = full;
    let mut color = 0;
    while s != 0 {
        color += 1;
        let i = choice[s as usize];
        for (v, c) in colors.iter_mut().enumerate() {
            if i >> v & 1 == 1 {
                *c = color;
            }
        }
        s ^= i;
    }
    let labels = colors.iter().enumerate().map(|(i, &c)| (g.id_at(i), c)).collect();
    Ok((best[full as usize] as usize, LabelAssignment::new(labels)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, generate_clique_path, petersen_graph};

    fn chi(g: &Graph) -> usize {
        let (k, f) = brute_force_chromatic(g, 16).unwrap();
        assert!(g.edges().all(|(u, v)| f.get(u) != f.get(v)));
        assert_eq!(f.distinct_count(), k);
        k
    }

    #[test]
    fn classic_values() {
        assert_eq!(chi(&cycle_graph(5)), 3);
        assert_eq!(chi(&cycle_graph(8)), 2);
        assert_eq!(chi(&complete_graph(6)), 6);
        assert_eq!(chi(&petersen_graph()), 3);
        assert_eq!(chi(&Graph::from_edges(1, &[]).unwrap()), 1);
        let k33: Vec<(u64, u64)> = (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect();
        assert_eq!(chi(&Graph::from_edges(6, &k33).unwrap()), 2);
        assert_eq!(chi(&generate_clique_path(4, 3, 10)), 4);
        assert_eq!(chi(&generate_clique_path(3, 3, 2)), 3);
    }

    #[test]
    fn cap() {
        assert!(matches!(
            brute_force_chromatic(&complete_graph(9), 8),
            Err(VerifyError::CapExceeded { size: 9, cap: 8 })
        ));
        assert_eq!(brute_force_chromatic(&Graph::empty(), 0).unwrap().0, 0);
    }
}
