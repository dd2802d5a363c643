use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, VertexId};

fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
    Graph::new(
        (0..n as u64).map(VertexId),
        edges
            .into_iter()
            .map(|(u, v)| (VertexId(u as u64), VertexId(v as u64))),
    )
    .expect("generator produced an invalid edge list")
}

/// Erdős–Rényi G(n, p). Each pair `i < j` is tested once, in lexicographic
/// order, against a ChaCha8 stream seeded with `seed`.
pub fn generate_gnp(n: usize, p: f64, seed: u64) -> Graph {
    assert!((0.0..=1.0).contains(&p), "edge probability {p} outside [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    build(n, edges)
}

/// `K_{k1}` and `K_{k2}` joined by a path of `len` edges. The path starts at
/// the last vertex of the first clique and ends at the first vertex of the
/// second, so the graph has `k1 + k2 + len - 1` vertices.
pub fn generate_clique_path(k1: usize, k2: usize, len: usize) -> Graph {
    assert!(k1 >= 1 && k2 >= 1 && len >= 1, "clique sizes and path length must be positive");
    let n = k1 + k2 + len - 1;
    let second = k1 + len - 1;
    let mut edges = Vec::new();
    for i in 0..k1 {
        for j in i + 1..k1 {
            edges.push((i, j));
        }
    }
    for i in second..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    for step in 0..len {
        edges.push((k1 - 1 + step, k1 + step));
    }
    build(n, edges)
}

/// Random graph in which every vertex has degree `degree` (one vertex falls
/// short when `n * degree` is odd).
///
/// Stubs are paired one at a time, only ever joining two distinct, not yet
/// adjacent vertices (Steger–Wormald). A pairing that gets stuck is restarted;
/// after 100 restarts the best partial pairing is kept, so the degree is then
/// only an upper bound.
pub fn generate_random_regular(n: usize, degree: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = BTreeSet::new();
    for _ in 0..100 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
        if stubs.len() % 2 == 1 {
            stubs.pop();
        }
        stubs.shuffle(&mut rng);
        let mut edges = BTreeSet::new();
        let suitable = |edges: &BTreeSet<(usize, usize)>, u: usize, v: usize| {
            u != v && !edges.contains(&(u.min(v), u.max(v)))
        };
        let mut stuck = false;
        while stubs.len() >= 2 {
            let mut found = None;
            for _ in 0..64 {
                let (i, j) = (rng.random_range(0..stubs.len()), rng.random_range(0..stubs.len()));
                if suitable(&edges, stubs[i], stubs[j]) {
                    found = Some((i, j));
                    break;
                }
            }
            if found.is_none() {
                found = (0..stubs.len())
                    .flat_map(|i| (i + 1..stubs.len()).map(move |j| (i, j)))
                    .find(|&(i, j)| suitable(&edges, stubs[i], stubs[j]));
            }
            let Some((i, j)) = found else {
                stuck = true;
                break;
            };
            let (u, v) = (stubs[i], stubs[j]);
            edges.insert((u.min(v), u.max(v)));
            let (hi, lo) = (i.max(j), i.min(j));
            stubs.swap_remove(hi);
            stubs.swap_remove(lo);
        }
        if !stuck {
            return build(n, edges);
        }
        if edges.len() > best.len() {
            best = edges;
        }
    }
    build(n, best)
}

pub fn complete_graph(n: usize) -> Graph {
    build(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

pub fn path_graph(n: usize) -> Graph {
    build(n, (1..n).map(|i| (i - 1, i)))
}

pub fn cycle_graph(n: usize) -> Graph {
    assert!(n >= 3, "a simple cycle needs at least 3 vertices");
    build(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Star with center 0 and `leaves` leaves.
pub fn star_graph(leaves: usize) -> Graph {
    build(leaves + 1, (1..=leaves).map(|i| (0, i)))
}

/// `rows x cols` grid; vertex `(r, c)` has ID `r * cols + c`.
pub fn grid_graph(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    build(rows * cols, edges)
}

/// Outer 5-cycle 0..5, inner pentagram 5..10, spokes `i -- i+5`.
pub fn petersen_graph() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, i + 5));
    }
    build(10, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        let g = generate_gnp(5, 0.0, 1);
        assert_eq!((g.n(), g.m()), (5, 0));
        let g = generate_gnp(4, 1.0, 1);
        assert_eq!((g.n(), g.m()), (4, 6));
    }

    #[test]
    fn gnp_is_seed_stable() {
        assert_eq!(generate_gnp(60, 0.2, 11), generate_gnp(60, 0.2, 11));
        assert_ne!(generate_gnp(60, 0.2, 11), generate_gnp(60, 0.2, 12));
    }

    #[test]
    fn clique_path_sizes() {
        let g = generate_clique_path(4, 3, 10);
        assert_eq!(g.n(), 16);
        assert_eq!(g.m(), 6 + 3 + 10);
        let g = generate_clique_path(1, 1, 1);
        assert_eq!((g.n(), g.m()), (2, 1));
        let g = generate_clique_path(3, 3, 2);
        assert_eq!((g.n(), g.m()), (7, 3 + 3 + 2));
        // the shared midpoint has degree 2
        assert_eq!(g.degree(VertexId(3)).unwrap(), 2);
    }

    #[test]
    fn random_regular_degree_bound() {
        let g = generate_random_regular(500, 20, 3);
        assert_eq!(g.n(), 500);
        assert!(g.vertices().iter().all(|&v| g.degree(v).unwrap() == 20));
        assert_eq!(generate_random_regular(500, 20, 3), g);
        let odd = generate_random_regular(7, 3, 1);
        assert_eq!(odd.m(), 10);
        assert!(odd.max_degree() <= 3);
    }

    #[test]
    fn petersen_is_cubic() {
        let g = petersen_graph();
        assert_eq!((g.n(), g.m(), g.max_degree()), (10, 15, 3));
        assert_eq!(g.diameter(), Some(2));
    }
}
