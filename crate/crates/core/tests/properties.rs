use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;

use localsim::algorithms::{
    approximate, color_bounded_degree, exact_min_coloring, merge_decompositions, partition, ColorParams, Side,
};
use localsim::engine::{collect_topology, run, EngineConfig, ExecutionOrder};
use localsim::graph::{generate_gnp, Graph, LabelAssignment, NetworkDecomposition, VertexId, VertexSet};
use localsim::verify::{brute_force_chromatic, verify_coloring, verify_decomposition};

fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0..1.0f64, any::<u64>()).prop_map(|(n, p, seed)| generate_gnp(n, p, seed))
}

/// Plain BFS distances from `s` by index, independent of the library's.
fn bfs(g: &Graph, s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbor_indices(u) {
            if dist[w].is_none() {
                dist[w] = Some(dist[u].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn r_hop_matches_distance(g in small_graph(30), r in 0usize..5, pick in any::<prop::sample::Index>()) {
        let i = pick.index(g.n());
        let v = g.id_at(i);
        let dist = bfs(&g, i);
        let expected: VertexSet = (0..g.n()).filter(|&j| dist[j].is_some_and(|d| d <= r)).map(|j| g.id_at(j)).collect();
        prop_assert_eq!(g.r_hop_neighborhood(v, r).unwrap(), expected);
        for j in 0..g.n() {
            prop_assert_eq!(g.distance(v, g.id_at(j)).unwrap(), dist[j]);
        }
    }

    #[test]
    fn distance_is_symmetric(g in small_graph(25), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let u = g.id_at(a.index(g.n()));
        let v = g.id_at(b.index(g.n()));
        prop_assert_eq!(g.distance(u, v).unwrap(), g.distance(v, u).unwrap());
    }

    #[test]
    fn induced_subgraph_keeps_exactly_inner_edges(g in small_graph(25), mask in any::<u32>()) {
        let s: VertexSet = g.vertices().iter().copied().filter(|v| mask >> (v.0 % 32) & 1 == 1).collect();
        let h = g.induced_subgraph(&s).unwrap();
        prop_assert_eq!(h.vertex_set(), s.clone());
        for &u in &s {
            for &v in &s {
                prop_assert_eq!(h.has_edge(u, v), g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn clusters_partition_the_vertices(g in small_graph(25), k in 1u64..5, salt in any::<u64>()) {
        let f: LabelAssignment = g.vertices().iter().map(|&v| (v, 1 + (v.0.wrapping_mul(salt | 1) >> 7) % k)).collect();
        let clusters = g.extract_clusters(&f).unwrap();
        let mut seen = BTreeSet::new();
        for cl in &clusters {
            for &v in &cl.members {
                prop_assert!(seen.insert(v));
                prop_assert_eq!(f.get(v), Some(cl.label));
            }
        }
        prop_assert_eq!(seen, g.vertex_set());
        // adjacent vertices with one label share a cluster
        let idx = NetworkDecomposition::new(&g, f.clone(), 0, k).unwrap().cluster_index();
        for (u, v) in g.edges() {
            if f.get(u) == f.get(v) {
                prop_assert_eq!(idx[&u], idx[&v]);
            }
        }
    }

    #[test]
    fn gnp_is_seed_stable(n in 0usize..60, p in 0.0..1.0f64, seed in any::<u64>()) {
        prop_assert_eq!(generate_gnp(n, p, seed), generate_gnp(n, p, seed));
    }

    #[test]
    fn topology_collection_sees_the_r_hop_ball(g in small_graph(25), r in 0usize..4) {
        let trace = run(&g, &collect_topology(r), 0, &EngineConfig::new(r + 1)).unwrap();
        prop_assert_eq!(trace.communication_rounds(), r);
        for &v in g.vertices() {
            let view = trace.output(v).unwrap();
            let ball = g.r_hop_neighborhood(v, r).unwrap();
            prop_assert_eq!(view.vertices(), ball.clone());
            prop_assert_eq!(view.induced_graph(), g.induced_subgraph(&ball).unwrap());
        }
    }

    #[test]
    fn execution_order_does_not_matter(g in small_graph(30), seed in any::<u64>(), shuffle in any::<u64>()) {
        let params = ColorParams::new(g.max_degree().max(1), 0.5, 0.5);
        let base = color_bounded_degree(&g, &params, seed).map(|r| r.coloring).ok();
        for order in [ExecutionOrder::Sequential, ExecutionOrder::Shuffled(shuffle)] {
            let cfg = EngineConfig::new(params.round_budget + 1).with_order(order);
            let trace = run(&g, &localsim::algorithms::ColorProgram::new(&params), seed, &cfg).unwrap();
            let colors: Option<LabelAssignment> = trace.outputs().map(|(v, o)| o.color.map(|c| (v, c))).collect();
            prop_assert_eq!(colors, base.clone());
        }
    }

    #[test]
    fn partition_invariants(g in small_graph(60), seed in any::<u64>()) {
        prop_assume!(g.n() >= 2);
        let r = partition(&g, seed).unwrap();
        prop_assert!(r.a.is_disjoint(&r.b));
        prop_assert_eq!(r.a.union(&r.b).copied().collect::<VertexSet>(), g.vertex_set());
        prop_assert!(r.d.is_subset(&r.a));
        for (&v, o) in &r.outputs {
            let near_mark = o.marked || g.neighbors(v).unwrap().any(|w| r.d.contains(&w));
            prop_assert_eq!(o.side == Side::A, near_mark);
        }
    }

    #[test]
    fn merge_keeps_sides_apart(g in small_graph(30), seed in any::<u64>()) {
        prop_assume!(g.n() >= 2);
        let r = partition(&g, seed).unwrap();
        let fa: LabelAssignment = r.a.iter().map(|&v| (v, 1 + v.0 % 3)).collect();
        let fb: LabelAssignment = r.b.iter().map(|&v| (v, 1 + v.0 % 2)).collect();
        let merged = merge_decompositions(&g, &fa, &fb).unwrap();
        for &v in g.vertices() {
            let l = merged.get(v).unwrap();
            prop_assert_eq!(l % 2 == 0, r.a.contains(&v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_solver_matches_oracle(g in small_graph(11)) {
        let (f, k) = exact_min_coloring(&g, 16).unwrap();
        let (chi, witness) = brute_force_chromatic(&g, 16).unwrap();
        prop_assert_eq!(k, chi);
        prop_assert!(verify_coloring(&g, &f).unwrap().passed);
        prop_assert!(verify_coloring(&g, &witness).unwrap().passed);
        prop_assert_eq!(witness.distinct_count(), chi);
    }

    #[test]
    fn induced_subgraphs_need_no_more_colors(g in small_graph(11), mask in any::<u16>()) {
        let s: VertexSet = g.vertices().iter().copied().filter(|v| mask >> v.0 & 1 == 1).collect();
        let h = g.induced_subgraph(&s).unwrap();
        prop_assert!(brute_force_chromatic(&h, 16).unwrap().0 <= brute_force_chromatic(&g, 16).unwrap().0);
    }

    #[test]
    fn verifiers_are_idempotent(g in small_graph(25), k in 1u64..6) {
        let f: LabelAssignment = g.vertices().iter().map(|&v| (v, 1 + v.0 % k)).collect();
        prop_assert_eq!(verify_coloring(&g, &f).unwrap(), verify_coloring(&g, &f).unwrap());
        let nd = NetworkDecomposition::new(&g, f, 2, k).unwrap();
        prop_assert_eq!(verify_decomposition(&g, &nd).unwrap(), verify_decomposition(&g, &nd).unwrap());
    }

    #[test]
    fn approximate_is_legal_on_valid_decompositions(g in small_graph(16), k in 1u64..5, salt in any::<u64>()) {
        let f: LabelAssignment = g.vertices().iter().map(|&v| (v, 1 + (v.0 ^ salt) % k)).collect();
        let clusters = g.extract_clusters(&f).unwrap();
        let d = clusters.iter().map(|c| g.cluster_diameter(c).unwrap()).max().unwrap_or(0);
        let nd = NetworkDecomposition::new(&g, f, d, k).unwrap();
        let r = approximate(&g, &nd, 30).unwrap();
        prop_assert!(verify_coloring(&g, &r.coloring).unwrap().passed);
        prop_assert_eq!(r.trace.communication_rounds(), d + 1);
        // every cluster uses exactly its chromatic number of cluster colors
        for cl in &clusters {
            let chi = brute_force_chromatic(&g.induced_subgraph(&cl.members).unwrap(), 22).unwrap().0;
            let used: BTreeSet<u64> = cl.members.iter().map(|v| r.outputs[v].cluster_color).collect();
            prop_assert_eq!(used.len(), chi);
        }
        prop_assert!(r.coloring.max_label() <= k * r.outputs.values().map(|o| o.cluster_color).max().unwrap());
    }
}

#[test]
fn identifiers_need_not_be_dense() {
    let g = Graph::new(
        [10, 20, 30, 40].map(VertexId),
        [(10, 20), (20, 30), (30, 40), (40, 10)].map(|(a, b)| (VertexId(a), VertexId(b))),
    )
    .unwrap();
    let (_, chi) = exact_min_coloring(&g, 8).unwrap();
    assert_eq!(chi, 2);
    let nd = NetworkDecomposition::new(&g, LabelAssignment::constant(&g, 1).unwrap(), 2, 1).unwrap();
    let r = approximate(&g, &nd, 8).unwrap();
    assert!(verify_coloring(&g, &r.coloring).unwrap().passed);
}
