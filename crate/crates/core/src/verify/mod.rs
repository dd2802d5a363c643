//! Checks on finished runs, an independent chromatic-number oracle and the
//! seeded trial harness.
//!
//! Verifiers only read their inputs. They report every violation they find
//! together with the vertices that witness it.

mod harness;
mod oracle;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, LabelAssignment, NetworkDecomposition, VertexId, VertexSet};

pub use harness::{trial_harness, Experiment, ExperimentSpec, TrialRecord, TrialSummary, EXPERIMENTS};
pub use oracle::{brute_force_chromatic, ORACLE_MAX_VERTICES};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has {size} vertices, oracle cap is {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("csv export failed: {0}")]
    Csv(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    MonochromaticEdge,
    LabelOutOfRange,
    DiameterExceeded,
    ClusterListMismatch,
    Undominated,
    Distance3Conflict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witnesses: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
    pub measured: BTreeMap<String, u64>,
}

impl VerifierReport {
    fn new(violations: Vec<Violation>, measured: impl IntoIterator<Item = (&'static str, u64)>) -> Self {
        VerifierReport {
            passed: violations.is_empty(),
            violations,
            measured: measured.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn measured(&self, key: &str) -> Option<u64> {
        self.measured.get(key).copied()
    }

    /// One line naming the first few violations.
    pub fn summary(&self) -> String {
        if self.passed {
            return "passed".into();
        }
        let mut s = format!("{} violation(s):", self.violations.len());
        for v in self.violations.iter().take(5) {
            let ids: Vec<String> = v.witnesses.iter().map(|w| w.to_string()).collect();
            let _ = write!(s, " {:?} [{}];", v.kind, ids.join(", "));
        }
        s
    }
}

/// Passes iff no edge joins two vertices of the same color.
pub fn verify_coloring(g: &Graph, coloring: &LabelAssignment) -> Result<VerifierReport, GraphError> {
    coloring.check_total(g)?;
    let violations = g
        .edges()
        .filter(|&(u, v)| coloring.get(u) == coloring.get(v))
        .map(|(u, v)| Violation {
            kind: ViolationKind::MonochromaticEdge,
            witnesses: vec![u, v],
        })
        .collect();
    Ok(VerifierReport::new(
        violations,
        [
            ("color_count", coloring.distinct_count() as u64),
            ("max_color", coloring.max_label()),
        ],
    ))
}

/// How cluster diameter is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiameterMode {
    /// Distances inside the cluster's induced subgraph.
    #[default]
    Strong,
    /// Distances in the whole graph.
    Weak,
}

/// Passes iff all labels lie in `1..=c` and every cluster has strong
/// diameter at most `d`.
pub fn verify_decomposition(g: &Graph, nd: &NetworkDecomposition) -> Result<VerifierReport, GraphError> {
    verify_decomposition_with(g, nd, DiameterMode::Strong)
}

pub fn verify_decomposition_with(
    g: &Graph,
    nd: &NetworkDecomposition,
    mode: DiameterMode,
) -> Result<VerifierReport, GraphError> {
    let f = &nd.assignment;
    f.check_total(g)?;
    let mut violations = Vec::new();
    for (v, l) in f.iter() {
        if l > nd.c {
            violations.push(Violation {
                kind: ViolationKind::LabelOutOfRange,
                witnesses: vec![v],
            });
        }
    }
    let clusters = g.extract_clusters(f)?;
    if clusters != nd.clusters {
        violations.push(Violation {
            kind: ViolationKind::ClusterListMismatch,
            witnesses: Vec::new(),
        });
    }
    let mut max_diameter = 0;
    for cl in &clusters {
        let diam = match mode {
            DiameterMode::Strong => g.cluster_diameter(cl)?,
            DiameterMode::Weak => g.cluster_weak_diameter(cl)?,
        };
        max_diameter = max_diameter.max(diam);
        if diam > nd.d {
            violations.push(Violation {
                kind: ViolationKind::DiameterExceeded,
                witnesses: cl.members.iter().copied().collect(),
            });
        }
    }
    Ok(VerifierReport::new(
        violations,
        [
            ("max_cluster_diameter", max_diameter as u64),
            ("label_count", f.distinct_count() as u64),
            ("max_label", f.max_label()),
            ("cluster_count", clusters.len() as u64),
            ("max_cluster_size", clusters.iter().map(|c| c.len()).max().unwrap_or(0) as u64),
        ],
    ))
}

/// Passes iff every vertex is in `s` or has a neighbor in `s`. All
/// undominated vertices are listed as witnesses of a single violation.
pub fn verify_dominating_set(g: &Graph, s: &VertexSet) -> Result<VerifierReport, GraphError> {
    if let Some(&v) = s.iter().find(|&&v| !g.contains(v)) {
        return Err(GraphError::NotASubset(v));
    }
    let undominated: Vec<VertexId> = g
        .vertices()
        .iter()
        .copied()
        .filter(|&v| !s.contains(&v) && !g.neighbors(v).expect("own vertex").any(|u| s.contains(&u)))
        .collect();
    let count = undominated.len() as u64;
    let violations = if undominated.is_empty() {
        Vec::new()
    } else {
        vec![Violation {
            kind: ViolationKind::Undominated,
            witnesses: undominated,
        }]
    };
    Ok(VerifierReport::new(
        violations,
        [("dominating_set_size", s.len() as u64), ("undominated", count)],
    ))
}

/// Passes iff no two distinct members of `d` within distance 3 of each other
/// in `g_a` share a label.
pub fn verify_distance3_labels(
    g_a: &Graph,
    d: &VertexSet,
    labels: &LabelAssignment,
) -> Result<VerifierReport, GraphError> {
    labels.check_covers(d)?;
    if let Some(&v) = d.iter().find(|&&v| !g_a.contains(v)) {
        return Err(GraphError::NotASubset(v));
    }
    let mut violations = Vec::new();
    for &v in d {
        let lv = labels.get(v);
        for u in within_three(g_a, v) {
            if u > v && d.contains(&u) && labels.get(u) == lv {
                violations.push(Violation {
                    kind: ViolationKind::Distance3Conflict,
                    witnesses: vec![v, u],
                });
            }
        }
    }
    let distinct: BTreeSet<u64> = d.iter().filter_map(|&v| labels.get(v)).collect();
    Ok(VerifierReport::new(
        violations,
        [("dominating_set_size", d.len() as u64), ("label_count", distinct.len() as u64)],
    ))
}

fn within_three(g: &Graph, v: VertexId) -> Vec<VertexId> {
    let start = g.index_of(v).expect("checked membership");
    let mut dist = BTreeMap::from([(start, 0usize)]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if dist[&u] == 3 {
            continue;
        }
        for &w in g.neighbor_indices(u) {
            if !dist.contains_key(&w) {
                dist.insert(w, dist[&u] + 1);
                queue.push_back(w);
            }
        }
    }
    dist.keys().map(|&i| g.id_at(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, path_graph, star_graph, Cluster};

    fn la(pairs: &[(u64, u64)]) -> LabelAssignment {
        pairs.iter().map(|&(v, l)| (VertexId(v), l)).collect()
    }

    fn ids(xs: &[u64]) -> VertexSet {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    #[test]
    fn coloring_examples() {
        let k3 = complete_graph(3);
        let r = verify_coloring(&k3, &la(&[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert!(r.passed);
        assert_eq!(r.measured("color_count"), Some(3));
        let r = verify_coloring(&k3, &la(&[(0, 1), (1, 1), (2, 2)])).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violations[0].witnesses, vec![VertexId(0), VertexId(1)]);
        let edgeless = Graph::from_edges(4, &[]).unwrap();
        let r = verify_coloring(&edgeless, &LabelAssignment::constant(&edgeless, 1).unwrap()).unwrap();
        assert!(r.passed);
        assert_eq!(r.measured("color_count"), Some(1));
        assert!(matches!(
            verify_coloring(&k3, &la(&[(0, 1)])),
            Err(GraphError::PartialAssignment(_))
        ));
    }

    #[test]
    fn decomposition_examples() {
        let g = path_graph(5);
        let singles = la(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let nd = NetworkDecomposition::new(&g, singles, 0, 5).unwrap();
        let r = verify_decomposition(&g, &nd).unwrap();
        assert!(r.passed);
        assert_eq!(r.measured("max_cluster_diameter"), Some(0));

        let nd = NetworkDecomposition::new(&g, LabelAssignment::constant(&g, 1).unwrap(), 2, 1).unwrap();
        let r = verify_decomposition(&g, &nd).unwrap();
        assert!(!r.passed);
        assert_eq!(r.measured("max_cluster_diameter"), Some(4));

        let nd = NetworkDecomposition::new(&g, LabelAssignment::constant(&g, 3).unwrap(), 4, 2).unwrap();
        let r = verify_decomposition(&g, &nd).unwrap();
        assert_eq!(r.violations.len(), 5);
        assert!(r.violations.iter().all(|v| v.kind == ViolationKind::LabelOutOfRange));
    }

    #[test]
    fn weak_mode_is_more_lenient() {
        // C6 with one cluster on five consecutive vertices: strong 4, weak 3.
        let g = crate::graph::cycle_graph(6);
        let f = la(&[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 2)]);
        let nd = NetworkDecomposition::new(&g, f, 3, 2).unwrap();
        assert!(!verify_decomposition(&g, &nd).unwrap().passed);
        assert!(verify_decomposition_with(&g, &nd, DiameterMode::Weak).unwrap().passed);
    }

    #[test]
    fn tampered_cluster_list_is_caught() {
        let g = path_graph(3);
        let mut nd = NetworkDecomposition::new(&g, LabelAssignment::constant(&g, 1).unwrap(), 2, 1).unwrap();
        nd.clusters.push(Cluster {
            members: ids(&[0]),
            label: 1,
        });
        let r = verify_decomposition(&g, &nd).unwrap();
        assert_eq!(r.violations[0].kind, ViolationKind::ClusterListMismatch);
    }

    #[test]
    fn domination_examples() {
        let g = path_graph(5);
        assert!(verify_dominating_set(&g, &g.vertex_set()).unwrap().passed);
        let r = verify_dominating_set(&g, &ids(&[0])).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violations[0].witnesses, vec![VertexId(2), VertexId(3), VertexId(4)]);
        let star = star_graph(5);
        let r = verify_dominating_set(&star, &ids(&[0])).unwrap();
        assert!(r.passed);
        assert_eq!(r.measured("dominating_set_size"), Some(1));
    }

    #[test]
    fn distance3_examples() {
        let g = path_graph(5);
        assert!(verify_distance3_labels(&g, &ids(&[2]), &la(&[(2, 1)])).unwrap().passed);
        assert!(!verify_distance3_labels(&g, &ids(&[0, 2]), &la(&[(0, 1), (2, 1)])).unwrap().passed);
        assert!(!verify_distance3_labels(&g, &ids(&[0, 3]), &la(&[(0, 1), (3, 1)])).unwrap().passed);
        assert!(verify_distance3_labels(&g, &ids(&[0, 4]), &la(&[(0, 1), (4, 1)])).unwrap().passed);
    }

    #[test]
    fn verification_is_idempotent() {
        let g = path_graph(6);
        let f = la(&[(0, 1), (1, 1), (2, 2), (3, 2), (4, 3), (5, 3)]);
        let nd = NetworkDecomposition::new(&g, f.clone(), 1, 3).unwrap();
        let before = nd.clone();
        let r1 = verify_decomposition(&g, &nd).unwrap();
        let r2 = verify_decomposition(&g, &nd).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(nd, before);
        assert_eq!(verify_coloring(&g, &f).unwrap(), verify_coloring(&g, &f).unwrap());
    }
}
