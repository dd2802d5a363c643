use std::collections::BTreeMap;

use super::AlgoError;
use crate::graph::{Graph, GraphError, LabelAssignment};

/// Combines a labeling of A and a labeling of B into one labeling of `g`:
/// A-labels become `2l`, B-labels `2l + 1`. Labels of the two sides never
/// coincide, so every cluster of the result lies inside one side.
///
/// ```
/// use localsim::algorithms::merge_decompositions;
/// use localsim::graph::{path_graph, LabelAssignment, VertexId};
///
/// let g = path_graph(2);
/// let a: LabelAssignment = [(VertexId(0), 3)].into_iter().collect();
/// let b: LabelAssignment = [(VertexId(1), 3)].into_iter().collect();
/// let merged = merge_decompositions(&g, &a, &b).unwrap();
/// assert_eq!(merged.get(VertexId(0)), Some(6));
/// assert_eq!(merged.get(VertexId(1)), Some(7));
/// ```
pub fn merge_decompositions(g: &Graph, a: &LabelAssignment, b: &LabelAssignment) -> Result<LabelAssignment, AlgoError> {
    let mut merged = BTreeMap::new();
    for (v, l) in a.iter() {
        merged.insert(v, 2 * l);
    }
    for (v, l) in b.iter() {
        if merged.insert(v, 2 * l + 1).is_some() {
            return Err(AlgoError::MergeOverlap(v));
        }
    }
    if let Some(&v) = g.vertices().iter().find(|v| !merged.contains_key(v)) {
        return Err(AlgoError::MergeUncovered(v));
    }
    if let Some(&v) = merged.keys().find(|v| !g.contains(**v)) {
        return Err(GraphError::ForeignLabel(v).into());
    }
    Ok(LabelAssignment::new(merged)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_gnp, path_graph, VertexId};

    fn la(pairs: &[(u64, u64)]) -> LabelAssignment {
        pairs.iter().map(|&(v, l)| (VertexId(v), l)).collect()
    }

    #[test]
    fn empty_a_gives_odd_labels() {
        let g = path_graph(3);
        let m = merge_decompositions(&g, &la(&[]), &la(&[(0, 1), (1, 2), (2, 1)])).unwrap();
        assert!(m.iter().all(|(_, l)| l % 2 == 1));
    }

    #[test]
    fn overlap_and_gaps_are_errors() {
        let g = path_graph(3);
        assert!(matches!(
            merge_decompositions(&g, &la(&[(0, 1), (1, 1)]), &la(&[(1, 1), (2, 1)])),
            Err(AlgoError::MergeOverlap(VertexId(1)))
        ));
        assert!(matches!(
            merge_decompositions(&g, &la(&[(0, 1)]), &la(&[(2, 1)])),
            Err(AlgoError::MergeUncovered(VertexId(1)))
        ));
        assert!(matches!(
            merge_decompositions(&g, &la(&[(0, 1), (1, 1), (7, 1)]), &la(&[(2, 1)])),
            Err(AlgoError::Graph(GraphError::ForeignLabel(VertexId(7))))
        ));
    }

    #[test]
    fn cross_edges_never_share_labels() {
        let g = generate_gnp(40, 0.2, 2);
        let a: LabelAssignment = g.vertices().iter().filter(|v| v.0 % 2 == 0).map(|&v| (v, 1 + v.0 % 3)).collect();
        let b: LabelAssignment = g.vertices().iter().filter(|v| v.0 % 2 == 1).map(|&v| (v, 1 + v.0 % 3)).collect();
        let m = merge_decompositions(&g, &a, &b).unwrap();
        for (u, v) in g.edges() {
            if (u.0 + v.0) % 2 == 1 {
                assert_ne!(m.get(u), m.get(v));
            }
        }
        for cl in g.extract_clusters(&m).unwrap() {
            let parities: std::collections::BTreeSet<u64> = cl.members.iter().map(|v| v.0 % 2).collect();
            assert_eq!(parities.len(), 1);
        }
    }
}
