//! Undirected simple graphs, label assignments, clusters and network
//! decompositions.
//!
//! A [`Graph`] is immutable once built. Vertices carry arbitrary distinct
//! [`VertexId`]s and are stored in ascending ID order; every traversal in this
//! crate visits them in that order so results are reproducible.

mod generators;
mod io;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generators::{
    complete_graph, cycle_graph, generate_clique_path, generate_gnp, generate_random_regular,
    grid_graph, path_graph, petersen_graph, star_graph,
};
pub use io::{parse_graph, parse_labels, read_graph, read_labels, to_dot, write_graph, write_labels};

/// Distinct identity of a vertex.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("parallel edge {0} -- {1}")]
    ParallelEdge(VertexId, VertexId),
    #[error("vertex {0} listed twice")]
    DuplicateVertex(VertexId),
    #[error("vertex set is not a subset of the graph: {0} is missing")]
    NotASubset(VertexId),
    #[error("label assignment is not total: vertex {0} has no label")]
    PartialAssignment(VertexId),
    #[error("label assignment mentions vertex {0} which is not in the graph")]
    ForeignLabel(VertexId),
    #[error("labels must be positive, vertex {0} has label 0")]
    ZeroLabel(VertexId),
    #[error("cluster members do not induce a connected subgraph")]
    DisconnectedCluster,
    #[error("cluster is empty")]
    EmptyCluster,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// Immutable undirected simple graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// Builds a graph from a vertex list and an edge list.
    ///
    /// Endpoints that are not listed in `vertices` are added implicitly.
    /// Self-loops and repeated edges are rejected.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut ids = BTreeSet::new();
        for v in vertices {
            if !ids.insert(v) {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        let edges: Vec<_> = edges.into_iter().collect();
        for &(u, v) in &edges {
            ids.insert(u);
            ids.insert(v);
        }
        let ids: Vec<VertexId> = ids.into_iter().collect();
        let index: HashMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ids.len()];
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let (iu, iv) = (index[&u], index[&v]);
            if !adj[iu].insert(iv) {
                return Err(GraphError::ParallelEdge(u.min(v), u.max(v)));
            }
            adj[iv].insert(iu);
        }
        let edge_count = adj.iter().map(BTreeSet::len).sum::<usize>() / 2;
        Ok(Graph {
            ids,
            index,
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
            edge_count,
        })
    }

    /// Graph on vertices `0..n` with the given edges.
    pub fn from_edges(n: usize, edges: &[(u64, u64)]) -> Result<Self, GraphError> {
        Graph::new(
            (0..n as u64).map(VertexId),
            edges.iter().map(|&(u, v)| (VertexId(u), VertexId(v))),
        )
    }

    pub fn empty() -> Self {
        Graph {
            ids: Vec::new(),
            index: HashMap::new(),
            adj: Vec::new(),
            edge_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn m(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Vertices in ascending ID order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.ids.iter().copied().collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    /// Position of `v` in [`Graph::vertices`].
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn id_at(&self, i: usize) -> VertexId {
        self.ids[i]
    }

    /// Neighbor positions of the vertex at position `i`, ascending.
    pub fn neighbor_indices(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    /// Neighbors of `v` in ascending ID order.
    pub fn neighbors(&self, v: VertexId) -> Result<impl Iterator<Item = VertexId> + '_, GraphError> {
        let i = self.require(v)?;
        Ok(self.adj[i].iter().map(move |&j| self.ids[j]))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        Ok(self.adj[self.require(v)?].len())
    }

    /// Δ(G); zero for an empty or edgeless graph.
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        match (self.index.get(&u), self.index.get(&v)) {
            (Some(&iu), Some(&iv)) => self.adj[iu].binary_search(&iv).is_ok(),
            _ => false,
        }
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(i, nb)| {
            nb.iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (self.ids[i], self.ids[j]))
        })
    }

    pub(crate) fn require(&self, v: VertexId) -> Result<usize, GraphError> {
        self.index_of(v).ok_or(GraphError::UnknownVertex(v))
    }

    /// Hop distances from `source` to every reachable vertex, indexed by
    /// position. Unreachable vertices hold `None`. Stops expanding past `limit`.
    fn bfs(&self, source: usize, limit: Option<usize>, allowed: Option<&[bool]>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            if limit.is_some_and(|l| du >= l) {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() && allowed.is_none_or(|a| a[w]) {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest-path length, or `None` when `v` is unreachable from `u`.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<Option<usize>, GraphError> {
        let (iu, iv) = (self.require(u)?, self.require(v)?);
        Ok(self.bfs(iu, None, None)[iv])
    }

    /// Γ^r(v): every vertex at distance at most `r` from `v`.
    pub fn r_hop_neighborhood(&self, v: VertexId, r: usize) -> Result<VertexSet, GraphError> {
        let iv = self.require(v)?;
        Ok(self
            .bfs(iv, Some(r), None)
            .into_iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|_| self.ids[i]))
            .collect())
    }

    /// G(s), keeping the original vertex IDs.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<Graph, GraphError> {
        let mut keep = vec![false; self.n()];
        for &v in s {
            keep[self.index_of(v).ok_or(GraphError::NotASubset(v))?] = true;
        }
        let ids: Vec<VertexId> = s.iter().copied().collect();
        let index: HashMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj: Vec<Vec<usize>> = ids
            .iter()
            .map(|v| {
                self.adj[self.index[v]]
                    .iter()
                    .filter(|&&j| keep[j])
                    .map(|&j| index[&self.ids[j]])
                    .collect()
            })
            .collect();
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Graph {
            ids,
            index,
            adj,
            edge_count,
        })
    }

    /// Connected components, each as a sorted vertex set, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let comp: VertexSet = self
                .bfs(s, None, None)
                .into_iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|_| i))
                .inspect(|&i| seen[i] = true)
                .map(|i| self.ids[i])
                .collect();
            out.push(comp);
        }
        out
    }

    /// Label-preserving connected components: maximal connected vertex sets
    /// sharing one label. Ordered by smallest member.
    pub fn extract_clusters(&self, f: &LabelAssignment) -> Result<Vec<Cluster>, GraphError> {
        f.check_total(self)?;
        let labels: Vec<u64> = self.ids.iter().map(|v| f.labels[v]).collect();
        let mut cluster_of = vec![usize::MAX; self.n()];
        let mut clusters = Vec::new();
        for s in 0..self.n() {
            if cluster_of[s] != usize::MAX {
                continue;
            }
            let id = clusters.len();
            let mut members = BTreeSet::new();
            let mut queue = VecDeque::from([s]);
            cluster_of[s] = id;
            while let Some(u) = queue.pop_front() {
                members.insert(self.ids[u]);
                for &w in &self.adj[u] {
                    if cluster_of[w] == usize::MAX && labels[w] == labels[s] {
                        cluster_of[w] = id;
                        queue.push_back(w);
                    }
                }
            }
            clusters.push(Cluster {
                members,
                label: labels[s],
            });
        }
        Ok(clusters)
    }

    /// Strong diameter: max pairwise distance inside G(members).
    pub fn cluster_diameter(&self, cl: &Cluster) -> Result<usize, GraphError> {
        self.set_diameter(&cl.members, true)
    }

    /// Weak diameter: max pairwise distance in the whole graph between members.
    pub fn cluster_weak_diameter(&self, cl: &Cluster) -> Result<usize, GraphError> {
        self.set_diameter(&cl.members, false)
    }

    fn set_diameter(&self, members: &VertexSet, strong: bool) -> Result<usize, GraphError> {
        if members.is_empty() {
            return Err(GraphError::EmptyCluster);
        }
        let mut allowed = vec![false; self.n()];
        let idx: Vec<usize> = members
            .iter()
            .map(|&v| self.require(v))
            .collect::<Result<_, _>>()?;
        for &i in &idx {
            allowed[i] = true;
        }
        let mask = strong.then_some(allowed.as_slice());
        let mut diameter = 0;
        for &s in &idx {
            let dist = self.bfs(s, None, mask);
            for &t in &idx {
                diameter = diameter.max(dist[t].ok_or(GraphError::DisconnectedCluster)?);
            }
        }
        Ok(diameter)
    }

    /// Diameter of the whole graph, `None` if disconnected or empty.
    pub fn diameter(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        self.set_diameter(&self.vertex_set(), true).ok()
    }
}

/// Total map from vertices to positive labels. Used both for colorings and
/// for decomposition labelings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelAssignment {
    labels: BTreeMap<VertexId, u64>,
}

impl LabelAssignment {
    pub fn new(labels: BTreeMap<VertexId, u64>) -> Result<Self, GraphError> {
        if let Some((&v, _)) = labels.iter().find(|(_, l)| **l == 0) {
            return Err(GraphError::ZeroLabel(v));
        }
        Ok(LabelAssignment { labels })
    }

    /// Same label for every vertex of `g`.
    pub fn constant(g: &Graph, label: u64) -> Result<Self, GraphError> {
        Self::new(g.vertices().iter().map(|&v| (v, label)).collect())
    }

    pub fn get(&self, v: VertexId) -> Option<u64> {
        self.labels.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, u64)> + '_ {
        self.labels.iter().map(|(&v, &l)| (v, l))
    }

    pub fn as_map(&self) -> &BTreeMap<VertexId, u64> {
        &self.labels
    }

    pub fn domain(&self) -> VertexSet {
        self.labels.keys().copied().collect()
    }

    /// Number of distinct label values.
    pub fn distinct_count(&self) -> usize {
        self.labels.values().collect::<BTreeSet<_>>().len()
    }

    pub fn max_label(&self) -> u64 {
        self.labels.values().copied().max().unwrap_or(0)
    }

    /// Ok iff the domain is exactly the vertex set of `g`.
    pub fn check_total(&self, g: &Graph) -> Result<(), GraphError> {
        if let Some(&v) = g.vertices().iter().find(|v| !self.labels.contains_key(v)) {
            return Err(GraphError::PartialAssignment(v));
        }
        if let Some(&v) = self.labels.keys().find(|v| !g.contains(**v)) {
            return Err(GraphError::ForeignLabel(v));
        }
        Ok(())
    }

    /// Ok iff every vertex in `s` is labeled.
    pub fn check_covers(&self, s: &VertexSet) -> Result<(), GraphError> {
        match s.iter().find(|v| !self.labels.contains_key(v)) {
            Some(&v) => Err(GraphError::PartialAssignment(v)),
            None => Ok(()),
        }
    }
}

impl FromIterator<(VertexId, u64)> for LabelAssignment {
    /// Panics on a zero label; use [`LabelAssignment::new`] for fallible input.
    fn from_iter<I: IntoIterator<Item = (VertexId, u64)>>(iter: I) -> Self {
        LabelAssignment::new(iter.into_iter().collect()).expect("labels must be positive")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub members: VertexSet,
    pub label: u64,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.contains(&v)
    }
}

/// A labeling together with its claimed `(d, c)` parameters: labels lie in
/// `1..=c` and every cluster has diameter at most `d`.
///
/// Construction does not check the claim; see
/// [`verify_decomposition`](crate::verify::verify_decomposition).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDecomposition {
    pub assignment: LabelAssignment,
    pub d: usize,
    pub c: u64,
    pub clusters: Vec<Cluster>,
}

impl NetworkDecomposition {
    pub fn new(g: &Graph, assignment: LabelAssignment, d: usize, c: u64) -> Result<Self, GraphError> {
        let clusters = g.extract_clusters(&assignment)?;
        Ok(NetworkDecomposition {
            assignment,
            d,
            c,
            clusters,
        })
    }

    pub fn label(&self, v: VertexId) -> Option<u64> {
        self.assignment.get(v)
    }

    /// Index into `clusters` for every vertex.
    pub fn cluster_index(&self) -> BTreeMap<VertexId, usize> {
        self.clusters
            .iter()
            .enumerate()
            .flat_map(|(i, cl)| cl.members.iter().map(move |&v| (v, i)))
            .collect()
    }
}
