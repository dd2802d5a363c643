//! Collecting the topology of an r-hop neighborhood in r rounds by flooding.
//!
//! Every vertex starts out knowing its own adjacency list. In each
//! communication round it forwards the records it learned in the previous
//! round, so after `r` rounds it holds the record of every vertex within
//! distance `r`, including the edges those vertices have to the outside.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::{InitContext, Step, VertexContext, VertexProgram};
use crate::graph::{Graph, LabelAssignment, VertexId, VertexSet};

/// What a vertex announces about itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyRecord {
    pub neighbors: Arc<[VertexId]>,
    pub label: Option<u64>,
}

pub type TopologyMsg = Arc<Vec<(VertexId, Arc<TopologyRecord>)>>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
/// Flooding state: every record learned so far and those not yet forwarded.
pub struct Flood {
    pub(crate) known: BTreeMap<VertexId, Arc<TopologyRecord>>,
    fresh: Vec<(VertexId, Arc<TopologyRecord>)>,
}

impl Flood {
    pub(crate) fn new(id: VertexId, record: TopologyRecord) -> Self {
        let record = Arc::new(record);
        Flood {
            known: BTreeMap::from([(id, record.clone())]),
            fresh: vec![(id, record)],
        }
    }

    pub(crate) fn absorb(&mut self, inbox: &[super::Message<TopologyMsg>]) {
        for m in inbox {
            for (v, rec) in m.payload.iter() {
                if !self.known.contains_key(v) {
                    self.known.insert(*v, rec.clone());
                    self.fresh.push((*v, rec.clone()));
                }
            }
        }
    }

    /// Sends everything learned since the last forward.
    pub(crate) fn forward(&mut self, ctx: &mut VertexContext<'_, TopologyMsg>) {
        if !self.fresh.is_empty() {
            let batch = Arc::new(std::mem::take(&mut self.fresh));
            ctx.broadcast(batch);
        }
    }
}

/// Knowledge a vertex holds after collecting its `radius`-hop neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalView {
    pub center: VertexId,
    pub radius: usize,
    pub records: BTreeMap<VertexId, Arc<TopologyRecord>>,
}

impl LocalView {
    pub fn vertices(&self) -> VertexSet {
        self.records.keys().copied().collect()
    }

    pub fn label(&self, v: VertexId) -> Option<u64> {
        self.records.get(&v).and_then(|r| r.label)
    }

    /// Edges with both endpoints in the view: G(Γ_r(center)).
    pub fn induced_graph(&self) -> Graph {
        let edges = self.records.iter().flat_map(|(&u, rec)| {
            rec.neighbors
                .iter()
                .filter(move |&&w| u < w && self.records.contains_key(&w))
                .map(move |&w| (u, w))
        });
        Graph::new(self.records.keys().copied(), edges).expect("records describe a simple graph")
    }

    /// Edges from a known vertex to a vertex outside the view.
    pub fn boundary_edges(&self) -> usize {
        self.records
            .values()
            .flat_map(|r| r.neighbors.iter())
            .filter(|w| !self.records.contains_key(w))
            .count()
    }
}

impl Serialize for LocalView {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            center: VertexId,
            radius: usize,
            vertices: Vec<VertexId>,
            edges: Vec<(VertexId, VertexId)>,
        }
        let g = self.induced_graph();
        Repr {
            center: self.center,
            radius: self.radius,
            vertices: g.vertices().to_vec(),
            edges: g.edges().collect(),
        }
        .serialize(s)
    }
}

/// Collects Γ_r(v) for every vertex in exactly `radius` communication rounds.
#[derive(Clone, Debug)]
pub struct TopologyCollector {
    pub radius: usize,
    labels: Option<LabelAssignment>,
}

impl TopologyCollector {
    pub fn new(radius: usize) -> Self {
        TopologyCollector { radius, labels: None }
    }

    /// Each vertex also announces its own label from `labels`.
    pub fn with_labels(radius: usize, labels: LabelAssignment) -> Self {
        TopologyCollector {
            radius,
            labels: Some(labels),
        }
    }
}

pub fn collect_topology(radius: usize) -> TopologyCollector {
    TopologyCollector::new(radius)
}

impl VertexProgram for TopologyCollector {
    type State = Flood;
    type Msg = TopologyMsg;
    type Output = LocalView;

    fn init(&self, ctx: &InitContext<'_>) -> Flood {
        Flood::new(
            ctx.self_id,
            TopologyRecord {
                neighbors: ctx.neighbor_ids.into(),
                label: self.labels.as_ref().and_then(|l| l.get(ctx.self_id)),
            },
        )
    }

    fn round(&self, ctx: &mut VertexContext<'_, TopologyMsg>, flood: &mut Flood) -> Step<LocalView> {
        flood.absorb(ctx.inbox);
        if ctx.round > self.radius {
            return Step::Terminate(LocalView {
                center: ctx.self_id,
                radius: self.radius,
                records: flood.known.clone(),
            });
        }
        flood.forward(ctx);
        Step::Continue
    }
}
