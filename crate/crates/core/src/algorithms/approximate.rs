//! Turning a `(d, c)`-network-decomposition into a coloring with at most
//! `chi(G) * c` colors in `d + 1` communication rounds.
//!
//! Every vertex floods its adjacency and label for `d + 1` rounds, which is
//! enough to see its whole cluster `W` together with the edges leaving it.
//! It then colors `G(W)` optimally with [`exact_min_coloring`]; all members of
//! `W` run the same deterministic search on the same input and agree. A vertex
//! with cluster color `x` and label `f` takes color `(x - 1) * c + f`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{exact_min_coloring, AlgoError};
use crate::engine::{
    run, EngineConfig, Flood, InitContext, RunTrace, Step, TopologyMsg, TopologyRecord, VertexContext, VertexProgram,
};
use crate::graph::{Graph, LabelAssignment, NetworkDecomposition, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximateOutput {
    /// `(cluster_color - 1) * c + decomposition_label`, in `1..=chi * c`.
    pub final_color: u64,
    /// Color of the vertex in the optimal coloring of its cluster.
    pub cluster_color: u64,
    pub decomposition_label: u64,
}

impl ApproximateOutput {
    /// The color before the downward shift by `c - 1`:
    /// `cluster_color * c + decomposition_label - 1`.
    pub fn unshifted_color(&self, c: u64) -> u64 {
        self.cluster_color * c + self.decomposition_label - 1
    }
}

/// Why a single vertex could not finish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalFailure {
    ClusterTooLarge { size: usize, cap: usize },
    /// A cluster member has a neighbor outside the collected view, so the
    /// cluster is wider than the decomposition claimed.
    ClusterBeyondView,
}

#[derive(Clone, Debug)]
pub struct ApproximateProgram {
    labels: LabelAssignment,
    d: usize,
    c: u64,
    cluster_cap: usize,
}

impl ApproximateProgram {
    pub fn new(labels: LabelAssignment, d: usize, c: u64, cluster_cap: usize) -> Self {
        ApproximateProgram {
            labels,
            d,
            c,
            cluster_cap,
        }
    }

    fn finish(&self, me: VertexId, flood: &Flood) -> Result<ApproximateOutput, LocalFailure> {
        let known = &flood.known;
        let label = known[&me].label.expect("every vertex announces a label");
        let mut members = BTreeSet::from([me]);
        let mut queue = VecDeque::from([me]);
        while let Some(u) = queue.pop_front() {
            for w in known[&u].neighbors.iter() {
                let Some(rec) = known.get(w) else {
                    return Err(LocalFailure::ClusterBeyondView);
                };
                if rec.label == Some(label) && members.insert(*w) {
                    queue.push_back(*w);
                }
            }
        }
        if members.len() > self.cluster_cap {
            return Err(LocalFailure::ClusterTooLarge {
                size: members.len(),
                cap: self.cluster_cap,
            });
        }
        let edges = members.iter().flat_map(|&u| {
            known[&u]
                .neighbors
                .iter()
                .filter(move |&&w| u < w)
                .filter(|w| members.contains(w))
                .map(move |&w| (u, w))
        });
        let cluster = Graph::new(members.iter().copied(), edges).expect("records describe a simple graph");
        let (coloring, _) = exact_min_coloring(&cluster, self.cluster_cap).expect("size checked above");
        let cluster_color = coloring.get(me).expect("center is a member");
        Ok(ApproximateOutput {
            final_color: (cluster_color - 1) * self.c + label,
            cluster_color,
            decomposition_label: label,
        })
    }
}

impl VertexProgram for ApproximateProgram {
    type State = Flood;
    type Msg = TopologyMsg;
    type Output = Result<ApproximateOutput, LocalFailure>;

    fn init(&self, ctx: &InitContext<'_>) -> Flood {
        Flood::new(
            ctx.self_id,
            TopologyRecord {
                neighbors: ctx.neighbor_ids.into(),
                label: self.labels.get(ctx.self_id),
            },
        )
    }

    fn round(&self, ctx: &mut VertexContext<'_, TopologyMsg>, flood: &mut Flood) -> Step<Self::Output> {
        flood.absorb(ctx.inbox);
        if ctx.round > self.d + 1 {
            return Step::Terminate(self.finish(ctx.self_id, flood));
        }
        flood.forward(ctx);
        Step::Continue
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproximateResult {
    /// Final colors.
    pub coloring: LabelAssignment,
    pub outputs: BTreeMap<VertexId, ApproximateOutput>,
    pub trace: RunTrace<ApproximateOutput>,
}

/// Colors `g` from the decomposition `nd`, which is checked first.
///
/// ```
/// use localsim::algorithms::approximate;
/// use localsim::graph::{complete_graph, LabelAssignment, NetworkDecomposition};
///
/// let g = complete_graph(3);
/// let nd = NetworkDecomposition::new(&g, LabelAssignment::constant(&g, 1).unwrap(), 1, 1).unwrap();
/// let r = approximate(&g, &nd, 20).unwrap();
/// assert_eq!(r.trace.communication_rounds(), 2);
/// assert_eq!(r.coloring.distinct_count(), 3);
/// ```
pub fn approximate(g: &Graph, nd: &NetworkDecomposition, cluster_cap: usize) -> Result<ApproximateResult, AlgoError> {
    let report = crate::verify::verify_decomposition(g, nd)?;
    if !report.passed {
        return Err(AlgoError::InvalidDecomposition(report.summary()));
    }
    run_approximate(g, nd, cluster_cap, None)
}

pub(crate) fn run_approximate(
    g: &Graph,
    nd: &NetworkDecomposition,
    cluster_cap: usize,
    known_n: Option<usize>,
) -> Result<ApproximateResult, AlgoError> {
    let program = ApproximateProgram::new(nd.assignment.clone(), nd.d, nd.c, cluster_cap);
    let mut config = EngineConfig::new(nd.d + 2);
    if let Some(n) = known_n {
        config = config.with_known_n(n);
    }
    let trace = run(g, &program, 0, &config)?;
    for (v, out) in trace.outputs() {
        match out {
            Ok(_) => {}
            Err(LocalFailure::ClusterTooLarge { size, cap }) => {
                return Err(AlgoError::ClusterTooLarge { size: *size, cap: *cap })
            }
            Err(LocalFailure::ClusterBeyondView) => return Err(AlgoError::ClusterBeyondView(v)),
        }
    }
    let trace = trace.map_outputs(|o| o.expect("failures handled above"));
    let outputs: BTreeMap<_, _> = trace.outputs().map(|(v, o)| (v, *o)).collect();
    Ok(ApproximateResult {
        coloring: LabelAssignment::new(outputs.iter().map(|(&v, o)| (v, o.final_color)).collect())?,
        outputs,
        trace,
    })
}
