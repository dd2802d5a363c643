//! Labeling a graph that has a small dominating set `D` so that every
//! cluster has strong diameter at most 2.
//!
//! Each iteration takes four communication rounds. A live `D`-vertex draws a
//! label from `1..=floor(n^(1/2+eps))`, the labels are flooded for three
//! rounds, and a vertex whose label is not used by any other `D`-vertex within
//! distance 3 keeps it and tells its neighbors in the fourth round. The
//! adjacency lists needed to know the 3-hop ball travel with the first
//! iteration's flood only. After the last iteration every vertex outside `D`
//! copies the label of its smallest-ID labeled neighbor in `D`.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AlgoError;
use crate::engine::{run, EngineConfig, InitContext, RunTrace, Step, VertexContext, VertexProgram};
use crate::graph::{Graph, GraphError, LabelAssignment, VertexId, VertexSet};
use crate::numeric::floor_pow;

pub(crate) const ROUNDS_PER_ITERATION: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominateParams {
    pub epsilon: f64,
    pub iter_budget: usize,
    /// Vertex count the labels are sized for. Defaults to the graph's own;
    /// the pipeline passes the size of the whole network.
    pub n_global: Option<usize>,
}

impl DominateParams {
    /// Iteration budget defaults to `ceil(4 / eps)`.
    pub fn new(epsilon: f64) -> Self {
        DominateParams {
            epsilon,
            iter_budget: (4.0 / epsilon).ceil() as usize,
            n_global: None,
        }
    }

    pub fn with_iter_budget(mut self, budget: usize) -> Self {
        self.iter_budget = budget;
        self
    }

    pub fn with_n_global(mut self, n: usize) -> Self {
        self.n_global = Some(n);
        self
    }

    /// `floor(n^(1/2+eps))`, at least 1.
    pub fn label_space(&self, n: usize) -> u64 {
        floor_pow(n as f64, 0.5 + self.epsilon)
    }

    /// Engine rounds of a full run: four per iteration plus the adoption round.
    pub fn scheduled_rounds(&self) -> usize {
        ROUNDS_PER_ITERATION * self.iter_budget + 1
    }

    pub fn validate(&self) -> Result<(), AlgoError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(AlgoError::Precondition(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.iter_budget == 0 {
            return Err(AlgoError::Precondition("iteration budget must be at least 1".into()));
        }
        Ok(())
    }
}

/// One vertex's contribution to a flood: its adjacency (first iteration only)
/// and, for members of `D`, its current label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominateRecord {
    pub neighbors: Option<Arc<[VertexId]>>,
    pub label: Option<u64>,
}

#[derive(Clone, Debug)]
pub enum DominateMsg {
    Records(Arc<Vec<(VertexId, DominateRecord)>>),
    /// A neighbor in `D` fixed this label.
    Inform(u64),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DominateState {
    in_d: bool,
    label: Option<u64>,
    finalized: Option<usize>,
    adjacency: BTreeMap<VertexId, Arc<[VertexId]>>,
    /// Labels of `D`-vertices heard in the current iteration.
    labels: BTreeMap<VertexId, u64>,
    fresh: Vec<(VertexId, DominateRecord)>,
    /// Final labels announced by neighbors in `D`.
    informed: BTreeMap<VertexId, u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominateVertexOutput {
    pub in_dominating_set: bool,
    /// `None` for a `D`-vertex that never fixed a label, or a vertex with no
    /// labeled neighbor in `D`.
    pub label: Option<u64>,
    /// Iteration in which a `D`-vertex fixed its label.
    pub finalized_iteration: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct DominateProgram {
    dominators: VertexSet,
    epsilon: f64,
    iter_budget: usize,
}

impl DominateProgram {
    pub fn new(dominators: VertexSet, params: &DominateParams) -> Self {
        DominateProgram {
            dominators,
            epsilon: params.epsilon,
            iter_budget: params.iter_budget,
        }
    }

    fn absorb(state: &mut DominateState, ctx: &VertexContext<'_, DominateMsg>) {
        for m in ctx.inbox {
            match &m.payload {
                DominateMsg::Records(batch) => {
                    for (v, rec) in batch.iter() {
                        let mut new = false;
                        if let Some(nb) = &rec.neighbors {
                            if !state.adjacency.contains_key(v) {
                                state.adjacency.insert(*v, nb.clone());
                                new = true;
                            }
                        }
                        if let Some(l) = rec.label {
                            if !state.labels.contains_key(v) {
                                state.labels.insert(*v, l);
                                new = true;
                            }
                        }
                        if new {
                            state.fresh.push((*v, rec.clone()));
                        }
                    }
                }
                DominateMsg::Inform(l) => {
                    state.informed.insert(m.src, *l);
                }
            }
        }
    }

    fn forward(state: &mut DominateState, ctx: &mut VertexContext<'_, DominateMsg>) {
        if !state.fresh.is_empty() {
            ctx.broadcast(DominateMsg::Records(Arc::new(std::mem::take(&mut state.fresh))));
        }
    }

    /// Whether another `D`-vertex within distance 3 of `me` holds `label`.
    /// The 3-hop ball is computed from the adjacency collected in iteration 1.
    fn ball3_conflict(state: &DominateState, me: VertexId, label: u64) -> bool {
        let mut dist = BTreeMap::from([(me, 0usize)]);
        let mut queue = VecDeque::from([me]);
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du == 3 {
                continue;
            }
            let Some(nb) = state.adjacency.get(&u) else { continue };
            for &w in nb.iter() {
                if !dist.contains_key(&w) {
                    dist.insert(w, du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist.keys()
            .any(|&u| u != me && state.labels.get(&u) == Some(&label))
    }
}

impl VertexProgram for DominateProgram {
    type State = DominateState;
    type Msg = DominateMsg;
    type Output = DominateVertexOutput;

    fn init(&self, ctx: &InitContext<'_>) -> DominateState {
        DominateState {
            in_d: self.dominators.contains(&ctx.self_id),
            ..Default::default()
        }
    }

    fn round(&self, ctx: &mut VertexContext<'_, DominateMsg>, state: &mut DominateState) -> Step<DominateVertexOutput> {
        Self::absorb(state, ctx);
        if ctx.round > ROUNDS_PER_ITERATION * self.iter_budget {
            let label = if state.in_d {
                state.finalized.and(state.label)
            } else {
                state.informed.values().next().copied()
            };
            return Step::Terminate(DominateVertexOutput {
                in_dominating_set: state.in_d,
                label,
                finalized_iteration: state.finalized,
            });
        }
        let iteration = (ctx.round - 1) / ROUNDS_PER_ITERATION + 1;
        match (ctx.round - 1) % ROUNDS_PER_ITERATION {
            0 => {
                state.labels.clear();
                state.fresh.clear();
                if state.in_d && state.finalized.is_none() {
                    let space = floor_pow(ctx.n as f64, 0.5 + self.epsilon);
                    state.label = Some(ctx.rng.random_range(1..=space));
                }
                let neighbors: Option<Arc<[VertexId]>> = (iteration == 1).then(|| ctx.neighbor_ids.into());
                if let Some(nb) = &neighbors {
                    state.adjacency.insert(ctx.self_id, nb.clone());
                }
                if let Some(l) = state.label {
                    state.labels.insert(ctx.self_id, l);
                }
                if neighbors.is_some() || state.in_d {
                    state.fresh.push((
                        ctx.self_id,
                        DominateRecord {
                            neighbors,
                            label: state.label,
                        },
                    ));
                }
                Self::forward(state, ctx);
            }
            1 | 2 => Self::forward(state, ctx),
            _ => {
                state.fresh.clear();
                if state.in_d && state.finalized.is_none() {
                    let label = state.label.expect("live D-vertex holds a label");
                    if !Self::ball3_conflict(state, ctx.self_id, label) {
                        state.finalized = Some(iteration);
                        ctx.broadcast(DominateMsg::Inform(label));
                    }
                }
            }
        }
        Step::Continue
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DominateResult {
    /// Labels over the whole vertex set of the input graph.
    pub labels: LabelAssignment,
    pub outputs: BTreeMap<VertexId, DominateVertexOutput>,
    pub label_space: u64,
    /// Last iteration in which some `D`-vertex fixed its label.
    pub iterations_used: usize,
    pub trace: RunTrace<DominateVertexOutput>,
}

/// Runs the labeling on `g_a` with dominating set `d`.
pub fn dominate(g_a: &Graph, d: &VertexSet, params: &DominateParams, seed: u64) -> Result<DominateResult, AlgoError> {
    params.validate()?;
    if let Some(&v) = d.iter().find(|&&v| !g_a.contains(v)) {
        return Err(GraphError::NotASubset(v).into());
    }
    if let Some(&v) = g_a
        .vertices()
        .iter()
        .find(|&&v| !d.contains(&v) && !g_a.neighbors(v).expect("own vertex").any(|u| d.contains(&u)))
    {
        return Err(AlgoError::Precondition(format!("vertex {v} is not dominated")));
    }
    let n = params.n_global.unwrap_or(g_a.n());
    let config = EngineConfig::new(params.scheduled_rounds()).with_known_n(n);
    let trace = run(g_a, &DominateProgram::new(d.clone(), params), seed, &config)?;
    DominateResult::from_trace(trace, params.label_space(n), params.iter_budget)
}

impl DominateResult {
    pub(crate) fn from_trace(
        trace: RunTrace<DominateVertexOutput>,
        label_space: u64,
        budget: usize,
    ) -> Result<Self, AlgoError> {
        let outputs: BTreeMap<_, _> = trace.outputs().map(|(v, o)| (v, *o)).collect();
        let live = outputs.values().filter(|o| o.in_dominating_set && o.label.is_none()).count();
        if live > 0 {
            return Err(AlgoError::DominateBudgetExhausted { live, budget });
        }
        if let Some((&v, _)) = outputs.iter().find(|(_, o)| o.label.is_none()) {
            return Err(AlgoError::DominationViolation(v));
        }
        Ok(DominateResult {
            labels: LabelAssignment::new(outputs.iter().map(|(&v, o)| (v, o.label.unwrap())).collect())?,
            iterations_used: outputs.values().filter_map(|o| o.finalized_iteration).max().unwrap_or(0),
            outputs,
            label_space,
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_gnp, path_graph, star_graph};

    fn set(ids: &[u64]) -> VertexSet {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn star_collapses_to_one_cluster() {
        let g = star_graph(6);
        let r = dominate(&g, &set(&[0]), &DominateParams::new(0.25), 3).unwrap();
        let clusters = g.extract_clusters(&r.labels).unwrap();
        assert_eq!(clusters.len(), 1);
        assert!(g.cluster_diameter(&clusters[0]).unwrap() <= 2);
        assert_eq!(r.iterations_used, 1);
    }

    #[test]
    fn round_schedule() {
        let g = star_graph(3);
        for budget in 1..5 {
            let params = DominateParams::new(0.25).with_iter_budget(budget);
            let r = dominate(&g, &set(&[0]), &params, 0).unwrap();
            assert_eq!(r.trace.rounds_executed, 4 * budget + 1);
            assert_eq!(r.trace.communication_rounds(), 4 * budget);
        }
    }

    #[test]
    fn far_apart_dominators_may_share_labels() {
        let g = path_graph(5);
        let params = DominateParams {
            epsilon: 1e-12,
            iter_budget: 1,
            n_global: Some(1),
        };
        assert_eq!(params.label_space(1), 1);
        let r = dominate(&g, &set(&[0, 2, 4]), &params, 0);
        // With a single label, dominators within distance 3 can never settle.
        assert!(matches!(r, Err(AlgoError::DominateBudgetExhausted { .. })));
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        // unreachable from each other: both keep the only label
        let r = dominate(&g, &set(&[0, 2]), &params, 0).unwrap();
        assert_eq!(r.labels.distinct_count(), 1);
    }

    #[test]
    fn dominators_within_three_hops_differ() {
        for seed in 0..10 {
            let g = generate_gnp(60, 0.08, seed);
            let d: VertexSet = g.vertices().iter().copied().filter(|v| v.0 % 3 == 0).collect();
            let isolated_ok: VertexSet = g
                .vertices()
                .iter()
                .copied()
                .filter(|&v| d.contains(&v) || g.neighbors(v).unwrap().any(|u| d.contains(&u)))
                .collect();
            let g = g.induced_subgraph(&isolated_ok).unwrap();
            let d: VertexSet = d.intersection(&g.vertex_set()).copied().collect();
            // sized for a larger network so twenty dominators rarely collide
            let r = dominate(&g, &d, &DominateParams::new(0.25).with_n_global(400), seed).unwrap();
            for &u in &d {
                for &v in &d {
                    if u < v && g.distance(u, v).unwrap().is_some_and(|x| x <= 3) {
                        assert_ne!(r.labels.get(u), r.labels.get(v));
                    }
                }
            }
            for cl in g.extract_clusters(&r.labels).unwrap() {
                assert!(g.cluster_diameter(&cl).unwrap() <= 2, "{cl:?}");
            }
        }
    }

    #[test]
    fn undominated_input_is_rejected() {
        let g = path_graph(5);
        assert!(matches!(
            dominate(&g, &set(&[0]), &DominateParams::new(0.25), 0),
            Err(AlgoError::Precondition(_))
        ));
        assert!(matches!(
            dominate(&g, &set(&[9]), &DominateParams::new(0.25), 0),
            Err(AlgoError::Graph(GraphError::NotASubset(_)))
        ));
    }

    #[test]
    fn non_members_copy_smallest_labeled_neighbor() {
        // 1 is adjacent to both 0 and 2.
        let g = path_graph(3);
        let r = dominate(&g, &set(&[0, 2]), &DominateParams::new(0.25).with_n_global(400), 5).unwrap();
        assert_eq!(r.labels.get(VertexId(1)), r.labels.get(VertexId(0)));
        assert_ne!(r.labels.get(VertexId(0)), r.labels.get(VertexId(2)));
        assert_eq!(r.label_space, 89);
    }
}
