//! Random split of the vertex set into a part A with a small dominating set
//! and a part B of small degree.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AlgoError, Side};
use crate::engine::{run, EngineConfig, InitContext, RunTrace, Step, VertexContext, VertexProgram};
use crate::graph::{Graph, VertexId, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionOutput {
    pub side: Side,
    /// Member of the dominating set D.
    pub marked: bool,
}

/// Each vertex marks itself with probability `1/sqrt(n)` (or a fixed
/// probability), marked vertices tell their neighbors, and a vertex joins A
/// iff it is marked or heard from a marked neighbor.
#[derive(Clone, Debug, Default)]
pub struct PartitionProgram {
    probability: Option<f64>,
}

impl PartitionProgram {
    pub fn new() -> Self {
        PartitionProgram { probability: None }
    }

    /// Overrides the marking probability (for tests and experiments).
    pub fn with_probability(p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "marking probability {p} outside [0, 1]");
        PartitionProgram { probability: Some(p) }
    }
}

impl VertexProgram for PartitionProgram {
    type State = bool;
    type Msg = ();
    type Output = PartitionOutput;

    fn init(&self, _: &InitContext<'_>) -> bool {
        false
    }

    fn round(&self, ctx: &mut VertexContext<'_, ()>, marked: &mut bool) -> Step<PartitionOutput> {
        if ctx.round == 1 {
            let p = self.probability.unwrap_or_else(|| 1.0 / (ctx.n as f64).sqrt());
            *marked = ctx.rng.random_bool(p.min(1.0));
            if *marked {
                ctx.broadcast(());
            }
            return Step::Continue;
        }
        let side = if *marked || !ctx.inbox.is_empty() { Side::A } else { Side::B };
        Step::Terminate(PartitionOutput { side, marked: *marked })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionResult {
    pub a: VertexSet,
    pub b: VertexSet,
    /// The marked vertices.
    pub d: VertexSet,
    pub outputs: BTreeMap<VertexId, PartitionOutput>,
    pub trace: RunTrace<PartitionOutput>,
}

impl PartitionResult {
    fn from_trace(trace: RunTrace<PartitionOutput>) -> Self {
        let outputs: BTreeMap<_, _> = trace.outputs().map(|(v, o)| (v, *o)).collect();
        let pick = |f: &dyn Fn(&PartitionOutput) -> bool| outputs.iter().filter(|(_, o)| f(o)).map(|(v, _)| *v).collect();
        PartitionResult {
            a: pick(&|o| o.side == Side::A),
            b: pick(&|o| o.side == Side::B),
            d: pick(&|o| o.marked),
            outputs,
            trace,
        }
    }
}

pub fn partition(g: &Graph, seed: u64) -> Result<PartitionResult, AlgoError> {
    partition_with(g, &PartitionProgram::new(), seed)
}

pub fn partition_with(g: &Graph, program: &PartitionProgram, seed: u64) -> Result<PartitionResult, AlgoError> {
    if g.n() < 2 {
        return Err(AlgoError::Precondition(format!("partition needs at least 2 vertices, got {}", g.n())));
    }
    let trace = run(g, program, seed, &EngineConfig::new(2))?;
    Ok(PartitionResult::from_trace(trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, generate_gnp, Graph};

    #[test]
    fn one_communication_round() {
        let g = generate_gnp(50, 0.1, 3);
        let r = partition(&g, 9).unwrap();
        assert_eq!(r.trace.communication_rounds(), 1);
        assert_eq!(r.trace.rounds_executed, 2);
    }

    #[test]
    fn sides_partition_and_d_dominates_a() {
        for seed in 0..20 {
            let g = generate_gnp(80, 0.05, seed);
            let r = partition(&g, seed).unwrap();
            assert!(r.a.is_disjoint(&r.b));
            assert_eq!(r.a.len() + r.b.len(), g.n());
            assert!(r.d.is_subset(&r.a));
            for &v in &r.a {
                assert!(r.d.contains(&v) || g.neighbors(v).unwrap().any(|u| r.d.contains(&u)));
            }
            for &v in &r.b {
                assert!(g.neighbors(v).unwrap().all(|u| !r.d.contains(&u)));
            }
        }
    }

    #[test]
    fn edgeless_graph_a_is_marked_set() {
        let g = Graph::from_edges(30, &[]).unwrap();
        for seed in 0..5 {
            let r = partition(&g, seed).unwrap();
            assert_eq!(r.a, r.d);
        }
    }

    #[test]
    fn clique_with_a_mark_has_empty_b() {
        let g = complete_graph(16);
        let mut seen_mark = false;
        for seed in 0..20 {
            let r = partition(&g, seed).unwrap();
            if !r.d.is_empty() {
                seen_mark = true;
                assert!(r.b.is_empty());
            }
        }
        assert!(seen_mark);
    }

    #[test]
    fn forced_probabilities() {
        let g = generate_gnp(20, 0.2, 1);
        let all = partition_with(&g, &PartitionProgram::with_probability(1.0), 0).unwrap();
        assert_eq!(all.d.len(), 20);
        let none = partition_with(&g, &PartitionProgram::with_probability(0.0), 0).unwrap();
        assert_eq!(none.b.len(), 20);
    }

    #[test]
    fn rejects_single_vertex() {
        let g = Graph::from_edges(1, &[]).unwrap();
        assert!(matches!(partition(&g, 0), Err(AlgoError::Precondition(_))));
    }
}
