//! Synchronous round engine for the LOCAL model.
//!
//! Each vertex runs the same [`VertexProgram`]. In round `i` a live vertex
//! sees its own state, `n`, its neighbor IDs and the messages its neighbors
//! sent in round `i - 1`; whatever it sends is delivered at the start of round
//! `i + 1`. All vertices act on the same snapshot, so the execution order
//! inside a round cannot influence the result. A vertex that terminates in
//! round `i` may still send in round `i`, and never again.
//!
//! Round accounting: `rounds_executed` is the round in which the last vertex
//! terminated. Messages sent in round `i` are consumed in round `i + 1`, so a
//! run needs `rounds_executed - 1` communication rounds.

mod rng;
mod topology;

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};

pub use rng::{derive_seed, derive_vertex_rng, VertexRng};
pub use topology::{collect_topology, Flood, LocalView, TopologyCollector, TopologyMsg, TopologyRecord};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message<M> {
    pub src: VertexId,
    pub dst: VertexId,
    pub payload: M,
}

/// What a vertex knows before round 1.
#[derive(Clone, Copy, Debug)]
pub struct InitContext<'a> {
    pub self_id: VertexId,
    pub n: usize,
    pub neighbor_ids: &'a [VertexId],
}

/// Everything a vertex may look at during one round.
pub struct VertexContext<'a, M> {
    pub self_id: VertexId,
    pub n: usize,
    /// Ascending.
    pub neighbor_ids: &'a [VertexId],
    /// Sorted by sender ID.
    pub inbox: &'a [Message<M>],
    /// 1-based.
    pub round: usize,
    pub rng: &'a mut VertexRng,
    outbox: Vec<(VertexId, M)>,
}

impl<M: Clone> VertexContext<'_, M> {
    pub fn send(&mut self, dst: VertexId, payload: M) {
        self.outbox.push((dst, payload));
    }

    pub fn broadcast(&mut self, payload: M) {
        for &dst in self.neighbor_ids {
            self.outbox.push((dst, payload.clone()));
        }
    }

    pub fn is_neighbor(&self, v: VertexId) -> bool {
        self.neighbor_ids.binary_search(&v).is_ok()
    }
}

pub enum Step<O> {
    Continue,
    Terminate(O),
}

/// Per-vertex state machine. Implementations must be deterministic given the
/// state, the inbox, the round index and the vertex's random stream.
pub trait VertexProgram: Sync {
    type State: Clone + Send + Sync + PartialEq + fmt::Debug;
    type Msg: Clone + Send + Sync;
    type Output: Clone + Send + Sync;

    fn init(&self, ctx: &InitContext<'_>) -> Self::State;

    fn round(&self, ctx: &mut VertexContext<'_, Self::Msg>, state: &mut Self::State) -> Step<Self::Output>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord<O> {
    pub id: VertexId,
    pub terminated_round: Option<usize>,
    pub output: Option<O>,
}

/// Outcome of one engine invocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTrace<O> {
    pub seed: u64,
    #[serde(rename = "rounds")]
    pub rounds_executed: usize,
    pub per_vertex: Vec<VertexRecord<O>>,
    pub messages_per_round: Vec<u64>,
}

impl<O> RunTrace<O> {
    /// Message exchanges the run needed; zero when every vertex stopped in round 1.
    pub fn communication_rounds(&self) -> usize {
        self.rounds_executed.saturating_sub(1)
    }

    pub fn output(&self, v: VertexId) -> Option<&O> {
        self.per_vertex
            .binary_search_by_key(&v, |r| r.id)
            .ok()
            .and_then(|i| self.per_vertex[i].output.as_ref())
    }

    pub fn outputs(&self) -> impl Iterator<Item = (VertexId, &O)> {
        self.per_vertex
            .iter()
            .filter_map(|r| r.output.as_ref().map(|o| (r.id, o)))
    }

    pub fn total_messages(&self) -> u64 {
        self.messages_per_round.iter().sum()
    }

    pub fn all_terminated(&self) -> bool {
        self.per_vertex.iter().all(|r| r.terminated_round.is_some())
    }

    pub fn map_outputs<P>(self, mut f: impl FnMut(O) -> P) -> RunTrace<P> {
        RunTrace {
            seed: self.seed,
            rounds_executed: self.rounds_executed,
            per_vertex: self
                .per_vertex
                .into_iter()
                .map(|r| VertexRecord {
                    id: r.id,
                    terminated_round: r.terminated_round,
                    output: r.output.map(&mut f),
                })
                .collect(),
            messages_per_round: self.messages_per_round,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError<O> {
    #[error("locality violation: vertex {src} sent to non-neighbor {dst} in round {round}")]
    LocalityViolation {
        src: VertexId,
        dst: VertexId,
        round: usize,
    },
    #[error("local computation budget exceeded by vertex {vertex} in round {round} ({elapsed:?})")]
    LocalBudgetExceeded {
        vertex: VertexId,
        round: usize,
        elapsed: Duration,
    },
    #[error("{live} vertices still running after {max_rounds} rounds")]
    Timeout {
        max_rounds: usize,
        live: usize,
        partial: Box<RunTrace<O>>,
    },
    #[error("max_rounds must be at least 1")]
    ZeroRounds,
}

impl<O> EngineError<O> {
    /// Drops the partial trace so the error can cross output types.
    pub fn erase(self) -> EngineError<()> {
        match self {
            EngineError::LocalityViolation { src, dst, round } => {
                EngineError::LocalityViolation { src, dst, round }
            }
            EngineError::LocalBudgetExceeded { vertex, round, elapsed } => {
                EngineError::LocalBudgetExceeded { vertex, round, elapsed }
            }
            EngineError::Timeout { max_rounds, live, partial } => EngineError::Timeout {
                max_rounds,
                live,
                partial: Box::new((*partial).map_outputs(|_| ())),
            },
            EngineError::ZeroRounds => EngineError::ZeroRounds,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecutionOrder {
    /// Vertices of a round run on the rayon pool.
    #[default]
    Parallel,
    /// Ascending vertex ID on the calling thread.
    Sequential,
    /// A fresh permutation per round, drawn from this seed.
    Shuffled(u64),
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub max_rounds: usize,
    /// Wall-clock limit for one vertex's computation in one round.
    pub local_budget: Option<Duration>,
    /// Value of `n` reported to vertices; defaults to the vertex count.
    pub known_n: Option<usize>,
    pub order: ExecutionOrder,
}

impl EngineConfig {
    pub fn new(max_rounds: usize) -> Self {
        EngineConfig {
            max_rounds,
            local_budget: None,
            known_n: None,
            order: ExecutionOrder::default(),
        }
    }

    pub fn with_order(mut self, order: ExecutionOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_known_n(mut self, n: usize) -> Self {
        self.known_n = Some(n);
        self
    }

    pub fn with_local_budget(mut self, budget: Duration) -> Self {
        self.local_budget = Some(budget);
        self
    }
}

struct Slot<P: VertexProgram> {
    id: VertexId,
    neighbors: Vec<VertexId>,
    state: P::State,
    rng: VertexRng,
    inbox: Vec<Message<P::Msg>>,
    terminated: Option<(usize, P::Output)>,
}

enum Act<O, M> {
    Ok {
        outbox: Vec<(VertexId, M)>,
        done: Option<O>,
    },
    OverBudget(Duration),
}

fn act<P: VertexProgram>(
    program: &P,
    slot: &mut Slot<P>,
    n: usize,
    round: usize,
    budget: Option<Duration>,
) -> Act<P::Output, P::Msg> {
    let inbox = std::mem::take(&mut slot.inbox);
    let mut ctx = VertexContext {
        self_id: slot.id,
        n,
        neighbor_ids: &slot.neighbors,
        inbox: &inbox,
        round,
        rng: &mut slot.rng,
        outbox: Vec::new(),
    };
    let start = budget.map(|_| Instant::now());
    let step = program.round(&mut ctx, &mut slot.state);
    if let (Some(budget), Some(start)) = (budget, start) {
        let elapsed = start.elapsed();
        if elapsed > budget {
            return Act::OverBudget(elapsed);
        }
    }
    Act::Ok {
        outbox: ctx.outbox,
        done: match step {
            Step::Continue => None,
            Step::Terminate(o) => Some(o),
        },
    }
}

/// Runs `program` on `g` until every vertex terminates.
pub fn run<P: VertexProgram>(
    g: &Graph,
    program: &P,
    seed: u64,
    config: &EngineConfig,
) -> Result<RunTrace<P::Output>, EngineError<P::Output>> {
    execute(g, program, seed, config, None).map(|(trace, _)| trace)
}

/// Runs exactly `rounds` rounds (or fewer if everyone terminates first) and
/// returns each vertex's state at that point, in vertex order. Terminated
/// vertices report their final state.
pub fn run_until<P: VertexProgram>(
    g: &Graph,
    program: &P,
    seed: u64,
    rounds: usize,
    config: &EngineConfig,
) -> Result<Vec<(VertexId, P::State)>, EngineError<P::Output>> {
    execute(g, program, seed, config, Some(rounds)).map(|(_, states)| states)
}

fn execute<P: VertexProgram>(
    g: &Graph,
    program: &P,
    seed: u64,
    config: &EngineConfig,
    stop_after: Option<usize>,
) -> Result<(RunTrace<P::Output>, Vec<(VertexId, P::State)>), EngineError<P::Output>> {
    if config.max_rounds == 0 {
        return Err(EngineError::ZeroRounds);
    }
    let n = config.known_n.unwrap_or(g.n());
    let mut slots: Vec<Slot<P>> = (0..g.n())
        .map(|i| {
            let id = g.id_at(i);
            let neighbors: Vec<VertexId> =
                g.neighbor_indices(i).iter().map(|&j| g.id_at(j)).collect();
            let state = program.init(&InitContext {
                self_id: id,
                n,
                neighbor_ids: &neighbors,
            });
            Slot {
                id,
                neighbors,
                state,
                rng: derive_vertex_rng(seed, id),
                inbox: Vec::new(),
                terminated: None,
            }
        })
        .collect();

    let mut order_rng = match config.order {
        ExecutionOrder::Shuffled(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        _ => None,
    };
    let mut messages_per_round = Vec::new();
    let mut live = slots.len();
    let mut round = 0;
    let limit = stop_after.map_or(config.max_rounds, |r| r.min(config.max_rounds));

    while live > 0 && round < limit {
        round += 1;
        let budget = config.local_budget;
        let mut acts: Vec<Option<Act<P::Output, P::Msg>>> = match config.order {
            ExecutionOrder::Parallel => slots
                .par_iter_mut()
                .map(|s| s.terminated.is_none().then(|| act(program, s, n, round, budget)))
                .collect(),
            ExecutionOrder::Sequential => slots
                .iter_mut()
                .map(|s| s.terminated.is_none().then(|| act(program, s, n, round, budget)))
                .collect(),
            ExecutionOrder::Shuffled(_) => {
                let mut perm: Vec<usize> = (0..slots.len()).collect();
                if let Some(r) = order_rng.as_mut() {
                    perm.shuffle(r);
                }
                let mut acts: Vec<_> = (0..slots.len()).map(|_| None).collect();
                for i in perm {
                    let s = &mut slots[i];
                    acts[i] = s.terminated.is_none().then(|| act(program, s, n, round, budget));
                }
                acts
            }
        };

        let mut sent = 0u64;
        for i in 0..slots.len() {
            let Some(a) = acts[i].take() else { continue };
            let (outbox, done) = match a {
                Act::OverBudget(elapsed) => {
                    return Err(EngineError::LocalBudgetExceeded {
                        vertex: slots[i].id,
                        round,
                        elapsed,
                    })
                }
                Act::Ok { outbox, done } => (outbox, done),
            };
            let src = slots[i].id;
            for (dst, payload) in outbox {
                if slots[i].neighbors.binary_search(&dst).is_err() {
                    return Err(EngineError::LocalityViolation { src, dst, round });
                }
                sent += 1;
                let j = g.index_of(dst).expect("neighbor is a vertex");
                if slots[j].terminated.is_none() {
                    slots[j].inbox.push(Message { src, dst, payload });
                }
            }
            if let Some(o) = done {
                slots[i].terminated = Some((round, o));
                live -= 1;
            }
        }
        // Senders were visited in ascending ID order, so inboxes are sorted.
        for s in &mut slots {
            if s.terminated.is_some() {
                s.inbox.clear();
            }
        }
        messages_per_round.push(sent);
    }

    let rounds_executed = slots
        .iter()
        .filter_map(|s| s.terminated.as_ref().map(|t| t.0))
        .max()
        .unwrap_or(0);
    let timed_out = live > 0 && stop_after.is_none();
    let mut states = Vec::with_capacity(slots.len());
    let per_vertex = slots
        .into_iter()
        .map(|s| {
            if stop_after.is_some() {
                states.push((s.id, s.state));
            }
            let (terminated_round, output) = match s.terminated {
                Some((r, o)) => (Some(r), Some(o)),
                None => (None, None),
            };
            VertexRecord {
                id: s.id,
                terminated_round,
                output,
            }
        })
        .collect();
    let trace = RunTrace {
        seed,
        rounds_executed: if timed_out { round } else { rounds_executed },
        per_vertex,
        messages_per_round,
    };
    if timed_out {
        return Err(EngineError::Timeout {
            max_rounds: config.max_rounds,
            live,
            partial: Box::new(trace),
        });
    }
    Ok((trace, states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, generate_gnp, path_graph};
    use rand::Rng;

    struct EchoId;

    impl VertexProgram for EchoId {
        type State = ();
        type Msg = ();
        type Output = VertexId;
        fn init(&self, _: &InitContext<'_>) {}
        fn round(&self, ctx: &mut VertexContext<'_, ()>, _: &mut ()) -> Step<VertexId> {
            Step::Terminate(ctx.self_id)
        }
    }

    /// Round 1: send own ID. Round 2: output the smallest ID received.
    struct LearnNeighbor;

    impl VertexProgram for LearnNeighbor {
        type State = ();
        type Msg = VertexId;
        type Output = Option<VertexId>;
        fn init(&self, _: &InitContext<'_>) {}
        fn round(&self, ctx: &mut VertexContext<'_, VertexId>, _: &mut ()) -> Step<Option<VertexId>> {
            if ctx.round == 1 {
                ctx.broadcast(ctx.self_id);
                Step::Continue
            } else {
                Step::Terminate(ctx.inbox.iter().map(|m| m.payload).min())
            }
        }
    }

    struct Rogue;

    impl VertexProgram for Rogue {
        type State = ();
        type Msg = ();
        type Output = ();
        fn init(&self, _: &InitContext<'_>) {}
        fn round(&self, ctx: &mut VertexContext<'_, ()>, _: &mut ()) -> Step<()> {
            if ctx.self_id == VertexId(0) {
                ctx.send(VertexId(2), ());
            }
            Step::Terminate(())
        }
    }

    struct Forever;

    impl VertexProgram for Forever {
        type State = ();
        type Msg = ();
        type Output = ();
        fn init(&self, _: &InitContext<'_>) {}
        fn round(&self, ctx: &mut VertexContext<'_, ()>, _: &mut ()) -> Step<()> {
            if ctx.self_id == VertexId(0) {
                Step::Continue
            } else {
                Step::Terminate(())
            }
        }
    }

    /// Gossips random draws and sums what it hears; sensitive to both message
    /// contents and RNG streams.
    struct Gossip;

    impl VertexProgram for Gossip {
        type State = u64;
        type Msg = u64;
        type Output = u64;
        fn init(&self, ctx: &InitContext<'_>) -> u64 {
            ctx.self_id.0
        }
        fn round(&self, ctx: &mut VertexContext<'_, u64>, acc: &mut u64) -> Step<u64> {
            for m in ctx.inbox {
                *acc = acc.wrapping_mul(31).wrapping_add(m.payload ^ m.src.0);
            }
            if ctx.round == 5 {
                return Step::Terminate(*acc);
            }
            let draw: u64 = ctx.rng.random();
            ctx.broadcast(draw ^ *acc);
            Step::Continue
        }
    }

    #[test]
    fn immediate_termination_takes_one_round() {
        let g = path_graph(4);
        let trace = run(&g, &EchoId, 0, &EngineConfig::new(10)).unwrap();
        assert_eq!(trace.rounds_executed, 1);
        assert_eq!(trace.communication_rounds(), 0);
        for (v, out) in trace.outputs() {
            assert_eq!(v, *out);
        }
    }

    #[test]
    fn learning_a_neighbor_takes_two_rounds() {
        let g = complete_graph(2);
        let trace = run(&g, &LearnNeighbor, 0, &EngineConfig::new(10)).unwrap();
        assert_eq!(trace.rounds_executed, 2);
        assert_eq!(trace.output(VertexId(0)), Some(&Some(VertexId(1))));
        assert_eq!(trace.output(VertexId(1)), Some(&Some(VertexId(0))));
        assert_eq!(trace.messages_per_round, vec![2, 0]);
    }

    #[test]
    fn non_neighbor_send_is_rejected() {
        let g = path_graph(3);
        match run(&g, &Rogue, 0, &EngineConfig::new(3)) {
            Err(EngineError::LocalityViolation { src, dst, round }) => {
                assert_eq!((src, dst, round), (VertexId(0), VertexId(2), 1));
            }
            other => panic!("expected locality violation, got {other:?}"),
        }
    }

    #[test]
    fn timeout_carries_partial_trace() {
        let g = path_graph(3);
        match run(&g, &Forever, 0, &EngineConfig::new(4)) {
            Err(EngineError::Timeout { live, partial, .. }) => {
                assert_eq!(live, 1);
                assert_eq!(partial.rounds_executed, 4);
                assert_eq!(partial.per_vertex[0].terminated_round, None);
                assert_eq!(partial.per_vertex[1].terminated_round, Some(1));
            }
            other => panic!("expected timeout, got {other:?}"),
        }
        assert!(matches!(run(&g, &Forever, 0, &EngineConfig::new(0)), Err(EngineError::ZeroRounds)));
    }

    #[test]
    fn execution_order_does_not_matter() {
        let g = generate_gnp(40, 0.15, 9);
        let base = run(&g, &Gossip, 77, &EngineConfig::new(10).with_order(ExecutionOrder::Sequential)).unwrap();
        for order in [ExecutionOrder::Parallel, ExecutionOrder::Shuffled(1), ExecutionOrder::Shuffled(2)] {
            let other = run(&g, &Gossip, 77, &EngineConfig::new(10).with_order(order)).unwrap();
            assert_eq!(base, other, "{order:?}");
        }
        let reseeded = run(&g, &Gossip, 78, &EngineConfig::new(10)).unwrap();
        assert_ne!(base, reseeded);
    }

    #[test]
    fn run_until_snapshots_states() {
        let g = path_graph(3);
        let states = run_until(&g, &Gossip, 5, 2, &EngineConfig::new(10)).unwrap();
        assert_eq!(states.len(), 3);
        let full = run_until(&g, &Gossip, 5, 100, &EngineConfig::new(10)).unwrap();
        let trace = run(&g, &Gossip, 5, &EngineConfig::new(10)).unwrap();
        for ((v, s), (w, out)) in full.iter().zip(trace.outputs()) {
            assert_eq!((v, s), (&w, out));
        }
    }

    #[test]
    fn local_budget_is_enforced() {
        struct Slow;
        impl VertexProgram for Slow {
            type State = ();
            type Msg = ();
            type Output = ();
            fn init(&self, _: &InitContext<'_>) {}
            fn round(&self, _: &mut VertexContext<'_, ()>, _: &mut ()) -> Step<()> {
                std::thread::sleep(Duration::from_millis(20));
                Step::Terminate(())
            }
        }
        let g = path_graph(2);
        let cfg = EngineConfig::new(2).with_local_budget(Duration::from_millis(1));
        assert!(matches!(run(&g, &Slow, 0, &cfg), Err(EngineError::LocalBudgetExceeded { round: 1, .. })));
    }

    #[test]
    fn trace_json_field_names() {
        let g = path_graph(2);
        let trace = run(&g, &EchoId, 3, &EngineConfig::new(1)).unwrap();
        let json = serde_json::to_value(&trace).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "seed": 3,
                "rounds": 1,
                "per_vertex": [
                    {"id": 0, "terminated_round": 1, "output": 0},
                    {"id": 1, "terminated_round": 1, "output": 1}
                ],
                "messages_per_round": [0]
            })
        );
    }
}
