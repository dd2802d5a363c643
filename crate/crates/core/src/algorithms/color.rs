//! Randomized coloring of a graph whose maximum degree is at most a known
//! bound `delta`, with `ceil(delta^(1+eps))` colors.
//!
//! In every round each live vertex proposes a uniformly random color. A
//! proposal that matches neither a neighbor's concurrent proposal nor a color
//! a neighbor already fixed becomes final; the vertex announces it and stops.
//! Colliding proposals are dropped on both sides.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AlgoError;
use crate::engine::{run, EngineConfig, InitContext, RunTrace, Step, VertexContext, VertexProgram};
use crate::graph::{Graph, LabelAssignment, VertexId};
use crate::numeric::ceil_pow;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorParams {
    /// Upper bound on the maximum degree.
    pub delta_bound: usize,
    pub epsilon: f64,
    pub mu: f64,
    /// Proposal rounds before a live vertex gives up.
    pub round_budget: usize,
}

impl ColorParams {
    /// Budget defaults to `ceil(4 / (mu * eps))`.
    pub fn new(delta_bound: usize, epsilon: f64, mu: f64) -> Self {
        ColorParams {
            delta_bound,
            epsilon,
            mu,
            round_budget: (4.0 / (mu * epsilon)).ceil() as usize,
        }
    }

    pub fn with_round_budget(mut self, budget: usize) -> Self {
        self.round_budget = budget;
        self
    }

    /// Number of colors, `ceil(delta_bound^(1+eps))`, at least 1.
    pub fn palette(&self) -> u64 {
        ceil_pow(self.delta_bound as f64, 1.0 + self.epsilon)
    }

    pub fn validate(&self) -> Result<(), AlgoError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(AlgoError::Precondition(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(AlgoError::Precondition(format!("mu must be positive, got {}", self.mu)));
        }
        if self.round_budget == 0 {
            return Err(AlgoError::Precondition("round budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorMsg {
    Propose(u64),
    Final(u64),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColorState {
    proposal: u64,
    /// Colors fixed by neighbors that already stopped.
    taken: BTreeSet<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorVertexOutput {
    /// `None` when the round budget ran out.
    pub color: Option<u64>,
    /// Proposals drawn, counting the successful one.
    pub proposals: usize,
}

#[derive(Clone, Debug)]
pub struct ColorProgram {
    pub palette: u64,
    pub round_budget: usize,
}

impl ColorProgram {
    pub fn new(params: &ColorParams) -> Self {
        ColorProgram {
            palette: params.palette(),
            round_budget: params.round_budget,
        }
    }

    fn propose(&self, ctx: &mut VertexContext<'_, ColorMsg>, state: &mut ColorState) {
        state.proposal = ctx.rng.random_range(1..=self.palette);
        ctx.broadcast(ColorMsg::Propose(state.proposal));
    }
}

impl VertexProgram for ColorProgram {
    type State = ColorState;
    type Msg = ColorMsg;
    type Output = ColorVertexOutput;

    fn init(&self, _: &InitContext<'_>) -> ColorState {
        ColorState::default()
    }

    fn round(&self, ctx: &mut VertexContext<'_, ColorMsg>, state: &mut ColorState) -> Step<ColorVertexOutput> {
        if ctx.round == 1 {
            if ctx.neighbor_ids.is_empty() {
                let color = ctx.rng.random_range(1..=self.palette);
                return Step::Terminate(ColorVertexOutput {
                    color: Some(color),
                    proposals: 1,
                });
            }
            self.propose(ctx, state);
            return Step::Continue;
        }
        let mut clash = false;
        for m in ctx.inbox {
            match m.payload {
                ColorMsg::Final(c) => {
                    state.taken.insert(c);
                }
                ColorMsg::Propose(c) => clash |= c == state.proposal,
            }
        }
        let proposals = ctx.round - 1;
        if !clash && !state.taken.contains(&state.proposal) {
            ctx.broadcast(ColorMsg::Final(state.proposal));
            return Step::Terminate(ColorVertexOutput {
                color: Some(state.proposal),
                proposals,
            });
        }
        if proposals < self.round_budget {
            self.propose(ctx, state);
            Step::Continue
        } else {
            Step::Terminate(ColorVertexOutput { color: None, proposals })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ColorResult {
    pub coloring: LabelAssignment,
    pub palette: u64,
    /// Largest number of proposals any vertex needed.
    pub rounds_used: usize,
    pub trace: RunTrace<ColorVertexOutput>,
}

/// Runs the coloring to completion. Vertices left uncolored when the budget
/// runs out make the whole run fail with [`AlgoError::ColorBudgetExhausted`].
pub fn color_bounded_degree(g: &Graph, params: &ColorParams, seed: u64) -> Result<ColorResult, AlgoError> {
    let trace = run_color(g, params, seed, None)?;
    ColorResult::from_trace(trace, params)
}

pub(crate) fn run_color(
    g: &Graph,
    params: &ColorParams,
    seed: u64,
    known_n: Option<usize>,
) -> Result<RunTrace<ColorVertexOutput>, AlgoError> {
    params.validate()?;
    if g.max_degree() > params.delta_bound {
        return Err(AlgoError::Precondition(format!(
            "max degree {} exceeds the degree bound {}",
            g.max_degree(),
            params.delta_bound
        )));
    }
    let mut config = EngineConfig::new(params.round_budget + 1);
    if let Some(n) = known_n {
        config = config.with_known_n(n);
    }
    Ok(run(g, &ColorProgram::new(params), seed, &config)?)
}

impl ColorResult {
    pub(crate) fn from_trace(trace: RunTrace<ColorVertexOutput>, params: &ColorParams) -> Result<Self, AlgoError> {
        let live = trace.outputs().filter(|(_, o)| o.color.is_none()).count();
        if live > 0 {
            return Err(AlgoError::ColorBudgetExhausted {
                live,
                budget: params.round_budget,
            });
        }
        let colors: BTreeMap<VertexId, u64> = trace.outputs().map(|(v, o)| (v, o.color.unwrap())).collect();
        Ok(ColorResult {
            coloring: LabelAssignment::new(colors)?,
            palette: params.palette(),
            rounds_used: trace.outputs().map(|(_, o)| o.proposals).max().unwrap_or(0),
            trace,
        })
    }
}
