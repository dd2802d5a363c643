//! The end-to-end construction: split the graph, label each side, merge the
//! labelings into a decomposition of the whole graph and color from it.
//!
//! Stages run back to back on a fixed schedule known to every vertex:
//!
//! | stage | communication rounds |
//! |---|---|
//! | partition | 1 |
//! | dominate on `G(A)` | `4 * iter_budget` |
//! | color on `G(B)` | `round_budget` |
//! | approximate (`d = 2`) | 3 |
//!
//! Vertices outside a stage's part idle through it. Merging is local.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::approximate::run_approximate;
use super::color::{run_color, ColorResult};
use super::dominate::{DominateProgram, DominateResult};
use super::{merge_decompositions, partition, AlgoError, ApproximateOutput, ColorParams, DominateParams};
use crate::engine::{derive_seed, run, EngineConfig, RunTrace, VertexRecord};
use crate::graph::{Graph, LabelAssignment, NetworkDecomposition, VertexId, VertexSet};
use crate::numeric::degree_threshold;

/// Cluster diameter the merged decomposition is claimed to have.
pub const PIPELINE_DIAMETER: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub epsilon: f64,
    /// Exponent with `t >= n^mu`; only sizes the default color budget.
    pub mu: f64,
    /// Constant in the degree threshold `t = floor(k * sqrt(n) * log2 n)`.
    pub k_degree: f64,
    pub round_budget: usize,
    pub iter_budget: usize,
    /// Largest cluster the final stage colors exactly.
    pub cluster_cap: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams::with_epsilon(0.25)
    }
}

impl PipelineParams {
    /// Defaults for a given epsilon: `mu = 1/2`, `k_degree = 2`, round budget
    /// `ceil(4 / (mu * eps))`, iteration budget `ceil(4 / eps)`, cluster cap 128.
    pub fn with_epsilon(epsilon: f64) -> Self {
        let mu = 0.5;
        PipelineParams {
            epsilon,
            mu,
            k_degree: 2.0,
            round_budget: (4.0 / (mu * epsilon)).ceil() as usize,
            iter_budget: (4.0 / epsilon).ceil() as usize,
            cluster_cap: 128,
        }
    }

    pub fn validate(&self) -> Result<(), AlgoError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(AlgoError::Precondition(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(AlgoError::Precondition(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.k_degree >= 1.0 && self.k_degree.is_finite()) {
            return Err(AlgoError::Precondition(format!("k_degree must be at least 1, got {}", self.k_degree)));
        }
        if self.round_budget == 0 || self.iter_budget == 0 || self.cluster_cap == 0 {
            return Err(AlgoError::Precondition("budgets and cluster cap must be at least 1".into()));
        }
        Ok(())
    }

    /// `t = floor(k_degree * sqrt(n) * log2 n)`.
    pub fn degree_threshold(&self, n: usize) -> u64 {
        degree_threshold(self.k_degree, n)
    }

    pub fn dominate_params(&self, n: usize) -> DominateParams {
        DominateParams::new(self.epsilon)
            .with_iter_budget(self.iter_budget)
            .with_n_global(n)
    }

    pub fn color_params(&self, n: usize) -> ColorParams {
        ColorParams::new(self.degree_threshold(n) as usize, self.epsilon, self.mu).with_round_budget(self.round_budget)
    }

    /// Label bound of the merged decomposition: `max(2 L, 2 P + 1)` for
    /// `L` dominate labels and `P` colors.
    pub fn label_bound(&self, n: usize) -> u64 {
        let l = self.dominate_params(n).label_space(n);
        let p = self.color_params(n).palette();
        (2 * l).max(2 * p + 1)
    }

    /// Communication rounds of a full run. Depends on the parameters only.
    pub fn scheduled_rounds(&self) -> usize {
        1 + 4 * self.iter_budget + self.round_budget + PIPELINE_DIAMETER + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Partition,
    Dominate,
    Color,
    Merge,
    Approximate,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Partition => "partition",
            Stage::Dominate => "dominate",
            Stage::Color => "color",
            Stage::Merge => "merge",
            Stage::Approximate => "approximate",
        })
    }
}

#[derive(Debug, Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    pub source: AlgoError,
}

impl PipelineError {
    pub fn is_whp_event(&self) -> bool {
        self.source.is_whp_event()
    }
}

fn at<E: Into<AlgoError>>(stage: Stage) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError {
        stage,
        source: e.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    /// Vertices that took part.
    pub vertices: usize,
    /// First global round of the stage.
    pub first_round: usize,
    /// Communication rounds reserved for the stage by the schedule.
    pub scheduled_rounds: usize,
    /// Communication rounds the stage actually needed.
    pub used_rounds: usize,
    pub messages: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineRun {
    pub decomposition: NetworkDecomposition,
    pub outputs: BTreeMap<VertexId, ApproximateOutput>,
    /// All stages on one global round axis.
    pub trace: RunTrace<ApproximateOutput>,
    pub stages: Vec<StageReport>,
    pub a: VertexSet,
    pub b: VertexSet,
    pub d: VertexSet,
    pub degree_threshold: u64,
    /// Largest degree in `G(B)`.
    pub b_max_degree: usize,
    pub dominate_iterations: usize,
    pub color_rounds: usize,
}

impl PipelineRun {
    pub fn final_coloring(&self) -> LabelAssignment {
        self.outputs.iter().map(|(&v, o)| (v, o.final_color)).collect()
    }
}

struct Timeline {
    offset: usize,
    messages: Vec<u64>,
    stages: Vec<StageReport>,
}

impl Timeline {
    fn add<O>(&mut self, stage: Stage, vertices: usize, scheduled: usize, trace: &RunTrace<O>) {
        for (i, &m) in trace.messages_per_round.iter().enumerate() {
            self.messages[self.offset + i] += m;
        }
        self.stages.push(StageReport {
            stage,
            vertices,
            first_round: self.offset + 1,
            scheduled_rounds: scheduled,
            used_rounds: trace.communication_rounds(),
            messages: trace.total_messages(),
        });
        self.offset += scheduled;
    }
}

/// Runs every stage on `g`. Each stage draws its randomness from its own
/// seed derived from `seed`.
pub fn pipeline(g: &Graph, params: &PipelineParams, seed: u64) -> Result<PipelineRun, PipelineError> {
    params.validate().map_err(at(Stage::Partition))?;
    let n = g.n();
    if n < 4 {
        return Err(PipelineError {
            stage: Stage::Partition,
            source: AlgoError::Precondition(format!("pipeline needs at least 4 vertices, got {n}")),
        });
    }
    let total = params.scheduled_rounds();
    let mut timeline = Timeline {
        offset: 0,
        messages: vec![0; total + 1],
        stages: Vec::new(),
    };

    let part = partition(g, derive_seed(seed, 1)).map_err(at(Stage::Partition))?;
    timeline.add(Stage::Partition, n, 1, &part.trace);
    let t = params.degree_threshold(n);
    let g_a = g.induced_subgraph(&part.a).map_err(at(Stage::Partition))?;
    let g_b = g.induced_subgraph(&part.b).map_err(at(Stage::Partition))?;
    if g_b.max_degree() as u64 > t {
        return Err(PipelineError {
            stage: Stage::Partition,
            source: AlgoError::DegreeBoundViolated {
                max_degree: g_b.max_degree(),
                bound: t,
            },
        });
    }

    let dp = params.dominate_params(n);
    let dom_trace = run(
        &g_a,
        &DominateProgram::new(part.d.clone(), &dp),
        derive_seed(seed, 2),
        &EngineConfig::new(dp.scheduled_rounds()).with_known_n(n),
    )
    .map_err(at(Stage::Dominate))?;
    timeline.add(Stage::Dominate, g_a.n(), 4 * params.iter_budget, &dom_trace);
    let dom = DominateResult::from_trace(dom_trace, dp.label_space(n), dp.iter_budget)
        .map_err(at(Stage::Dominate))?;

    let cp = params.color_params(n);
    let color_trace = run_color(&g_b, &cp, derive_seed(seed, 3), Some(n)).map_err(at(Stage::Color))?;
    timeline.add(Stage::Color, g_b.n(), params.round_budget, &color_trace);
    let col = ColorResult::from_trace(color_trace, &cp).map_err(at(Stage::Color))?;

    let merged = merge_decompositions(g, &dom.labels, &col.coloring).map_err(at(Stage::Merge))?;
    let nd = NetworkDecomposition::new(g, merged, PIPELINE_DIAMETER, params.label_bound(n))
        .map_err(at(Stage::Merge))?;
    let report = crate::verify::verify_decomposition(g, &nd).map_err(at(Stage::Merge))?;
    if !report.passed {
        return Err(PipelineError {
            stage: Stage::Merge,
            source: AlgoError::InvalidDecomposition(report.summary()),
        });
    }

    let approx = run_approximate(g, &nd, params.cluster_cap, Some(n)).map_err(at(Stage::Approximate))?;
    let offset = timeline.offset;
    timeline.add(Stage::Approximate, n, PIPELINE_DIAMETER + 1, &approx.trace);

    let trace = RunTrace {
        seed,
        rounds_executed: offset + approx.trace.rounds_executed,
        per_vertex: approx
            .trace
            .per_vertex
            .iter()
            .map(|r| VertexRecord {
                id: r.id,
                terminated_round: r.terminated_round.map(|x| x + offset),
                output: r.output,
            })
            .collect(),
        messages_per_round: timeline.messages,
    };
    Ok(PipelineRun {
        decomposition: nd,
        outputs: approx.outputs,
        trace,
        stages: timeline.stages,
        b_max_degree: g_b.max_degree(),
        a: part.a,
        b: part.b,
        d: part.d,
        degree_threshold: t,
        dominate_iterations: dom.iterations_used,
        color_rounds: col.rounds_used,
    })
}
