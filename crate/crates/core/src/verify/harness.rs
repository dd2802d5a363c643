//! Repeated seeded trials of one named experiment.
//!
//! Trial `i` uses seed `base_seed + i`. The random graph of a trial is drawn
//! from a seed derived from the trial seed, the algorithm gets the trial seed
//! itself. Trials run in parallel and are reported in order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    brute_force_chromatic, verify_coloring, verify_decomposition, verify_distance3_labels, verify_dominating_set,
    VerifyError,
};
use crate::algorithms::{
    color_bounded_degree, dominate, exact_min_coloring, partition, pipeline, AlgoError, ColorParams, PipelineParams,
};
use crate::engine::derive_seed;
use crate::graph::{generate_gnp, generate_random_regular, Graph};

const GRAPH_SALT: u64 = 0x6772_6170_68;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// `|D| <= 2 sqrt(n)` after partitioning G(n, p).
    PartitionDominatingSize,
    /// Max degree of `G(B)` at most `floor(k_degree sqrt(n) log2 n)`.
    PartitionBDegree,
    /// Coloring a random regular graph finishes within `max_rounds` and is legal.
    ColorTermination,
    /// Labeling `G(A)` gives clusters of strong diameter at most 2.
    DominateDiameter,
    /// The full pipeline yields a legal coloring and a valid decomposition.
    PipelineLegal,
    /// Exact solver and subset oracle agree on chi for small random graphs.
    OracleEquivalence,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment::PartitionDominatingSize,
    Experiment::PartitionBDegree,
    Experiment::ColorTermination,
    Experiment::DominateDiameter,
    Experiment::PipelineLegal,
    Experiment::OracleEquivalence,
];

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::PartitionDominatingSize => "partition-dominating-size",
            Experiment::PartitionBDegree => "partition-b-degree",
            Experiment::ColorTermination => "color-termination",
            Experiment::DominateDiameter => "dominate-diameter",
            Experiment::PipelineLegal => "pipeline-legal",
            Experiment::OracleEquivalence => "oracle-equivalence",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = VerifyError;

    /// Case-insensitive.
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        let lower = s.to_ascii_lowercase();
        EXPERIMENTS
            .iter()
            .copied()
            .find(|e| e.name() == lower)
            .ok_or_else(|| VerifyError::UnknownExperiment(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    /// Vertex count (the largest vertex count for oracle-equivalence).
    pub n: usize,
    /// Edge probability of G(n, p).
    pub p: f64,
    /// Degree of the random regular graphs of color-termination.
    pub degree: usize,
    /// Communication-round limit of color-termination.
    pub max_rounds: usize,
    pub params: PipelineParams,
}

impl ExperimentSpec {
    /// The configuration each experiment is usually run with.
    pub fn new(experiment: Experiment) -> Self {
        let mut spec = ExperimentSpec {
            experiment,
            n: 400,
            p: 0.1,
            degree: 20,
            max_rounds: 10,
            params: PipelineParams::default(),
        };
        match experiment {
            Experiment::ColorTermination => {
                spec.n = 500;
                spec.params.epsilon = 0.5;
            }
            Experiment::OracleEquivalence => {
                spec.n = 8;
                spec.p = 0.5;
            }
            _ => {}
        }
        spec
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: String| Err(VerifyError::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("edge probability {} outside [0, 1]", self.p));
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.experiment == Experiment::OracleEquivalence && self.n > 16 {
            return bad(format!("oracle-equivalence graphs are capped at 16 vertices, got {}", self.n));
        }
        if self.experiment == Experiment::ColorTermination && self.max_rounds == 0 {
            return bad("max_rounds must be at least 1".into());
        }
        self.params
            .validate()
            .map_err(|e| VerifyError::InvalidConfig(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    /// Kind of the with-high-probability failure that ended the trial, if any.
    pub whp_event: Option<String>,
    /// Any other error, or a summary of verifier violations.
    pub error: Option<String>,
    pub measured: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    pub samples: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub spec: ExperimentSpec,
    pub trials: usize,
    pub successes: usize,
    pub whp_failures: usize,
    pub seeds: Vec<u64>,
    pub records: Vec<TrialRecord>,
    pub distributions: BTreeMap<String, Distribution>,
}

impl TrialSummary {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Largest observed value of a measured quantity.
    pub fn max_of(&self, key: &str) -> Option<u64> {
        self.distributions.get(key).map(|d| d.max)
    }

    /// One row per trial. `comment` lines are written first, prefixed by `# `.
    pub fn to_csv(&self, comment: Option<&str>) -> Result<String, VerifyError> {
        let keys: Vec<&String> = self.distributions.keys().collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["trial", "seed", "success", "whp_event", "error"];
        header.extend(keys.iter().map(|k| k.as_str()));
        w.write_record(&header).map_err(|e| VerifyError::Csv(e.to_string()))?;
        for r in &self.records {
            let mut row = vec![
                r.trial.to_string(),
                r.seed.to_string(),
                r.success.to_string(),
                r.whp_event.clone().unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ];
            row.extend(keys.iter().map(|k| r.measured.get(*k).map(u64::to_string).unwrap_or_default()));
            w.write_record(&row).map_err(|e| VerifyError::Csv(e.to_string()))?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| VerifyError::Csv(e.to_string()))?)
            .expect("csv output is utf-8");
        let mut out = String::new();
        for line in comment.into_iter().flat_map(str::lines) {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&body);
        Ok(out)
    }
}

/// Runs `trials` independent trials of `spec`.
///
/// ```
/// use localsim::verify::{trial_harness, Experiment, ExperimentSpec};
///
/// let mut spec = ExperimentSpec::new(Experiment::PartitionDominatingSize);
/// spec.n = 100;
/// let summary = trial_harness(&spec, 10, 0).unwrap();
/// assert_eq!(summary.seeds, (0..10).collect::<Vec<u64>>());
/// assert!(summary.successes <= summary.trials);
/// ```
pub fn trial_harness(spec: &ExperimentSpec, trials: usize, base_seed: u64) -> Result<TrialSummary, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::InvalidConfig("trials must be at least 1".into()));
    }
    spec.validate()?;
    let seeds: Vec<u64> = (0..trials as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let records: Vec<TrialRecord> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| run_trial(spec, i, seed))
        .collect::<Result<_, _>>()?;

    let mut samples: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for r in &records {
        for (k, &v) in &r.measured {
            samples.entry(k.clone()).or_default().push(v);
        }
    }
    let distributions = samples
        .into_iter()
        .map(|(k, s)| {
            let d = Distribution {
                min: *s.iter().min().unwrap(),
                max: *s.iter().max().unwrap(),
                mean: s.iter().sum::<u64>() as f64 / s.len() as f64,
                samples: s,
            };
            (k, d)
        })
        .collect();
    Ok(TrialSummary {
        spec: spec.clone(),
        trials,
        successes: records.iter().filter(|r| r.success).count(),
        whp_failures: records.iter().filter(|r| r.whp_event.is_some()).count(),
        seeds,
        records,
        distributions,
    })
}

struct Outcome {
    success: bool,
    whp_event: Option<String>,
    error: Option<String>,
    measured: Vec<(&'static str, u64)>,
}

impl Outcome {
    fn check(success: bool, measured: Vec<(&'static str, u64)>) -> Self {
        Outcome {
            success,
            whp_event: None,
            error: None,
            measured,
        }
    }

    fn failed(e: &AlgoError, measured: Vec<(&'static str, u64)>) -> Self {
        Outcome {
            success: false,
            whp_event: e.is_whp_event().then(|| e.kind().to_string()),
            error: (!e.is_whp_event()).then(|| e.to_string()),
            measured,
        }
    }

    fn violated(summary: String, measured: Vec<(&'static str, u64)>) -> Self {
        Outcome {
            success: false,
            whp_event: None,
            error: Some(summary),
            measured,
        }
    }
}

fn gnp_for(spec: &ExperimentSpec, seed: u64) -> Graph {
    generate_gnp(spec.n, spec.p, derive_seed(seed, GRAPH_SALT))
}

fn run_trial(spec: &ExperimentSpec, trial: usize, seed: u64) -> Result<TrialRecord, VerifyError> {
    let n = spec.n;
    let outcome = match spec.experiment {
        Experiment::PartitionDominatingSize => {
            let g = gnp_for(spec, seed);
            let bound = (2.0 * (n as f64).sqrt()).floor() as u64;
            match partition(&g, seed) {
                Ok(r) => {
                    let size = r.d.len() as u64;
                    Outcome::check(size <= bound, vec![("dominating_set_size", size), ("bound", bound)])
                }
                Err(e) => Outcome::failed(&e, vec![]),
            }
        }
        Experiment::PartitionBDegree => {
            let g = gnp_for(spec, seed);
            let bound = spec.params.degree_threshold(n);
            match partition(&g, seed) {
                Ok(r) => {
                    let deg = g.induced_subgraph(&r.b)?.max_degree() as u64;
                    Outcome::check(
                        deg <= bound,
                        vec![("b_max_degree", deg), ("bound", bound), ("b_size", r.b.len() as u64)],
                    )
                }
                Err(e) => Outcome::failed(&e, vec![]),
            }
        }
        Experiment::ColorTermination => {
            let g = generate_random_regular(n, spec.degree, derive_seed(seed, GRAPH_SALT));
            let params = ColorParams::new(spec.degree, spec.params.epsilon, spec.params.mu).with_round_budget(spec.max_rounds);
            match color_bounded_degree(&g, &params, seed) {
                Ok(r) => {
                    let report = verify_coloring(&g, &r.coloring)?;
                    let within = r.coloring.max_label() <= r.palette;
                    let measured = vec![
                        ("rounds", r.trace.communication_rounds() as u64),
                        ("color_count", r.coloring.distinct_count() as u64),
                        ("palette", r.palette),
                    ];
                    if report.passed && within {
                        Outcome::check(true, measured)
                    } else {
                        Outcome::violated(report.summary(), measured)
                    }
                }
                Err(e) => Outcome::failed(&e, vec![("palette", params.palette())]),
            }
        }
        Experiment::DominateDiameter => {
            let g = gnp_for(spec, seed);
            let part = partition(&g, seed).map_err(|e| VerifyError::InvalidConfig(e.to_string()))?;
            let g_a = g.induced_subgraph(&part.a)?;
            let dp = spec.params.dominate_params(n);
            let dom_report = verify_dominating_set(&g_a, &part.d)?;
            match dominate(&g_a, &part.d, &dp, derive_seed(seed, 2)) {
                Ok(r) => {
                    let mut clusters_ok = true;
                    let mut max_diam = 0;
                    for cl in g_a.extract_clusters(&r.labels)? {
                        let dm = g_a.cluster_diameter(&cl)?;
                        max_diam = max_diam.max(dm);
                        clusters_ok &= dm <= 2;
                    }
                    let d3 = verify_distance3_labels(&g_a, &part.d, &r.labels)?;
                    let measured = vec![
                        ("max_cluster_diameter", max_diam as u64),
                        ("a_size", g_a.n() as u64),
                        ("dominating_set_size", part.d.len() as u64),
                        ("iterations", r.iterations_used as u64),
                        ("label_count", r.labels.distinct_count() as u64),
                    ];
                    if clusters_ok && d3.passed && dom_report.passed {
                        Outcome::check(true, measured)
                    } else {
                        let why = if d3.passed { dom_report.summary() } else { d3.summary() };
                        Outcome::violated(format!("max cluster diameter {max_diam}; {why}"), measured)
                    }
                }
                Err(e) => Outcome::failed(&e, vec![("dominating_set_size", part.d.len() as u64)]),
            }
        }
        Experiment::PipelineLegal => {
            let g = gnp_for(spec, seed);
            match pipeline(&g, &spec.params, seed) {
                Ok(run) => {
                    let coloring = verify_coloring(&g, &run.final_coloring())?;
                    let decomposition = verify_decomposition(&g, &run.decomposition)?;
                    let measured = vec![
                        ("rounds", run.trace.rounds_executed as u64),
                        ("color_count", coloring.measured("color_count").unwrap_or(0)),
                        ("label_count", decomposition.measured("label_count").unwrap_or(0)),
                        ("max_cluster_diameter", decomposition.measured("max_cluster_diameter").unwrap_or(0)),
                        ("max_cluster_size", decomposition.measured("max_cluster_size").unwrap_or(0)),
                        ("c", run.decomposition.c),
                        ("dominating_set_size", run.d.len() as u64),
                        ("b_max_degree", run.b_max_degree as u64),
                    ];
                    if coloring.passed && decomposition.passed {
                        Outcome::check(true, measured)
                    } else {
                        Outcome::violated(format!("{}; {}", coloring.summary(), decomposition.summary()), measured)
                    }
                }
                Err(e) => Outcome::failed(&e.source, vec![]),
            }
        }
        Experiment::OracleEquivalence => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, GRAPH_SALT));
            let size = rng.random_range(1..=n);
            let g = generate_gnp(size, spec.p, rng.random());
            let (_, exact) = exact_min_coloring(&g, size).map_err(|e| VerifyError::InvalidConfig(e.to_string()))?;
            let (oracle, _) = brute_force_chromatic(&g, size)?;
            Outcome::check(
                exact == oracle,
                vec![("n", size as u64), ("exact_chi", exact as u64), ("oracle_chi", oracle as u64)],
            )
        }
    };
    Ok(TrialRecord {
        trial,
        seed,
        success: outcome.success,
        whp_event: outcome.whp_event,
        error: outcome.error,
        measured: outcome.measured.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for &e in EXPERIMENTS {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert_eq!("partition-B-degree".parse::<Experiment>().unwrap(), Experiment::PartitionBDegree);
        assert!(matches!("nope".parse::<Experiment>(), Err(VerifyError::UnknownExperiment(_))));
    }

    #[test]
    fn summary_bookkeeping() {
        let mut spec = ExperimentSpec::new(Experiment::PartitionBDegree);
        spec.n = 100;
        let s = trial_harness(&spec, 12, 40).unwrap();
        assert_eq!(s.trials, 12);
        assert_eq!(s.records.len(), 12);
        assert_eq!(s.seeds[0], 40);
        assert_eq!(s.records[11].seed, 51);
        assert_eq!(s.distributions["b_max_degree"].samples.len(), 12);
        assert_eq!(s, trial_harness(&spec, 12, 40).unwrap());
    }

    #[test]
    fn csv_has_one_row_per_trial() {
        let mut spec = ExperimentSpec::new(Experiment::OracleEquivalence);
        spec.n = 6;
        let s = trial_harness(&spec, 20, 0).unwrap();
        assert_eq!(s.successes, 20);
        let csv = s.to_csv(Some("experiment oracle-equivalence")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# experiment oracle-equivalence");
        assert!(lines[1].starts_with("trial,seed,success,whp_event,error,"));
        assert_eq!(lines.len(), 22);
    }

    #[test]
    fn rejects_bad_config() {
        let spec = ExperimentSpec::new(Experiment::PipelineLegal);
        assert!(trial_harness(&spec, 0, 0).is_err());
        let mut spec = ExperimentSpec::new(Experiment::PipelineLegal);
        spec.p = 1.5;
        assert!(matches!(trial_harness(&spec, 1, 0), Err(VerifyError::InvalidConfig(_))));
    }

    #[test]
    fn small_pipeline_trials_are_legal() {
        let mut spec = ExperimentSpec::new(Experiment::PipelineLegal);
        spec.n = 60;
        let s = trial_harness(&spec, 8, 0).unwrap();
        for r in &s.records {
            assert!(r.success || r.whp_event.is_some(), "{r:?}");
        }
    }
}
