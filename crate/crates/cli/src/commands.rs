use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use localsim::algorithms::{
    approximate, color_bounded_degree, dominate, partition, pipeline, AlgoError, ColorParams, PipelineError,
    PipelineParams, Side,
};
use localsim::engine::{collect_topology, derive_seed, run as run_engine, EngineConfig, EngineError};
use localsim::graph::{
    generate_clique_path, generate_gnp, generate_random_regular, grid_graph, read_graph, read_labels, to_dot,
    write_graph, write_labels, Graph, GraphError, LabelAssignment, NetworkDecomposition,
};
use localsim::verify::{
    trial_harness, verify_coloring, verify_decomposition, verify_decomposition_with, verify_distance3_labels,
    verify_dominating_set, DiameterMode, Experiment, ExperimentSpec, VerifierReport, VerifyError,
};

use crate::{CliError, ExperimentArgs, GenerateArgs, GraphSource, ParamArgs, Procedure, RunArgs, VerifyArgs};

/// The effective configuration echoed into every artifact.
#[derive(Serialize, Debug)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<SourceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    procedure: Option<Procedure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<PipelineParams>,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    experiment: Option<ExperimentSpec>,
    /// Procedure-specific settings such as `d`, `c` or `radius`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    options: BTreeMap<&'static str, Value>,
    outputs: BTreeMap<&'static str, PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

impl RunConfig {
    fn new(command: &'static str, seed: u64, timestamp: bool) -> Self {
        RunConfig {
            command,
            source: None,
            procedure: None,
            params: None,
            seed,
            trials: None,
            experiment: None,
            options: BTreeMap::new(),
            outputs: BTreeMap::new(),
            timestamp: timestamp.then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
        }
    }

    fn output(&mut self, name: &'static str, path: &Option<PathBuf>) {
        if let Some(p) = path {
            self.outputs.insert(name, p.clone());
        }
    }

    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// One-line form for `#` and `//` comments.
    fn comment(&self) -> String {
        format!("config: {}", self.to_json())
    }
}

#[derive(Serialize, Debug, Clone)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum SourceConfig {
    File { path: PathBuf },
    Gnp { n: usize, p: f64, seed: u64 },
    Regular { n: usize, degree: usize, seed: u64 },
    CliquePath { k1: usize, k2: usize, len: usize },
    Grid { rows: usize, cols: usize },
}

fn parse_num<T: FromStr>(flag: &str, s: &str) -> Result<T, CliError> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("invalid value {s:?} for --{flag}")))
}

fn io_err(path: &Path, e: impl Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn graph_err(e: GraphError) -> CliError {
    match e {
        GraphError::Io(m) => CliError::Io(m),
        GraphError::Parse { .. } => CliError::Input {
            kind: "parse",
            message: e.to_string(),
        },
        e => CliError::Input {
            kind: "graph",
            message: e.to_string(),
        },
    }
}

fn algo_err(e: AlgoError) -> CliError {
    if e.is_whp_event() {
        return CliError::Whp {
            kind: e.kind(),
            message: e.to_string(),
        };
    }
    match e {
        AlgoError::Graph(g) => graph_err(g),
        e => CliError::Input {
            kind: e.kind(),
            message: e.to_string(),
        },
    }
}

fn engine_err<O>(e: EngineError<O>) -> CliError {
    algo_err(AlgoError::Engine(e.erase()))
}

fn pipeline_err(e: PipelineError) -> CliError {
    let stage = e.stage;
    match algo_err(e.source) {
        CliError::Whp { kind, message } => CliError::Whp {
            kind,
            message: format!("{stage} stage: {message}"),
        },
        CliError::Input { kind, message } => CliError::Input {
            kind,
            message: format!("{stage} stage: {message}"),
        },
        other => other,
    }
}

fn verify_err(e: VerifyError) -> CliError {
    match e {
        VerifyError::Graph(g) => graph_err(g),
        VerifyError::UnknownExperiment(_) => CliError::Usage(e.to_string()),
        e => CliError::Input {
            kind: "invalid_config",
            message: e.to_string(),
        },
    }
}

fn load_graph(source: &GraphSource, seed: u64) -> Result<(Graph, SourceConfig), CliError> {
    if let Some(path) = &source.graph {
        let g = read_graph(path).map_err(|e| match e {
            GraphError::Io(m) => io_err(path, m),
            e => graph_err(e),
        })?;
        return Ok((g, SourceConfig::File { path: path.clone() }));
    }
    if let Some(v) = &source.gnp {
        let n = parse_num("gnp", &v[0])?;
        let p: f64 = parse_num("gnp", &v[1])?;
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Usage(format!("edge probability {p} outside [0, 1]")));
        }
        return Ok((generate_gnp(n, p, seed), SourceConfig::Gnp { n, p, seed }));
    }
    if let Some(v) = &source.regular {
        let n: usize = parse_num("regular", &v[0])?;
        let degree: usize = parse_num("regular", &v[1])?;
        if degree >= n.max(1) {
            return Err(CliError::Usage(format!("degree {degree} needs more than {n} vertices")));
        }
        return Ok((
            generate_random_regular(n, degree, seed),
            SourceConfig::Regular { n, degree, seed },
        ));
    }
    if let Some(v) = &source.clique_path {
        let k1: usize = parse_num("clique-path", &v[0])?;
        let k2: usize = parse_num("clique-path", &v[1])?;
        let len: usize = parse_num("clique-path", &v[2])?;
        if k1 == 0 || k2 == 0 || len == 0 {
            return Err(CliError::Usage("clique sizes and path length must be at least 1".into()));
        }
        return Ok((generate_clique_path(k1, k2, len), SourceConfig::CliquePath { k1, k2, len }));
    }
    if let Some(v) = &source.grid {
        let rows = parse_num("grid", &v[0])?;
        let cols = parse_num("grid", &v[1])?;
        return Ok((grid_graph(rows, cols), SourceConfig::Grid { rows, cols }));
    }
    Err(CliError::Usage("no graph source given".into()))
}

fn resolve_params(a: &ParamArgs) -> Result<PipelineParams, CliError> {
    let mut p = PipelineParams::with_epsilon(a.epsilon);
    if let Some(mu) = a.mu {
        p.mu = mu;
        p.round_budget = (4.0 / (mu * a.epsilon)).ceil() as usize;
    }
    if let Some(k) = a.k_degree {
        p.k_degree = k;
    }
    if let Some(b) = a.round_budget {
        p.round_budget = b;
    }
    if let Some(b) = a.iter_budget {
        p.iter_budget = b;
    }
    if let Some(c) = a.cluster_cap {
        p.cluster_cap = c;
    }
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| io_err(path, e))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    write_file(path, &text)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

pub fn generate(a: GenerateArgs) -> Result<(), CliError> {
    let seed = a.seed.seed;
    let (g, source) = load_graph(&a.source, seed)?;
    let mut config = RunConfig::new("generate", seed, a.timestamp);
    config.source = Some(source);
    config.output("graph", &a.out);
    let text = write_graph(&g, Some(&config.comment()));
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            println!("wrote graph with {} vertices and {} edges to {}", g.n(), g.m(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// What a procedure hands back for the artifacts and the summary.
struct Outcome {
    result: Value,
    /// Graph the labels live on, when it is not the input graph.
    label_graph: Option<Graph>,
    labels: LabelAssignment,
    reports: BTreeMap<&'static str, VerifierReport>,
    summary: Vec<(&'static str, String)>,
}

fn run_procedure(a: &RunArgs, g: &Graph, params: &PipelineParams, config: &mut RunConfig) -> Result<Outcome, CliError> {
    let seed = a.seed.seed;
    let mut reports = BTreeMap::new();
    let mut summary = Vec::new();
    let out = match a.procedure {
        Procedure::Partition => {
            let r = partition(g, seed).map_err(algo_err)?;
            let g_a = g.induced_subgraph(&r.a).map_err(graph_err)?;
            reports.insert("dominating_set", verify_dominating_set(&g_a, &r.d).map_err(graph_err)?);
            summary.push(("communication rounds", r.trace.communication_rounds().to_string()));
            summary.push(("|A| / |B| / |D|", format!("{} / {} / {}", r.a.len(), r.b.len(), r.d.len())));
            let labels = r
                .outputs
                .iter()
                .map(|(&v, o)| (v, if o.side == Side::A { 1 } else { 2 }))
                .collect();
            Outcome {
                result: to_value(&r),
                label_graph: None,
                labels,
                reports,
                summary,
            }
        }
        Procedure::Color => {
            let cp = ColorParams::new(g.max_degree().max(1), params.epsilon, params.mu)
                .with_round_budget(params.round_budget);
            config.options.insert("delta_bound", json!(cp.delta_bound));
            let r = color_bounded_degree(g, &cp, seed).map_err(algo_err)?;
            reports.insert("coloring", verify_coloring(g, &r.coloring).map_err(graph_err)?);
            summary.push(("communication rounds", r.trace.communication_rounds().to_string()));
            summary.push(("palette", r.palette.to_string()));
            summary.push(("colors used", r.coloring.distinct_count().to_string()));
            Outcome {
                result: to_value(&r),
                label_graph: None,
                labels: r.coloring.clone(),
                reports,
                summary,
            }
        }
        Procedure::Dominate => {
            // same seeds as the first two pipeline stages
            let part = partition(g, derive_seed(seed, 1)).map_err(algo_err)?;
            let g_a = g.induced_subgraph(&part.a).map_err(graph_err)?;
            let dp = params.dominate_params(g.n());
            let r = dominate(&g_a, &part.d, &dp, derive_seed(seed, 2)).map_err(algo_err)?;
            reports.insert(
                "distance3_labels",
                verify_distance3_labels(&g_a, &part.d, &r.labels).map_err(graph_err)?,
            );
            let nd = NetworkDecomposition::new(&g_a, r.labels.clone(), 2, r.label_space).map_err(graph_err)?;
            reports.insert("decomposition", verify_decomposition(&g_a, &nd).map_err(graph_err)?);
            summary.push(("communication rounds", r.trace.communication_rounds().to_string()));
            summary.push(("|A| / |D|", format!("{} / {}", part.a.len(), part.d.len())));
            summary.push(("iterations used", r.iterations_used.to_string()));
            summary.push(("label space", r.label_space.to_string()));
            Outcome {
                result: json!({ "partition": to_value(&part), "dominate": to_value(&r) }),
                label_graph: Some(g_a),
                labels: r.labels.clone(),
                reports,
                summary,
            }
        }
        Procedure::Approximate => {
            let path = a
                .decomposition
                .as_ref()
                .ok_or_else(|| CliError::Usage("approximate needs --decomposition".into()))?;
            let d = a
                .d
                .ok_or_else(|| CliError::Usage("approximate needs --d".into()))?;
            let labels = read_labels(path).map_err(|e| match e {
                GraphError::Io(m) => io_err(path, m),
                e => graph_err(e),
            })?;
            let c = a.c.unwrap_or_else(|| labels.max_label());
            config.options.insert("decomposition", json!(path));
            config.options.insert("d", json!(d));
            config.options.insert("c", json!(c));
            let nd = NetworkDecomposition::new(g, labels, d, c).map_err(graph_err)?;
            let r = approximate(g, &nd, params.cluster_cap).map_err(algo_err)?;
            reports.insert("coloring", verify_coloring(g, &r.coloring).map_err(graph_err)?);
            summary.push(("communication rounds", r.trace.communication_rounds().to_string()));
            summary.push(("clusters", nd.clusters.len().to_string()));
            summary.push(("colors used", r.coloring.distinct_count().to_string()));
            Outcome {
                result: to_value(&r),
                label_graph: None,
                labels: r.coloring.clone(),
                reports,
                summary,
            }
        }
        Procedure::Pipeline => {
            let r = pipeline(g, params, seed).map_err(pipeline_err)?;
            let coloring = r.final_coloring();
            reports.insert("coloring", verify_coloring(g, &coloring).map_err(graph_err)?);
            reports.insert(
                "decomposition",
                verify_decomposition(g, &r.decomposition).map_err(graph_err)?,
            );
            summary.push(("communication rounds", r.trace.communication_rounds().to_string()));
            summary.push(("scheduled rounds", params.scheduled_rounds().to_string()));
            summary.push((
                "decomposition",
                format!("({}, {}) with {} clusters", r.decomposition.d, r.decomposition.c, r.decomposition.clusters.len()),
            ));
            summary.push(("colors used", coloring.distinct_count().to_string()));
            Outcome {
                result: to_value(&r),
                label_graph: None,
                labels: coloring,
                reports,
                summary,
            }
        }
        Procedure::CollectTopology => {
            config.options.insert("radius", json!(a.radius));
            let trace = run_engine(g, &collect_topology(a.radius), seed, &EngineConfig::new(a.radius + 1))
                .map_err(engine_err)?;
            let mismatched = trace
                .outputs()
                .filter(|(v, view)| g.r_hop_neighborhood(*v, a.radius).ok() != Some(view.vertices()))
                .count();
            summary.push(("communication rounds", trace.communication_rounds().to_string()));
            summary.push(("views differing from the r-hop neighborhood", mismatched.to_string()));
            if mismatched > 0 {
                return Err(CliError::Verification(format!(
                    "{mismatched} collected views differ from the r-hop neighborhood"
                )));
            }
            let sizes: LabelAssignment = trace.outputs().map(|(v, view)| (v, view.records.len() as u64)).collect();
            Outcome {
                result: to_value(&trace),
                label_graph: None,
                labels: sizes,
                reports,
                summary,
            }
        }
    };
    Ok(out)
}

pub fn run(a: RunArgs) -> Result<(), CliError> {
    let seed = a.seed.seed;
    let params = resolve_params(&a.params)?;
    let (g, source) = load_graph(&a.source, seed)?;
    let mut config = RunConfig::new("run", seed, a.timestamp);
    config.source = Some(source);
    config.procedure = Some(a.procedure);
    config.params = Some(params.clone());
    config.output("trace", &a.trace);
    config.output("labels", &a.labels);
    config.output("dot", &a.dot);

    let out = run_procedure(&a, &g, &params, &mut config)?;
    let comment = config.comment();
    if let Some(path) = &a.trace {
        let trace = json!({
            "config": config.to_json(),
            "result": out.result,
            "verification": to_value(&out.reports),
        });
        write_json(path, &trace)?;
    }
    if let Some(path) = &a.labels {
        write_file(path, &write_labels(&out.labels, Some(&comment)))?;
    }
    if let Some(path) = &a.dot {
        let host = out.label_graph.as_ref().unwrap_or(&g);
        write_file(path, &to_dot(host, &out.labels, Some(&comment)).map_err(graph_err)?)?;
    }

    println!("procedure: {}", to_value(&a.procedure).as_str().unwrap_or_default());
    println!("graph: {} vertices, {} edges", g.n(), g.m());
    println!("seed: {seed}");
    for (k, v) in &out.summary {
        println!("{k}: {v}");
    }
    for (name, r) in &out.reports {
        println!("verify {name}: {}", r.summary());
    }
    let failed: Vec<String> = out
        .reports
        .iter()
        .filter(|(_, r)| !r.passed)
        .map(|(name, r)| format!("{name}: {}", r.summary()))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}

pub fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let seed = a.seed.seed;
    let (g, source) = load_graph(&a.source, seed)?;
    let mut config = RunConfig::new("verify", seed, a.timestamp);
    config.source = Some(source);
    config.output("report", &a.report);
    let read = |path: &PathBuf| {
        read_labels(path).map_err(|e| match e {
            GraphError::Io(m) => io_err(path, m),
            e => graph_err(e),
        })
    };
    let (name, report) = if let Some(path) = &a.coloring {
        config.options.insert("coloring", json!(path));
        ("coloring", verify_coloring(&g, &read(path)?).map_err(graph_err)?)
    } else if let Some(path) = &a.decomposition {
        let labels = read(path)?;
        let d = a.d.ok_or_else(|| CliError::Usage("--decomposition needs --d".into()))?;
        let c = a.c.unwrap_or_else(|| labels.max_label());
        let mode = if a.weak { DiameterMode::Weak } else { DiameterMode::Strong };
        config.options.insert("decomposition", json!(path));
        config.options.insert("d", json!(d));
        config.options.insert("c", json!(c));
        config.options.insert("weak", json!(a.weak));
        let nd = NetworkDecomposition::new(&g, labels, d, c).map_err(graph_err)?;
        ("decomposition", verify_decomposition_with(&g, &nd, mode).map_err(graph_err)?)
    } else {
        return Err(CliError::Usage("give --coloring or --decomposition".into()));
    };
    if let Some(path) = &a.report {
        write_json(path, &json!({ "config": config.to_json(), "report": to_value(&report) }))?;
    }
    println!("verify {name}: {}", report.summary());
    for (k, v) in &report.measured {
        println!("{k}: {v}");
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{name}: {}", report.summary())))
    }
}

pub fn experiment(a: ExperimentArgs) -> Result<(), CliError> {
    let seed = a.seed.seed;
    let exp = Experiment::from_str(&a.name).map_err(verify_err)?;
    let mut spec = ExperimentSpec::new(exp);
    if let Some(n) = a.n {
        spec.n = n;
    }
    if let Some(p) = a.p {
        spec.p = p;
    }
    if let Some(d) = a.degree {
        spec.degree = d;
    }
    if let Some(r) = a.max_rounds {
        spec.max_rounds = r;
    }
    if let Some(eps) = a.epsilon {
        spec.params = PipelineParams::with_epsilon(eps);
    }
    if let Some(mu) = a.mu {
        spec.params.mu = mu;
        spec.params.round_budget = (4.0 / (mu * spec.params.epsilon)).ceil() as usize;
    }
    if let Some(k) = a.k_degree {
        spec.params.k_degree = k;
    }
    if let Some(b) = a.round_budget {
        spec.params.round_budget = b;
    }
    if let Some(b) = a.iter_budget {
        spec.params.iter_budget = b;
    }
    if let Some(c) = a.cluster_cap {
        spec.params.cluster_cap = c;
    }
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let mut config = RunConfig::new("experiment", seed, a.timestamp);
    config.trials = Some(a.trials);
    config.experiment = Some(spec.clone());
    config.output("csv", &a.csv);
    config.output("json", &a.json);

    let summary = trial_harness(&spec, a.trials, seed).map_err(verify_err)?;
    if let Some(path) = &a.csv {
        write_file(path, &summary.to_csv(Some(&config.comment())).map_err(verify_err)?)?;
    }
    if let Some(path) = &a.json {
        write_json(path, &json!({ "config": config.to_json(), "summary": to_value(&summary) }))?;
    }
    println!("experiment: {}", spec.experiment);
    println!("trials: {} (seeds {}..={})", summary.trials, seed, seed.wrapping_add(a.trials as u64 - 1));
    println!("successes: {} ({:.2})", summary.successes, summary.success_rate());
    println!("whp failures: {}", summary.whp_failures);
    for (k, d) in &summary.distributions {
        println!("{k}: min {} mean {:.2} max {}", d.min, d.mean, d.max);
    }
    Ok(())
}
