//! Monte-Carlo evaluation of the routing schemes.
//!
//! Every run draws a graph (or reuses a fixed topology), a source and a
//! destination, builds the structures of every scheme once, and then for each
//! failure rate draws one scenario that all schemes face. The EDP baseline is
//! always simulated so that hop counts can be conditioned on its success.
//!
//! Runs execute in parallel. Precomputation is timed afterwards in a serial
//! pass so that measurements do not compete for cores.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tree_route_core::rng::{derive_seed, seeded};
use tree_route_core::routing::default_ttl;
use tree_route_core::{
    build_structures, clustered_failures, compile_rules, edge_connectivity, erdos_renyi,
    erdos_renyi_giant, random_failures, random_regular, simulate, FailureModel, FailureScenario,
    Graph, Mode, NodeId, Outcome, RoutingStructures,
};

use crate::error::{Error, Result};
use crate::topology::Topology;

const STREAM_GRAPH: u64 = 0;
const STREAM_PAIR: u64 = 1;
const STREAM_SCENARIO: u64 = 2;

pub const DEFAULT_RUNS: usize = 1000;
pub const DEFAULT_REGULAR_RUNS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphFamily {
    ErdosRenyi {
        n: usize,
        p: f64,
        /// Keep the largest component instead of resampling disconnected graphs.
        #[serde(default)]
        giant: bool,
    },
    Regular {
        n: usize,
        delta: usize,
    },
    Graphml {
        path: PathBuf,
    },
}

impl GraphFamily {
    pub fn describe(&self) -> String {
        match self {
            GraphFamily::ErdosRenyi { n, p, giant: false } => format!("erdos-renyi n={n} p={p}"),
            GraphFamily::ErdosRenyi { n, p, giant: true } => format!("erdos-renyi n={n} p={p} (giant)"),
            GraphFamily::Regular { n, delta } => format!("regular n={n} delta={delta}"),
            GraphFamily::Graphml { path } => format!("graphml {}", path.display()),
        }
    }
}

fn all_schemes() -> Vec<Mode> {
    Mode::ALL.to_vec()
}

fn enabled() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: GraphFamily,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Mode>,
    #[serde(default = "FailureModel::clustered")]
    pub failure_model: FailureModel,
    pub rates: Vec<f64>,
    /// Defaults to 200 for regular (data-center) graphs and 1000 otherwise.
    #[serde(default)]
    pub runs: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// When off, precompute times are reported as zero and outputs are
    /// byte-for-byte reproducible.
    #[serde(default = "enabled")]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(family: GraphFamily, rates: Vec<f64>) -> Self {
        ExperimentConfig {
            family,
            schemes: all_schemes(),
            failure_model: FailureModel::clustered(),
            rates,
            runs: None,
            seed: 0,
            timing: true,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
    }

    pub fn runs(&self) -> usize {
        self.runs.unwrap_or(match self.family {
            GraphFamily::Regular { .. } => DEFAULT_REGULAR_RUNS,
            _ => DEFAULT_RUNS,
        })
    }

    /// Every problem with the configuration, not just the first.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self.family {
            GraphFamily::ErdosRenyi { n, p, .. } => {
                if n < 2 {
                    out.push(format!("erdos-renyi n must be at least 2, got {n}"));
                }
                if !(0.0..=1.0).contains(&p) {
                    out.push(format!("erdos-renyi p must lie in [0, 1], got {p}"));
                }
            }
            GraphFamily::Regular { n, delta } => {
                if delta == 0 || delta >= n {
                    out.push(format!("regular degree must satisfy 1 <= delta < n, got n={n} delta={delta}"));
                }
                if n * delta % 2 == 1 {
                    out.push(format!("regular n*delta must be even, got n={n} delta={delta}"));
                }
            }
            GraphFamily::Graphml { .. } => {}
        }
        if self.schemes.is_empty() {
            out.push("at least one scheme is required".into());
        }
        let distinct: BTreeSet<Mode> = self.schemes.iter().copied().collect();
        if distinct.len() != self.schemes.len() {
            out.push("schemes must not repeat".into());
        }
        if self.rates.is_empty() {
            out.push("the rate grid must not be empty".into());
        }
        for &r in &self.rates {
            if !(0.0..=1.0).contains(&r) {
                out.push(format!("failure rate {r} outside [0, 1]"));
            }
        }
        if let FailureModel::Clustered { delta, .. } = self.failure_model {
            if !(0.0..=1.0).contains(&delta) {
                out.push(format!("clustered delta {delta} outside [0, 1]"));
            }
        }
        if self.runs == Some(0) {
            out.push("runs must be at least 1".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

/// Outcome of one scheme on one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scheme: Mode,
    pub rate: f64,
    pub run: usize,
    pub source: u32,
    pub destination: u32,
    pub links: usize,
    pub failed: usize,
    pub delivered: bool,
    /// `delivered`, or the failure reason.
    pub outcome: String,
    /// Hop count of a delivered packet.
    pub hops: Option<usize>,
    /// Link traversals made, delivered or not.
    pub traversals: usize,
    pub edp_delivered: bool,
    pub edp_hops: Option<usize>,
    pub shortest_edp: usize,
    pub precompute_ms: f64,
    pub structure_edges: usize,
    pub trees: usize,
    pub graph_attempts: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub scheme: Mode,
    pub rate: f64,
    pub resilience: f64,
    pub avg_hops_edp_success: Option<f64>,
    pub mean_precompute_ms: f64,
    pub runs: usize,
}

pub const AGGREGATE_HEADER: &str = "scheme,rate,resilience,avg_hops_edp_success,mean_precompute_ms,runs";

#[derive(Clone, Debug, PartialEq)]
pub struct Results {
    pub metrics: Vec<MetricRow>,
    /// Ordered by scheme, rate, run.
    pub records: Vec<RunRecord>,
}

impl Results {
    pub fn metric(&self, scheme: Mode, rate: f64) -> Option<&MetricRow> {
        self.metrics.iter().find(|m| m.scheme == scheme && m.rate == rate)
    }
}

/// Aggregates records per (scheme, rate), in order of first appearance.
pub fn aggregate(records: &[RunRecord]) -> Vec<MetricRow> {
    let mut keys: Vec<(Mode, u64)> = Vec::new();
    for r in records {
        let key = (r.scheme, r.rate.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(scheme, bits)| {
            let group: Vec<&RunRecord> =
                records.iter().filter(|r| r.scheme == scheme && r.rate.to_bits() == bits).collect();
            let runs = group.len();
            let delivered = group.iter().filter(|r| r.delivered).count();
            let hops: Vec<usize> =
                group.iter().filter(|r| r.edp_delivered).filter_map(|r| r.hops).collect();
            let avg_hops = (!hops.is_empty())
                .then(|| hops.iter().map(|&h| h as f64).sum::<f64>() / hops.len() as f64);
            MetricRow {
                scheme,
                rate: f64::from_bits(bits),
                resilience: delivered as f64 / runs as f64,
                avg_hops_edp_success: avg_hops,
                mean_precompute_ms: group.iter().map(|r| r.precompute_ms).sum::<f64>() / runs as f64,
                runs,
            }
        })
        .collect()
}

struct Instance {
    graph: Graph,
    source: NodeId,
    destination: NodeId,
    attempts: u32,
}

fn draw_graph(family: &GraphFamily, fixed: Option<&Graph>, seed: u64) -> Result<(Graph, u32)> {
    let generated = match *family {
        GraphFamily::ErdosRenyi { n, p, giant: false } => erdos_renyi(n, p, seed)?,
        GraphFamily::ErdosRenyi { n, p, giant: true } => erdos_renyi_giant(n, p, seed)?,
        GraphFamily::Regular { n, delta } => random_regular(n, delta, seed)?,
        GraphFamily::Graphml { .. } => {
            return Ok((fixed.expect("topology loaded before the runs").clone(), 0));
        }
    };
    Ok((generated.graph, generated.attempts))
}

/// Uniform ordered pair of distinct nodes.
pub fn draw_pair(n: usize, seed: u64) -> (NodeId, NodeId) {
    use rand::Rng;
    let mut rng = seeded(seed);
    let s = rng.gen_range(0..n);
    let mut d = rng.gen_range(0..n - 1);
    if d >= s {
        d += 1;
    }
    (NodeId::new(s), NodeId::new(d))
}

pub fn draw_scenario(
    g: &Graph,
    d: NodeId,
    model: FailureModel,
    rate: f64,
    connectivity: usize,
    seed: u64,
) -> Result<FailureScenario> {
    Ok(match model {
        FailureModel::Random => random_failures(g, rate, connectivity, seed)?,
        FailureModel::Clustered { delta, decay } => clustered_failures(g, d, rate, delta, decay, seed)?,
    })
}

fn structures_for(g: &Graph, s: NodeId, d: NodeId) -> Result<Vec<RoutingStructures>> {
    Mode::ALL.iter().map(|&m| Ok(build_structures(g, s, d, m)?)).collect()
}

fn mode_slot(mode: Mode) -> usize {
    Mode::ALL.iter().position(|&m| m == mode).expect("known mode")
}

/// Records of one run, indexed `[rate][scheme]` in configuration order.
fn simulate_run(
    cfg: &ExperimentConfig,
    fixed: Option<&Graph>,
    run: usize,
) -> Result<(Instance, Vec<Vec<RunRecord>>)> {
    let (graph, attempts) = draw_graph(&cfg.family, fixed, derive_seed(cfg.seed, &[STREAM_GRAPH, run as u64]))?;
    let (s, d) = draw_pair(graph.node_count(), derive_seed(cfg.seed, &[STREAM_PAIR, run as u64]));
    let structures = structures_for(&graph, s, d)?;
    let tables: Vec<_> = structures.iter().map(|rs| compile_rules(&graph, rs)).collect();
    let connectivity = match cfg.failure_model {
        FailureModel::Random => edge_connectivity(&graph),
        FailureModel::Clustered { .. } => 0,
    };
    let ttl = default_ttl(&graph);
    let mut per_rate = Vec::with_capacity(cfg.rates.len());
    for &rate in &cfg.rates {
        let seed = derive_seed(cfg.seed, &[STREAM_SCENARIO, run as u64, rate.to_bits()]);
        let scenario = draw_scenario(&graph, d, cfg.failure_model, rate, connectivity, seed)?;
        let traces: Vec<_> =
            tables.iter().map(|t| simulate(&graph, t, &scenario.failed, ttl)).collect();
        let edp = &traces[mode_slot(Mode::Edp)];
        let records = cfg
            .schemes
            .iter()
            .map(|&scheme| {
                let slot = mode_slot(scheme);
                let trace = &traces[slot];
                RunRecord {
                    scheme,
                    rate,
                    run,
                    source: s.0,
                    destination: d.0,
                    links: graph.edge_count(),
                    failed: scenario.failed.len(),
                    delivered: trace.delivered(),
                    outcome: match trace.outcome {
                        Outcome::Delivered => "delivered".into(),
                        Outcome::Failed(reason) => reason.as_str().into(),
                    },
                    hops: trace.hop_count(),
                    traversals: trace.hops.len(),
                    edp_delivered: edp.delivered(),
                    edp_hops: edp.hop_count(),
                    shortest_edp: structures[slot].edps.paths[0].len(),
                    precompute_ms: 0.0,
                    structure_edges: structures[slot].structure_edges(),
                    trees: structures[slot].tree_count(),
                    graph_attempts: attempts,
                }
            })
            .collect();
        per_rate.push(records);
    }
    Ok((Instance { graph, source: s, destination: d, attempts }, per_rate))
}

/// Wall-clock time of `build_structures`, in milliseconds, averaged over
/// `reps` repetitions.
pub fn time_precompute(g: &Graph, s: NodeId, d: NodeId, mode: Mode, reps: usize) -> Result<f64> {
    let reps = reps.max(1);
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(build_structures(g, s, d, mode)?);
    }
    Ok(start.elapsed().as_secs_f64() * 1e3 / reps as f64)
}

fn load_fixed(family: &GraphFamily) -> Result<Option<Graph>> {
    match family {
        GraphFamily::Graphml { path } => Ok(Some(Topology::load(path)?.graph)),
        _ => Ok(None),
    }
}

fn thread_pool(jobs: Option<usize>) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .expect("thread pool")
}

/// Runs the configured experiment on `jobs` worker threads (all cores when
/// `None`).
pub fn run_experiment(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<Results> {
    cfg.validate()?;
    let fixed = load_fixed(&cfg.family)?;
    let runs = cfg.runs();
    let outcomes: Vec<(Instance, Vec<Vec<RunRecord>>)> = thread_pool(jobs).install(|| {
        (0..runs)
            .into_par_iter()
            .map(|run| simulate_run(cfg, fixed.as_ref(), run))
            .collect::<Result<_>>()
    })?;

    let mut timings = vec![vec![0.0; cfg.schemes.len()]; runs];
    if cfg.timing {
        for (run, (inst, _)) in outcomes.iter().enumerate() {
            for (i, &scheme) in cfg.schemes.iter().enumerate() {
                timings[run][i] = time_precompute(&inst.graph, inst.source, inst.destination, scheme, 1)?;
            }
        }
    }

    let mut records = Vec::with_capacity(runs * cfg.rates.len() * cfg.schemes.len());
    for i in 0..cfg.schemes.len() {
        for r in 0..cfg.rates.len() {
            for (run, (inst, per_rate)) in outcomes.iter().enumerate() {
                let mut rec = per_rate[r][i].clone();
                debug_assert_eq!(rec.graph_attempts, inst.attempts);
                rec.precompute_ms = timings[run][i];
                records.push(rec);
            }
        }
    }
    Ok(Results { metrics: aggregate(&records), records })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv { path: path.into(), source })
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for row in rows {
        w.serialize(row).map_err(|source| Error::Csv { path: path.into(), source })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|source| Error::Csv { path: path.into(), source })?;
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|source| Error::Csv { path: path.into(), source })
}

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const RUNS_FILE: &str = "runs.csv";

/// Writes `aggregate.csv` and `runs.csv` into `dir`, creating it if needed.
pub fn emit_csv(dir: &Path, results: &Results) -> Result<(PathBuf, PathBuf)> {
    if results.records.is_empty() {
        return Err(Error::Config(vec!["no records to write".into()]));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let aggregate = dir.join(AGGREGATE_FILE);
    let raw = dir.join(RUNS_FILE);
    write_rows(&aggregate, &results.metrics)?;
    write_rows(&raw, &results.records)?;
    Ok((aggregate, raw))
}

pub fn format_table(rows: &[MetricRow]) -> String {
    let mut out = format!(
        "{:<15} {:>6} {:>10} {:>10} {:>14} {:>6}\n",
        "scheme", "rate", "resilience", "avg_hops", "precompute_ms", "runs"
    );
    for m in rows {
        let hops = m.avg_hops_edp_success.map_or_else(|| "-".into(), |h| format!("{h:.3}"));
        out.push_str(&format!(
            "{:<15} {:>6} {:>10.4} {:>10} {:>14.4} {:>6}\n",
            m.scheme.as_str(),
            m.rate,
            m.resilience,
            hops,
            m.mean_precompute_ms,
            m.runs
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub p: f64,
    pub runs: usize,
    pub reps: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { sizes: (25..=105).step_by(10).collect(), p: 0.15, runs: 20, reps: 3, seed: 0 }
    }
}

impl BenchConfig {
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.sizes.is_empty() {
            out.push("at least one graph size is required".into());
        }
        if self.sizes.iter().any(|&n| n < 2) {
            out.push("graph sizes must be at least 2".into());
        }
        if !(0.0..=1.0).contains(&self.p) {
            out.push(format!("p must lie in [0, 1], got {}", self.p));
        }
        if self.runs == 0 {
            out.push("runs must be at least 1".into());
        }
        if self.reps == 0 {
            out.push("reps must be at least 1".into());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSample {
    pub scheme: Mode,
    pub n: usize,
    pub run: usize,
    pub links: usize,
    pub trees: usize,
    pub structure_edges: usize,
    pub precompute_ms: f64,
}

/// Serial precompute timing over Erdős–Rényi graphs of growing size.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchSample>> {
    let problems = cfg.problems();
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let mut out = Vec::new();
    for &n in &cfg.sizes {
        for run in 0..cfg.runs {
            let g = erdos_renyi(n, cfg.p, derive_seed(cfg.seed, &[STREAM_GRAPH, n as u64, run as u64]))?.graph;
            let (s, d) = draw_pair(n, derive_seed(cfg.seed, &[STREAM_PAIR, n as u64, run as u64]));
            for mode in Mode::ALL {
                let rs = build_structures(&g, s, d, mode)?;
                out.push(BenchSample {
                    scheme: mode,
                    n,
                    run,
                    links: g.edge_count(),
                    trees: rs.tree_count(),
                    structure_edges: rs.structure_edges(),
                    precompute_ms: time_precompute(&g, s, d, mode, cfg.reps)?,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeBin {
    pub scheme: Mode,
    pub links_from: usize,
    pub links_to: usize,
    pub mean_precompute_ms: f64,
    pub samples: usize,
}

/// Mean precompute time per scheme over link-count ranges of `width`.
pub fn runtime_bins(samples: &[BenchSample], width: usize) -> Vec<RuntimeBin> {
    let width = width.max(1);
    let mut keys: BTreeSet<(usize, usize)> = BTreeSet::new();
    for s in samples {
        keys.insert((mode_slot(s.scheme), s.links / width));
    }
    keys.into_iter()
        .map(|(slot, bin)| {
            let scheme = Mode::ALL[slot];
            let times: Vec<f64> = samples
                .iter()
                .filter(|s| s.scheme == scheme && s.links / width == bin)
                .map(|s| s.precompute_ms)
                .collect();
            RuntimeBin {
                scheme,
                links_from: bin * width,
                links_to: bin * width + width - 1,
                mean_precompute_ms: times.iter().sum::<f64>() / times.len() as f64,
                samples: times.len(),
            }
        })
        .collect()
}

pub fn write_bench(path: &Path, samples: &[BenchSample]) -> Result<()> {
    write_rows(path, samples)
}

pub fn write_runtime_bins(path: &Path, bins: &[RuntimeBin]) -> Result<()> {
    write_rows(path, bins)
}

/// Ranks starting at 1; ties share their average rank.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation. `None` for fewer than two points or a constant
/// series.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let mean = (x.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}
