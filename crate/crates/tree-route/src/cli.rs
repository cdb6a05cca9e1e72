//! Command-line front end.
//!
//! Exit codes: 0 on success or delivery, 2 when a routed packet is not
//! delivered, 1 for usage, configuration and input errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tree_route_core::routing::default_ttl;
use tree_route_core::{
    build_structures, compile_rules, edge_connectivity, erdos_renyi, erdos_renyi_giant,
    random_regular, simulate, Decay, FailureModel, Mode,
};

use crate::document::{write_json, ScenarioDoc, StructuresDoc};
use crate::error::{Error, Result};
use crate::experiment::{
    draw_scenario, emit_csv, format_table, run_bench, run_experiment, runtime_bins, spearman,
    write_bench, write_runtime_bins, BenchConfig, ExperimentConfig, GraphFamily,
};
use crate::topology::{write_edge_list, write_graphml, Topology};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNDELIVERED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tree-route", version, about = "Tree-extended fast-failover routing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate or convert a graph and write it as an edge list.
    Gen(GenArgs),
    /// Build routing structures for one source/destination pair.
    Build(BuildArgs),
    /// Route one packet and print its trace.
    Route(RouteArgs),
    /// Run a failure-rate sweep and write CSV results.
    Experiment(ExperimentArgs),
    /// Time structure precomputation on growing random graphs.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct FamilyArgs {
    /// Erdős–Rényi graph with N nodes and link probability P.
    #[arg(long, num_args = 2, value_names = ["N", "P"])]
    er: Option<Vec<String>>,
    /// Connected random regular graph with N nodes of degree DELTA.
    #[arg(long, num_args = 2, value_names = ["N", "DELTA"])]
    regular: Option<Vec<String>>,
    /// GraphML topology file.
    #[arg(long, value_name = "PATH")]
    graphml: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
struct OptionalFamilyArgs {
    #[arg(long, num_args = 2, value_names = ["N", "P"])]
    er: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["N", "DELTA"])]
    regular: Option<Vec<String>>,
    #[arg(long, value_name = "PATH")]
    graphml: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Keep the largest component of an Erdős–Rényi sample instead of resampling.
    #[arg(long)]
    giant: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Also write the graph as GraphML.
    #[arg(long, value_name = "PATH")]
    graphml_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Edge-list or GraphML (.graphml/.xml) file.
    #[arg(long, value_name = "PATH")]
    graph: PathBuf,
    #[arg(long, value_name = "NODE")]
    src: String,
    #[arg(long, value_name = "NODE")]
    dst: String,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, value_enum, default_value_t = SchemeArg::MultipleTrees)]
    scheme: SchemeArg,
    /// Write the structures as JSON.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RouteArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, value_enum, default_value_t = SchemeArg::MultipleTrees)]
    scheme: SchemeArg,
    /// Failed links, e.g. "a-b,c-d".
    #[arg(long, value_name = "LINKS", conflicts_with_all = ["scenario", "failures"])]
    fail: Option<String>,
    /// Failure scenario JSON file.
    #[arg(long, value_name = "PATH", conflicts_with = "failures")]
    scenario: Option<PathBuf>,
    /// Draw failures from a model instead.
    #[arg(long, value_enum, requires = "rate")]
    failures: Option<ModelArg>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, default_value_t = FailureModel::DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = DecayArg::Multiplicative)]
    decay: DecayArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the failure scenario used as JSON.
    #[arg(long, value_name = "PATH")]
    save_scenario: Option<PathBuf>,
    /// Hop limit; defaults to four times the link count.
    #[arg(long)]
    ttl: Option<usize>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(flatten)]
    family: OptionalFamilyArgs,
    #[arg(long)]
    giant: bool,
    /// Comma-separated schemes.
    #[arg(long, value_enum, value_delimiter = ',')]
    schemes: Option<Vec<SchemeArg>>,
    #[arg(long, value_enum)]
    failures: Option<ModelArg>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    decay: Option<DecayArg>,
    /// Comma-separated failure rates.
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Skip precompute timing; outputs become byte-for-byte reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, value_name = "DIR", default_value = "results")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    runs: Option<usize>,
    /// Timed repetitions per build.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Link-count range per runtime bin.
    #[arg(long, default_value_t = 5)]
    bin_width: usize,
    #[arg(long, value_name = "DIR", default_value = "results")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Edp,
    OneTree,
    MultipleTrees,
}

impl From<SchemeArg> for Mode {
    fn from(s: SchemeArg) -> Mode {
        match s {
            SchemeArg::Edp => Mode::Edp,
            SchemeArg::OneTree => Mode::OneTree,
            SchemeArg::MultipleTrees => Mode::MultipleTrees,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Random,
    Clustered,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DecayArg {
    Multiplicative,
    Subtractive,
}

impl From<DecayArg> for Decay {
    fn from(d: DecayArg) -> Decay {
        match d {
            DecayArg::Multiplicative => Decay::Multiplicative,
            DecayArg::Subtractive => Decay::Subtractive,
        }
    }
}

fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(flag: &str, v: &[String]) -> Result<(A, B)> {
    let bad = || Error::Config(vec![format!("--{flag} expects two numbers, got `{}`", v.join(" "))]);
    Ok((v[0].parse().map_err(|_| bad())?, v[1].parse().map_err(|_| bad())?))
}

fn family_from(
    er: &Option<Vec<String>>,
    regular: &Option<Vec<String>>,
    graphml: &Option<PathBuf>,
    giant: bool,
) -> Result<Option<GraphFamily>> {
    Ok(if let Some(v) = er {
        let (n, p) = parse_pair("er", v)?;
        Some(GraphFamily::ErdosRenyi { n, p, giant })
    } else if let Some(v) = regular {
        let (n, delta) = parse_pair("regular", v)?;
        Some(GraphFamily::Regular { n, delta })
    } else {
        graphml.clone().map(|path| GraphFamily::Graphml { path })
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let f = &a.family;
    let family = family_from(&f.er, &f.regular, &f.graphml, a.giant)?.expect("clap enforces a family");
    let (topology, attempts) = match family {
        GraphFamily::ErdosRenyi { n, p, giant } => {
            ExperimentConfig::new(GraphFamily::ErdosRenyi { n, p, giant }, vec![0.0]).validate()?;
            let g = if giant { erdos_renyi_giant(n, p, a.seed)? } else { erdos_renyi(n, p, a.seed)? };
            (Topology::unlabeled(g.graph), g.attempts)
        }
        GraphFamily::Regular { n, delta } => {
            ExperimentConfig::new(GraphFamily::Regular { n, delta }, vec![0.0]).validate()?;
            let g = random_regular(n, delta, a.seed)?;
            (Topology::unlabeled(g.graph), g.attempts)
        }
        GraphFamily::Graphml { path } => (Topology::load(&path)?, 0),
    };
    write_text(&a.out, &write_edge_list(&topology))?;
    if let Some(path) = &a.graphml_out {
        write_text(path, &write_graphml(&topology))?;
    }
    println!(
        "wrote {} ({} nodes, {} links, edge connectivity {}{})",
        a.out.display(),
        topology.graph.node_count(),
        topology.graph.edge_count(),
        edge_connectivity(&topology.graph),
        if attempts > 1 { format!(", {attempts} samples drawn") } else { String::new() }
    );
    Ok(EXIT_OK)
}

fn load_pair(p: &PairArgs) -> Result<(Topology, tree_route_core::NodeId, tree_route_core::NodeId)> {
    let t = Topology::load(&p.graph)?;
    let s = t.resolve(&p.src)?;
    let d = t.resolve(&p.dst)?;
    if s == d {
        return Err(Error::Graph(tree_route_core::Error::SameEndpoints));
    }
    Ok((t, s, d))
}

fn cmd_build(a: BuildArgs) -> Result<i32> {
    let (t, s, d) = load_pair(&a.pair)?;
    let rs = build_structures(&t.graph, s, d, a.scheme.into())?;
    println!(
        "{} from {} to {}: edge-disjoint paths {}, trees {}, links in structures {}",
        rs.mode,
        t.label(s),
        t.label(d),
        rs.edps.paths.len(),
        rs.tree_count(),
        rs.structure_edges()
    );
    for (i, unit) in rs.units.iter().enumerate() {
        let (kind, edges) = match unit {
            tree_route_core::Unit::Path(p) => ("path", p.edges().collect::<Vec<_>>()),
            tree_route_core::Unit::Tree(tree) => ("tree", tree.edges().collect()),
        };
        let links: Vec<String> = edges.iter().map(|&e| t.edge_label(e)).collect();
        println!("unit {i} {kind}: {}", links.join(" "));
    }
    if let Some(path) = &a.out {
        write_json(path, &StructuresDoc::new(&t.graph, &rs))?;
    }
    Ok(EXIT_OK)
}

fn cmd_route(a: RouteArgs) -> Result<i32> {
    let (t, s, d) = load_pair(&a.pair)?;
    let g = &t.graph;
    let scenario = if let Some(list) = &a.fail {
        let failed = list
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| t.resolve_edge(x))
            .collect::<Result<BTreeSet<_>>>()?;
        tree_route_core::FailureScenario { failed, model: FailureModel::Random, rate: 0.0, seed: a.seed }
    } else if let Some(path) = &a.scenario {
        ScenarioDoc::load(path)?.to_scenario(g)?
    } else if let Some(model) = a.failures {
        let rate = a.rate.expect("clap requires --rate");
        let model = match model {
            ModelArg::Random => FailureModel::Random,
            ModelArg::Clustered => FailureModel::Clustered { delta: a.delta, decay: a.decay.into() },
        };
        draw_scenario(g, d, model, rate, edge_connectivity(g), a.seed)?
    } else {
        tree_route_core::FailureScenario {
            failed: BTreeSet::new(),
            model: FailureModel::Random,
            rate: 0.0,
            seed: a.seed,
        }
    };
    if let Some(path) = &a.save_scenario {
        ScenarioDoc::from_scenario(&scenario).save(path)?;
    }
    let rs = build_structures(g, s, d, a.scheme.into())?;
    let table = compile_rules(g, &rs);
    let trace = simulate(g, &table, &scenario.failed, a.ttl.unwrap_or_else(|| default_ttl(g)));
    print!("{}", trace.dump_with(|v| t.label(v).to_owned()));
    Ok(if trace.delivered() { EXIT_OK } else { EXIT_UNDELIVERED })
}

fn experiment_config(a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let f = &a.family;
    let family = family_from(&f.er, &f.regular, &f.graphml, a.giant)?;
    let mut cfg = match (&a.config, family) {
        (Some(path), family) => {
            let mut cfg = ExperimentConfig::load(path)?;
            if let Some(family) = family {
                cfg.family = family;
            }
            cfg
        }
        (None, Some(family)) => ExperimentConfig::new(family, Vec::new()),
        (None, None) => {
            return Err(Error::Config(vec![
                "a graph family (--er, --regular or --graphml) or --config is required".into(),
            ]))
        }
    };
    if a.giant {
        if let GraphFamily::ErdosRenyi { giant, .. } = &mut cfg.family {
            *giant = true;
        }
    }
    if let Some(schemes) = &a.schemes {
        cfg.schemes = schemes.iter().map(|&s| s.into()).collect();
    }
    if let Some(model) = a.failures {
        cfg.failure_model = match model {
            ModelArg::Random => FailureModel::Random,
            ModelArg::Clustered => FailureModel::clustered(),
        };
    }
    if let FailureModel::Clustered { delta, decay } = &mut cfg.failure_model {
        if let Some(x) = a.delta {
            *delta = x;
        }
        if let Some(x) = a.decay {
            *decay = x.into();
        }
    }
    if let Some(rates) = &a.rates {
        cfg.rates = rates.clone();
    }
    if a.runs.is_some() {
        cfg.runs = a.runs;
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if a.no_timing {
        cfg.timing = false;
    }
    let mut problems = cfg.problems();
    if a.jobs == Some(0) {
        problems.push("--jobs must be at least 1".into());
    }
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    Ok(cfg)
}

fn cmd_experiment(a: ExperimentArgs) -> Result<i32> {
    let cfg = experiment_config(&a)?;
    let results = run_experiment(&cfg, a.jobs)?;
    let (aggregate, raw) = emit_csv(&a.out_dir, &results)?;
    println!(
        "{}, {} failures, {} runs, seed {}",
        cfg.family.describe(),
        cfg.failure_model.name(),
        cfg.runs(),
        cfg.seed
    );
    print!("{}", format_table(&results.metrics));
    println!("wrote {} and {}", aggregate.display(), raw.display());
    Ok(EXIT_OK)
}

fn cmd_bench(a: BenchArgs) -> Result<i32> {
    let mut cfg = BenchConfig { seed: a.seed, ..BenchConfig::default() };
    if let Some(sizes) = a.sizes {
        cfg.sizes = sizes;
    }
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(runs) = a.runs {
        cfg.runs = runs;
    }
    if let Some(reps) = a.reps {
        cfg.reps = reps;
    }
    let mut problems = cfg.problems();
    if a.bin_width == 0 {
        problems.push("--bin-width must be at least 1".into());
    }
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let samples = run_bench(&cfg)?;
    let bins = runtime_bins(&samples, a.bin_width);
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let samples_path = a.out_dir.join("bench.csv");
    let bins_path = a.out_dir.join("runtime.csv");
    write_bench(&samples_path, &samples)?;
    write_runtime_bins(&bins_path, &bins)?;
    for mode in Mode::ALL {
        let mine: Vec<_> = samples.iter().filter(|s| s.scheme == mode).collect();
        let mean = mine.iter().map(|s| s.precompute_ms).sum::<f64>() / mine.len() as f64;
        let work: Vec<f64> = mine.iter().map(|s| (s.links * s.trees.max(1)) as f64).collect();
        let time: Vec<f64> = mine.iter().map(|s| s.precompute_ms).collect();
        let rho = spearman(&work, &time).map_or_else(|| "-".into(), |r| format!("{r:.3}"));
        println!("{:<15} mean {:>9.4} ms  spearman(links x trees, time) {rho}", mode.as_str(), mean);
    }
    println!("wrote {} and {}", samples_path.display(), bins_path.display());
    Ok(EXIT_OK)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Build(a) => cmd_build(a),
        Command::Route(a) => cmd_route(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
