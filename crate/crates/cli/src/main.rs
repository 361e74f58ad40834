use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use tpgen_core::bench::{self, BenchConfig, Instance, Origin};
use tpgen_core::coverage::check;
use tpgen_core::defects::{activated_defects, inject_defects, DefectConfig, DefectDoc, DefectSpec};
use tpgen_core::metrics::{format_ratio, path_set_metrics, MetricsReport, Rational};
use tpgen_core::model::{graph_stats, parse_model, serialize_model};
use tpgen_core::modelgen::{self, BatchEntry, Profile, TargetProperties};
use tpgen_core::path::PathSetDoc;
use tpgen_core::{
    CoverageSpec, EdgeIx, Error, Level, Limits, RunOptions, Status, StrategyRegistry, SutModel, TestPath,
};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "tpgen", version, about = "Test path generation for finite-state-machine models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test path set for a model.
    Generate(GenerateArgs),
    /// Check a path set against a model and coverage spec.
    Check(CheckArgs),
    /// Test-set metrics of a path set.
    Metrics(MetricsArgs),
    /// Generate models with requested properties.
    Modelgen(ModelgenArgs),
    /// Place defects or score a path set against them.
    #[command(subcommand)]
    Defects(DefectsCommand),
    /// Run a benchmark manifest and write the CSV report.
    Bench(BenchArgs),
    /// Render a model (and optionally one path) as Graphviz DOT.
    ExportDot(ExportDotArgs),
    /// Instance properties of a model.
    Stats(StatsArgs),
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    min_length: usize,
    #[arg(long)]
    max_length: usize,
    /// Coverage level.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    coverage: u8,
}

impl SpecArgs {
    fn spec(&self) -> anyhow::Result<CoverageSpec> {
        Ok(CoverageSpec::new(Level::try_from(self.coverage)?, self.min_length, self.max_length)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    Fsmt,
    Nsr,
}

impl StrategyName {
    fn as_str(self) -> &'static str {
        match self {
            StrategyName::Fsmt => "fsmt",
            StrategyName::Nsr => "nsr",
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Model file (`.json` for JSON, anything else for the text format).
    model: PathBuf,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_enum, default_value = "fsmt")]
    strategy: StrategyName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pick level-2 pivots in seeded random order instead of edge order.
    #[arg(long)]
    shuffle_pivots: bool,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Cap on partial paths explored.
    #[arg(long)]
    max_explored: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    model: PathBuf,
    /// Path set document.
    paths: PathBuf,
    /// Override the level recorded in the path set.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    coverage: Option<u8>,
    #[arg(long)]
    min_length: Option<usize>,
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    paths: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelgenArgs {
    #[arg(long, required_unless_present = "count")]
    vertices: Option<usize>,
    #[arg(long, required_unless_present = "count")]
    edges: Option<usize>,
    #[arg(long, default_value_t = 0)]
    cycles: usize,
    #[arg(long, default_value_t = 1)]
    test_starts: usize,
    #[arg(long, default_value_t = 1)]
    test_ends: usize,
    #[arg(long, default_value_t = 0)]
    overlap: usize,
    #[arg(long, default_value_t = 1)]
    machine_ends: usize,
    #[arg(long)]
    name: Option<String>,
    /// Generate a batch of this many instances with sampled targets.
    #[arg(long, conflicts_with_all = ["vertices", "edges", "name"], requires = "out_dir")]
    count: Option<usize>,
    #[arg(long, value_enum, default_value = "artificial")]
    profile: ProfileName,
    /// Batch output directory: one model file per instance plus manifest.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write JSON models instead of the text format.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileName {
    Artificial,
    Industrial,
}

#[derive(Subcommand)]
enum DefectsCommand {
    /// Place defects on a model.
    Inject(InjectArgs),
    /// Count the defects a path set activates.
    Score(ScoreArgs),
}

#[derive(Args)]
struct InjectArgs {
    model: PathBuf,
    /// SINGLE defects; defaults to the reference density for the model size.
    #[arg(long)]
    singles: Option<usize>,
    /// PAIR defects; defaults to the reference density for the model size.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    allow_self_pairs: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    model: PathBuf,
    defects: PathBuf,
    paths: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON manifest: `instances` (path, origin) plus run settings.
    manifest: PathBuf,
    /// Override the manifest's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the per-run wall-clock limit, in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Fill the runtime_ms column (makes output non-reproducible).
    #[arg(long)]
    record_runtime: bool,
    /// Also write the aggregated FSMT/NSR comparison here.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportDotArgs {
    model: PathBuf,
    /// Path set document holding the path to highlight.
    #[arg(long)]
    paths: Option<PathBuf>,
    /// Which path of `--paths` to highlight.
    #[arg(long, default_value_t = 0, requires = "paths")]
    index: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct Manifest {
    instances: Vec<ManifestInstance>,
    #[serde(flatten)]
    config: BenchConfig,
}

#[derive(Deserialize)]
struct ManifestInstance {
    path: PathBuf,
    #[serde(default = "default_origin")]
    origin: Origin,
    /// Defaults to the model name.
    id: Option<String>,
}

fn default_origin() -> Origin {
    Origin::Artificial
}

#[derive(Serialize)]
struct MetricsDoc {
    len: u64,
    paths: u64,
    avlen: String,
    unique: u64,
    ut: String,
    avlen_exact: String,
    ut_exact: String,
}

impl MetricsDoc {
    fn new(r: &MetricsReport) -> Self {
        MetricsDoc {
            len: r.total_steps,
            paths: r.path_count,
            avlen: format_ratio(&r.avg_length, 1),
            unique: r.unique_edges,
            ut: format_ratio(&r.duplication_ratio, 1),
            avlen_exact: exact(&r.avg_length),
            ut_exact: exact(&r.duplication_ratio),
        }
    }
}

fn exact(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Serialize)]
struct ScoreDoc {
    len: u64,
    #[serde(rename = "A_S")]
    a_s: u64,
    #[serde(rename = "A_P")]
    a_p: u64,
    #[serde(rename = "E_S")]
    e_s: String,
    #[serde(rename = "E_P")]
    e_p: String,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> anyhow::Result<SutModel> {
    let text = read(path)?;
    let model = if path.extension().is_some_and(|e| e == "json") {
        SutModel::from_json(&text)
    } else {
        parse_model(&text)
    };
    model.with_context(|| format!("in {}", path.display()))
}

fn load_paths(path: &Path) -> anyhow::Result<PathSetDoc> {
    PathSetDoc::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn emit(out: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, content).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn limits(timeout: Option<f64>, max_explored: Option<u64>) -> anyhow::Result<Limits> {
    let mut l = Limits::default();
    if let Some(n) = max_explored {
        l.max_explored = n;
    }
    if let Some(secs) = timeout {
        l = l.with_timeout(Duration::try_from_secs_f64(secs).context("invalid --timeout")?);
    }
    Ok(l)
}

fn generate(a: GenerateArgs) -> anyhow::Result<u8> {
    let m = load_model(&a.model)?;
    let spec = a.spec.spec()?;
    let opts = RunOptions {
        seed: a.seed,
        shuffle_pivots: a.shuffle_pivots,
        limits: limits(a.timeout, a.max_explored)?,
    };
    let strategy = StrategyRegistry::with_builtins().get(a.strategy.as_str())?;
    let set = strategy.generate(&m, &spec, &opts)?;
    emit(a.out.as_deref(), &set.to_doc(&m, &spec, strategy.name()).to_json()?)?;
    Ok(match set.status {
        Status::Complete => 0,
        Status::Infeasible => EXIT_INFEASIBLE,
    })
}

fn check_cmd(a: CheckArgs) -> anyhow::Result<u8> {
    let m = load_model(&a.model)?;
    let doc = load_paths(&a.paths)?;
    let level = match a.coverage {
        Some(c) => Level::try_from(c)?,
        None => doc.level,
    };
    let spec = CoverageSpec::new(
        level,
        a.min_length.unwrap_or(doc.min_length),
        a.max_length.unwrap_or(doc.max_length),
    )?;
    let set = doc.resolve(&m)?;
    let verdict = check(&set.paths, &m, &spec);
    emit(a.out.as_deref(), &json(&verdict)?)?;
    Ok(if verdict.satisfied { 0 } else { EXIT_INFEASIBLE })
}

fn metrics_cmd(a: MetricsArgs) -> anyhow::Result<u8> {
    let doc = load_paths(&a.paths)?;
    // metrics only need edge identity, so ids stand in for model edges
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut paths = Vec::with_capacity(doc.paths.len());
    for p in &doc.paths {
        let mut edges = Vec::with_capacity(p.edges.len());
        for id in &p.edges {
            let next = ids.len();
            edges.push(EdgeIx(*ids.entry(id.as_str()).or_insert(next)));
        }
        paths.push(TestPath::new(edges));
    }
    emit(a.out.as_deref(), &json(&MetricsDoc::new(&path_set_metrics(&paths)))?)?;
    Ok(0)
}

fn render_model(m: &SutModel, as_json: bool) -> anyhow::Result<String> {
    Ok(if as_json {
        let mut s = m.to_json()?;
        if !s.ends_with('\n') {
            s.push('\n');
        }
        s
    } else {
        serialize_model(m)
    })
}

fn modelgen_cmd(a: ModelgenArgs) -> anyhow::Result<u8> {
    if let Some(count) = a.count {
        let dir = a.out_dir.expect("clap requires --out-dir with --count");
        let profile = match a.profile {
            ProfileName::Artificial => Profile::Artificial,
            ProfileName::Industrial => Profile::Industrial,
        };
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let entries = modelgen::batch_manifest(profile, count, a.seed);
        let ext = if a.json { "json" } else { "fsm" };
        let mut manifest: Vec<BatchRecord> = Vec::new();
        for (entry, model) in entries.iter().zip(modelgen::generate_batch(&entries)) {
            let model = model.with_context(|| format!("instance {}", entry.name))?;
            let file = format!("{}.{ext}", entry.name);
            fs::write(dir.join(&file), render_model(&model, a.json)?)?;
            manifest.push(BatchRecord {
                file,
                entry: entry.clone(),
            });
        }
        fs::write(dir.join("manifest.json"), json(&manifest)?)?;
        return Ok(0);
    }

    let t = TargetProperties {
        vertex_count: a.vertices.expect("required"),
        edge_count: a.edges.expect("required"),
        cycle_count: a.cycles,
        test_start_count: a.test_starts,
        test_end_count: a.test_ends,
        start_end_overlap_count: a.overlap,
        machine_end_count: a.machine_ends,
    };
    let name = a.name.unwrap_or_else(|| format!("gen-{}", a.seed));
    let m = modelgen::generate_named(&t, a.seed, &name)?;
    emit(a.out.as_deref(), &render_model(&m, a.json)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct BatchRecord {
    file: String,
    #[serde(flatten)]
    entry: BatchEntry,
}

fn defects_cmd(c: DefectsCommand) -> anyhow::Result<u8> {
    match c {
        DefectsCommand::Inject(a) => {
            let m = load_model(&a.model)?;
            let density = DefectConfig::density(&m);
            let config = DefectConfig {
                single_count: a.singles.unwrap_or(density.single_count),
                pair_count: a.pairs.unwrap_or(density.pair_count),
                allow_self_pairs: a.allow_self_pairs,
            };
            let d = inject_defects(&m, &config, a.seed)?;
            emit(a.out.as_deref(), &d.to_json(&m)?)?;
        }
        DefectsCommand::Score(a) => {
            let m = load_model(&a.model)?;
            let doc: DefectDoc = serde_json::from_str(&read(&a.defects)?)
                .with_context(|| format!("in {}", a.defects.display()))?;
            let d = DefectSpec::from_doc(&doc, &m)?;
            let set = load_paths(&a.paths)?.resolve(&m)?;
            let metrics = path_set_metrics(&set.paths);
            let r = activated_defects(&set.paths, &d, &metrics);
            emit(
                a.out.as_deref(),
                &json(&ScoreDoc {
                    len: metrics.total_steps,
                    a_s: r.singles_activated,
                    a_p: r.pairs_activated,
                    e_s: format_ratio(&r.efficiency_single, 3),
                    e_p: format_ratio(&r.efficiency_pair, 3),
                })?,
            )?;
        }
    }
    Ok(0)
}

fn bench_cmd(a: BenchArgs) -> anyhow::Result<u8> {
    let manifest: Manifest = serde_json::from_str(&read(&a.manifest)?)
        .with_context(|| format!("in {}", a.manifest.display()))?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let mut config = manifest.config;
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(t) = a.timeout {
        if !(t.is_finite() && t >= 0.0) {
            bail!("invalid --timeout");
        }
        config.timeout_ms = Some((t * 1000.0) as u64);
    }
    if let Some(w) = a.workers {
        config.workers = w;
    }
    config.record_runtime |= a.record_runtime;

    let mut instances = Vec::with_capacity(manifest.instances.len());
    for i in &manifest.instances {
        let model = load_model(&base.join(&i.path))?;
        let mut inst = Instance::new(i.origin, model);
        if let Some(id) = &i.id {
            inst.id = id.clone();
        }
        instances.push(inst);
    }
    let runs = bench::run_benchmark(&instances, &config, &StrategyRegistry::with_builtins())?;
    emit(a.out.as_deref(), &bench::export_csv(&runs)?)?;
    if let Some(path) = &a.summary {
        let mut summaries = bench::summarize(&runs, None);
        for origin in [Origin::Industrial, Origin::Artificial] {
            if instances.iter().any(|i| i.origin == origin) {
                summaries.extend(bench::summarize(&runs, Some(origin)));
            }
        }
        emit(Some(path), &bench::export_summary_csv(&summaries)?)?;
    }
    Ok(0)
}

fn export_dot_cmd(a: ExportDotArgs) -> anyhow::Result<u8> {
    let m = load_model(&a.model)?;
    let highlight = match &a.paths {
        Some(p) => {
            let set = load_paths(p)?.resolve(&m)?;
            match set.paths.into_iter().nth(a.index) {
                Some(path) => Some(path),
                None => bail!("path set has no path at index {}", a.index),
            }
        }
        None => None,
    };
    emit(a.out.as_deref(), &bench::export_dot(&m, highlight.as_ref()))?;
    Ok(0)
}

fn stats_cmd(a: StatsArgs) -> anyhow::Result<u8> {
    let m = load_model(&a.model)?;
    match graph_stats(&m) {
        Ok(s) => {
            emit(a.out.as_deref(), &json(&s)?)?;
            Ok(0)
        }
        Err(Error::CycleCap { cap, partial }) => {
            emit(a.out.as_deref(), &json(&partial)?)?;
            eprintln!("warning: more than {cap} simple cycles; statistics are partial");
            Ok(EXIT_RESOURCE)
        }
        Err(e) => Err(e.into()),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(err) if err.is_resource_limit() => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Check(a) => check_cmd(a),
        Command::Metrics(a) => metrics_cmd(a),
        Command::Modelgen(a) => modelgen_cmd(a),
        Command::Defects(c) => defects_cmd(c),
        Command::Bench(a) => bench_cmd(a),
        Command::ExportDot(a) => export_dot_cmd(a),
        Command::Stats(a) => stats_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
