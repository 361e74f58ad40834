//! Experiment pipeline: every strategy over every instance, length range and
//! coverage level, with checker, metrics and defect scoring per run.

mod csv;
mod dot;

pub use self::csv::{export_csv, export_summary_csv, CSV_HEADER};
pub use self::dot::export_dot;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverage::check;
use crate::defects::{activated_defects, inject_defects, ActivationReport, DefectConfig, DefectSpec};
use crate::error::{Error, Result};
use crate::limits::{Limits, DEFAULT_MAX_EXPLORED};
use crate::metrics::{path_set_metrics, to_f64, MetricsReport};
use crate::model::SutModel;
use crate::path::{CoverageSpec, Level, Status};
use crate::strategy::{RunOptions, StrategyRegistry};

pub const DEFAULT_RANGES: [(usize, usize); 4] = [(2, 4), (2, 6), (2, 8), (4, 8)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Industrial,
    Artificial,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Industrial => "industrial",
            Origin::Artificial => "artificial",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub origin: Origin,
    pub model: SutModel,
}

impl Instance {
    pub fn new(origin: Origin, model: SutModel) -> Self {
        Instance {
            id: model.name().to_string(),
            origin,
            model,
        }
    }
}

/// How many defects to place per instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum DefectPlan {
    None,
    /// Reference densities scaled by edge count.
    Density,
    Fixed {
        singles: usize,
        pairs: usize,
        #[serde(default)]
        allow_self_pairs: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub ranges: Vec<(usize, usize)>,
    pub levels: Vec<Level>,
    pub strategies: Vec<String>,
    pub defects: DefectPlan,
    pub seed: u64,
    /// Per-run wall-clock limit.
    pub timeout_ms: Option<u64>,
    pub max_explored: u64,
    /// Worker threads, 0 for one per core.
    pub workers: usize,
    /// Record wall-clock runtimes. Off by default so reports are
    /// reproducible byte for byte.
    pub record_runtime: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            ranges: DEFAULT_RANGES.to_vec(),
            levels: vec![Level::One, Level::Two],
            strategies: vec!["fsmt".into(), "nsr".into()],
            defects: DefectPlan::Density,
            seed: 0,
            timeout_ms: Some(60_000),
            max_explored: DEFAULT_MAX_EXPLORED,
            workers: 0,
            record_runtime: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Complete,
    Infeasible,
    ResourceLimit,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Complete => "complete",
            RunStatus::Infeasible => "infeasible",
            RunStatus::ResourceLimit => "resource-limit",
        })
    }
}

/// One (instance, strategy, level, range) run. Non-complete runs carry zero
/// metrics and activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub instance: String,
    pub origin: Origin,
    pub strategy: String,
    pub level: Level,
    pub min_length: usize,
    pub max_length: usize,
    pub status: RunStatus,
    pub metrics: MetricsReport,
    pub activation: ActivationReport,
    pub runtime_ms: u64,
}

/// Mixes the master seed with an index (splitmix64).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn place_defects(m: &SutModel, plan: &DefectPlan, seed: u64) -> Result<DefectSpec> {
    let config = match *plan {
        DefectPlan::None => DefectConfig::new(0, 0),
        DefectPlan::Density => DefectConfig::density(m),
        DefectPlan::Fixed {
            singles,
            pairs,
            allow_self_pairs,
        } => DefectConfig {
            single_count: singles,
            pair_count: pairs,
            allow_self_pairs,
        },
    };
    inject_defects(m, &config, seed)
}

struct Job<'a> {
    instance: &'a Instance,
    defects: &'a DefectSpec,
    strategy: String,
    spec: CoverageSpec,
}

/// Runs every combination. Order: instance, strategy, level, range, as
/// listed in `instances` and `config`.
///
/// Every complete result is re-checked with the independent checker; a
/// failure aborts with [`Error::Inconsistency`]. Resource-limit runs are
/// recorded, not fatal.
pub fn run_benchmark(instances: &[Instance], config: &BenchConfig, registry: &StrategyRegistry) -> Result<Vec<BenchRun>> {
    let mut specs = Vec::new();
    for &level in &config.levels {
        for &(min, max) in &config.ranges {
            specs.push(CoverageSpec::new(level, min, max)?);
        }
    }
    for name in &config.strategies {
        registry.get(name)?;
    }
    let defects = instances
        .iter()
        .enumerate()
        .map(|(i, inst)| place_defects(&inst.model, &config.defects, derive_seed(config.seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for (inst, d) in instances.iter().zip(&defects) {
        for strategy in &config.strategies {
            for spec in &specs {
                jobs.push(Job {
                    instance: inst,
                    defects: d,
                    strategy: strategy.clone(),
                    spec: *spec,
                });
            }
        }
    }

    let run_all = || jobs.par_iter().map(|job| run_one(job, config, registry)).collect();
    if config.workers == 0 {
        run_all()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::ResourceLimit(format!("cannot start worker pool: {e}")))?
            .install(run_all)
    }
}

fn run_one(job: &Job<'_>, config: &BenchConfig, registry: &StrategyRegistry) -> Result<BenchRun> {
    let m = &job.instance.model;
    let strategy = registry.get(&job.strategy)?;
    let mut limits = Limits {
        max_explored: config.max_explored,
        deadline: None,
    };
    if let Some(ms) = config.timeout_ms {
        limits = limits.with_timeout(Duration::from_millis(ms));
    }
    let opts = RunOptions {
        seed: config.seed,
        shuffle_pivots: false,
        limits,
    };

    let started = Instant::now();
    let outcome = strategy.generate(m, &job.spec, &opts);
    let elapsed = started.elapsed().as_millis() as u64;

    let mut row = BenchRun {
        instance: job.instance.id.clone(),
        origin: job.instance.origin,
        strategy: job.strategy.clone(),
        level: job.spec.level,
        min_length: job.spec.min_length,
        max_length: job.spec.max_length,
        status: RunStatus::ResourceLimit,
        metrics: MetricsReport::zero(),
        activation: ActivationReport::zero(),
        runtime_ms: if config.record_runtime { elapsed } else { 0 },
    };
    let set = match outcome {
        Ok(set) => set,
        Err(e) if e.is_resource_limit() => return Ok(row),
        Err(e) => return Err(e),
    };
    if set.status == Status::Infeasible {
        row.status = RunStatus::Infeasible;
        return Ok(row);
    }

    let verdict = check(&set.paths, m, &job.spec);
    if !verdict.satisfied {
        return Err(Error::Inconsistency(format!(
            "{} on {} (level {}, range {}..={}) produced a set failing the checker: {:?}",
            job.strategy,
            job.instance.id,
            job.spec.level,
            job.spec.min_length,
            job.spec.max_length,
            verdict.violations
        )));
    }
    row.status = RunStatus::Complete;
    row.metrics = path_set_metrics(&set.paths);
    row.activation = activated_defects(&set.paths, job.defects, &row.metrics);
    Ok(row)
}

/// Per-strategy means over a group of runs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub len: f64,
    pub paths: f64,
    pub avlen: f64,
    pub unique: f64,
    pub ut: f64,
    pub a_s: f64,
    pub a_p: f64,
    pub e_s: f64,
    pub e_p: f64,
}

impl MeanMetrics {
    fn of(rows: &[&BenchRun]) -> Self {
        if rows.is_empty() {
            return MeanMetrics::default();
        }
        let n = rows.len() as f64;
        let mean = |f: &dyn Fn(&BenchRun) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
        MeanMetrics {
            len: mean(&|r| r.metrics.total_steps as f64),
            paths: mean(&|r| r.metrics.path_count as f64),
            avlen: mean(&|r| to_f64(&r.metrics.avg_length)),
            unique: mean(&|r| r.metrics.unique_edges as f64),
            ut: mean(&|r| to_f64(&r.metrics.duplication_ratio)),
            a_s: mean(&|r| r.activation.singles_activated as f64),
            a_p: mean(&|r| r.activation.pairs_activated as f64),
            e_s: mean(&|r| to_f64(&r.activation.efficiency_single)),
            e_p: mean(&|r| to_f64(&r.activation.efficiency_pair)),
        }
    }

    /// `self / base` per field, `None` where `base` is zero.
    pub fn ratio(&self, base: &MeanMetrics) -> MeanRatios {
        let r = |a: f64, b: f64| if b == 0.0 { None } else { Some(a / b) };
        MeanRatios {
            len: r(self.len, base.len),
            paths: r(self.paths, base.paths),
            avlen: r(self.avlen, base.avlen),
            unique: r(self.unique, base.unique),
            ut: r(self.ut, base.ut),
            a_s: r(self.a_s, base.a_s),
            a_p: r(self.a_p, base.a_p),
            e_s: r(self.e_s, base.e_s),
            e_p: r(self.e_p, base.e_p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanRatios {
    pub len: Option<f64>,
    pub paths: Option<f64>,
    pub avlen: Option<f64>,
    pub unique: Option<f64>,
    pub ut: Option<f64>,
    pub a_s: Option<f64>,
    pub a_p: Option<f64>,
    pub e_s: Option<f64>,
    pub e_p: Option<f64>,
}

/// FSMT against NSR for one level and range, over the instances where both
/// completed. `diff` is the NSR mean divided by the FSMT mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// `None` for all origins together.
    pub origin: Option<Origin>,
    pub level: Level,
    pub min_length: usize,
    pub max_length: usize,
    pub instances: usize,
    pub fsmt: MeanMetrics,
    pub nsr: MeanMetrics,
    pub diff: MeanRatios,
}

type GroupKey = (Level, usize, usize);

fn group_key(r: &BenchRun) -> GroupKey {
    (r.level, r.min_length, r.max_length)
}

/// One summary per (level, range) present in `runs`, restricted to `origin`
/// when given.
pub fn summarize(runs: &[BenchRun], origin: Option<Origin>) -> Vec<Summary> {
    let mut groups: BTreeMap<GroupKey, BTreeMap<&str, (Option<&BenchRun>, Option<&BenchRun>)>> = BTreeMap::new();
    for r in runs.iter().filter(|r| origin.is_none_or(|o| r.origin == o)) {
        let slot = groups.entry(group_key(r)).or_default().entry(&r.instance).or_default();
        match r.strategy.as_str() {
            "fsmt" => slot.0 = Some(r),
            "nsr" => slot.1 = Some(r),
            _ => {}
        }
    }
    groups
        .into_iter()
        .map(|((level, min_length, max_length), per_instance)| {
            let both: Vec<(&BenchRun, &BenchRun)> = per_instance
                .values()
                .filter_map(|&(f, n)| match (f, n) {
                    (Some(f), Some(n)) if f.status == RunStatus::Complete && n.status == RunStatus::Complete => {
                        Some((f, n))
                    }
                    _ => None,
                })
                .collect();
            let fsmt = MeanMetrics::of(&both.iter().map(|p| p.0).collect::<Vec<_>>());
            let nsr = MeanMetrics::of(&both.iter().map(|p| p.1).collect::<Vec<_>>());
            Summary {
                origin,
                level,
                min_length,
                max_length,
                instances: both.len(),
                diff: nsr.ratio(&fsmt),
                fsmt,
                nsr,
            }
        })
        .collect()
}

/// Complete runs per strategy, level and range, split by origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionCount {
    pub strategy: String,
    pub level: Level,
    pub min_length: usize,
    pub max_length: usize,
    pub all: usize,
    pub industrial: usize,
    pub artificial: usize,
}

pub fn completion_counts(runs: &[BenchRun]) -> Vec<CompletionCount> {
    let mut counts: BTreeMap<(String, GroupKey), (usize, usize)> = BTreeMap::new();
    for r in runs {
        let c = counts.entry((r.strategy.clone(), group_key(r))).or_default();
        if r.status == RunStatus::Complete {
            match r.origin {
                Origin::Industrial => c.0 += 1,
                Origin::Artificial => c.1 += 1,
            }
        }
    }
    counts
        .into_iter()
        .map(|((strategy, (level, min_length, max_length)), (industrial, artificial))| CompletionCount {
            strategy,
            level,
            min_length,
            max_length,
            all: industrial + artificial,
            industrial,
            artificial,
        })
        .collect()
}
