//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpgen_core::bench::{run_benchmark, summarize, BenchConfig, BenchRun, Instance, Origin, Summary, DEFAULT_RANGES};
use tpgen_core::coverage::{check, check_level1, check_level2, coverable_edges};
use tpgen_core::fsmt::{find_shortest_path_in_range, find_shortest_path_in_range_for_edge};
use tpgen_core::limits::Budget;
use tpgen_core::metrics::{path_set_metrics, Rational};
use tpgen_core::modelgen::{batch_manifest, generate_batch, Profile};
use tpgen_core::nsr::enumerate_paths_in_range;
use tpgen_core::path::EdgeSet;
use tpgen_core::{
    CoverageSpec, EdgeIx, Error, Level, Limits, RunOptions, Status, StrategyRegistry, SutModel, TestPath, TestPathSet,
};
use tpgen_oracle::{random_model, Graph};

const POPULATION: usize = 200;
const POPULATION_SEED: u64 = 1;
const LEVELS: [Level; 2] = [Level::One, Level::Two];

struct Cell {
    instance: usize,
    range: (usize, usize),
    level: Level,
    strategy: &'static str,
    /// `None` when the run hit its resource limit.
    out: Option<TestPathSet>,
}

struct Grid {
    models: Vec<SutModel>,
    cells: Vec<Cell>,
    runs: Vec<BenchRun>,
}

fn grid() -> &'static Grid {
    static GRID: OnceLock<Grid> = OnceLock::new();
    GRID.get_or_init(|| {
        let entries = batch_manifest(Profile::Artificial, POPULATION, POPULATION_SEED);
        let models: Vec<SutModel> = generate_batch(&entries)
            .into_iter()
            .map(|m| m.expect("population instance generates"))
            .collect();
        let registry = StrategyRegistry::with_builtins();
        let mut cells = Vec::new();
        for (i, m) in models.iter().enumerate() {
            for &range in DEFAULT_RANGES.iter() {
                for level in LEVELS {
                    let spec = CoverageSpec::new(level, range.0, range.1).unwrap();
                    for s in registry.iter() {
                        let opts = RunOptions {
                            limits: Limits::default().with_timeout(Duration::from_secs(60)),
                            ..Default::default()
                        };
                        let out = match s.generate(m, &spec, &opts) {
                            Ok(set) => Some(set),
                            Err(Error::ResourceLimit(_)) => None,
                            Err(e) => panic!("{}: {e}", m.name()),
                        };
                        cells.push(Cell {
                            instance: i,
                            range,
                            level,
                            strategy: s.name(),
                            out,
                        });
                    }
                }
            }
        }
        let instances: Vec<Instance> = models
            .iter()
            .map(|m| Instance::new(Origin::Artificial, m.clone()))
            .collect();
        let config = BenchConfig {
            seed: POPULATION_SEED,
            ..Default::default()
        };
        let runs = run_benchmark(&instances, &config, &registry).expect("benchmark runs");
        Grid { models, cells, runs }
    })
}

fn summaries() -> &'static Vec<Summary> {
    static S: OnceLock<Vec<Summary>> = OnceLock::new();
    S.get_or_init(|| summarize(&grid().runs, Some(Origin::Artificial)))
}

fn level_rows(level: Level) -> Vec<&'static Summary> {
    summaries().iter().filter(|s| s.level == level).collect()
}

fn ix(p: &TestPath) -> Vec<usize> {
    p.edges().iter().map(|e| e.0).collect()
}

fn diffs(rows: &[&Summary]) -> String {
    rows.iter()
        .map(|s| format!("[{},{}] {:.3}", s.min_length, s.max_length, s.diff.len.unwrap_or(f64::NAN)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Instance-weighted mean of a per-summary field across ranges.
fn pooled(rows: &[&Summary], f: impl Fn(&Summary) -> f64) -> f64 {
    let n: usize = rows.iter().map(|s| s.instances).sum();
    rows.iter().map(|s| f(s) * s.instances as f64).sum::<f64>() / n as f64
}

type Outcome = Result<String, String>;

fn closure() -> Outcome {
    let g = grid();
    let mut checked = 0;
    let mut limited = 0;
    let mut bad = Vec::new();
    let mut graphs: BTreeMap<usize, Graph> = BTreeMap::new();
    for c in &g.cells {
        let Some(out) = &c.out else {
            limited += 1;
            continue;
        };
        if out.status != Status::Complete {
            continue;
        }
        checked += 1;
        let m = &g.models[c.instance];
        let spec = CoverageSpec::new(c.level, c.range.0, c.range.1).unwrap();
        let graph = graphs.entry(c.instance).or_insert_with(|| Graph::of(m));
        let paths: Vec<Vec<usize>> = out.paths.iter().map(ix).collect();
        let oracle_ok = match c.level {
            Level::One => graph.satisfies_level1(&paths, c.range.0, c.range.1),
            Level::Two => graph.satisfies_level2(&paths, c.range.0, c.range.1),
        };
        if !check(&out.paths, m, &spec).satisfied || !oracle_ok {
            bad.push(format!("{} {:?} {:?} {}", m.name(), c.range, c.level, c.strategy));
        }
    }
    let detail = format!(
        "{} instances, {} runs, {checked} complete outputs checked, {limited} hit resource limits",
        g.models.len(),
        g.cells.len()
    );
    if bad.is_empty() && g.models.len() >= 200 {
        Ok(detail)
    } else {
        Err(format!("{detail}; violations: {}", bad.join("; ")))
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = Vec::new();
    for case in 0..100 {
        let m = random_model(&mut rng, 10, 14);
        let max = rng.gen_range(1..=8);
        let min = rng.gen_range(1..=max);
        let g = Graph::of(&m);
        let spec = CoverageSpec::new(Level::Two, min, max).unwrap();
        let all = EdgeSet::full(m.edge_count());
        for &s in m.test_starts() {
            let got = find_shortest_path_in_range(&m, &spec, &all, s, &mut Budget::unlimited()).unwrap();
            if got.map(|p| p.len()) != g.min_feasible_length(s.0, min, max) {
                mismatches.push(format!("case {case} (a) start {}", m.vertex_id(s)));
            }
        }
        for e in m.edge_ids() {
            let got = find_shortest_path_in_range_for_edge(e, &m, &spec, &all, &mut Budget::unlimited()).unwrap();
            if got.is_some() != g.pivot_coverable(e.0, min, max) {
                mismatches.push(format!("case {case} (b) edge {}", m.edge(e).id));
            }
        }
        let cov: BTreeSet<usize> = coverable_edges(&m, &spec).iter().map(|e| e.0).collect();
        if cov != g.edge_union(min, max) {
            mismatches.push(format!("case {case} (c)"));
        }
        let walks: Vec<Vec<usize>> = enumerate_paths_in_range(&m, &spec, &Limits::default())
            .unwrap()
            .iter()
            .map(ix)
            .collect();
        let set: BTreeSet<Vec<usize>> = walks.iter().cloned().collect();
        if set.len() != walks.len() || set != g.walks_in_range(min, max) {
            mismatches.push(format!("case {case} (d)"));
        }
    }
    if mismatches.is_empty() {
        Ok("100 instances, zero mismatches".into())
    } else {
        Err(mismatches.join("; "))
    }
}

fn infeasibility_agreement() -> Outcome {
    let g = grid();
    let mut by_key: BTreeMap<(usize, (usize, usize), u8), Vec<Option<Status>>> = BTreeMap::new();
    for c in &g.cells {
        by_key
            .entry((c.instance, c.range, c.level.number()))
            .or_default()
            .push(c.out.as_ref().map(|o| o.status));
    }
    let mut complete: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut disagree = Vec::new();
    for ((i, range, level), st) in &by_key {
        if st.windows(2).any(|w| w[0] != w[1]) {
            disagree.push(format!("{} {range:?} level {level}", g.models[*i].name()));
        }
        if *level == 1 && st[0] == Some(Status::Complete) {
            *complete.entry(*range).or_default() += 1;
        }
    }
    let counts: Vec<String> = complete.iter().map(|(r, n)| format!("[{},{}] {n}", r.0, r.1)).collect();
    if disagree.is_empty() {
        Ok(format!("complete per range: {}", counts.join(", ")))
    } else {
        Err(format!("status differs on {}", disagree.join("; ")))
    }
}

fn trend_level1() -> Outcome {
    let rows = level_rows(Level::One);
    let d = |s: &Summary| s.diff.len.unwrap_or(0.0);
    let floor = rows.iter().all(|s| d(s) >= 1.3);
    // wider ranges give larger ratios; equal widths are not compared
    let widening = rows.iter().all(|a| {
        rows.iter()
            .all(|b| a.max_length - a.min_length >= b.max_length - b.min_length || d(a) < d(b))
    });
    let detail = format!("diff(len) {}", diffs(&rows));
    match (floor, widening) {
        (true, true) => Ok(detail),
        (f, w) => Err(format!(
            "{detail}; floor 1.3 {}, increasing with width {}",
            if f { "met" } else { "missed" },
            if w { "holds" } else { "broken" }
        )),
    }
}

fn trend_level2() -> Outcome {
    let rows = level_rows(Level::Two);
    let band = rows
        .iter()
        .all(|s| s.diff.len.is_some_and(|d| (0.8..=1.6).contains(&d)));
    let fsmt = pooled(&rows, |s| s.fsmt.paths);
    let nsr = pooled(&rows, |s| s.nsr.paths);
    let detail = format!("diff(len) {}; mean |P| fsmt {fsmt:.3}, nsr {nsr:.3}", diffs(&rows));
    if band && fsmt >= nsr {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn defect_trend() -> Outcome {
    let rows = level_rows(Level::One);
    let es = (pooled(&rows, |s| s.fsmt.e_s), pooled(&rows, |s| s.nsr.e_s));
    let ep = (pooled(&rows, |s| s.fsmt.e_p), pooled(&rows, |s| s.nsr.e_p));
    let detail = format!(
        "level 1 E_S fsmt {:.4} nsr {:.4}; E_P fsmt {:.4} nsr {:.4}",
        es.0, es.1, ep.0, ep.1
    );
    if es.0 > es.1 && ep.1 >= ep.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn metric_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let paths: Vec<TestPath> = (0..rng.gen_range(0..12))
            .map(|_| TestPath::new((0..rng.gen_range(1..15)).map(|_| EdgeIx(rng.gen_range(0..25))).collect()))
            .collect();
        let r = path_set_metrics(&paths);
        let len: u64 = paths.iter().map(|p| p.len() as u64).sum();
        let int = Rational::from_integer;
        let ok = r.total_steps == len
            && (paths.is_empty()
                || (r.avg_length * int(r.path_count) == int(len)
                    && r.duplication_ratio * int(r.unique_edges) == int(len)
                    && r.duplication_ratio >= int(1)));
        if !ok {
            return Err(format!("identity broken for {paths:?}"));
        }
    }
    Ok("1000 path sets".into())
}

fn run(bin: &str, dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = Command::new(bin).current_dir(dir).args(args).output().expect("run tpgen");
    let code = out.status.code().unwrap_or(-1);
    assert!(code == 0 || code == 1, "tpgen {args:?} exited {code}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

/// Every file in `dir`, by name.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let name = p.strip_prefix(dir).unwrap().display().to_string();
                files.insert(name, std::fs::read(&p).unwrap());
            }
        }
    }
    files
}

fn cli_session(bin: &str) -> (Vec<Vec<u8>>, BTreeMap<String, Vec<u8>>) {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut stdout = Vec::new();
    let mut go = |args: &[&str]| stdout.push(run(bin, d, args));
    go(&["modelgen", "--count", "4", "--out-dir", "pop", "--seed", "9"]);
    go(&["modelgen", "--vertices", "12", "--edges", "20", "--cycles", "2", "--seed", "3", "--out", "one.fsm"]);
    go(&["modelgen", "--vertices", "12", "--edges", "20", "--cycles", "2", "--seed", "3", "--json", "--out", "one.json"]);
    for (strategy, level, extra) in [("fsmt", "1", None), ("fsmt", "2", Some("--shuffle-pivots")), ("nsr", "2", None)] {
        let out = format!("{strategy}-{level}.json");
        let mut args = vec![
            "generate", "one.fsm", "--strategy", strategy, "--coverage", level, "--min-length", "1",
            "--max-length", "8", "--seed", "5", "--out", &out,
        ];
        args.extend(extra);
        go(&args);
        go(&["check", "one.fsm", &out]);
        go(&["metrics", &out]);
    }
    go(&["generate", "one.json", "--min-length", "1", "--max-length", "6"]);
    go(&["defects", "inject", "one.fsm", "--seed", "4", "--out", "defects.json"]);
    go(&["defects", "score", "one.fsm", "defects.json", "fsmt-1.json", "--out", "score.json"]);
    go(&["export-dot", "one.fsm", "--paths", "fsmt-2.json", "--index", "0", "--out", "one.dot"]);
    go(&["stats", "one.fsm", "--out", "stats.json"]);
    std::fs::write(
        d.join("bench.json"),
        r#"{"instances":[{"path":"pop/art-001.fsm"},{"path":"pop/art-002.fsm"},{"path":"one.fsm","origin":"industrial"}],"seed":3}"#,
    )
    .unwrap();
    go(&["bench", "bench.json", "--summary", "summary.csv", "--out", "runs.csv"]);
    go(&["bench", "bench.json", "--seed", "8", "--workers", "2"]);
    let files = snapshot(d);
    (stdout, files)
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_tpgen");
    let a = cli_session(bin);
    let b = cli_session(bin);
    let differing: Vec<&String> = a.1.keys().filter(|k| a.1.get(*k) != b.1.get(*k)).collect();
    let stdout_diff = a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count();
    if differing.is_empty() && a.1.len() == b.1.len() && stdout_diff == 0 {
        Ok(format!("{} output files and {} stdout streams identical", a.1.len(), a.0.len()))
    } else {
        Err(format!("differing files {differing:?}, differing stdout streams {stdout_diff}"))
    }
}

fn subsumption() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let registry = StrategyRegistry::with_builtins();
    let strategies: Vec<_> = registry.iter().cloned().collect();
    let mut level2_sets = 0;
    for _ in 0..1000 {
        let m = random_model(&mut rng, 8, 12);
        let max = rng.gen_range(1..=6);
        let min = rng.gen_range(1..=max);
        let spec = CoverageSpec::new(Level::Two, min, max).unwrap();
        let s = &strategies[rng.gen_range(0..strategies.len())];
        let mut paths = s.generate(&m, &spec, &RunOptions::default()).unwrap().paths;
        match rng.gen_range(0..3) {
            0 => {}
            1 if !paths.is_empty() => {
                paths.remove(rng.gen_range(0..paths.len()));
            }
            _ => {
                paths = (0..rng.gen_range(0..4))
                    .map(|_| TestPath::new((0..rng.gen_range(1..5)).map(|_| EdgeIx(rng.gen_range(0..m.edge_count()))).collect()))
                    .collect();
            }
        }
        if check_level2(&paths, &m, &spec).satisfied {
            level2_sets += 1;
            if !check_level1(&paths, &m, &spec).satisfied {
                return Err(format!("level 2 without level 1 on {:?}", m.to_doc()));
            }
        }
    }
    let g = grid();
    let mut fsmt_outputs = 0;
    for c in g.cells.iter().filter(|c| c.level == Level::Two && c.strategy == "fsmt") {
        if let Some(out) = c.out.as_ref().filter(|o| o.status == Status::Complete) {
            fsmt_outputs += 1;
            let spec = CoverageSpec::new(Level::One, c.range.0, c.range.1).unwrap();
            if !check_level1(&out.paths, &g.models[c.instance], &spec).satisfied {
                return Err(format!("level-2 FSMT output fails level 1 on {}", g.models[c.instance].name()));
            }
        }
    }
    Ok(format!(
        "1000 triples ({level2_sets} satisfy level 2); {fsmt_outputs} level-2 FSMT outputs pass level 1"
    ))
}

fn main() {
    let criteria: [(u8, fn() -> Outcome); 9] = [
        (1, closure),
        (2, oracle_equivalence),
        (3, infeasibility_agreement),
        (4, trend_level1),
        (5, trend_level2),
        (6, defect_trend),
        (7, metric_identities),
        (8, determinism),
        (9, subsumption),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {n}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
}
