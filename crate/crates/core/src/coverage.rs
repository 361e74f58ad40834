//! Coverage checkers, written independently of the generators.

use serde::{Deserialize, Serialize};

use crate::model::SutModel;
use crate::path::{CoverageSpec, EdgeSet, Level, TestPath};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    EmptyPath { path: usize },
    BrokenWalk { path: usize, position: usize },
    PathOutOfRange { path: usize, length: usize },
    BadStart { path: usize, vertex: String },
    BadEnd { path: usize, vertex: String },
    StartVertexUnserved { vertex: String },
    EdgeUncovered { edge: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageVerdict {
    pub satisfied: bool,
    pub violations: Vec<Violation>,
}

impl CoverageVerdict {
    fn from_violations(violations: Vec<Violation>) -> Self {
        CoverageVerdict {
            satisfied: violations.is_empty(),
            violations,
        }
    }
}

/// Edges that lie on at least one walk from a test start to a test end whose
/// length is inside the spec's range.
///
/// Uses layered reachability: `from_start[k]` marks vertices reachable from
/// some test start by a walk of exactly `k` edges, `to_end[k]` marks vertices
/// that reach some test end in exactly `k` edges. Edge `(s, f)` is coverable
/// iff `from_start[a][s]` and `to_end[c][f]` for some `a`, `c` with
/// `min <= a + 1 + c <= max`.
pub fn coverable_edges(m: &SutModel, spec: &CoverageSpec) -> EdgeSet {
    let n = m.vertex_count();
    let max = spec.max_length;

    let mut from_start = vec![vec![false; n]; max];
    let mut to_end = vec![vec![false; n]; max];
    if max > 0 {
        for v in m.test_starts() {
            from_start[0][v.0] = true;
        }
        for v in m.test_ends() {
            to_end[0][v.0] = true;
        }
    }
    for k in 1..max {
        for e in m.edges() {
            if from_start[k - 1][e.source.0] {
                from_start[k][e.target.0] = true;
            }
            if to_end[k - 1][e.target.0] {
                to_end[k][e.source.0] = true;
            }
        }
    }

    let mut out = EdgeSet::empty(m.edge_count());
    for ix in m.edge_ids() {
        let (s, f) = (m.source(ix).0, m.target(ix).0);
        let hit = (0..max).any(|a| {
            from_start[a][s]
                && (0..max - a).any(|c| to_end[c][f] && a + 1 + c >= spec.min_length)
        });
        if hit {
            out.insert(ix);
        }
    }
    out
}

fn level1_violations(paths: &[TestPath], m: &SutModel, spec: &CoverageSpec) -> Vec<Violation> {
    debug_assert!(m.test_starts().contains(&m.machine_start()));
    debug_assert!(m.machine_ends().iter().all(|v| m.is_test_end(*v)));

    let mut violations = Vec::new();
    let mut served = vec![false; m.vertex_count()];
    for (i, p) in paths.iter().enumerate() {
        if p.is_empty() {
            violations.push(Violation::EmptyPath { path: i });
            continue;
        }
        if let Some(position) = p.chain_break(m) {
            violations.push(Violation::BrokenWalk { path: i, position });
        }
        let first = p.first_vertex(m).expect("nonempty");
        let last = p.last_vertex(m).expect("nonempty");
        served[first.0] = true;
        if !m.is_test_start(first) {
            violations.push(Violation::BadStart {
                path: i,
                vertex: m.vertex_id(first).to_string(),
            });
        }
        if !m.is_test_end(last) {
            violations.push(Violation::BadEnd {
                path: i,
                vertex: m.vertex_id(last).to_string(),
            });
        }
        if !spec.in_range(p.len()) {
            violations.push(Violation::PathOutOfRange { path: i, length: p.len() });
        }
    }
    for &v in m.test_starts() {
        if !served[v.0] {
            violations.push(Violation::StartVertexUnserved {
                vertex: m.vertex_id(v).to_string(),
            });
        }
    }
    violations
}

pub fn check_level1(paths: &[TestPath], m: &SutModel, spec: &CoverageSpec) -> CoverageVerdict {
    CoverageVerdict::from_violations(level1_violations(paths, m, spec))
}

pub fn check_level2(paths: &[TestPath], m: &SutModel, spec: &CoverageSpec) -> CoverageVerdict {
    let mut violations = level1_violations(paths, m, spec);
    let mut covered = EdgeSet::empty(m.edge_count());
    for p in paths {
        for &e in p.edges() {
            covered.insert(e);
        }
    }
    for e in coverable_edges(m, spec).iter() {
        if !covered.contains(e) {
            violations.push(Violation::EdgeUncovered {
                edge: m.edge(e).id.clone(),
            });
        }
    }
    CoverageVerdict::from_violations(violations)
}

/// Checks against the criterion selected by `spec.level`.
pub fn check(paths: &[TestPath], m: &SutModel, spec: &CoverageSpec) -> CoverageVerdict {
    match spec.level {
        Level::One => check_level1(paths, m, spec),
        Level::Two => check_level2(paths, m, spec),
    }
}
