//! N-switch set reduction: the exhaustive baseline.
//!
//! Every walk with a length in range is enumerated, walks that do not start
//! in a test start and end in a test end are dropped, and a single greedy pass
//! keeps a walk only if it serves a new test start or (at level 2) adds an
//! edge no kept walk has.
//!
//! Enumeration order is depth-first per first edge: for each edge in
//! declaration order, the extensions of the walk made of that edge come
//! before the walk itself (postorder), so longer walks are met first. The
//! reduction keeps the first qualifying walk it sees, so this
//! order decides which walks survive.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::limits::{Budget, Limits};
use crate::model::{EdgeIx, SutModel};
use crate::path::{CoverageSpec, EdgeSet, Level, TestPath, TestPathSet};

pub fn generate_nsr(m: &SutModel, spec: &CoverageSpec, limits: &Limits) -> Result<TestPathSet> {
    let mut budget = limits.budget();
    let mut reducer = Reducer::new(m, spec.level);
    for_each_walk_in_range(m, spec, &mut budget, |walk| {
        if is_test_path(m, walk) {
            reducer.offer(m, walk);
        }
    })?;

    let infeasible_starts = m
        .test_starts()
        .iter()
        .copied()
        .filter(|v| !reducer.starts[v.0])
        .collect();
    let uncoverable: BTreeSet<EdgeIx> = match spec.level {
        // the enumeration saw every in-range test path
        Level::Two => m.edge_ids().filter(|e| !reducer.edges.contains(*e)).collect(),
        Level::One => BTreeSet::new(),
    };
    Ok(TestPathSet::assemble(m, spec.level, reducer.kept, uncoverable, infeasible_starts))
}

/// Calls `visit` on every walk whose length lies in the spec's range, each
/// exactly once, in enumeration order.
pub fn for_each_walk_in_range(
    m: &SutModel,
    spec: &CoverageSpec,
    budget: &mut Budget,
    mut visit: impl FnMut(&[EdgeIx]),
) -> Result<()> {
    let mut walk = Vec::with_capacity(spec.max_length);
    for e in m.edge_ids() {
        extend(m, spec, e, &mut walk, budget, &mut visit)?;
    }
    Ok(())
}

fn extend(
    m: &SutModel,
    spec: &CoverageSpec,
    e: EdgeIx,
    walk: &mut Vec<EdgeIx>,
    budget: &mut Budget,
    visit: &mut impl FnMut(&[EdgeIx]),
) -> Result<()> {
    budget.spend(1)?;
    walk.push(e);
    if walk.len() < spec.max_length {
        for &next in m.outgoing(m.target(e)) {
            extend(m, spec, next, walk, budget, visit)?;
        }
    }
    if spec.in_range(walk.len()) {
        visit(walk);
    }
    walk.pop();
    Ok(())
}

/// All walks with length in range, in enumeration order.
pub fn enumerate_paths_in_range(m: &SutModel, spec: &CoverageSpec, limits: &Limits) -> Result<Vec<TestPath>> {
    let mut out = Vec::new();
    for_each_walk_in_range(m, spec, &mut limits.budget(), |w| out.push(TestPath::new(w.to_vec())))?;
    Ok(out)
}

fn is_test_path(m: &SutModel, walk: &[EdgeIx]) -> bool {
    match (walk.first(), walk.last()) {
        (Some(first), Some(last)) => m.is_test_start(m.source(*first)) && m.is_test_end(m.target(*last)),
        _ => false,
    }
}

/// Keeps the walks that start in a test start and end in a test end.
pub fn filter_test_paths(paths: impl IntoIterator<Item = TestPath>, m: &SutModel) -> Vec<TestPath> {
    paths.into_iter().filter(|p| is_test_path(m, p.edges())).collect()
}

/// Single greedy pass in input order: a path is kept when its start vertex is
/// not yet served or, at level 2, when it carries an edge no kept path has.
pub fn reduce_test_paths(paths: impl IntoIterator<Item = TestPath>, m: &SutModel, level: Level) -> Vec<TestPath> {
    let mut reducer = Reducer::new(m, level);
    for p in paths {
        reducer.offer(m, p.edges());
    }
    reducer.kept
}

struct Reducer {
    level: Level,
    starts: Vec<bool>,
    edges: EdgeSet,
    kept: Vec<TestPath>,
}

impl Reducer {
    fn new(m: &SutModel, level: Level) -> Self {
        Reducer {
            level,
            starts: vec![false; m.vertex_count()],
            edges: EdgeSet::empty(m.edge_count()),
            kept: Vec::new(),
        }
    }

    fn offer(&mut self, m: &SutModel, walk: &[EdgeIx]) {
        let Some(first) = walk.first() else { return };
        let start = m.source(*first);
        let keep = !self.starts[start.0]
            || (self.level == Level::Two && walk.iter().any(|e| !self.edges.contains(*e)));
        if keep {
            self.starts[start.0] = true;
            for &e in walk {
                self.edges.insert(e);
            }
            self.kept.push(TestPath::new(walk.to_vec()));
        }
    }
}
