//! The FSMT generation strategy.
//!
//! Phase one runs a breadth-first search from every test start for the
//! shortest in-range walk to a test end. At level 2, phase two then threads a
//! path through each still-uncovered edge with a bidirectional breadth-first
//! search anchored at that edge (see [`bidir`]).

pub mod bidir;

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::limits::Budget;
use crate::model::{EdgeIx, SutModel, VertexIx};
use crate::path::{CoverageSpec, EdgeSet, Level, TestPath, TestPathSet};
use crate::strategy::RunOptions;

pub use bidir::{
    directed_search_step, evaluate_candidate, find_shortest_path_in_range_for_edge,
    prepare_next_moves, Direction, Frontier, SemiPathMaps,
};

/// Generates a test path set with the FSMT strategy.
pub fn generate_fsmt(m: &SutModel, spec: &CoverageSpec, opts: &RunOptions) -> Result<TestPathSet> {
    let mut budget = opts.limits.budget();
    let mut uncovered = EdgeSet::full(m.edge_count());
    let mut paths = Vec::new();
    let mut infeasible_starts = BTreeSet::new();
    let mut uncoverable = BTreeSet::new();

    for &start in m.test_starts() {
        match find_shortest_path_in_range(m, spec, &uncovered, start, &mut budget)? {
            Some(p) => {
                for &e in p.edges() {
                    uncovered.remove(e);
                }
                paths.push(p);
            }
            None => {
                infeasible_starts.insert(start);
            }
        }
    }

    if spec.level == Level::Two {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        while !uncovered.is_empty() {
            let pivot = if opts.shuffle_pivots {
                let k = rng.gen_range(0..uncovered.len());
                uncovered.iter().nth(k).expect("k < len")
            } else {
                uncovered.first().expect("nonempty")
            };
            uncovered.remove(pivot);
            match find_shortest_path_in_range_for_edge(pivot, m, spec, &uncovered, &mut budget)? {
                Some(p) => {
                    for &e in p.edges() {
                        uncovered.remove(e);
                    }
                    paths.push(p);
                }
                None => {
                    uncoverable.insert(pivot);
                }
            }
        }
    }

    Ok(TestPathSet::assemble(m, spec.level, paths, uncoverable, infeasible_starts))
}

/// Drops parallel duplicates from `candidates`, keeping the first edge of each
/// (source, target) pair. At level 2 a kept edge that is already covered is
/// replaced in place by each later parallel edge.
pub fn remove_parallel_edges(
    m: &SutModel,
    candidates: &[EdgeIx],
    uncovered: &EdgeSet,
    level: Level,
) -> Vec<EdgeIx> {
    let mut filtered: Vec<EdgeIx> = Vec::with_capacity(candidates.len());
    for &e in candidates {
        match filtered.iter().position(|&kept| m.parallel(kept, e)) {
            None => filtered.push(e),
            Some(i) => {
                if level == Level::Two && !uncovered.contains(filtered[i]) {
                    filtered[i] = e;
                }
            }
        }
    }
    filtered
}

struct Node {
    parent: Option<usize>,
    edge: EdgeIx,
    len: usize,
    last: VertexIx,
}

fn unwind(arena: &[Node], mut at: Option<usize>) -> TestPath {
    let mut edges = Vec::new();
    while let Some(i) = at {
        edges.push(arena[i].edge);
        at = arena[i].parent;
    }
    edges.reverse();
    TestPath::new(edges)
}

/// Breadth-first search from `start` for the shortest walk ending in a test
/// end with length inside the spec's range. FIFO order makes the first hit
/// minimal; ties go to the earliest edges in declaration order.
pub fn find_shortest_path_in_range(
    m: &SutModel,
    spec: &CoverageSpec,
    uncovered: &EdgeSet,
    start: VertexIx,
    budget: &mut Budget,
) -> Result<Option<TestPath>> {
    let mut arena: Vec<Node> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut current: Option<usize> = None;

    loop {
        let (len, last) = match current {
            None => (0, start),
            Some(i) => (arena[i].len, arena[i].last),
        };
        if len <= spec.max_length {
            if len >= spec.min_length && m.is_test_end(last) {
                return Ok(Some(unwind(&arena, current)));
            }
            if len < spec.max_length {
                for e in remove_parallel_edges(m, m.outgoing(last), uncovered, spec.level) {
                    budget.spend(1)?;
                    arena.push(Node {
                        parent: current,
                        edge: e,
                        len: len + 1,
                        last: m.target(e),
                    });
                    queue.push_back(arena.len() - 1);
                }
            }
        }
        match queue.pop_front() {
            Some(i) => current = Some(i),
            None => return Ok(None),
        }
    }
}
