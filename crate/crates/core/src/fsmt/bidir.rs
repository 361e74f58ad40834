//! Bidirectional breadth-first search for an in-range test path through a
//! given pivot edge.
//!
//! Two frontiers grow semi-paths out of the pivot: the backward one prepends
//! incoming edges until it reaches a test start, the forward one appends
//! outgoing edges until it reaches a test end. Each side keeps one
//! representative semi-path per length that already touches its destination
//! set. Any backward representative of length `b` joins any forward one of
//! length `f` into a full path of `b + f - 1` edges (the pivot is shared), so
//! a single representative per length is enough to decide coverability.
//!
//! Pruning uses each side's current BFS depth (`Frontier::min`), which is a
//! lower bound on every semi-path that side has yet to process:
//!
//! * a candidate of length `L` is stored only if `L + other_min - 1 <= max`;
//! * a semi-path of length `L` is extended only if
//!   `L + min(other_min, shortest stored on the other side) <= max`.
//!
//! Both bounds are tight, so the search finds a path whenever one exists.

use std::collections::{BTreeMap, VecDeque};

use crate::error::Result;
use crate::limits::Budget;
use crate::model::{EdgeIx, SutModel, VertexIx};
use crate::path::{CoverageSpec, EdgeSet, Level, TestPath};

use super::remove_parallel_edges;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Prepend incoming edges, heading for a test start.
    Backward,
    /// Append outgoing edges, heading for a test end.
    Forward,
}

/// One side of the search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Frontier {
    pub queue: VecDeque<TestPath>,
    /// Representative semi-path per length, for semi-paths that reached the
    /// destination set.
    pub map: BTreeMap<usize, TestPath>,
    /// Length of the semi-paths currently being pulled.
    pub min: usize,
    /// Semi-paths of length `min` still in the queue.
    pub min_count: usize,
    /// Semi-paths of length `min + 1` pushed so far.
    pub max_count: usize,
}

impl Frontier {
    fn seeded(pivot: EdgeIx) -> Self {
        Frontier {
            queue: VecDeque::from([TestPath::new(vec![pivot])]),
            map: BTreeMap::new(),
            min: 1,
            min_count: 1,
            max_count: 0,
        }
    }

    /// Lower bound on the length of any semi-path this side can still offer
    /// to a join, stored or not yet processed.
    fn reach(&self) -> usize {
        let stored = self.map.keys().next().copied().unwrap_or(usize::MAX);
        stored.min(self.min)
    }
}

/// Complete search state for one pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiPathMaps {
    /// Backward side; its map holds semi-paths starting in a test start.
    pub start: Frontier,
    /// Forward side; its map holds semi-paths ending in a test end.
    pub end: Frontier,
}

impl SemiPathMaps {
    pub fn seeded(pivot: EdgeIx) -> Self {
        SemiPathMaps {
            start: Frontier::seeded(pivot),
            end: Frontier::seeded(pivot),
        }
    }

    fn sides(&mut self, dir: Direction) -> (&mut Frontier, &Frontier) {
        match dir {
            Direction::Backward => (&mut self.start, &self.end),
            Direction::Forward => (&mut self.end, &self.start),
        }
    }
}

fn frontier_vertex(m: &SutModel, semi: &TestPath, dir: Direction) -> VertexIx {
    match dir {
        Direction::Backward => semi.first_vertex(m),
        Direction::Forward => semi.last_vertex(m),
    }
    .expect("semi-paths always hold the pivot")
}

fn reached_destination(m: &SutModel, v: VertexIx, dir: Direction) -> bool {
    match dir {
        Direction::Backward => m.is_test_start(v),
        Direction::Forward => m.is_test_end(v),
    }
}

fn uncovered_count(p: &TestPath, uncovered: &EdgeSet) -> usize {
    let mut seen: Vec<EdgeIx> = Vec::with_capacity(p.len());
    for &e in p.edges() {
        if uncovered.contains(e) && !seen.contains(&e) {
            seen.push(e);
        }
    }
    seen.len()
}

/// Finds a walk from a test start to a test end that contains `pivot` and has
/// a length inside the spec's range, or `None` when no such walk exists.
/// The backward side moves first in every round.
pub fn find_shortest_path_in_range_for_edge(
    pivot: EdgeIx,
    m: &SutModel,
    spec: &CoverageSpec,
    uncovered: &EdgeSet,
    budget: &mut Budget,
) -> Result<Option<TestPath>> {
    let mut state = SemiPathMaps::seeded(pivot);
    while !state.start.queue.is_empty() || !state.end.queue.is_empty() {
        for dir in [Direction::Backward, Direction::Forward] {
            let pending = match dir {
                Direction::Backward => !state.start.queue.is_empty(),
                Direction::Forward => !state.end.queue.is_empty(),
            };
            if pending {
                if let Some(p) = directed_search_step(&mut state, dir, m, spec, uncovered, budget)? {
                    return Ok(Some(p));
                }
            }
        }
    }
    Ok(None)
}

/// Processes one semi-path from the `dir` side's queue. Returns a full test
/// path when this semi-path completes one.
pub fn directed_search_step(
    state: &mut SemiPathMaps,
    dir: Direction,
    m: &SutModel,
    spec: &CoverageSpec,
    uncovered: &EdgeSet,
    budget: &mut Budget,
) -> Result<Option<TestPath>> {
    let (own, other) = state.sides(dir);
    let Some(semi) = own.queue.pop_front() else {
        return Ok(None);
    };
    own.min_count = own.min_count.saturating_sub(1);

    if semi.len() <= spec.max_length {
        let v = frontier_vertex(m, &semi, dir);
        if reached_destination(m, v, dir) {
            let full = evaluate_candidate(&semi, &mut own.map, &other.map, dir, other.min, spec, uncovered);
            if full.is_some() {
                return Ok(full);
            }
        }
        if semi.len() + other.reach() <= spec.max_length {
            prepare_next_moves(
                &mut own.queue,
                &semi,
                v,
                &mut own.max_count,
                dir,
                m,
                uncovered,
                spec.level,
                budget,
            )?;
        }
    }

    if own.min_count == 0 {
        own.min_count = own.max_count;
        own.max_count = 0;
        own.min += 1;
    }
    Ok(None)
}

/// Tries to join `semi` with a complementary semi-path from `other_map`; on a
/// miss, stores `semi` in `own_map` if a future join is still possible.
///
/// At level 2 a stored representative is replaced by a same-length semi-path
/// that carries more uncovered edges.
pub fn evaluate_candidate(
    semi: &TestPath,
    own_map: &mut BTreeMap<usize, TestPath>,
    other_map: &BTreeMap<usize, TestPath>,
    dir: Direction,
    other_min: usize,
    spec: &CoverageSpec,
    uncovered: &EdgeSet,
) -> Option<TestPath> {
    let len = semi.len();
    if len == 0 || len > spec.max_length {
        return None;
    }
    let lower = spec.min_length.saturating_sub(len) + 1;
    let upper = spec.max_length - len + 1;
    if let Some((_, partner)) = other_map.range(lower..=upper).next() {
        let (head, tail) = match dir {
            Direction::Backward => (semi, partner),
            Direction::Forward => (partner, semi),
        };
        let mut edges = Vec::with_capacity(head.len() + tail.len() - 1);
        edges.extend_from_slice(&head.edges()[..head.len() - 1]);
        edges.extend_from_slice(tail.edges());
        return Some(TestPath::new(edges));
    }

    if len + other_min <= spec.max_length + 1 {
        match own_map.get(&len) {
            None => {
                own_map.insert(len, semi.clone());
            }
            Some(stored)
                if spec.level == Level::Two
                    && uncovered_count(stored, uncovered) < uncovered_count(semi, uncovered) =>
            {
                own_map.insert(len, semi.clone());
            }
            Some(_) => {}
        }
    }
    None
}

/// Extends `semi` by every (parallel-filtered) edge at `frontier`, pushing the
/// results FIFO and counting them into `next_depth_count`.
#[allow(clippy::too_many_arguments)]
pub fn prepare_next_moves(
    queue: &mut VecDeque<TestPath>,
    semi: &TestPath,
    frontier: VertexIx,
    next_depth_count: &mut usize,
    dir: Direction,
    m: &SutModel,
    uncovered: &EdgeSet,
    level: Level,
    budget: &mut Budget,
) -> Result<()> {
    let candidates = match dir {
        Direction::Backward => m.incoming(frontier),
        Direction::Forward => m.outgoing(frontier),
    };
    for e in remove_parallel_edges(m, candidates, uncovered, level) {
        budget.spend(1)?;
        let mut edges = Vec::with_capacity(semi.len() + 1);
        match dir {
            Direction::Backward => {
                edges.push(e);
                edges.extend_from_slice(semi.edges());
            }
            Direction::Forward => {
                edges.extend_from_slice(semi.edges());
                edges.push(e);
            }
        }
        queue.push_back(TestPath::new(edges));
        *next_depth_count += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    fn spec(level: Level, min: usize, max: usize) -> CoverageSpec {
        CoverageSpec::new(level, min, max).unwrap()
    }

    fn through(m: &SutModel, pivot: &str, min: usize, max: usize) -> Option<Vec<EdgeIx>> {
        let uncovered = EdgeSet::full(m.edge_count());
        find_shortest_path_in_range_for_edge(
            e(m, pivot),
            m,
            &spec(Level::One, min, max),
            &uncovered,
            &mut Budget::unlimited(),
        )
        .unwrap()
        .map(TestPath::into_edges)
    }

    #[test]
    fn chain_pivot() {
        let m = chain();
        assert_eq!(through(&m, "e2", 3, 3), Some(edges(&m, &["e1", "e2", "e3"])));
        assert_eq!(through(&m, "e2", 4, 8), None);
    }

    #[test]
    fn single_edge_pivot() {
        let m = single();
        assert_eq!(through(&m, "e1", 1, 1), Some(edges(&m, &["e1"])));
    }

    #[test]
    fn loop_pivots_need_padding() {
        let m = lp();
        let p = through(&m, "e2", 4, 6).unwrap();
        let p = TestPath::new(p);
        assert!(p.is_walk(&m) && p.contains(e(&m, "e2")));
        assert!((4..=6).contains(&p.len()));
        assert_eq!(through(&m, "e2", 3, 3), None);
    }

    #[test]
    fn backward_step_on_loop() {
        let m = lp();
        let s = spec(Level::One, 1, 4);
        let mut state = SemiPathMaps::seeded(e(&m, "e3"));
        let uncovered = EdgeSet::full(3);
        let out = directed_search_step(&mut state, Direction::Backward, &m, &s, &uncovered, &mut Budget::unlimited())
            .unwrap();
        assert!(out.is_none());
        assert_eq!(
            state.start.queue.iter().cloned().collect::<Vec<_>>(),
            vec![TestPath::new(edges(&m, &["e1", "e3"]))]
        );
        assert!(state.start.map.is_empty());
        assert_eq!((state.start.min, state.start.min_count, state.start.max_count), (2, 1, 0));
    }

    #[test]
    fn forward_step_stores_candidate() {
        let m = lp();
        let s = spec(Level::One, 2, 4);
        let mut state = SemiPathMaps::seeded(e(&m, "e3"));
        let uncovered = EdgeSet::full(3);
        let out = directed_search_step(&mut state, Direction::Forward, &m, &s, &uncovered, &mut Budget::unlimited())
            .unwrap();
        assert!(out.is_none());
        assert_eq!(state.end.map.get(&1), Some(&TestPath::new(edges(&m, &["e3"]))));
    }

    #[test]
    fn overlong_semi_path_is_consumed_silently() {
        let m = lp();
        let s = spec(Level::One, 1, 2);
        let mut state = SemiPathMaps::seeded(e(&m, "e3"));
        state.end.queue = VecDeque::from([TestPath::new(edges(&m, &["e3", "e3", "e3"]))]);
        let uncovered = EdgeSet::full(3);
        let out = directed_search_step(&mut state, Direction::Forward, &m, &s, &uncovered, &mut Budget::unlimited())
            .unwrap();
        assert!(out.is_none());
        assert!(state.end.queue.is_empty());
        assert!(state.end.map.is_empty());
    }

    #[test]
    fn evaluate_joins_complement() {
        let m = lp();
        let s = spec(Level::One, 2, 4);
        let semi = TestPath::new(edges(&m, &["e1", "e2"]));
        let other: BTreeMap<usize, TestPath> =
            [(3, TestPath::new(edges(&m, &["e2", "e1", "e3"])))].into_iter().collect();
        let mut own = BTreeMap::new();
        let full = evaluate_candidate(&semi, &mut own, &other, Direction::Backward, 3, &s, &EdgeSet::full(3));
        assert_eq!(full, Some(TestPath::new(edges(&m, &["e1", "e2", "e1", "e3"]))));
    }

    #[test]
    fn evaluate_stores_on_miss() {
        let m = lp();
        let s = spec(Level::One, 2, 4);
        let semi = TestPath::new(edges(&m, &["e1", "e2"]));
        let mut own = BTreeMap::new();
        let full = evaluate_candidate(&semi, &mut own, &BTreeMap::new(), Direction::Backward, 1, &s, &EdgeSet::full(3));
        assert!(full.is_none());
        assert_eq!(own.get(&2), Some(&semi));
    }

    #[test]
    fn evaluate_level2_prefers_uncovered() {
        let m = lp();
        let s = spec(Level::Two, 1, 6);
        let mut uncovered = EdgeSet::empty(3);
        uncovered.insert(e(&m, "e2"));
        let plain = TestPath::new(edges(&m, &["e1", "e3", "e3"]));
        let richer = TestPath::new(edges(&m, &["e2", "e1", "e3"]));
        let mut own: BTreeMap<usize, TestPath> = [(3, plain.clone())].into_iter().collect();
        evaluate_candidate(&richer, &mut own, &BTreeMap::new(), Direction::Forward, 1, &s, &uncovered);
        assert_eq!(own.get(&3), Some(&richer));
        // level 1 keeps the first representative
        let mut own: BTreeMap<usize, TestPath> = [(3, plain.clone())].into_iter().collect();
        let s1 = spec(Level::One, 1, 6);
        evaluate_candidate(&richer, &mut own, &BTreeMap::new(), Direction::Forward, 1, &s1, &uncovered);
        assert_eq!(own.get(&3), Some(&plain));
    }

    #[test]
    fn next_moves() {
        let m = diamond();
        let uncovered = EdgeSet::full(4);
        let mut q = VecDeque::new();
        let mut count = 0;
        let semi = TestPath::new(edges(&m, &["e1"]));
        prepare_next_moves(&mut q, &semi, v(&m, "B"), &mut count, Direction::Forward, &m, &uncovered, Level::One, &mut Budget::unlimited()).unwrap();
        assert_eq!(q.pop_front(), Some(TestPath::new(edges(&m, &["e1", "e3"]))));
        assert_eq!(count, 1);

        let semi = TestPath::new(edges(&m, &["e3"]));
        prepare_next_moves(&mut q, &semi, v(&m, "B"), &mut count, Direction::Backward, &m, &uncovered, Level::One, &mut Budget::unlimited()).unwrap();
        assert_eq!(q.pop_front(), Some(TestPath::new(edges(&m, &["e1", "e3"]))));
        assert_eq!(count, 2);

        let m = par();
        let mut q = VecDeque::new();
        let mut count = 0;
        prepare_next_moves(&mut q, &TestPath::new(vec![]), v(&m, "A"), &mut count, Direction::Forward, &m, &EdgeSet::full(3), Level::One, &mut Budget::unlimited()).unwrap();
        assert_eq!(q.into_iter().collect::<Vec<_>>(), vec![TestPath::new(edges(&m, &["e1"]))]);
        assert_eq!(count, 1);
    }
}
