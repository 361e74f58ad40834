use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{EdgeIx, SutModel, VertexIx};
use crate::error::{Error, Result};

/// Maximum number of simple cycles enumerated before giving up.
pub const CYCLE_CAP: usize = 10_000;

/// Instance properties as reported in the benchmark instance tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub simple_cycle_count: usize,
    pub avg_cycle_length: f64,
    pub parallel_edge_count: usize,
    pub parallel_edge_group_count: usize,
    pub avg_in_degree: f64,
    pub avg_out_degree: f64,
    pub avg_degree: f64,
    pub test_start_count: usize,
    pub test_end_count: usize,
    pub start_end_overlap_count: usize,
    pub machine_end_count: usize,
    /// Set when cycle enumeration hit [`CYCLE_CAP`].
    #[serde(default)]
    pub partial: bool,
}

/// Enumerates simple directed cycles as edge sequences, each exactly once,
/// rooted at its lowest-index vertex. Parallel edges give distinct cycles and
/// a self-loop is a cycle of length one.
///
/// Returns `Err(found)` with the cycles found so far once more than `cap`
/// cycles exist.
pub fn simple_cycles(m: &SutModel, cap: usize) -> std::result::Result<Vec<Vec<EdgeIx>>, Vec<Vec<EdgeIx>>> {
    let n = m.vertex_count();
    let mut cycles = Vec::new();
    let mut on_path = vec![false; n];
    let mut can_return = vec![false; n];

    for root in 0..n {
        // vertices >= root that can get back to root without dipping below it
        can_return.iter_mut().for_each(|x| *x = false);
        can_return[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &e in m.incoming(VertexIx(v)) {
                let u = m.source(e).0;
                if u >= root && !can_return[u] {
                    can_return[u] = true;
                    stack.push(u);
                }
            }
        }

        let mut path: Vec<EdgeIx> = Vec::new();
        // explicit DFS: (vertex, next outgoing index)
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        on_path[root] = true;
        while let Some(frame) = frames.last_mut() {
            let (v, next) = *frame;
            let out = m.outgoing(VertexIx(v));
            if next == out.len() {
                frames.pop();
                on_path[v] = false;
                path.pop();
                continue;
            }
            frame.1 += 1;
            let e = out[next];
            let w = m.target(e).0;
            if w == root {
                let mut cycle = path.clone();
                cycle.push(e);
                cycles.push(cycle);
                if cycles.len() > cap {
                    return Err(cycles);
                }
            } else if w > root && !on_path[w] && can_return[w] {
                on_path[w] = true;
                path.push(e);
                frames.push((w, 0));
            }
        }
        on_path[root] = false;
    }
    Ok(cycles)
}

/// Computes instance properties. Fails with [`Error::CycleCap`] (carrying the
/// partial statistics) when the model has more than [`CYCLE_CAP`] simple cycles.
pub fn graph_stats(m: &SutModel) -> Result<GraphStats> {
    let (cycles, partial) = match simple_cycles(m, CYCLE_CAP) {
        Ok(c) => (c, false),
        Err(c) => (c, true),
    };
    let cycle_edges: usize = cycles.iter().map(Vec::len).sum();
    let avg_cycle_length = if cycles.is_empty() {
        0.0
    } else {
        cycle_edges as f64 / cycles.len() as f64
    };

    let mut groups: HashMap<(VertexIx, VertexIx), usize> = HashMap::new();
    for e in m.edges() {
        *groups.entry((e.source, e.target)).or_default() += 1;
    }
    let parallel_edge_count = groups.values().filter(|&&c| c > 1).sum();
    let parallel_edge_group_count = groups.values().filter(|&&c| c > 1).count();

    // every edge adds one to some in-degree and one to some out-degree
    let n = m.vertex_count() as f64;
    let avg_in_degree = m.edge_count() as f64 / n;
    let avg_out_degree = avg_in_degree;

    let overlap = m
        .test_starts()
        .iter()
        .filter(|v| m.is_test_end(**v))
        .count();

    let stats = GraphStats {
        vertex_count: m.vertex_count(),
        edge_count: m.edge_count(),
        simple_cycle_count: cycles.len(),
        avg_cycle_length,
        parallel_edge_count,
        parallel_edge_group_count,
        avg_in_degree,
        avg_out_degree,
        avg_degree: avg_in_degree + avg_out_degree,
        test_start_count: m.test_starts().len(),
        test_end_count: m.test_ends().len(),
        start_end_overlap_count: overlap,
        machine_end_count: m.machine_ends().len(),
        partial,
    };
    if partial {
        return Err(Error::CycleCap {
            cap: CYCLE_CAP,
            partial: Box::new(stats),
        });
    }
    Ok(stats)
}
