//! Brute-force reference answers for small models.
//!
//! Nothing here calls into the generators or checkers of `tpgen-core`; only
//! the model's raw edge list and vertex sets are read. Everything is
//! exponential and meant for models with a handful of edges.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use tpgen_core::model::{EdgeDoc, ModelDoc};
use tpgen_core::SutModel;

/// Random model with between `max_v / 2` and `max_v` vertices and at most
/// `max_e` edges. Self-loops, parallel edges and unreachable parts are all
/// allowed.
pub fn random_model(rng: &mut impl Rng, max_v: usize, max_e: usize) -> SutModel {
    let n = rng.gen_range((max_v / 2).max(2)..=max_v);
    let m = rng.gen_range(1..=max_e);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges = (0..m)
        .map(|i| EdgeDoc {
            id: format!("e{}", i + 1),
            source: vertices[rng.gen_range(0..n)].clone(),
            target: vertices[rng.gen_range(0..n)].clone(),
            label: String::new(),
        })
        .collect();
    let mut pick = |at_least: usize| {
        let k = rng.gen_range(at_least..=n.min(3));
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(rng);
        vs.truncate(k);
        vs.sort();
        vs
    };
    let mut starts = pick(0);
    if !starts.contains(&0) {
        starts.insert(0, 0);
    }
    let ends = pick(1);
    let machine_ends = vec![ends[0]];
    let names = |ix: &[usize]| ix.iter().map(|&i| vertices[i].clone()).collect::<Vec<_>>();
    let doc = ModelDoc {
        name: "random".into(),
        machine_start: vertices[0].clone(),
        machine_ends: names(&machine_ends),
        test_starts: names(&starts),
        test_ends: names(&ends),
        vertices: vertices.clone(),
        edges,
    };
    SutModel::from_doc(doc).expect("random model is valid")
}

/// Plain copy of the parts of a model the oracles need.
#[derive(Debug, Clone)]
pub struct Graph {
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
    pub starts: BTreeSet<usize>,
    pub ends: BTreeSet<usize>,
    pub vertices: usize,
}

impl Graph {
    pub fn of(m: &SutModel) -> Self {
        Graph {
            src: m.edges().iter().map(|e| e.source.0).collect(),
            dst: m.edges().iter().map(|e| e.target.0).collect(),
            starts: m.test_starts().iter().map(|v| v.0).collect(),
            ends: m.test_ends().iter().map(|v| v.0).collect(),
            vertices: m.vertex_count(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.src.len()
    }

    /// Every walk of 1..=max edges, as edge index lists. Built by growing all
    /// walks of length k from all walks of length k-1.
    pub fn walks_up_to(&self, max: usize) -> Vec<Vec<usize>> {
        let mut all = Vec::new();
        let mut layer: Vec<Vec<usize>> = (0..self.edge_count()).map(|e| vec![e]).collect();
        for _ in 0..max {
            let mut next = Vec::new();
            for w in &layer {
                let tail = self.dst[*w.last().unwrap()];
                for e in 0..self.edge_count() {
                    if self.src[e] == tail {
                        let mut x = w.clone();
                        x.push(e);
                        next.push(x);
                    }
                }
            }
            all.append(&mut layer);
            layer = next;
        }
        all
    }

    pub fn walks_in_range(&self, min: usize, max: usize) -> BTreeSet<Vec<usize>> {
        self.walks_up_to(max)
            .into_iter()
            .filter(|w| w.len() >= min && w.len() <= max)
            .collect()
    }

    pub fn is_test_path(&self, w: &[usize]) -> bool {
        !w.is_empty() && self.starts.contains(&self.src[w[0]]) && self.ends.contains(&self.dst[w[w.len() - 1]])
    }

    pub fn test_paths(&self, min: usize, max: usize) -> Vec<Vec<usize>> {
        self.walks_in_range(min, max)
            .into_iter()
            .filter(|w| self.is_test_path(w))
            .collect()
    }

    /// Length of the shortest in-range test path leaving `start`.
    pub fn min_feasible_length(&self, start: usize, min: usize, max: usize) -> Option<usize> {
        self.test_paths(min, max)
            .iter()
            .filter(|w| self.src[w[0]] == start)
            .map(|w| w.len())
            .min()
    }

    /// Edges lying on at least one in-range test path.
    pub fn edge_union(&self, min: usize, max: usize) -> BTreeSet<usize> {
        self.test_paths(min, max).into_iter().flatten().collect()
    }

    pub fn pivot_coverable(&self, e: usize, min: usize, max: usize) -> bool {
        self.test_paths(min, max).iter().any(|w| w.contains(&e))
    }

    fn valid_path(&self, w: &[usize], min: usize, max: usize) -> bool {
        w.len() >= min
            && w.len() <= max
            && w.windows(2).all(|p| self.dst[p[0]] == self.src[p[1]])
            && self.is_test_path(w)
    }

    /// Every path is a valid in-range test path and every test start begins
    /// one of them.
    pub fn satisfies_level1(&self, paths: &[Vec<usize>], min: usize, max: usize) -> bool {
        paths.iter().all(|w| self.valid_path(w, min, max))
            && self
                .starts
                .iter()
                .all(|s| paths.iter().any(|w| self.src[w[0]] == *s))
    }

    /// Level 1, plus every edge on some in-range test path is traversed.
    pub fn satisfies_level2(&self, paths: &[Vec<usize>], min: usize, max: usize) -> bool {
        let covered: BTreeSet<usize> = paths.iter().flatten().copied().collect();
        self.satisfies_level1(paths, min, max) && self.edge_union(min, max).is_subset(&covered)
    }
}
