//! Artificial SINGLE and PAIR defects and their activation by a path set.
//!
//! A SINGLE defect sits on one edge and is activated by any path visiting it.
//! A PAIR defect is an ordered edge pair (trigger, manifest) where the
//! manifest is reachable from the trigger; one path must visit the trigger
//! and later the manifest.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{MetricsReport, Rational};
use crate::model::{EdgeIx, SutModel, VertexIx};
use crate::path::TestPath;

/// Mean defect counts per instance and the mean edge count they were
/// observed at. Default densities scale these by `|E|`.
const MEAN_SINGLES: f64 = 8.0;
const MEAN_PAIRS: f64 = 7.1;
const MEAN_EDGES: f64 = 35.8;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectSpec {
    /// Sorted, distinct.
    pub singles: Vec<EdgeIx>,
    /// `(trigger, manifest)`, distinct.
    pub pairs: Vec<(EdgeIx, EdgeIx)>,
    /// Mean number of edges between the trigger's target and the manifest's
    /// source. Zero when there are no pairs.
    pub mean_pair_distance: f64,
}

/// On-disk form, edges by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectDoc {
    pub singles: Vec<String>,
    pub pairs: Vec<PairDoc>,
    #[serde(default)]
    pub mean_pair_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDoc {
    pub trigger: String,
    pub manifest: String,
}

impl DefectSpec {
    pub fn to_doc(&self, m: &SutModel) -> DefectDoc {
        DefectDoc {
            singles: self.singles.iter().map(|&e| m.edge(e).id.clone()).collect(),
            pairs: self
                .pairs
                .iter()
                .map(|&(t, a)| PairDoc {
                    trigger: m.edge(t).id.clone(),
                    manifest: m.edge(a).id.clone(),
                })
                .collect(),
            mean_pair_distance: self.mean_pair_distance,
        }
    }

    /// Resolves ids and checks that every pair is reachable. The stored
    /// mean distance is recomputed.
    pub fn from_doc(doc: &DefectDoc, m: &SutModel) -> Result<Self> {
        let mut singles = doc
            .singles
            .iter()
            .map(|id| m.lookup_edge(id))
            .collect::<Result<Vec<_>>>()?;
        singles.sort();
        singles.dedup();
        let mut pairs = Vec::with_capacity(doc.pairs.len());
        let mut total = 0usize;
        for p in &doc.pairs {
            let (t, a) = (m.lookup_edge(&p.trigger)?, m.lookup_edge(&p.manifest)?);
            let d = distances_from(m, m.target(t))[m.source(a).0].ok_or_else(|| {
                Error::InvalidSpec(format!("manifest `{}` is not reachable from trigger `{}`", p.manifest, p.trigger))
            })?;
            total += d;
            pairs.push((t, a));
        }
        Ok(DefectSpec {
            singles,
            mean_pair_distance: mean(total, pairs.len()),
            pairs,
        })
    }

    pub fn to_json(&self, m: &SutModel) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_doc(m))?;
        s.push('\n');
        Ok(s)
    }
}

fn mean(total: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total as f64 / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectConfig {
    pub single_count: usize,
    pub pair_count: usize,
    /// Allow `trigger == manifest` when the edge lies on a cycle.
    #[serde(default)]
    pub allow_self_pairs: bool,
}

impl DefectConfig {
    pub fn new(single_count: usize, pair_count: usize) -> Self {
        DefectConfig {
            single_count,
            pair_count,
            allow_self_pairs: false,
        }
    }

    /// Counts at the reference mean densities scaled to `m`, clamped to the
    /// candidates `m` offers.
    pub fn density(m: &SutModel) -> Self {
        let scale = m.edge_count() as f64 / MEAN_EDGES;
        let singles = (MEAN_SINGLES * scale).round() as usize;
        let pairs = (MEAN_PAIRS * scale).round() as usize;
        DefectConfig::new(
            singles.min(m.edge_count()),
            pairs.min(pair_candidates(m, false).len()),
        )
    }
}

/// Shortest walk lengths from `from` to every vertex.
fn distances_from(m: &SutModel, from: VertexIx) -> Vec<Option<usize>> {
    let mut dist = vec![None; m.vertex_count()];
    dist[from.0] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v.0].expect("queued vertices have a distance");
        for &e in m.outgoing(v) {
            let t = m.target(e);
            if dist[t.0].is_none() {
                dist[t.0] = Some(d + 1);
                queue.push_back(t);
            }
        }
    }
    dist
}

/// Every valid ordered pair with its distance, in edge-index order.
pub fn pair_candidates(m: &SutModel, allow_self_pairs: bool) -> Vec<((EdgeIx, EdgeIx), usize)> {
    let mut out = Vec::new();
    let mut cache: Vec<Option<Vec<Option<usize>>>> = vec![None; m.vertex_count()];
    for t in m.edge_ids() {
        let from = m.target(t);
        let dist = cache[from.0].get_or_insert_with(|| distances_from(m, from));
        for a in m.edge_ids() {
            if a == t && !allow_self_pairs {
                continue;
            }
            if let Some(d) = dist[m.source(a).0] {
                out.push(((t, a), d));
            }
        }
    }
    out
}

/// Places defects uniformly at random.
pub fn inject_defects(m: &SutModel, config: &DefectConfig, seed: u64) -> Result<DefectSpec> {
    if config.single_count > m.edge_count() {
        return Err(Error::InsufficientCandidates(format!(
            "{} single defects requested, model has {} edges",
            config.single_count,
            m.edge_count()
        )));
    }
    let candidates = pair_candidates(m, config.allow_self_pairs);
    if config.pair_count > candidates.len() {
        return Err(Error::InsufficientCandidates(format!(
            "{} pair defects requested, {} valid pairs exist",
            config.pair_count,
            candidates.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut singles: Vec<EdgeIx> = sample(&mut rng, m.edge_count(), config.single_count)
        .into_iter()
        .map(EdgeIx)
        .collect();
    singles.sort();
    let mut picked = sample(&mut rng, candidates.len(), config.pair_count).into_vec();
    picked.sort();
    let total: usize = picked.iter().map(|&i| candidates[i].1).sum();
    Ok(DefectSpec {
        singles,
        pairs: picked.iter().map(|&i| candidates[i].0).collect(),
        mean_pair_distance: mean(total, picked.len()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationReport {
    /// `A_S`
    pub singles_activated: u64,
    /// `A_P`
    pub pairs_activated: u64,
    /// `E_S = A_S / len`
    pub efficiency_single: Rational,
    /// `E_P = A_P / len`
    pub efficiency_pair: Rational,
}

impl ActivationReport {
    pub fn zero() -> Self {
        ActivationReport {
            singles_activated: 0,
            pairs_activated: 0,
            efficiency_single: Rational::from_integer(0),
            efficiency_pair: Rational::from_integer(0),
        }
    }
}

fn pair_in_path(p: &TestPath, trigger: EdgeIx, manifest: EdgeIx) -> bool {
    let edges = p.edges();
    match edges.iter().position(|&e| e == trigger) {
        Some(i) => edges[i + 1..].contains(&manifest),
        None => false,
    }
}

/// Counts activated defects. `metrics` supplies `len` for the efficiencies.
pub fn activated_defects(paths: &[TestPath], d: &DefectSpec, metrics: &MetricsReport) -> ActivationReport {
    let visited: BTreeSet<EdgeIx> = paths.iter().flat_map(|p| p.edges().iter().copied()).collect();
    let singles = d.singles.iter().filter(|e| visited.contains(e)).count() as u64;
    let pairs = d
        .pairs
        .iter()
        .filter(|&&(t, a)| paths.iter().any(|p| pair_in_path(p, t, a)))
        .count() as u64;
    let per_step = |n: u64| {
        if metrics.total_steps == 0 {
            Rational::from_integer(0)
        } else {
            Rational::new(n, metrics.total_steps)
        }
    };
    ActivationReport {
        singles_activated: singles,
        pairs_activated: pairs,
        efficiency_single: per_step(singles),
        efficiency_pair: per_step(pairs),
    }
}
