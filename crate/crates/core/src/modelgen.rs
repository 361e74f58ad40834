//! Random SUT models with requested properties.
//!
//! Construction: a random spanning arborescence rooted at the machine start,
//! chord edges up to the edge count, then chord rewiring until the simple
//! cycle count is exact. Vertices are ranked by insertion into the
//! arborescence; a chord from a lower to a higher rank never closes a cycle,
//! so rewiring flips chords between the two directions to steer the count.
//! Once the count is met, a polishing pass relocates chords while the count
//! holds and cycles do not get shorter.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{graph_stats, simple_cycles, EdgeDoc, GraphStats, ModelDoc, SutModel};

/// Rewiring moves tried before giving up on the cycle target.
pub const REWIRE_CAP: usize = 1_000;

const TREE_WINDOW: usize = 2;

const POLISH_MOVES: usize = 1_000;

/// Backward chords are the widest of this many random candidates, which
/// favours long cycles.
const BACK_EDGE_DRAWS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetProperties {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub cycle_count: usize,
    pub test_start_count: usize,
    pub test_end_count: usize,
    pub start_end_overlap_count: usize,
    pub machine_end_count: usize,
}

impl TargetProperties {
    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count;
        let fail = |reason: String| Err(Error::Unsatisfiable { reason, last: None });
        if n < 2 {
            return fail(format!("{n} vertices, need at least 2"));
        }
        if self.edge_count + 1 < n {
            return fail(format!("{} edges cannot connect {n} vertices", self.edge_count));
        }
        if self.edge_count > n * (n - 1) {
            return fail(format!(
                "{} edges exceed the {} possible without parallel edges or self-loops",
                self.edge_count,
                n * (n - 1)
            ));
        }
        if self.cycle_count > 0 && self.edge_count < n {
            return fail("a spanning arborescence alone has no cycles".into());
        }
        if self.test_start_count == 0 || self.test_end_count == 0 {
            return fail("test start and test end sets must be nonempty".into());
        }
        if self.start_end_overlap_count > self.test_start_count.min(self.test_end_count) {
            return fail("overlap exceeds the smaller of the start and end sets".into());
        }
        if self.machine_end_count > self.test_end_count {
            return fail("more machine ends than test ends".into());
        }
        if self.test_start_count + self.test_end_count - self.start_end_overlap_count > n {
            return fail("start and end sets do not fit in the vertex set".into());
        }
        Ok(())
    }

    /// True when `s` reproduces every requested count.
    pub fn matches(&self, s: &GraphStats) -> bool {
        s.vertex_count == self.vertex_count
            && s.edge_count == self.edge_count
            && s.simple_cycle_count == self.cycle_count
            && s.test_start_count == self.test_start_count
            && s.test_end_count == self.test_end_count
            && s.start_end_overlap_count == self.start_end_overlap_count
            && s.machine_end_count == self.machine_end_count
            && !s.partial
    }
}

pub fn generate_instance(t: &TargetProperties, seed: u64) -> Result<SutModel> {
    generate_named(t, seed, &format!("gen-{seed}"))
}

pub fn generate_named(t: &TargetProperties, seed: u64, name: &str) -> Result<SutModel> {
    t.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = t.vertex_count;

    // rank 0 is the machine start; parents come from the last few ranks, so
    // the tree is deep and chain-like
    let mut edges: Vec<(usize, usize)> = (1..n)
        .map(|v| (rng.gen_range(v.saturating_sub(TREE_WINDOW)..v), v))
        .collect();
    let tree = edges.len();
    let mut present: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let forward_slots = n * (n - 1) / 2 - tree;
    while edges.len() < t.edge_count {
        let want_forward = edges.len() - tree < forward_slots;
        let pair = random_pair(&mut rng, n, &present, Some(want_forward)).expect("a free slot exists");
        present.insert(pair);
        edges.push(pair);
    }

    let slack = t.cycle_count + 64;
    let count = |edges: &[(usize, usize)]| cycle_count(n, edges, slack);
    let mut current = count(&edges);
    let mut moves = 0;
    while current != t.cycle_count {
        if moves == REWIRE_CAP || edges.len() == tree {
            let model = build(name, &mut rng, n, &edges, t)?;
            return Err(Error::Unsatisfiable {
                reason: format!(
                    "{} simple cycles after {moves} rewiring moves, wanted {}",
                    current, t.cycle_count
                ),
                last: graph_stats(&model).ok().map(Box::new),
            });
        }
        moves += 1;
        let grow = current < t.cycle_count;
        // half the moves flip a chord from the direction that cannot add
        // cycles to the one that can (or back), the rest relocate anywhere
        let directed = rng.gen_bool(0.5);
        let chords: Vec<usize> = (tree..edges.len())
            .filter(|&i| !directed || (edges[i].0 < edges[i].1) == grow)
            .collect();
        let slot = match chords.choose(&mut rng) {
            Some(&i) => i,
            None => rng.gen_range(tree..edges.len()),
        };
        let Some(pair) = random_pair(&mut rng, n, &present, directed.then_some(!grow))
            .or_else(|| random_pair(&mut rng, n, &present, None))
        else {
            continue;
        };
        let old = edges[slot];
        edges[slot] = pair;
        let next = count(&edges);
        if next.abs_diff(t.cycle_count) <= current.abs_diff(t.cycle_count) {
            present.remove(&old);
            present.insert(pair);
            current = next;
        } else {
            edges[slot] = old;
        }
    }

    // with the count met, relocate chords a while longer, keeping moves that
    // hold the count and lengthen the average cycle
    let (_, mut total) = cycles(n, &edges, slack);
    for _ in 0..POLISH_MOVES {
        if edges.len() == tree {
            break;
        }
        let slot = rng.gen_range(tree..edges.len());
        let Some(pair) = random_pair(&mut rng, n, &present, None) else {
            break;
        };
        let old = edges[slot];
        edges[slot] = pair;
        let (c, len) = cycles(n, &edges, slack);
        if c == t.cycle_count && len >= total {
            present.remove(&old);
            present.insert(pair);
            total = len;
        } else {
            edges[slot] = old;
        }
    }

    let model = build(name, &mut rng, n, &edges, t)?;
    debug_assert!(graph_stats(&model).map(|s| t.matches(&s)).unwrap_or(false));
    Ok(model)
}

/// A free `(a, b)` slot with `a != b`. `forward` restricts to `a < b`
/// (`Some(true)`) or `a > b` (`Some(false)`).
fn random_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
    present: &HashSet<(usize, usize)>,
    forward: Option<bool>,
) -> Option<(usize, usize)> {
    let ok = |a: usize, b: usize| a != b && !present.contains(&(a, b)) && forward.is_none_or(|f| (a < b) == f);
    let draws = if forward == Some(false) { BACK_EDGE_DRAWS } else { 1 };
    let mut best: Option<(usize, usize)> = None;
    let mut found = 0;
    for _ in 0..64 {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if ok(a, b) {
            if best.is_none_or(|(x, y)| a.abs_diff(b) > x.abs_diff(y)) {
                best = Some((a, b));
            }
            found += 1;
            if found == draws {
                break;
            }
        }
    }
    if best.is_some() {
        return best;
    }
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| ok(a, b))
        .collect();
    free.choose(rng).copied()
}

fn skeleton(n: usize, edges: &[(usize, usize)]) -> SutModel {
    let vertices: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    SutModel::from_doc(ModelDoc {
        name: "skeleton".into(),
        edges: edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| EdgeDoc {
                id: i.to_string(),
                source: vertices[a].clone(),
                target: vertices[b].clone(),
                label: String::new(),
            })
            .collect(),
        machine_start: vertices[0].clone(),
        machine_ends: vec![],
        test_starts: vec![vertices[0].clone()],
        test_ends: vec![vertices[0].clone()],
        vertices,
    })
    .expect("skeleton is valid")
}

/// Simple cycle count, saturating at `cap + 1`.
fn cycle_count(n: usize, edges: &[(usize, usize)], cap: usize) -> usize {
    cycles(n, edges, cap).0
}

/// Simple cycle count and total cycle length; the count is `cap + 1` past
/// the cap.
fn cycles(n: usize, edges: &[(usize, usize)], cap: usize) -> (usize, usize) {
    match simple_cycles(&skeleton(n, edges), cap) {
        Ok(c) => (c.len(), c.iter().map(Vec::len).sum()),
        Err(_) => (cap + 1, 0),
    }
}

/// Names vertices and edges in shuffled order and samples the vertex sets.
fn build(
    name: &str,
    rng: &mut ChaCha8Rng,
    n: usize,
    edges: &[(usize, usize)],
    t: &TargetProperties,
) -> Result<SutModel> {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let vname = |rank: usize| format!("s{}", label[rank] + 1);

    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(rng);

    // V_ts holds rank 0; the overlap is drawn from V_ts, the rest of V_te
    // from outside it
    let mut starts = vec![0];
    starts.extend(sample(rng, n - 1, t.test_start_count - 1).into_iter().map(|i| i + 1));
    let mut ends: Vec<usize> = sample(rng, starts.len(), t.start_end_overlap_count)
        .into_iter()
        .map(|i| starts[i])
        .collect();
    let outside: Vec<usize> = (0..n).filter(|v| !starts.contains(v)).collect();
    ends.extend(
        sample(rng, outside.len(), t.test_end_count - t.start_end_overlap_count)
            .into_iter()
            .map(|i| outside[i]),
    );
    let machine_ends: Vec<usize> = sample(rng, ends.len(), t.machine_end_count)
        .into_iter()
        .map(|i| ends[i])
        .collect();

    SutModel::from_doc(ModelDoc {
        name: name.to_string(),
        vertices: (1..=n).map(|i| format!("s{i}")).collect(),
        edges: order
            .iter()
            .enumerate()
            .map(|(k, &i)| EdgeDoc {
                id: format!("e{}", k + 1),
                source: vname(edges[i].0),
                target: vname(edges[i].1),
                label: String::new(),
            })
            .collect(),
        machine_start: vname(0),
        machine_ends: machine_ends.into_iter().map(vname).collect(),
        test_starts: starts.into_iter().map(vname).collect(),
        test_ends: ends.into_iter().map(vname).collect(),
    })
}

/// Property ranges to sample targets from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Small generated instances: 15 to 23 vertices, 23 to 35 edges, 2 or 3
    /// cycles, one or two test starts and ends, one machine end.
    Artificial,
    /// Larger instances shaped like the industrial models: 31 to 57
    /// vertices, 41 to 95 edges, up to 18 cycles, larger start/end sets.
    Industrial,
}

/// Draws a target from `profile`'s ranges, skewed toward the low end so the
/// means sit near the reference averages.
pub fn sample_targets(profile: Profile, rng: &mut impl Rng) -> TargetProperties {
    let skew = |rng: &mut dyn rand::RngCore, lo: usize, hi: usize| -> usize {
        let u: f64 = rng.gen();
        lo + ((hi - lo + 1) as f64 * u * u) as usize
    };
    match profile {
        Profile::Artificial => {
            let vertex_count = skew(rng, 15, 23);
            let edge_count = (35 - skew(rng, 0, 12)).max(vertex_count + 2);
            let test_start_count = rng.gen_range(1..=2);
            let test_end_count = rng.gen_range(1..=2);
            TargetProperties {
                vertex_count,
                edge_count,
                cycle_count: rng.gen_range(2..=3),
                test_start_count,
                test_end_count,
                start_end_overlap_count: overlap(rng, test_start_count.min(test_end_count)),
                machine_end_count: 1,
            }
        }
        Profile::Industrial => {
            let vertex_count = skew(rng, 31, 57);
            let edge_count = ((vertex_count as f64 * rng.gen_range(1.3..1.9)) as usize).clamp(41, 95);
            let test_start_count = skew(rng, 1, 17);
            let test_end_count = skew(rng, 1, 25);
            let overlap = rng.gen_range(0..=test_start_count.min(test_end_count).min(6));
            TargetProperties {
                vertex_count,
                edge_count,
                cycle_count: skew(rng, 0, 18),
                test_start_count,
                test_end_count,
                start_end_overlap_count: overlap,
                machine_end_count: rng.gen_range(1..=test_end_count.min(21)),
            }
        }
    }
}

/// Usually the largest overlap allowed, otherwise one less; averages near
/// one for one- or two-element start and end sets.
fn overlap(rng: &mut impl Rng, max: usize) -> usize {
    if rng.gen_bool(0.8) {
        max
    } else {
        max.saturating_sub(1)
    }
}

/// One instance of a batch: enough to regenerate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchEntry {
    pub name: String,
    pub seed: u64,
    pub targets: TargetProperties,
}

/// `count` entries with targets and seeds drawn from `master_seed`.
pub fn batch_manifest(profile: Profile, count: usize, master_seed: u64) -> Vec<BatchEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let prefix = match profile {
        Profile::Artificial => "art",
        Profile::Industrial => "ind",
    };
    (0..count)
        .map(|i| BatchEntry {
            name: format!("{prefix}-{:03}", i + 1),
            targets: sample_targets(profile, &mut rng),
            seed: rng.gen(),
        })
        .collect()
}

/// Generates every entry, in parallel, results in entry order.
pub fn generate_batch(entries: &[BatchEntry]) -> Vec<Result<SutModel>> {
    entries
        .par_iter()
        .map(|e| generate_named(&e.targets, e.seed, &e.name))
        .collect()
}
