//! Test paths, path sets, coverage settings and the path-set document.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EdgeIx, SutModel, VertexIx};

/// Coverage criterion switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Level {
    /// Every test start begins some in-range path.
    One,
    /// Level one plus every coverable edge appears in some path.
    Two,
}

impl Level {
    pub fn number(self) -> u8 {
        match self {
            Level::One => 1,
            Level::Two => 2,
        }
    }
}

impl TryFrom<u8> for Level {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Level::One),
            2 => Ok(Level::Two),
            other => Err(Error::InvalidSpec(format!("coverage level must be 1 or 2, got {other}"))),
        }
    }
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l.number()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverageSpec {
    pub level: Level,
    pub min_length: usize,
    pub max_length: usize,
}

impl CoverageSpec {
    pub fn new(level: Level, min_length: usize, max_length: usize) -> Result<Self> {
        if min_length < 1 {
            return Err(Error::InvalidSpec("min_length must be at least 1".into()));
        }
        if min_length > max_length {
            return Err(Error::InvalidSpec(format!(
                "min_length {min_length} exceeds max_length {max_length}"
            )));
        }
        Ok(CoverageSpec {
            level,
            min_length,
            max_length,
        })
    }

    pub fn in_range(&self, len: usize) -> bool {
        (self.min_length..=self.max_length).contains(&len)
    }
}

/// Dense set of edges keyed by declaration index; iterates in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    bits: Vec<bool>,
    len: usize,
}

impl EdgeSet {
    pub fn empty(edge_count: usize) -> Self {
        EdgeSet {
            bits: vec![false; edge_count],
            len: 0,
        }
    }

    pub fn full(edge_count: usize) -> Self {
        EdgeSet {
            bits: vec![true; edge_count],
            len: edge_count,
        }
    }

    pub fn contains(&self, e: EdgeIx) -> bool {
        self.bits.get(e.0).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, e: EdgeIx) -> bool {
        let fresh = !self.bits[e.0];
        if fresh {
            self.bits[e.0] = true;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, e: EdgeIx) -> bool {
        let present = self.bits[e.0];
        if present {
            self.bits[e.0] = false;
            self.len -= 1;
        }
        present
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn first(&self) -> Option<EdgeIx> {
        self.bits.iter().position(|&b| b).map(EdgeIx)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeIx> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| EdgeIx(i))
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    pub fn to_btree(&self) -> BTreeSet<EdgeIx> {
        self.iter().collect()
    }
}

/// A walk through the model, as a sequence of edges. Edges may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TestPath {
    edges: Vec<EdgeIx>,
}

impl TestPath {
    pub fn new(edges: Vec<EdgeIx>) -> Self {
        TestPath { edges }
    }

    pub fn edges(&self) -> &[EdgeIx] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<EdgeIx> {
        self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn first_vertex(&self, m: &SutModel) -> Option<VertexIx> {
        self.edges.first().map(|e| m.source(*e))
    }

    pub fn last_vertex(&self, m: &SutModel) -> Option<VertexIx> {
        self.edges.last().map(|e| m.target(*e))
    }

    /// Vertex sequence visited by the walk (one longer than the edge list).
    pub fn vertices(&self, m: &SutModel) -> Vec<VertexIx> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        if let Some(first) = self.first_vertex(m) {
            out.push(first);
            out.extend(self.edges.iter().map(|e| m.target(*e)));
        }
        out
    }

    /// Index of the first edge that does not continue from its predecessor.
    pub fn chain_break(&self, m: &SutModel) -> Option<usize> {
        self.edges
            .windows(2)
            .position(|w| m.target(w[0]) != m.source(w[1]))
            .map(|i| i + 1)
    }

    pub fn is_walk(&self, m: &SutModel) -> bool {
        !self.edges.is_empty() && self.chain_break(m).is_none()
    }

    pub fn contains(&self, e: EdgeIx) -> bool {
        self.edges.contains(&e)
    }
}

impl From<Vec<EdgeIx>> for TestPath {
    fn from(edges: Vec<EdgeIx>) -> Self {
        TestPath::new(edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Complete,
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Complete => "complete",
            Status::Infeasible => "infeasible",
        })
    }
}

/// Output of a generation strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestPathSet {
    pub paths: Vec<TestPath>,
    /// Edges that no path in `paths` traverses.
    pub uncovered_edges: BTreeSet<EdgeIx>,
    /// Edges for which no in-range test path exists (level 2 only).
    pub uncoverable_edges: BTreeSet<EdgeIx>,
    /// Test starts from which no in-range test path exists.
    pub infeasible_starts: BTreeSet<VertexIx>,
    pub status: Status,
}

impl TestPathSet {
    /// Assembles a set, deriving `uncovered_edges` and `status` from the rest.
    pub fn assemble(
        m: &SutModel,
        level: Level,
        paths: Vec<TestPath>,
        uncoverable_edges: BTreeSet<EdgeIx>,
        infeasible_starts: BTreeSet<VertexIx>,
    ) -> Self {
        let mut covered = EdgeSet::empty(m.edge_count());
        for p in &paths {
            for &e in p.edges() {
                covered.insert(e);
            }
        }
        let uncovered_edges: BTreeSet<EdgeIx> = m.edge_ids().filter(|e| !covered.contains(*e)).collect();
        let complete = infeasible_starts.is_empty()
            && (level == Level::One || uncovered_edges.is_subset(&uncoverable_edges));
        TestPathSet {
            paths,
            uncovered_edges,
            uncoverable_edges,
            infeasible_starts,
            status: if complete {
                Status::Complete
            } else {
                Status::Infeasible
            },
        }
    }

    pub fn covered_edges(&self, m: &SutModel) -> EdgeSet {
        let mut covered = EdgeSet::empty(m.edge_count());
        for p in &self.paths {
            for &e in p.edges() {
                covered.insert(e);
            }
        }
        covered
    }

    pub fn to_doc(&self, m: &SutModel, spec: &CoverageSpec, strategy: &str) -> PathSetDoc {
        let eid = |e: &EdgeIx| m.edge(*e).id.clone();
        let vid = |v: &VertexIx| m.vertex_id(*v).to_string();
        PathSetDoc {
            model: m.name().to_string(),
            strategy: strategy.to_string(),
            level: spec.level,
            min_length: spec.min_length,
            max_length: spec.max_length,
            status: self.status,
            paths: self
                .paths
                .iter()
                .map(|p| PathDoc {
                    edges: p.edges().iter().map(eid).collect(),
                    vertices: p.vertices(m).iter().map(vid).collect(),
                })
                .collect(),
            uncovered_edges: self.uncovered_edges.iter().map(eid).collect(),
            uncoverable_edges: self.uncoverable_edges.iter().map(eid).collect(),
            infeasible_starts: self.infeasible_starts.iter().map(vid).collect(),
        }
    }
}

/// Serialized path set, keyed by model ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSetDoc {
    pub model: String,
    pub strategy: String,
    pub level: Level,
    pub min_length: usize,
    pub max_length: usize,
    pub status: Status,
    pub paths: Vec<PathDoc>,
    #[serde(default)]
    pub uncovered_edges: Vec<String>,
    #[serde(default)]
    pub uncoverable_edges: Vec<String>,
    #[serde(default)]
    pub infeasible_starts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDoc {
    pub edges: Vec<String>,
    /// Derived; ignored on input.
    #[serde(default)]
    pub vertices: Vec<String>,
}

impl PathSetDoc {
    pub fn spec(&self) -> Result<CoverageSpec> {
        CoverageSpec::new(self.level, self.min_length, self.max_length)
    }

    /// Resolves ids against `m`. Paths are taken as written (not re-validated
    /// as walks; that is the coverage checker's job).
    pub fn resolve(&self, m: &SutModel) -> Result<TestPathSet> {
        let edges = |ids: &[String]| ids.iter().map(|id| m.lookup_edge(id)).collect::<Result<Vec<_>>>();
        let paths = self
            .paths
            .iter()
            .map(|p| edges(&p.edges).map(TestPath::new))
            .collect::<Result<Vec<_>>>()?;
        let uncoverable = edges(&self.uncoverable_edges)?.into_iter().collect();
        let infeasible = self
            .infeasible_starts
            .iter()
            .map(|v| m.lookup_vertex(v))
            .collect::<Result<BTreeSet<_>>>()?;
        let mut set = TestPathSet::assemble(m, self.level, paths, uncoverable, infeasible);
        set.status = self.status;
        Ok(set)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
