//! The system-under-test model: a directed multigraph of states and
//! transitions, with the machine's own start/end states and the sets of
//! states where a test path may start or end.

mod format;
mod stats;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{parse_model, serialize_model};
pub use stats::{graph_stats, simple_cycles, GraphStats, CYCLE_CAP};

/// Position of a vertex in its model's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexIx(pub usize);

/// Position of an edge in its model's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeIx(pub usize);

impl fmt::Display for VertexIx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v#{}", self.0)
    }
}

impl fmt::Display for EdgeIx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub source: VertexIx,
    pub target: VertexIx,
    pub label: String,
}

/// Plain, id-based form of a model. This is what the text format parses into
/// and what the JSON export carries; [`SutModel::from_doc`] validates it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub machine_start: String,
    #[serde(default)]
    pub machine_ends: Vec<String>,
    pub test_starts: Vec<String>,
    pub test_ends: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub label: String,
}

/// Validated SUT model. Immutable once built.
///
/// Vertices and edges keep declaration order; every traversal in the crate
/// iterates in that order, which is what makes generation deterministic.
/// Vertex sets are normalized to declaration order as well.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc", into = "ModelDoc")]
pub struct SutModel {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    machine_start: VertexIx,
    machine_ends: Vec<VertexIx>,
    test_starts: Vec<VertexIx>,
    test_ends: Vec<VertexIx>,
    outgoing: Vec<Vec<EdgeIx>>,
    incoming: Vec<Vec<EdgeIx>>,
    is_test_start: Vec<bool>,
    is_test_end: Vec<bool>,
    vertex_lookup: HashMap<String, VertexIx>,
    edge_lookup: HashMap<String, EdgeIx>,
}

impl PartialEq for SutModel {
    fn eq(&self, other: &Self) -> bool {
        // everything else is derived from these fields
        self.name == other.name
            && self.vertices == other.vertices
            && self.edges == other.edges
            && self.machine_start == other.machine_start
            && self.machine_ends == other.machine_ends
            && self.test_starts == other.test_starts
            && self.test_ends == other.test_ends
    }
}

impl Eq for SutModel {}

impl SutModel {
    pub fn from_doc(doc: ModelDoc) -> Result<Self> {
        if doc.name.is_empty() {
            return Err(Error::invalid("name nonempty", "model has no name"));
        }
        if doc.vertices.is_empty() {
            return Err(Error::invalid("V nonempty", "model declares no vertices"));
        }
        if doc.edges.is_empty() {
            return Err(Error::invalid("E nonempty", "model declares no edges"));
        }

        let mut vertex_lookup = HashMap::with_capacity(doc.vertices.len());
        for (i, v) in doc.vertices.iter().enumerate() {
            if vertex_lookup.insert(v.clone(), VertexIx(i)).is_some() {
                return Err(Error::invalid(
                    "vertex ids unique",
                    format!("vertex `{v}` declared twice"),
                ));
            }
        }

        let mut edge_lookup = HashMap::with_capacity(doc.edges.len());
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (i, e) in doc.edges.iter().enumerate() {
            if edge_lookup.insert(e.id.clone(), EdgeIx(i)).is_some() {
                return Err(Error::invalid(
                    "edge ids unique",
                    format!("edge `{}` declared twice", e.id),
                ));
            }
            let endpoint = |name: &str| {
                vertex_lookup
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::DanglingEndpoint {
                        edge: e.id.clone(),
                        vertex: name.to_string(),
                    })
            };
            edges.push(Edge {
                id: e.id.clone(),
                source: endpoint(&e.source)?,
                target: endpoint(&e.target)?,
                label: e.label.clone(),
            });
        }

        let resolve_set = |field: &str, names: &[String]| -> Result<Vec<VertexIx>> {
            let mut seen = HashSet::new();
            let mut out = Vec::with_capacity(names.len());
            for name in names {
                let v = vertex_lookup.get(name).copied().ok_or_else(|| {
                    Error::invalid(
                        format!("{field} ⊆ V"),
                        format!("`{name}` is not a declared vertex"),
                    )
                })?;
                if !seen.insert(v) {
                    return Err(Error::invalid(
                        format!("{field} entries unique"),
                        format!("`{name}` listed twice"),
                    ));
                }
                out.push(v);
            }
            out.sort();
            Ok(out)
        };

        let machine_start = vertex_lookup.get(&doc.machine_start).copied().ok_or_else(|| {
            Error::invalid(
                "v_s ∈ V",
                format!("machine start `{}` is not a declared vertex", doc.machine_start),
            )
        })?;
        let machine_ends = resolve_set("V_e", &doc.machine_ends)?;
        let test_starts = resolve_set("V_ts", &doc.test_starts)?;
        let test_ends = resolve_set("V_te", &doc.test_ends)?;

        if !test_starts.contains(&machine_start) {
            return Err(Error::invalid(
                "v_s ∈ V_ts",
                format!("machine start `{}` is not a test start", doc.machine_start),
            ));
        }
        if let Some(v) = machine_ends.iter().find(|v| !test_ends.contains(v)) {
            return Err(Error::invalid(
                "V_e ⊆ V_te",
                format!("machine end `{}` is not a test end", doc.vertices[v.0]),
            ));
        }

        let n = doc.vertices.len();
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            outgoing[e.source.0].push(EdgeIx(i));
            incoming[e.target.0].push(EdgeIx(i));
        }
        let mut is_test_start = vec![false; n];
        for v in &test_starts {
            is_test_start[v.0] = true;
        }
        let mut is_test_end = vec![false; n];
        for v in &test_ends {
            is_test_end[v.0] = true;
        }

        Ok(SutModel {
            name: doc.name,
            vertices: doc.vertices,
            edges,
            machine_start,
            machine_ends,
            test_starts,
            test_ends,
            outgoing,
            incoming,
            is_test_start,
            is_test_end,
            vertex_lookup,
            edge_lookup,
        })
    }

    pub fn to_doc(&self) -> ModelDoc {
        let names = |set: &[VertexIx]| set.iter().map(|v| self.vertex_id(*v).to_string()).collect();
        ModelDoc {
            name: self.name.clone(),
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    source: self.vertex_id(e.source).to_string(),
                    target: self.vertex_id(e.target).to_string(),
                    label: e.label.clone(),
                })
                .collect(),
            machine_start: self.vertex_id(self.machine_start).to_string(),
            machine_ends: names(&self.machine_ends),
            test_starts: names(&self.test_starts),
            test_ends: names(&self.test_ends),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text)?;
        SutModel::from_doc(doc)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexIx> {
        (0..self.vertices.len()).map(VertexIx)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeIx> {
        (0..self.edges.len()).map(EdgeIx)
    }

    pub fn vertex_id(&self, v: VertexIx) -> &str {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeIx) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self, e: EdgeIx) -> VertexIx {
        self.edges[e.0].source
    }

    pub fn target(&self, e: EdgeIx) -> VertexIx {
        self.edges[e.0].target
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<VertexIx> {
        self.vertex_lookup.get(id).copied()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<EdgeIx> {
        self.edge_lookup.get(id).copied()
    }

    pub fn lookup_vertex(&self, id: &str) -> Result<VertexIx> {
        self.vertex_by_id(id).ok_or_else(|| Error::UnknownId {
            kind: "vertex",
            id: id.to_string(),
        })
    }

    pub fn lookup_edge(&self, id: &str) -> Result<EdgeIx> {
        self.edge_by_id(id).ok_or_else(|| Error::UnknownId {
            kind: "edge",
            id: id.to_string(),
        })
    }

    pub fn outgoing(&self, v: VertexIx) -> &[EdgeIx] {
        &self.outgoing[v.0]
    }

    pub fn incoming(&self, v: VertexIx) -> &[EdgeIx] {
        &self.incoming[v.0]
    }

    pub fn machine_start(&self) -> VertexIx {
        self.machine_start
    }

    pub fn machine_ends(&self) -> &[VertexIx] {
        &self.machine_ends
    }

    pub fn test_starts(&self) -> &[VertexIx] {
        &self.test_starts
    }

    pub fn test_ends(&self) -> &[VertexIx] {
        &self.test_ends
    }

    pub fn is_test_start(&self, v: VertexIx) -> bool {
        self.is_test_start[v.0]
    }

    pub fn is_test_end(&self, v: VertexIx) -> bool {
        self.is_test_end[v.0]
    }

    /// True when `a` and `b` join the same ordered pair of vertices.
    pub fn parallel(&self, a: EdgeIx, b: EdgeIx) -> bool {
        let (ea, eb) = (&self.edges[a.0], &self.edges[b.0]);
        ea.source == eb.source && ea.target == eb.target
    }
}

impl TryFrom<ModelDoc> for SutModel {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Self> {
        SutModel::from_doc(doc)
    }
}

impl From<SutModel> for ModelDoc {
    fn from(m: SutModel) -> Self {
        m.to_doc()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    fn build(
        name: &str,
        vertices: &[&str],
        edges: &[(&str, &str, &str)],
        starts: &[&str],
        ends: &[&str],
    ) -> SutModel {
        let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        SutModel::from_doc(ModelDoc {
            name: name.into(),
            vertices: s(vertices),
            edges: edges
                .iter()
                .map(|(id, a, b)| EdgeDoc {
                    id: id.to_string(),
                    source: a.to_string(),
                    target: b.to_string(),
                    label: String::new(),
                })
                .collect(),
            machine_start: starts[0].into(),
            machine_ends: s(&ends[..1]),
            test_starts: s(starts),
            test_ends: s(ends),
        })
        .unwrap()
    }

    pub fn single() -> SutModel {
        build("G-SINGLE", &["A", "B"], &[("e1", "A", "B")], &["A"], &["B"])
    }

    pub fn par() -> SutModel {
        build(
            "G-PAR",
            &["A", "B", "C"],
            &[("e1", "A", "B"), ("e2", "A", "B"), ("e3", "B", "C")],
            &["A"],
            &["C"],
        )
    }

    pub fn lp() -> SutModel {
        build(
            "G-LOOP",
            &["A", "B", "C"],
            &[("e1", "A", "B"), ("e2", "B", "A"), ("e3", "B", "C")],
            &["A"],
            &["C"],
        )
    }

    pub fn diamond() -> SutModel {
        build(
            "G-DIAMOND",
            &["A", "B", "C", "D"],
            &[("e1", "A", "B"), ("e2", "A", "C"), ("e3", "B", "D"), ("e4", "C", "D")],
            &["A"],
            &["D"],
        )
    }

    pub fn chain() -> SutModel {
        build(
            "G-CHAIN",
            &["A", "B", "C", "D"],
            &[("e1", "A", "B"), ("e2", "B", "C"), ("e3", "C", "D")],
            &["A"],
            &["D"],
        )
    }

    pub fn e(m: &SutModel, id: &str) -> EdgeIx {
        m.edge_by_id(id).unwrap()
    }

    pub fn v(m: &SutModel, id: &str) -> VertexIx {
        m.vertex_by_id(id).unwrap()
    }

    pub fn edges(m: &SutModel, ids: &[&str]) -> Vec<EdgeIx> {
        ids.iter().map(|id| e(m, id)).collect()
    }
}
