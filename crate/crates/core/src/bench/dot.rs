use std::fmt::Write;

use crate::model::SutModel;
use crate::path::{EdgeSet, TestPath};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders `m` as a DOT digraph. Test starts are filled green, test ends red,
/// vertices in both yellow; machine ends are double circles. Edges of
/// `highlight` are drawn bold.
pub fn export_dot(m: &SutModel, highlight: Option<&TestPath>) -> String {
    let mut bold = EdgeSet::empty(m.edge_count());
    if let Some(p) = highlight {
        for &e in p.edges() {
            bold.insert(e);
        }
    }

    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(m.name())).unwrap();
    out.push_str("  node [shape=circle];\n");
    for v in m.vertex_ids() {
        let mut attrs = Vec::new();
        let fill = match (m.is_test_start(v), m.is_test_end(v)) {
            (true, true) => Some("yellow"),
            (true, false) => Some("green"),
            (false, true) => Some("red"),
            (false, false) => None,
        };
        if let Some(color) = fill {
            attrs.push(format!("style=filled, fillcolor={color}"));
        }
        if m.machine_ends().contains(&v) {
            attrs.push("shape=doublecircle".into());
        }
        if v == m.machine_start() {
            attrs.push("penwidth=2".into());
        }
        let id = quote(m.vertex_id(v));
        if attrs.is_empty() {
            writeln!(out, "  {id};").unwrap();
        } else {
            writeln!(out, "  {id} [{}];", attrs.join(", ")).unwrap();
        }
    }
    for ix in m.edge_ids() {
        let e = m.edge(ix);
        let label = if e.label.is_empty() {
            e.id.clone()
        } else {
            format!("{}: {}", e.id, e.label)
        };
        let mut attrs = format!("label={}", quote(&label));
        if bold.contains(ix) {
            attrs.push_str(", style=bold, penwidth=3");
        }
        writeln!(
            out,
            "  {} -> {} [{attrs}];",
            quote(m.vertex_id(e.source)),
            quote(m.vertex_id(e.target))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn single_plain() {
        let dot = export_dot(&single(), None);
        assert!(dot.starts_with("digraph \"G-SINGLE\" {"));
        assert_eq!(dot.matches(" -> ").count(), 1);
        assert!(dot.contains("\"A\" [style=filled, fillcolor=green"));
        assert!(dot.contains("\"B\" [style=filled, fillcolor=red, shape=doublecircle]"));
        assert!(!dot.contains("bold"));
    }

    #[test]
    fn parallel_edges_and_highlight() {
        let m = par();
        let p = TestPath::new(edges(&m, &["e1", "e3"]));
        let dot = export_dot(&m, Some(&p));
        assert_eq!(dot.matches("\"A\" -> \"B\"").count(), 2);
        let bold: Vec<&str> = dot.lines().filter(|l| l.contains("bold")).collect();
        assert_eq!(bold.len(), 2);
        assert!(bold[0].contains("label=\"e1\""));
        assert!(bold[1].contains("label=\"e3\""));
    }

    #[test]
    fn overlap_is_yellow() {
        let mut doc = lp().to_doc();
        doc.test_ends.push("A".into());
        let m = crate::model::SutModel::from_doc(doc).unwrap();
        assert!(export_dot(&m, None).contains("\"A\" [style=filled, fillcolor=yellow"));
    }
}
