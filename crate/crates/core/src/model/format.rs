//! Line-oriented model file format.
//!
//! ```text
//! # comments run to the end of the line
//! name G-PAR
//! vertices A B C
//! edge e1 A B "first"
//! edge e2 A B "parallel to e1"
//! edge e3 B C
//! machine_start A
//! machine_ends C
//! test_starts A
//! test_ends C
//! ```
//!
//! Tokens are either bare words (any run of characters other than
//! whitespace, `"` and `#`) or double-quoted strings with the escapes `\\`,
//! `\"`, `\n`, `\t` and `\r`. `name` and `machine_start` appear exactly once;
//! `vertices`, `edge`, `machine_ends`, `test_starts` and `test_ends` may
//! repeat and accumulate. An edge label is optional and defaults to empty.

use std::fmt::Write as _;

use super::{EdgeDoc, ModelDoc, SutModel};
use crate::error::{Error, Result};

#[derive(Debug)]
struct Token {
    text: String,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().enumerate().peekable();
    while let Some(&(col, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '"' {
            chars.next();
            let mut text = String::new();
            let mut closed = false;
            while let Some((ecol, c)) = chars.next() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match chars.next() {
                        Some((_, '\\')) => text.push('\\'),
                        Some((_, '"')) => text.push('"'),
                        Some((_, 'n')) => text.push('\n'),
                        Some((_, 't')) => text.push('\t'),
                        Some((_, 'r')) => text.push('\r'),
                        Some((_, other)) => {
                            return Err(syntax(
                                line_no,
                                ecol + 2,
                                format!("unknown escape `\\{other}`"),
                            ))
                        }
                        None => return Err(syntax(line_no, ecol + 1, "dangling escape")),
                    },
                    c => text.push(c),
                }
            }
            if !closed {
                return Err(syntax(line_no, col + 1, "unterminated string"));
            }
            if let Some(&(next_col, next)) = chars.peek() {
                if !next.is_whitespace() && next != '#' {
                    return Err(syntax(
                        line_no,
                        next_col + 1,
                        "expected whitespace after quoted string",
                    ));
                }
            }
            tokens.push(Token {
                text,
                column: col + 1,
            });
        } else {
            let mut text = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() || c == '#' {
                    break;
                }
                if c == '"' {
                    let (qcol, _) = chars.next().unwrap();
                    return Err(syntax(line_no, qcol + 1, "unexpected `\"` inside a word"));
                }
                text.push(c);
                chars.next();
            }
            tokens.push(Token {
                text,
                column: col + 1,
            });
        }
    }
    Ok(tokens)
}

/// Parses model-file text and validates the result.
pub fn parse_model(text: &str) -> Result<SutModel> {
    let mut name: Option<String> = None;
    let mut machine_start: Option<String> = None;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut machine_ends = Vec::new();
    let mut test_starts = Vec::new();
    let mut test_ends = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let tokens = tokenize(line_no, raw)?;
        let Some((keyword, args)) = tokens.split_first() else {
            continue;
        };
        let rest = || args.iter().map(|t| t.text.clone());
        let end_column = raw.chars().count() + 1;
        match keyword.text.as_str() {
            "name" | "machine_start" => {
                let slot = if keyword.text == "name" {
                    &mut name
                } else {
                    &mut machine_start
                };
                match args {
                    [value] => {
                        if slot.is_some() {
                            return Err(syntax(
                                line_no,
                                keyword.column,
                                format!("`{}` given more than once", keyword.text),
                            ));
                        }
                        *slot = Some(value.text.clone());
                    }
                    [] => {
                        return Err(syntax(
                            line_no,
                            end_column,
                            format!("`{}` expects one value", keyword.text),
                        ))
                    }
                    [_, extra, ..] => {
                        return Err(syntax(line_no, extra.column, "unexpected extra value"))
                    }
                }
            }
            "vertices" => vertices.extend(rest()),
            "machine_ends" => machine_ends.extend(rest()),
            "test_starts" => test_starts.extend(rest()),
            "test_ends" => test_ends.extend(rest()),
            "edge" => match args {
                [id, source, target] | [id, source, target, _] => edges.push(EdgeDoc {
                    id: id.text.clone(),
                    source: source.text.clone(),
                    target: target.text.clone(),
                    label: args.get(3).map(|t| t.text.clone()).unwrap_or_default(),
                }),
                [_, _, _, _, extra, ..] => {
                    return Err(syntax(line_no, extra.column, "unexpected extra value"))
                }
                _ => {
                    return Err(syntax(
                        line_no,
                        end_column,
                        "`edge` expects <id> <source> <target> [label]",
                    ))
                }
            },
            other => {
                return Err(syntax(
                    line_no,
                    keyword.column,
                    format!("unknown keyword `{other}`"),
                ))
            }
        }
    }

    let line_count = text.lines().count().max(1);
    let name = name.ok_or_else(|| syntax(line_count, 1, "missing `name`"))?;
    let machine_start =
        machine_start.ok_or_else(|| syntax(line_count, 1, "missing `machine_start`"))?;

    SutModel::from_doc(ModelDoc {
        name,
        vertices,
        edges,
        machine_start,
        machine_ends,
        test_starts,
        test_ends,
    })
}

fn is_bare(word: &str) -> bool {
    !word.is_empty() && !word.chars().any(|c| c.is_whitespace() || c == '"' || c == '#' || c == '\\')
}

fn quoted(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn word(text: &str) -> String {
    if is_bare(text) {
        text.to_string()
    } else {
        quoted(text)
    }
}

fn words<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
    items.into_iter().map(word).collect::<Vec<_>>().join(" ")
}

/// Renders a model in the text format. `parse_model` of the output yields an
/// equal model.
pub fn serialize_model(m: &SutModel) -> String {
    let mut out = String::new();
    let vid = |v| m.vertex_id(v);
    let _ = writeln!(out, "name {}", word(m.name()));
    let _ = writeln!(out, "vertices {}", words(m.vertex_ids().map(vid)));
    for e in m.edges() {
        let _ = write!(out, "edge {} {} {}", word(&e.id), word(vid(e.source)), word(vid(e.target)));
        if !e.label.is_empty() {
            let _ = write!(out, " {}", quoted(&e.label));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "machine_start {}", word(vid(m.machine_start())));
    let sets = [
        ("machine_ends", m.machine_ends()),
        ("test_starts", m.test_starts()),
        ("test_ends", m.test_ends()),
    ];
    for (keyword, set) in sets {
        if !set.is_empty() {
            let _ = writeln!(out, "{keyword} {}", words(set.iter().map(|v| vid(*v))));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;
    use proptest::prelude::*;

    const SINGLE: &str = "name G-SINGLE\nvertices A B\nedge e1 A B\nmachine_start A\nmachine_ends B\ntest_starts A\ntest_ends B\n";

    #[test]
    fn minimal_model_parses() {
        let m = parse_model(SINGLE).unwrap();
        assert_eq!(m.name(), "G-SINGLE");
        assert_eq!(m.vertex_count(), 2);
        assert_eq!(m.edge_count(), 1);
    }

    #[test]
    fn dangling_endpoint() {
        let text = SINGLE.replace("edge e1 A B", "edge e1 A Z");
        match parse_model(&text) {
            Err(Error::DanglingEndpoint { edge, vertex }) => {
                assert_eq!((edge.as_str(), vertex.as_str()), ("e1", "Z"));
            }
            other => panic!("expected dangling endpoint, got {other:?}"),
        }
    }

    #[test]
    fn machine_start_must_be_test_start() {
        let text = "name M\nvertices A B\nedge e1 A B\nmachine_start A\ntest_starts B\ntest_ends B\n";
        let err = parse_model(text).unwrap_err();
        assert!(err.to_string().contains("v_s ∈ V_ts"), "{err}");
    }

    #[test]
    fn syntax_errors_report_position() {
        let text = "name M\nvertices A B\nedge e1 A \"B\n";
        match parse_model(text) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 11)),
            other => panic!("{other:?}"),
        }
        match parse_model("name M\n  bogus x\n") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# header\n\n{}", SINGLE.replace("vertices A B", "vertices A B # two"));
        assert_eq!(parse_model(&text).unwrap(), fixtures::single());
    }

    #[test]
    fn parallel_edges_survive_round_trip() {
        let m = fixtures::par();
        let back = parse_model(&serialize_model(&m)).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.edge_count(), 3);
        assert!(back.parallel(back.edge_by_id("e1").unwrap(), back.edge_by_id("e2").unwrap()));
    }

    #[test]
    fn unicode_labels_are_byte_exact() {
        let mut doc = fixtures::single().to_doc();
        doc.edges[0].label = "Zündung \"an\" → ✓\tok\\".into();
        let m = SutModel::from_doc(doc).unwrap();
        let back = parse_model(&serialize_model(&m)).unwrap();
        assert_eq!(back.edges()[0].label.as_bytes(), m.edges()[0].label.as_bytes());
    }

    fn arb_model() -> impl Strategy<Value = SutModel> {
        let ident = "[a-zA-Zé0-9_ ]{1,6}";
        (
            prop::collection::btree_set(ident, 1..6),
            prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>(), ".{0,8}"), 1..10),
            ident,
        )
            .prop_map(|(vs, es, name)| {
                let vertices: Vec<String> = vs.into_iter().collect();
                let edges = es
                    .into_iter()
                    .enumerate()
                    .map(|(i, (a, b, label))| EdgeDoc {
                        id: format!("e{i}"),
                        source: a.get(&vertices).clone(),
                        target: b.get(&vertices).clone(),
                        label,
                    })
                    .collect();
                let start = vertices[0].clone();
                SutModel::from_doc(ModelDoc {
                    name,
                    machine_start: start.clone(),
                    machine_ends: vec![vertices[vertices.len() - 1].clone()],
                    test_starts: vec![start],
                    test_ends: vertices.clone(),
                    vertices,
                    edges,
                })
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(m in arb_model()) {
            prop_assert_eq!(parse_model(&serialize_model(&m)).unwrap(), m);
        }
    }
}
