//! Line-oriented text format for tagged graph states.
//!
//! ```text
//! v 0
//! v 1
//! e 0 1
//! lc 1 12
//! ```
//!
//! `lc` tags index into [`LocalClifford::all`]. Blank lines and lines starting
//! with `#` are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use super::{GraphError, GraphState, LocalClifford, Vertex};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

pub fn to_text(g: &GraphState) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        writeln!(out, "v {v}").unwrap();
    }
    for (a, b) in g.edges() {
        writeln!(out, "e {a} {b}").unwrap();
    }
    for v in g.vertices() {
        if let Some(c) = g.vcop(v) {
            if !c.is_identity() {
                writeln!(out, "lc {v} {}", c.index()).unwrap();
            }
        }
    }
    out
}

pub fn from_text(s: &str) -> Result<GraphState, ParseError> {
    let mut g = GraphState::new();
    for (i, raw) in s.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let syntax = |msg: String| ParseError::Syntax { line, msg };
        let graph = |source| ParseError::Graph { line, source };
        let fields: Vec<&str> = text.split_whitespace().collect();
        let num = |k: usize| -> Result<Vertex, ParseError> {
            fields
                .get(k)
                .ok_or_else(|| syntax(format!("missing field {k}")))?
                .parse()
                .map_err(|_| syntax(format!("bad integer '{}'", fields[k])))
        };
        let arity = match fields[0] {
            "v" => 2,
            "e" | "lc" => 3,
            other => return Err(syntax(format!("unknown record '{other}'"))),
        };
        if fields.len() != arity {
            return Err(syntax(format!("expected {} fields, got {}", arity, fields.len())));
        }
        match fields[0] {
            "v" => g.add_vertex(num(1)?).map_err(graph)?,
            "e" => g.add_edge(num(1)?, num(2)?).map_err(graph)?,
            _ => {
                let tag = num(2)?;
                let c = u8::try_from(tag)
                    .ok()
                    .and_then(LocalClifford::from_index)
                    .ok_or_else(|| syntax(format!("tag {tag} outside 0..24")))?;
                g.set_vcop(num(1)?, c).map_err(graph)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = GraphState::new_ghz(4).unwrap();
        let s = to_text(&g);
        let h = from_text(&s).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = from_text("v 0\ne 0 1\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2"));
        let err = from_text("v 0\nlc 0 99\n").unwrap_err();
        assert!(err.to_string().contains("tag 99"));
        assert!(from_text("q 1").is_err());
    }
}
