//! Graph file formats.
//!
//! Text: one `v <id> <weight>` line per vertex and one `e <id1> <id2>` line
//! per edge; `#` starts a comment. JSON:
//! `{"vertices": [{"id": .., "weight": ..}], "edges": [[u, v], ...]}`.
//! Ids may be any token; they are renumbered `0..n` in declaration order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::WeightedMultigraph;
use crate::error::{Error, Result};

struct Builder {
    ids: HashMap<String, usize>,
    weights: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn new() -> Self {
        Builder { ids: HashMap::new(), weights: Vec::new(), edges: Vec::new() }
    }

    fn vertex(&mut self, id: String, weight: u64) -> Result<()> {
        if weight == 0 {
            return Err(Error::Parse(format!("vertex {id} has weight 0")));
        }
        if self.ids.insert(id.clone(), self.weights.len()).is_some() {
            return Err(Error::Parse(format!("vertex {id} declared twice")));
        }
        self.weights.push(weight);
        Ok(())
    }

    fn edge(&mut self, a: &str, b: &str) -> Result<()> {
        let look = |id: &str| self.ids.get(id).copied().ok_or_else(|| Error::Parse(format!("edge uses undeclared vertex {id}")));
        let e = (look(a)?, look(b)?);
        self.edges.push(e);
        Ok(())
    }

    fn finish(self) -> Result<WeightedMultigraph> {
        WeightedMultigraph::new(self.weights, self.edges)
    }
}

pub fn parse_graph_text(src: &str) -> Result<WeightedMultigraph> {
    let mut b = Builder::new();
    // Edges may precede the vertices they mention.
    let mut pending = Vec::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["v", id, w] => {
                let w: u64 = w.parse().map_err(|_| Error::Parse(format!("line {}: bad weight {w:?}", lineno + 1)))?;
                b.vertex(id.to_string(), w)?;
            }
            ["v", id] => b.vertex(id.to_string(), 1)?,
            ["e", u, v] => pending.push((u.to_string(), v.to_string())),
            _ => return Err(Error::Parse(format!("line {}: cannot parse {line:?}", lineno + 1))),
        }
    }
    for (u, v) in pending {
        b.edge(&u, &v)?;
    }
    b.finish()
}

fn id_string(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("vertex id must be a string or number, got {other}"))),
    }
}

#[derive(Deserialize)]
struct JsonVertex {
    id: Value,
    #[serde(default = "one")]
    weight: u64,
}

fn one() -> u64 {
    1
}

#[derive(Deserialize)]
struct JsonGraph {
    vertices: Vec<JsonVertex>,
    #[serde(default)]
    edges: Vec<(Value, Value)>,
}

pub fn parse_graph_json(src: &str) -> Result<WeightedMultigraph> {
    let g: JsonGraph = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
    let mut b = Builder::new();
    for v in g.vertices {
        b.vertex(id_string(&v.id)?, v.weight)?;
    }
    for (u, v) in g.edges {
        b.edge(&id_string(&u)?, &id_string(&v)?)?;
    }
    b.finish()
}

/// Picks the JSON reader when the first non-space character is `{`.
pub fn parse_graph(src: &str) -> Result<WeightedMultigraph> {
    if src.trim_start().starts_with('{') {
        parse_graph_json(src)
    } else {
        parse_graph_text(src)
    }
}

pub fn write_graph_text(g: &WeightedMultigraph) -> String {
    let mut s = String::new();
    for (v, w) in g.weights().iter().enumerate() {
        s.push_str(&format!("v {v} {w}\n"));
    }
    for (a, b) in g.edges() {
        s.push_str(&format!("e {a} {b}\n"));
    }
    s
}

#[derive(Serialize)]
struct OutVertex {
    id: usize,
    weight: u64,
}

#[derive(Serialize)]
struct OutGraph {
    vertices: Vec<OutVertex>,
    edges: Vec<(usize, usize)>,
}

pub fn write_graph_json(g: &WeightedMultigraph) -> String {
    let out = OutGraph {
        vertices: g.weights().iter().enumerate().map(|(id, &weight)| OutVertex { id, weight }).collect(),
        edges: g.edges().to_vec(),
    };
    serde_json::to_string(&out).expect("graph serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format() {
        let g = parse_graph_text("# triangle\nv a 1\nv b 2 # heavy\nv c 1\ne a b\ne b c\ne c a\ne a a\n").unwrap();
        assert_eq!(g.weights(), &[1, 2, 1]);
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 0), (0, 0)]);
        assert_eq!(parse_graph_text(&write_graph_text(&g)).unwrap(), g);
    }

    #[test]
    fn json_format() {
        let g = parse_graph_json(r#"{"vertices":[{"id":0,"weight":1},{"id":"x","weight":3}],"edges":[[0,"x"],["x","x"]]}"#).unwrap();
        assert_eq!(g.weights(), &[1, 3]);
        assert_eq!(g.edges(), &[(0, 1), (1, 1)]);
        assert_eq!(parse_graph(&write_graph_json(&g)).unwrap(), g);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_graph_text("v 0 1\ne 0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_graph_text("v 0 0\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_graph_text("v 0 1\nv 0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_graph_text("edge 0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_graph_json("{\"edges\":[]}"), Err(Error::Parse(_))));
    }
}
