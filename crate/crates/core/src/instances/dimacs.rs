use std::collections::HashSet;

use super::InstanceError;
use crate::model::{Instance, Sense};

/// DIMACS edge format to vertex cover: one row per distinct edge, one column
/// per vertex, unit linear costs. Accepts `p edge` and `p col` headers.
pub fn parse_dimacs_vertex_cover(text: &str) -> Result<Instance, InstanceError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edge_lines = 0usize;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen = HashSet::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let mut fields = raw.split_whitespace();
        match fields.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(InstanceError::parse(line, "duplicate problem line"));
                }
                let format = fields.next();
                if !matches!(format, Some("edge" | "col")) {
                    return Err(InstanceError::parse(line, "expected \"p edge <n> <m>\""));
                }
                let n = parse_count(fields.next(), line, "vertex count")?;
                let m = parse_count(fields.next(), line, "edge count")?;
                if fields.next().is_some() {
                    return Err(InstanceError::parse(line, "trailing fields on problem line"));
                }
                if n == 0 {
                    return Err(InstanceError::parse(line, "graph has no vertices"));
                }
                header = Some((n, m, line));
            }
            Some("e") => {
                let Some((n, _, _)) = header else {
                    return Err(InstanceError::parse(line, "edge before problem line"));
                };
                let u = parse_count(fields.next(), line, "edge endpoint")?;
                let v = parse_count(fields.next(), line, "edge endpoint")?;
                if fields.next().is_some() {
                    return Err(InstanceError::parse(line, "trailing fields on edge line"));
                }
                for w in [u, v] {
                    if w == 0 || w > n {
                        return Err(InstanceError::parse(line, format!("endpoint {w} out of range 1..={n}")));
                    }
                }
                if u == v {
                    return Err(InstanceError::parse(line, format!("self-loop on vertex {u}")));
                }
                edge_lines += 1;
                let key = (u.min(v) - 1, u.max(v) - 1);
                if seen.insert(key) {
                    edges.push(key);
                }
            }
            Some(other) => {
                return Err(InstanceError::parse(line, format!("unknown line type {other:?}")));
            }
        }
    }
    let Some((n, m, header_line)) = header else {
        return Err(InstanceError::parse(last_line.max(1), "missing problem line"));
    };
    if edge_lines != m {
        return Err(InstanceError::parse(
            header_line,
            format!("header declares {m} edges, found {edge_lines}"),
        ));
    }
    if edges.is_empty() {
        return Err(InstanceError::parse(header_line, "graph has no edges"));
    }
    let a = edges
        .iter()
        .map(|&(u, v)| {
            let mut row = vec![0u8; n];
            row[u] = 1;
            row[v] = 1;
            row
        })
        .collect();
    Ok(Instance::linear(a, vec![1.0; n], Sense::Cover)?)
}

fn parse_count(field: Option<&str>, line: usize, what: &str) -> Result<usize, InstanceError> {
    let tok = field.ok_or_else(|| InstanceError::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| InstanceError::parse(line, format!("expected {what}, found {tok:?}")))
}
