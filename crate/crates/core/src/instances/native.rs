//! Line-oriented text format:
//!
//! ```text
//! QSP <m> <n> <cover|pack>
//! c: <n numbers>
//! <m lines of n 0/1 entries>      # A
//! <n lines of n numbers>          # D
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Numbers may be
//! integers, decimals or fractions `p/q`.

use std::fmt::Write as _;

use super::InstanceError;
use crate::model::{Instance, Sense};

/// Integers print without a decimal point; other values use the shortest
/// representation that round-trips.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    format!("{v}")
}

/// Parses an integer, decimal or `p/q` fraction.
pub fn parse_number(tok: &str) -> Option<f64> {
    let value = match tok.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.parse().ok()?;
            let q: f64 = q.parse().ok()?;
            if q == 0.0 {
                return None;
            }
            p / q
        }
        None => tok.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

pub fn write_native(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "QSP {} {} {}", inst.m(), inst.n(), inst.sense().as_str());
    let costs: Vec<String> = inst.c().iter().map(|&v| format_number(v)).collect();
    let _ = writeln!(out, "c: {}", costs.join(" "));
    for row in inst.a() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    for row in inst.d() {
        let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

pub fn read_native(text: &str) -> Result<Instance, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count().max(1);
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| InstanceError::parse(last_line, format!("unexpected end of file, expected {what}")))
    };

    let (line, header) = next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [tag, m, n, sense] = fields[..] else {
        return Err(InstanceError::parse(line, "header must be \"QSP <m> <n> <cover|pack>\""));
    };
    if tag != "QSP" {
        return Err(InstanceError::parse(line, format!("expected QSP header, found {tag:?}")));
    }
    let m: usize = m
        .parse()
        .map_err(|_| InstanceError::parse(line, format!("bad row count {m:?}")))?;
    let n: usize = n
        .parse()
        .map_err(|_| InstanceError::parse(line, format!("bad column count {n:?}")))?;
    let sense = match sense {
        "cover" => Sense::Cover,
        "pack" => Sense::Pack,
        other => return Err(InstanceError::parse(line, format!("unknown sense {other:?}"))),
    };
    if m == 0 || n == 0 {
        return Err(InstanceError::parse(line, "m and n must be positive"));
    }

    let (line, cost_line) = next("cost line")?;
    let Some(rest) = cost_line.strip_prefix("c:") else {
        return Err(InstanceError::parse(line, "expected \"c:\" cost line"));
    };
    let c = numbers(rest, n, line, "cost")?;

    let mut a = Vec::with_capacity(m);
    for i in 0..m {
        let (line, text) = next(&format!("row {} of A", i + 1))?;
        let row = numbers(text, n, line, "A entry")?;
        let row = row
            .into_iter()
            .map(|v| match v {
                0.0 => Ok(0u8),
                1.0 => Ok(1u8),
                _ => Err(InstanceError::parse(line, format!("A entry {v} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        a.push(row);
    }
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let (line, text) = next(&format!("row {} of D", i + 1))?;
        d.push(numbers(text, n, line, "D entry")?);
    }
    if let Some((line, _)) = lines.next() {
        return Err(InstanceError::parse(line, "unexpected trailing data"));
    }
    Ok(Instance::new(a, c, d, sense)?)
}

fn numbers(text: &str, expected: usize, line: usize, what: &str) -> Result<Vec<f64>, InstanceError> {
    let values = text
        .split_whitespace()
        .map(|tok| parse_number(tok).ok_or_else(|| InstanceError::parse(line, format!("bad {what} {tok:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != expected {
        return Err(InstanceError::parse(
            line,
            format!("expected {expected} values, found {}", values.len()),
        ));
    }
    Ok(values)
}
