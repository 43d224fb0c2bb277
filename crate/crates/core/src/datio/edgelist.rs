use std::io::Write;
use std::path::Path;

use super::{fields, parse_err, read};
use crate::error::Result;
use crate::graph::ValuedGraph;

/// Reads `source target weight` rows with 0-based node ids.
///
/// A `# nodes: N` comment fixes the node count (needed for trailing isolates);
/// otherwise it is one more than the largest id. Unlisted pairs get weight 0.
pub fn load_edgelist(path: &Path, directed: bool, unit: &str) -> Result<ValuedGraph> {
    parse_edgelist(&read(path)?, path, directed, unit)
}

pub fn parse_edgelist(text: &str, path: &Path, directed: bool, unit: &str) -> Result<ValuedGraph> {
    let mut declared: Option<(usize, usize)> = None;
    let mut rows: Vec<(usize, usize, usize, f64)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("nodes:") {
                let n = v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(path, lineno, format!("bad node count `{}`", v.trim())))?;
                declared = Some((n, lineno));
            }
            continue;
        }
        let f = fields(line);
        if f.is_empty() {
            continue;
        }
        if f.len() != 3 {
            return Err(parse_err(path, lineno, format!("expected 3 fields, found {}", f.len())));
        }
        let id = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(path, lineno, format!("bad node id `{s}`")))
        };
        let (i, j) = (id(f[0])?, id(f[1])?);
        let w: f64 = f[2]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad weight `{}`", f[2])))?;
        if !w.is_finite() || w < 0.0 {
            return Err(parse_err(path, lineno, format!("weight must be finite and nonnegative, got {w}")));
        }
        if i == j {
            return Err(parse_err(path, lineno, format!("self-loop on node {i}")));
        }
        rows.push((lineno, i, j, w));
    }
    let max_id = rows.iter().map(|r| r.1.max(r.2) + 1).max().unwrap_or(0);
    let n = match declared {
        Some((n, lineno)) if n < max_id => {
            return Err(parse_err(path, lineno, format!("declared {n} nodes but ids reach {}", max_id - 1)));
        }
        Some((n, _)) => n,
        None => max_id,
    };
    let mut g = ValuedGraph::empty(n, directed, unit);
    let mut seen = vec![false; n * n];
    for (lineno, i, j, w) in rows {
        if seen[i * n + j] {
            return Err(parse_err(path, lineno, format!("duplicate pair ({i}, {j})")));
        }
        seen[i * n + j] = true;
        if !directed {
            seen[j * n + i] = true;
        }
        g.set_weight(i, j, w);
    }
    Ok(g)
}

/// Writes positive-weight dyads with shortest round-trip float formatting.
pub fn write_edgelist<W: Write>(g: &ValuedGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nodes: {}", g.n())?;
    writeln!(out, "# directed: {}", g.is_directed())?;
    writeln!(out, "# unit: {}", g.unit_label())?;
    for (i, j) in g.dyads() {
        let w = g.weight(i, j);
        if w > 0.0 {
            writeln!(out, "{i}\t{j}\t{w}")?;
        }
    }
    Ok(())
}
