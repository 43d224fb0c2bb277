use std::path::Path;

use super::{fields, parse_err, read};
use crate::error::Result;
use crate::graph::ValuedGraph;

const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Nonempty data rows with their line numbers.
fn rows<'a>(text: &'a str) -> Vec<(usize, Vec<&'a str>)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, fields(l)))
        .filter(|(_, f)| !f.is_empty())
        .collect()
}

fn check_square(path: &Path, rows: &[(usize, Vec<&str>)]) -> Result<usize> {
    let n = rows.len();
    if n == 0 {
        return Err(parse_err(path, 0, "matrix has no rows"));
    }
    for (line, f) in rows {
        if f.len() != n {
            return Err(parse_err(path, *line, format!("expected {n} columns, found {}", f.len())));
        }
    }
    Ok(n)
}

pub fn load_correlation_matrix(path: &Path, take_absolute: bool) -> Result<ValuedGraph> {
    parse_correlation_matrix(&read(path)?, path, take_absolute)
}

/// Dense symmetric correlation matrix to an undirected graph.
///
/// Negative correlations become weight 0 unless `take_absolute` is set.
pub fn parse_correlation_matrix(text: &str, path: &Path, take_absolute: bool) -> Result<ValuedGraph> {
    let rows = rows(text);
    let n = check_square(path, &rows)?;
    let mut m = vec![0.0; n * n];
    for (i, (line, f)) in rows.iter().enumerate() {
        for (j, s) in f.iter().enumerate() {
            let v: f64 = s
                .parse()
                .map_err(|_| parse_err(path, *line, format!("bad entry `{s}` in column {}", j + 1)))?;
            if !(-1.0..=1.0).contains(&v) {
                return Err(parse_err(path, *line, format!("entry {v} in column {} is outside [-1, 1]", j + 1)));
            }
            if i == j && (v - 1.0).abs() > SYMMETRY_TOLERANCE {
                return Err(parse_err(path, *line, format!("diagonal entry is {v}, expected 1")));
            }
            m[i * n + j] = v;
        }
    }
    for i in 0..n {
        for j in 0..i {
            if (m[i * n + j] - m[j * n + i]).abs() > SYMMETRY_TOLERANCE {
                return Err(parse_err(path, rows[i].0, format!("not symmetric at columns {} and {}", j + 1, i + 1)));
            }
        }
    }
    let mut g = ValuedGraph::empty(n, false, "correlation");
    for i in 0..n {
        for j in i + 1..n {
            let v = m[i * n + j];
            g.set_weight(i, j, if take_absolute { v.abs() } else { v.max(0.0) });
        }
    }
    Ok(g)
}

pub fn load_rank_matrix(path: &Path) -> Result<ValuedGraph> {
    parse_rank_matrix(&read(path)?, path)
}

/// Preference ranks (1 = favourite) to directed weights `(n - p) / (n - 1)`.
///
/// The diagonal may hold `-`, `NA` or `0`; every row must rank the other
/// `n - 1` members exactly once.
pub fn parse_rank_matrix(text: &str, path: &Path) -> Result<ValuedGraph> {
    let rows = rows(text);
    let n = check_square(path, &rows)?;
    if n < 2 {
        return Err(parse_err(path, rows[0].0, "rank matrix needs at least 2 members"));
    }
    let mut g = ValuedGraph::empty(n, true, "rank fraction");
    for (i, (line, f)) in rows.iter().enumerate() {
        let mut used = vec![false; n];
        for (j, s) in f.iter().enumerate() {
            if i == j {
                if !matches!(*s, "-" | "NA" | "0") {
                    return Err(parse_err(path, *line, format!("diagonal entry `{s}` should be -, NA or 0")));
                }
                continue;
            }
            let p: usize = s
                .parse()
                .map_err(|_| parse_err(path, *line, format!("bad rank `{s}` in column {}", j + 1)))?;
            if p == 0 || p >= n {
                return Err(parse_err(path, *line, format!("rank {p} outside 1..{}", n - 1)));
            }
            if used[p] {
                return Err(parse_err(path, *line, format!("rank {p} repeated, row is not a permutation")));
            }
            used[p] = true;
            g.set_weight(i, j, (n - p) as f64 / (n - 1) as f64);
        }
    }
    Ok(g)
}
