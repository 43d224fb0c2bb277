//! Reading real networks and writing result tables.

mod edgelist;
mod matrix;
mod table;
mod tables;

pub use edgelist::{load_edgelist, parse_edgelist, write_edgelist};
pub use matrix::{load_correlation_matrix, load_rank_matrix, parse_correlation_matrix, parse_rank_matrix};
pub use table::{fmt_num, fmt_opt, Table};
pub use tables::{
    conversion_table, efficiency_table, layers_table, optima_table, study_table, sweep_table, trace_table, tsummary_table,
};

use std::path::Path;

use crate::error::{Error, Result};

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Splits a data line on commas and whitespace, ignoring `#` comments.
fn fields(line: &str) -> Vec<&str> {
    let data = line.split('#').next().unwrap_or("");
    data.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}
