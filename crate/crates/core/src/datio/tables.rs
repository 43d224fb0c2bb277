use super::table::{fmt_num, fmt_opt, Table};
use crate::lagmodel::{EfficiencyReport, EfficiencyRow, StudyRow, TSummary};
use crate::sweep::{Layer, Optimum, Statistic, SweepResult};

fn int(x: usize) -> String {
    x.to_string()
}

fn opt_int(x: Option<usize>) -> String {
    x.map_or_else(|| "NA".into(), |v| v.to_string())
}

/// One row per (replicate, rung, statistic).
pub fn sweep_table(r: &SweepResult) -> Table {
    let mut t = Table::new([
        "replicate",
        "ladder_index",
        "threshold",
        "target_density",
        "edges_per_node",
        "statistic",
        "discrepancy",
    ]);
    for c in &r.cells {
        t.push(vec![
            int(c.replicate),
            int(c.ladder_index),
            fmt_num(c.threshold),
            fmt_opt(c.target_density),
            fmt_num(c.density),
            c.statistic.to_string(),
            fmt_opt(c.discrepancy),
        ]);
    }
    t
}

pub fn conversion_table(r: &SweepResult) -> Table {
    let mut t = Table::new(["replicate", "ladder_index", "threshold", "target_density", "edges_per_node", "factor"]);
    for c in &r.conversions {
        t.push(vec![
            int(c.replicate),
            int(c.ladder_index),
            fmt_num(c.threshold),
            fmt_opt(c.target_density),
            fmt_num(c.density),
            fmt_opt(c.factor),
        ]);
    }
    t
}

/// Optima keyed by a dataset label; `None` marks an all-missing statistic.
pub fn optima_table(entries: &[(String, Statistic, Option<Optimum>)]) -> Table {
    let mut t = Table::new(["dataset", "statistic", "ladder_index", "threshold", "edges_per_node", "total", "cells"]);
    for (label, stat, o) in entries {
        t.push(vec![
            label.clone(),
            stat.to_string(),
            opt_int(o.as_ref().map(|o| o.ladder_index)),
            fmt_opt(o.as_ref().map(|o| o.threshold)),
            fmt_opt(o.as_ref().map(|o| o.edges_per_node)),
            fmt_opt(o.as_ref().map(|o| o.total)),
            int(o.as_ref().map_or(0, |o| o.cells)),
        ]);
    }
    t
}

fn efficiency_cells(row: &EfficiencyRow) -> Vec<String> {
    vec![
        fmt_opt(row.threshold),
        fmt_num(row.edges_per_node),
        fmt_num(row.density),
        fmt_opt(row.factor),
        int(row.fits),
        int(row.missing),
        fmt_num(row.beta_adjusted_mean),
        fmt_num(row.gamma_mse),
        fmt_num(row.beta_mse),
        fmt_num(row.gamma_coverage),
        fmt_num(row.beta_coverage),
        fmt_num(row.r_squared),
        fmt_num(row.beta_t_mean),
        fmt_num(row.gamma_mse_ratio),
        fmt_num(row.beta_mse_ratio),
    ]
}

/// Valued baseline first, then one row per rung; `optimal_for` lists the
/// criteria choosing that rung.
pub fn efficiency_table(rep: &EfficiencyReport) -> Table {
    let mut t = Table::new([
        "rung",
        "threshold",
        "edges_per_node",
        "density",
        "factor",
        "fits",
        "missing",
        "beta_adjusted",
        "gamma_mse",
        "beta_mse",
        "gamma_coverage",
        "beta_coverage",
        "r_squared",
        "beta_t",
        "gamma_mse_ratio",
        "beta_mse_ratio",
        "optimal_for",
    ]);
    let mut row = vec!["valued".to_string()];
    row.extend(efficiency_cells(&rep.valued));
    row.push("-".into());
    t.push(row);
    for r in &rep.thresholds {
        let k = r.ladder_index.expect("threshold rows carry an index");
        let chosen: Vec<&str> = rep
            .optima
            .iter()
            .filter(|(_, o)| o.as_ref().is_some_and(|o| o.ladder_index == k))
            .map(|(c, _)| c.name())
            .collect();
        let mut row = vec![int(k)];
        row.extend(efficiency_cells(r));
        row.push(if chosen.is_empty() { "-".into() } else { chosen.join(",") });
        t.push(row);
    }
    t
}

pub fn study_table(rows: &[StudyRow]) -> Table {
    let mut t = Table::new([
        "instance",
        "gen_index",
        "lag_index",
        "replicate",
        "n",
        "sigma_alpha",
        "mixing",
        "geometry",
        "gamma_ar",
        "beta",
        "rho",
        "criterion",
        "ladder_index",
        "threshold",
        "edges_per_node",
        "density",
        "beta_mse_ratio",
        "gamma_mse_ratio",
        "beta_coverage",
        "r_squared",
        "beta_t",
        "beta_adjusted",
    ]);
    for r in rows {
        let geometry = toml::Value::try_from(r.geometry)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default();
        t.push(vec![
            int(r.instance),
            int(r.gen_index),
            int(r.lag_index),
            int(r.replicate),
            int(r.n),
            fmt_num(r.sigma_alpha),
            fmt_num(r.mixing),
            geometry,
            fmt_num(r.gamma_ar),
            fmt_num(r.beta),
            fmt_num(r.rho),
            r.criterion.to_string(),
            opt_int(r.ladder_index),
            fmt_opt(r.threshold),
            fmt_opt(r.edges_per_node),
            fmt_opt(r.density),
            fmt_opt(r.beta_mse_ratio),
            fmt_opt(r.gamma_mse_ratio),
            fmt_opt(r.beta_coverage),
            fmt_opt(r.r_squared),
            fmt_opt(r.beta_t),
            fmt_opt(r.beta_adjusted),
        ]);
    }
    t
}

pub fn layers_table(layers: &[Layer]) -> Table {
    let mut t = Table::new(["layer", "threshold", "source", "target", "weight"]);
    for l in layers {
        for &(i, j, w) in &l.edges {
            t.push(vec![int(l.index), fmt_num(l.threshold), int(i), int(j), fmt_num(w)]);
        }
    }
    t
}

pub fn trace_table(trace: &[f64]) -> Table {
    let mut t = Table::new(["iteration", "best_energy"]);
    for (k, &e) in trace.iter().enumerate() {
        t.push(vec![int(k), fmt_num(e)]);
    }
    t
}

pub fn tsummary_table(s: &TSummary) -> Table {
    let mut t = Table::new(["lo", "hi", "count", "observed", "expected"]);
    for b in &s.bins {
        t.push(vec![fmt_num(b.lo), fmt_num(b.hi), int(b.count), fmt_num(b.observed), fmt_num(b.expected)]);
    }
    t
}
