use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{threshold_efficiency, Criterion, LagPrior};
use crate::dichotomizer::ThresholdLadder;
use crate::error::{Error, Result};
use crate::netgen::{sample_graph, GenConfig, Geometry};
use crate::rng::derive_seed;
use crate::stats::t_critical;
use crate::sweep::LadderSpec;

fn one() -> usize {
    1
}

/// Grid study over generative and lag-model settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub gen_grid: Vec<GenConfig>,
    pub lag_grid: Vec<LagPrior>,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default)]
    pub ladder: LadderSpec,
    /// Outcome draws per instance.
    #[serde(default = "one")]
    pub sims: usize,
    #[serde(default)]
    pub master_seed: u64,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gen_grid.is_empty() || self.lag_grid.is_empty() {
            return Err(Error::InvalidConfig("study grids must be nonempty".into()));
        }
        if self.replicates == 0 || self.sims == 0 {
            return Err(Error::InvalidConfig("replicates and sims must be at least 1".into()));
        }
        for g in &self.gen_grid {
            g.validate()?;
        }
        for l in &self.lag_grid {
            l.validate()?;
        }
        self.ladder.validate()
    }
}

/// One (instance, criterion) line of a study table.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub instance: usize,
    pub gen_index: usize,
    pub lag_index: usize,
    pub replicate: usize,
    pub n: usize,
    pub sigma_alpha: f64,
    pub mixing: f64,
    pub geometry: Geometry,
    pub gamma_ar: f64,
    pub beta: f64,
    pub rho: f64,
    pub criterion: Criterion,
    /// Fields below are `None` when no rung could be fitted.
    pub ladder_index: Option<usize>,
    pub threshold: Option<f64>,
    pub edges_per_node: Option<f64>,
    pub density: Option<f64>,
    pub beta_mse_ratio: Option<f64>,
    pub gamma_mse_ratio: Option<f64>,
    pub beta_coverage: Option<f64>,
    pub r_squared: Option<f64>,
    pub beta_t: Option<f64>,
    pub beta_adjusted: Option<f64>,
}

/// Crosses the grids and runs a threshold-efficiency sweep per instance.
pub fn batch_study(cfg: &StudyConfig) -> Result<Vec<StudyRow>> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for gi in 0..cfg.gen_grid.len() {
        for li in 0..cfg.lag_grid.len() {
            for r in 0..cfg.replicates {
                jobs.push((gi, li, r));
            }
        }
    }
    let results: Vec<Result<Vec<StudyRow>>> = jobs
        .par_iter()
        .enumerate()
        .map(|(instance, &(gi, li, r))| {
            let seed = derive_seed(derive_seed(derive_seed(cfg.master_seed, gi as u64), li as u64), r as u64);
            let gen = GenConfig { seed: derive_seed(seed, 0), ..cfg.gen_grid[gi].clone() };
            let lag = cfg.lag_grid[li].draw(derive_seed(seed, 1));
            let g = sample_graph(&gen);
            let mut taus: Vec<f64> = cfg.ladder.resolve(&g)?.into_iter().map(|(t, _)| t).collect();
            taus.sort_by(f64::total_cmp);
            taus.dedup();
            let ladder = ThresholdLadder::new(taus)?;
            let rep = threshold_efficiency(&g, &lag, &ladder, cfg.sims)?;
            Ok(Criterion::ALL
                .iter()
                .map(|&c| {
                    let opt = rep.optimum(c);
                    let row = opt.map(|o| rep.row(o.ladder_index));
                    StudyRow {
                        instance,
                        gen_index: gi,
                        lag_index: li,
                        replicate: r,
                        n: gen.n,
                        sigma_alpha: gen.sigma_alpha,
                        mixing: gen.mixing,
                        geometry: gen.geometry,
                        gamma_ar: lag.gamma_ar,
                        beta: lag.beta,
                        rho: lag.rho,
                        criterion: c,
                        ladder_index: opt.map(|o| o.ladder_index),
                        threshold: opt.map(|o| o.threshold),
                        edges_per_node: opt.map(|o| o.edges_per_node),
                        density: opt.map(|o| o.density),
                        beta_mse_ratio: row.map(|r| r.beta_mse_ratio),
                        gamma_mse_ratio: row.map(|r| r.gamma_mse_ratio),
                        beta_coverage: row.map(|r| r.beta_coverage),
                        r_squared: row.map(|r| r.r_squared),
                        beta_t: row.map(|r| r.beta_t_mean),
                        beta_adjusted: row.map(|r| r.beta_adjusted_mean),
                    }
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::with_capacity(jobs.len() * Criterion::ALL.len());
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub observed: f64,
    /// Probability mass of the reference t distribution in the bin.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TSummary {
    pub df: f64,
    pub total: usize,
    pub bins: Vec<TBin>,
    /// Share of statistics inside the central 95% region of the reference.
    pub central_fraction: f64,
}

/// Bins t-statistics on `[-limit, limit]` (outer bins open-ended) against a
/// reference t density with `df` degrees of freedom.
pub fn t_summary(ts: &[f64], df: f64, limit: f64, width: f64) -> Result<TSummary> {
    if !(df > 0.0 && limit > 0.0 && width > 0.0) {
        return Err(Error::InvalidConfig("t summary needs positive df, limit and width".into()));
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let ts: Vec<f64> = ts.iter().copied().filter(|t| t.is_finite()).collect();
    let k = (2.0 * limit / width).ceil() as usize;
    let mut edges: Vec<f64> = (0..=k).map(|i| -limit + i as f64 * width).collect();
    edges[0] = f64::NEG_INFINITY;
    edges[k] = f64::INFINITY;
    let total = ts.len();
    let bins = edges
        .windows(2)
        .map(|w| {
            let count = ts.iter().filter(|&&t| t >= w[0] && t < w[1]).count();
            TBin {
                lo: w[0],
                hi: w[1],
                count,
                observed: if total > 0 { count as f64 / total as f64 } else { 0.0 },
                expected: dist.cdf(w[1]) - dist.cdf(w[0]),
            }
        })
        .collect();
    let crit = t_critical(0.95, df);
    let inside = ts.iter().filter(|t| t.abs() <= crit).count();
    Ok(TSummary {
        df,
        total,
        bins,
        central_fraction: if total > 0 { inside as f64 / total as f64 } else { f64::NAN },
    })
}
