use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_ols, simulate_outcomes, FitResult, LagConfig};
use crate::dichotomizer::{conversion_factor, dichotomize, ThresholdLadder};
use crate::error::Result;
use crate::graph::ValuedGraph;
use crate::rng::derive_seed;
use crate::stats::t_critical;

/// Rule for picking the best cut in a lag-model sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    MinGammaMse,
    MinBetaMse,
    MaxRSquared,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::MinGammaMse, Criterion::MinBetaMse, Criterion::MaxRSquared];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::MinGammaMse => "min_gamma_mse",
            Criterion::MinBetaMse => "min_beta_mse",
            Criterion::MaxRSquared => "max_r_squared",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One fit in one simulation at one cut (`ladder_index == None` is the
/// valued model).
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub sim: usize,
    pub ladder_index: Option<usize>,
    /// Estimates rescaled into valued units; `None` if the fit failed.
    pub fit: Option<AdjustedFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedFit {
    pub gamma_hat: f64,
    pub beta_hat: f64,
    pub beta_se: f64,
    pub gamma_se: f64,
    pub r_squared: f64,
    pub df: usize,
}

impl AdjustedFit {
    fn new(fit: &FitResult, factor: f64) -> Self {
        Self {
            gamma_hat: fit.gamma_hat(),
            beta_hat: fit.beta_hat() / factor,
            beta_se: fit.beta_se() / factor,
            gamma_se: fit.gamma_se(),
            r_squared: fit.r_squared,
            df: fit.df,
        }
    }

    /// Deviation of the adjusted network coefficient from `beta` in
    /// standard-error units.
    pub fn beta_t(&self, beta: f64) -> f64 {
        (self.beta_hat - beta) / self.beta_se
    }
}

/// Summary of one ladder rung (or the valued baseline) across simulations.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyRow {
    pub ladder_index: Option<usize>,
    /// `None` for the valued baseline.
    pub threshold: Option<f64>,
    pub edges_per_node: f64,
    /// Relative density: edges over possible dyads.
    pub density: f64,
    pub factor: Option<f64>,
    pub fits: usize,
    pub missing: usize,
    pub beta_adjusted_mean: f64,
    pub gamma_mse: f64,
    pub beta_mse: f64,
    pub gamma_coverage: f64,
    pub beta_coverage: f64,
    pub r_squared: f64,
    pub beta_t_mean: f64,
    pub gamma_mse_ratio: f64,
    pub beta_mse_ratio: f64,
}

impl EfficiencyRow {
    /// Rows with a missing fit are reported but never chosen as optima.
    pub fn complete(&self) -> bool {
        self.missing == 0 && self.fits > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOptimum {
    pub criterion: Criterion,
    pub ladder_index: usize,
    pub threshold: f64,
    pub edges_per_node: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub config: LagConfig,
    pub sims: usize,
    pub valued: EfficiencyRow,
    pub thresholds: Vec<EfficiencyRow>,
    /// One entry per criterion; `None` when no rung is complete.
    pub optima: Vec<(Criterion, Option<CriterionOptimum>)>,
    pub records: Vec<SimRecord>,
}

impl EfficiencyReport {
    pub fn optimum(&self, c: Criterion) -> Option<&CriterionOptimum> {
        self.optima.iter().find(|(k, _)| *k == c).and_then(|(_, o)| o.as_ref())
    }

    pub fn row(&self, ladder_index: usize) -> &EfficiencyRow {
        &self.thresholds[ladder_index]
    }

    /// Per-simulation adjusted fits at one rung.
    pub fn fits_at(&self, ladder_index: Option<usize>) -> impl Iterator<Item = &AdjustedFit> {
        self.records
            .iter()
            .filter(move |r| r.ladder_index == ladder_index)
            .filter_map(|r| r.fit.as_ref())
    }
}

fn summarize(
    cfg: &LagConfig,
    ladder_index: Option<usize>,
    threshold: Option<f64>,
    edges_per_node: f64,
    density: f64,
    factor: Option<f64>,
    fits: &[Option<AdjustedFit>],
) -> EfficiencyRow {
    let ok: Vec<&AdjustedFit> = fits.iter().flatten().collect();
    let m = ok.len() as f64;
    let avg = |f: &dyn Fn(&AdjustedFit) -> f64| if ok.is_empty() { f64::NAN } else { ok.iter().map(|a| f(a)).sum::<f64>() / m };
    let covers = |est: f64, se: f64, df: usize, truth: f64| {
        let h = t_critical(0.95, df as f64) * se;
        (est - h <= truth && truth <= est + h) as u8 as f64
    };
    EfficiencyRow {
        ladder_index,
        threshold,
        edges_per_node,
        density,
        factor,
        fits: ok.len(),
        missing: fits.len() - ok.len(),
        beta_adjusted_mean: avg(&|a| a.beta_hat),
        gamma_mse: avg(&|a| (a.gamma_hat - cfg.gamma_ar).powi(2)),
        beta_mse: avg(&|a| (a.beta_hat - cfg.beta).powi(2)),
        gamma_coverage: avg(&|a| covers(a.gamma_hat, a.gamma_se, a.df, cfg.gamma_ar)),
        beta_coverage: avg(&|a| covers(a.beta_hat, a.beta_se, a.df, cfg.beta)),
        r_squared: avg(&|a| a.r_squared),
        beta_t_mean: avg(&|a| a.beta_t(cfg.beta)),
        gamma_mse_ratio: 1.0,
        beta_mse_ratio: 1.0,
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

/// Fits the lag model on the valued graph and on each dichotomized image.
///
/// `sims` independent outcome draws share the graph; simulation `k` uses seed
/// `derive_seed(cfg.seed, k)`. Binary estimates of the network coefficient and
/// its interval are divided by the conversion factor of the cut.
pub fn threshold_efficiency(
    g: &ValuedGraph,
    cfg: &LagConfig,
    ladder: &ThresholdLadder,
    sims: usize,
) -> Result<EfficiencyReport> {
    cfg.validate()?;
    if sims == 0 {
        return Err(crate::Error::InvalidConfig("sims must be at least 1".into()));
    }
    let dyads = g.dyad_count().max(1) as f64;
    let cuts: Vec<(ValuedGraph, f64, Option<f64>)> = ladder
        .thresholds()
        .iter()
        .map(|&tau| {
            let b = dichotomize(g, tau);
            let epn = b.edges_per_node();
            (b.to_valued(), epn, conversion_factor(g, tau).ok().map(|c| c.factor))
        })
        .collect();

    let per_sim: Vec<Result<Vec<SimRecord>>> = (0..sims)
        .into_par_iter()
        .map(|s| {
            let sim_cfg = LagConfig { seed: derive_seed(cfg.seed, s as u64), ..cfg.clone() };
            let pd = simulate_outcomes(g, &sim_cfg)?;
            let mut out = Vec::with_capacity(cuts.len() + 1);
            out.push(SimRecord {
                sim: s,
                ladder_index: None,
                fit: fit_ols(&pd).ok().map(|f| AdjustedFit::new(&f, 1.0)),
            });
            for (k, (b, _, factor)) in cuts.iter().enumerate() {
                let fit = factor.and_then(|c| fit_ols(&pd.with_network(b)).ok().map(|f| AdjustedFit::new(&f, c)));
                out.push(SimRecord { sim: s, ladder_index: Some(k), fit });
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::with_capacity(sims * (cuts.len() + 1));
    for r in per_sim {
        records.extend(r?);
    }

    let fits_for = |idx: Option<usize>| -> Vec<Option<AdjustedFit>> {
        records.iter().filter(|r| r.ladder_index == idx).map(|r| r.fit.clone()).collect()
    };
    let n = g.n().max(1) as f64;
    let valued = summarize(cfg, None, None, dyads / n, 1.0, Some(1.0), &fits_for(None));
    let thresholds: Vec<EfficiencyRow> = cuts
        .iter()
        .enumerate()
        .map(|(k, (_, epn, factor))| {
            let mut row = summarize(
                cfg,
                Some(k),
                Some(ladder.thresholds()[k]),
                *epn,
                epn * n / dyads,
                *factor,
                &fits_for(Some(k)),
            );
            row.gamma_mse_ratio = ratio(row.gamma_mse, valued.gamma_mse);
            row.beta_mse_ratio = ratio(row.beta_mse, valued.beta_mse);
            row
        })
        .collect();

    let optima = Criterion::ALL
        .iter()
        .map(|&c| {
            let score = |r: &EfficiencyRow| match c {
                Criterion::MinGammaMse => r.gamma_mse,
                Criterion::MinBetaMse => r.beta_mse,
                Criterion::MaxRSquared => -r.r_squared,
            };
            // later rungs have higher thresholds, so `<=` breaks ties sparse
            let best = thresholds
                .iter()
                .filter(|r| r.complete() && !score(r).is_nan())
                .fold(None::<&EfficiencyRow>, |best, r| match best {
                    Some(b) if score(r) > score(b) => Some(b),
                    _ => Some(r),
                });
            let opt = best.map(|r| CriterionOptimum {
                criterion: c,
                ladder_index: r.ladder_index.unwrap(),
                threshold: r.threshold.unwrap(),
                edges_per_node: r.edges_per_node,
                density: r.density,
            });
            (c, opt)
        })
        .collect();

    Ok(EfficiencyReport {
        config: cfg.clone(),
        sims,
        valued,
        thresholds,
        optima,
        records,
    })
}
