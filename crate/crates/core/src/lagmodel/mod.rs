//! One-step past/present node-property model driven through a network.

mod batch;
mod efficiency;
mod ols;

pub use batch::{batch_study, t_summary, StudyConfig, StudyRow, TBin, TSummary};
pub use efficiency::{threshold_efficiency, Criterion, CriterionOptimum, EfficiencyReport, EfficiencyRow, SimRecord};
pub use ols::{fit_ols, fit_design, FitResult};

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ValuedGraph;
use crate::rng::{derive_seed, rng_from_seed};

/// Fixed parameters for one outcome simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LagConfig {
    /// Autoregressive coefficient on the past property.
    pub gamma_ar: f64,
    /// Network coefficient in valued units.
    pub beta: f64,
    /// Error standard deviation.
    pub sigma: f64,
    /// Correlation between standardized indegree and the past property.
    pub rho: f64,
    /// Mean of the past property.
    pub mu_y: f64,
    pub intercept: f64,
    pub seed: u64,
}

impl Default for LagConfig {
    fn default() -> Self {
        Self {
            gamma_ar: 0.25,
            beta: 0.1,
            sigma: 1.0,
            rho: 0.5,
            mu_y: 1.0,
            intercept: 0.0,
            seed: 0,
        }
    }
}

impl LagConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.rho.abs() <= 1.0) {
            return Err(Error::InvalidConfig(format!("rho must lie in [-1, 1], got {}", self.rho)));
        }
        for (name, v) in [
            ("gamma_ar", self.gamma_ar),
            ("beta", self.beta),
            ("mu_y", self.mu_y),
            ("intercept", self.intercept),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Distribution over lag configurations used by batch runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LagPrior {
    pub gamma_range: (f64, f64),
    pub beta_range: (f64, f64),
    /// Draws with |beta| below this are rejected.
    pub beta_dead_zone: f64,
    pub sigma: f64,
    pub rho: f64,
    pub mu_y: f64,
    pub intercept: f64,
}

impl Default for LagPrior {
    fn default() -> Self {
        Self {
            gamma_range: (0.05, 0.5),
            beta_range: (-0.2, 0.2),
            beta_dead_zone: 0.02,
            sigma: 1.0,
            rho: 0.5,
            mu_y: 1.0,
            intercept: 0.0,
        }
    }
}

impl LagPrior {
    pub fn validate(&self) -> Result<()> {
        let (g0, g1) = self.gamma_range;
        let (b0, b1) = self.beta_range;
        if !(g0 <= g1 && b0 <= b1) {
            return Err(Error::InvalidConfig("ranges must be ordered (low, high)".into()));
        }
        if !(self.beta_dead_zone >= 0.0) || (self.beta_dead_zone >= b0.abs().max(b1.abs()) && b0 != b1) {
            return Err(Error::InvalidConfig("beta dead zone excludes the whole range".into()));
        }
        self.draw(0).validate()
    }

    /// A concrete configuration; `seed` also becomes the outcome seed.
    pub fn draw(&self, seed: u64) -> LagConfig {
        let mut rng = rng_from_seed(derive_seed(seed, 0x1a9));
        let uniform = |rng: &mut crate::rng::SimRng, (lo, hi): (f64, f64)| {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo..hi)
            }
        };
        let gamma_ar = uniform(&mut rng, self.gamma_range);
        let mut beta = uniform(&mut rng, self.beta_range);
        if self.beta_range.0 != self.beta_range.1 {
            while beta.abs() < self.beta_dead_zone {
                beta = uniform(&mut rng, self.beta_range);
            }
        }
        LagConfig {
            gamma_ar,
            beta,
            sigma: self.sigma,
            rho: self.rho,
            mu_y: self.mu_y,
            intercept: self.intercept,
            seed,
        }
    }
}

/// Simulated past and present properties on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelData {
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    /// Row sums of weight times past property, using the generating graph.
    pub network_predictor: Vec<f64>,
    /// The error draws used for `y1`.
    pub errors: Vec<f64>,
}

impl PanelData {
    /// The same outcomes with the predictor rebuilt from another tie matrix.
    pub fn with_network(&self, g: &ValuedGraph) -> PanelData {
        PanelData {
            network_predictor: network_predictor(g, &self.y0),
            ..self.clone()
        }
    }
}

/// `x_i = sum_j w_ij y_j`.
pub fn network_predictor(g: &ValuedGraph, y: &[f64]) -> Vec<f64> {
    let n = g.n();
    assert_eq!(y.len(), n);
    let w = g.weights();
    (0..n)
        .map(|i| w[i * n..(i + 1) * n].iter().zip(y).map(|(w, y)| w * y).sum())
        .collect()
}

/// Indegree standardized to mean 0 and unit population variance. `None` when
/// the indegree is constant.
fn standardized_indegree(g: &ValuedGraph) -> Option<Vec<f64>> {
    let d = g.indegree();
    let n = d.len() as f64;
    let m = d.iter().sum::<f64>() / n;
    let sd = (d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
    if !(sd > 1e-12 * m.abs().max(1.0)) {
        return None;
    }
    Some(d.iter().map(|x| (x - m) / sd).collect())
}

/// Draws past and present properties for the nodes of `g`.
pub fn simulate_outcomes(g: &ValuedGraph, cfg: &LagConfig) -> Result<PanelData> {
    cfg.validate()?;
    let n = g.n();
    let s = match standardized_indegree(g) {
        Some(s) => s,
        None if cfg.rho == 0.0 => vec![0.0; n],
        None => return Err(Error::UnrealizableCorrelation { rho: cfg.rho }),
    };
    let mut rng = rng_from_seed(cfg.seed);
    let resid = (1.0 - cfg.rho * cfg.rho).sqrt();
    let y0: Vec<f64> = s
        .iter()
        .map(|&si| {
            let z: f64 = StandardNormal.sample(&mut rng);
            cfg.mu_y + cfg.rho * si + resid * z
        })
        .collect();
    let noise = Normal::new(0.0, cfg.sigma).expect("sigma validated");
    let errors: Vec<f64> = (0..n).map(|_| noise.sample(&mut rng)).collect();
    let x = network_predictor(g, &y0);
    let y1 = (0..n)
        .map(|i| cfg.intercept + cfg.gamma_ar * y0[i] + cfg.beta * x[i] + errors[i])
        .collect();
    Ok(PanelData {
        y0,
        y1,
        network_predictor: x,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{sample_graph, GenConfig};
    use crate::stats::{correlation, mean, variance};

    fn graph(n: usize, seed: u64) -> ValuedGraph {
        sample_graph(&GenConfig {
            n,
            sigma_alpha: 1.0,
            seed,
            ..GenConfig::default()
        })
    }

    #[test]
    fn y1_follows_the_model_exactly() {
        let g = graph(30, 1);
        let cfg = LagConfig {
            gamma_ar: 0.3,
            beta: -0.05,
            intercept: 2.0,
            ..LagConfig::default()
        };
        let pd = simulate_outcomes(&g, &cfg).unwrap();
        for i in 0..30 {
            let x: f64 = (0..30).map(|j| g.weight(i, j) * pd.y0[j]).sum();
            assert_eq!(pd.network_predictor[i], x);
            let y = 2.0 + 0.3 * pd.y0[i] - 0.05 * x + pd.errors[i];
            assert!((pd.y1[i] - y).abs() < 1e-12);
        }
        assert_eq!(simulate_outcomes(&g, &cfg).unwrap(), pd);
    }

    #[test]
    fn vanishing_noise_is_pure_autoregression() {
        let g = graph(20, 2);
        let cfg = LagConfig {
            beta: 0.0,
            sigma: 1e-300,
            intercept: 0.7,
            ..LagConfig::default()
        };
        let pd = simulate_outcomes(&g, &cfg).unwrap();
        for i in 0..20 {
            assert_eq!(pd.y1[i], 0.7 + cfg.gamma_ar * pd.y0[i]);
        }
    }

    #[test]
    fn independent_past_property() {
        let g = graph(2000, 3);
        let cfg = LagConfig { rho: 0.0, mu_y: 3.0, ..LagConfig::default() };
        let pd = simulate_outcomes(&g, &cfg).unwrap();
        let r = correlation(&g.indegree(), &pd.y0);
        // sd of r under independence is about 1/sqrt(n)
        assert!(r.abs() < 4.0 / (2000f64).sqrt(), "r = {r}");
        assert!((mean(&pd.y0) - 3.0).abs() < 0.1);
        assert!((variance(&pd.y0) - 1.0).abs() < 0.1);
    }

    #[test]
    fn realized_correlation() {
        let g = graph(5000, 4);
        let cfg = LagConfig { rho: 0.8, ..LagConfig::default() };
        let pd = simulate_outcomes(&g, &cfg).unwrap();
        let r = correlation(&g.indegree(), &pd.y0);
        assert!((r - 0.8).abs() < 0.02, "r = {r}");
    }

    #[test]
    fn constant_indegree_rejects_nonzero_rho() {
        let mut g = ValuedGraph::empty(4, true, "u");
        for i in 0..4 {
            g.set_weight(i, (i + 1) % 4, 1.0);
        }
        let cfg = LagConfig::default();
        assert!(matches!(simulate_outcomes(&g, &cfg), Err(Error::UnrealizableCorrelation { .. })));
        let cfg = LagConfig { rho: 0.0, ..cfg };
        assert!(simulate_outcomes(&g, &cfg).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(LagConfig { sigma: 0.0, ..LagConfig::default() }.validate().is_err());
        assert!(LagConfig { rho: 1.5, ..LagConfig::default() }.validate().is_err());
        assert!(LagConfig { rho: -1.0, ..LagConfig::default() }.validate().is_ok());
    }

    #[test]
    fn prior_draws_respect_ranges() {
        let p = LagPrior::default();
        p.validate().unwrap();
        for s in 0..500 {
            let c = p.draw(s);
            assert!((0.05..0.5).contains(&c.gamma_ar));
            assert!((-0.2..0.2).contains(&c.beta) && c.beta.abs() >= 0.02);
            assert_eq!(c.seed, s);
        }
        assert_eq!(p.draw(9), p.draw(9));
        let fixed = LagPrior { beta_range: (0.1, 0.1), ..p };
        assert_eq!(fixed.draw(3).beta, 0.1);
    }
}
