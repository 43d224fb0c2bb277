//! Valued-network generation from GLM edge families.
//!
//! Each dyad gets a linear predictor built from node effects, an assortative
//! interaction, and (optionally) latent distance or latent cluster terms. The
//! predictor is mapped to a strictly positive mean and a Gamma or Poisson weight
//! is drawn around it.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ValuedGraph;
use crate::rng::{rng_from_seed, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    #[default]
    None,
    /// Equally spaced on the unit circle.
    Ring,
    /// Standard bivariate normal positions.
    Cloud,
    /// Latent clusters preferring ties within their own cluster.
    ClusterIn,
    /// Latent clusters preferring ties across clusters.
    ClusterOut,
}

impl Geometry {
    pub fn uses_distance(self) -> bool {
        matches!(self, Geometry::Ring | Geometry::Cloud)
    }

    pub fn uses_clusters(self) -> bool {
        matches!(self, Geometry::ClusterIn | Geometry::ClusterOut)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gamma,
    #[default]
    Poisson,
}

fn default_clusters() -> usize {
    3
}

/// Parameters of the generative family. Key names in TOML files match the
/// field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenConfig {
    pub n: usize,
    pub sigma_alpha: f64,
    #[serde(default)]
    pub geometry: Geometry,
    /// Coefficient on latent distance (ring or cloud geometry only).
    #[serde(default)]
    pub geo_strength: f64,
    /// Within-cluster propensity; positive for `cluster_in`, negative for
    /// `cluster_out`, zero otherwise.
    #[serde(default)]
    pub cluster_pref: f64,
    /// Assortative mixing coefficient on `alpha_i * alpha_j`.
    #[serde(default)]
    pub mixing: f64,
    #[serde(default)]
    pub family: Family,
    #[serde(default = "default_true")]
    pub directed: bool,
    #[serde(default)]
    pub seed: u64,
    /// Number of latent clusters.
    #[serde(default = "default_clusters")]
    pub clusters: usize,
}

fn default_true() -> bool {
    true
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 50,
            sigma_alpha: 1.0,
            geometry: Geometry::None,
            geo_strength: 0.0,
            cluster_pref: 0.0,
            mixing: 0.0,
            family: Family::Poisson,
            directed: true,
            seed: 0,
            clusters: default_clusters(),
        }
    }
}

impl GenConfig {
    /// Sets the latent structure with a single strength knob: the distance
    /// coefficient for ring/cloud, or `±strength` cluster preference.
    pub fn with_geometry(mut self, geometry: Geometry, strength: f64) -> Self {
        self.geometry = geometry;
        self.geo_strength = 0.0;
        self.cluster_pref = 0.0;
        match geometry {
            Geometry::None => {}
            Geometry::Ring | Geometry::Cloud => self.geo_strength = strength,
            Geometry::ClusterIn => self.cluster_pref = strength.abs(),
            Geometry::ClusterOut => self.cluster_pref = -strength.abs(),
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.sigma_alpha.is_finite() && self.sigma_alpha >= 0.0) {
            return bad(format!("sigma_alpha must be finite and >= 0, got {}", self.sigma_alpha));
        }
        if !self.geo_strength.is_finite() || !self.cluster_pref.is_finite() || !self.mixing.is_finite() {
            return bad("geo_strength, cluster_pref and mixing must be finite".into());
        }
        if self.geo_strength != 0.0 && !self.geometry.uses_distance() {
            return bad("geo_strength is only active for ring or cloud geometry".into());
        }
        match self.geometry {
            Geometry::ClusterIn if self.cluster_pref < 0.0 => {
                return bad("cluster_in requires cluster_pref >= 0".into())
            }
            Geometry::ClusterOut if self.cluster_pref > 0.0 => {
                return bad("cluster_out requires cluster_pref <= 0".into())
            }
            g if !g.uses_clusters() && self.cluster_pref != 0.0 => {
                return bad("cluster_pref is only active for cluster geometries (clusters and distance are exclusive)".into())
            }
            _ => {}
        }
        if self.geometry.uses_clusters() && self.clusters == 0 {
            return bad("clusters must be positive".into());
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Per-node latent draws.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLatents {
    pub alpha: Vec<f64>,
    pub position: Vec<[f64; 2]>,
    pub cluster: Vec<usize>,
}

/// Draws node effects, positions and cluster labels.
///
/// Inactive structure (positions without distance geometry, labels without
/// clusters) is left at zero.
pub fn sample_latents<R: Rng + ?Sized>(config: &GenConfig, rng: &mut R) -> NodeLatents {
    let n = config.n;
    let alpha = if config.sigma_alpha == 0.0 {
        vec![0.0; n]
    } else {
        let normal = Normal::new(0.0, config.sigma_alpha).expect("validated sigma_alpha");
        (0..n).map(|_| normal.sample(rng)).collect()
    };

    let position = match config.geometry {
        Geometry::Ring => (0..n)
            .map(|i| {
                let theta = TAU * i as f64 / n as f64;
                [theta.cos(), theta.sin()]
            })
            .collect(),
        Geometry::Cloud => (0..n)
            .map(|_| [StandardNormal.sample(rng), StandardNormal.sample(rng)])
            .collect(),
        _ => vec![[0.0, 0.0]; n],
    };

    let cluster = if config.geometry.uses_clusters() {
        (0..n).map(|_| rng.random_range(0..config.clusters)).collect()
    } else {
        vec![0; n]
    };

    NodeLatents { alpha, position, cluster }
}

/// Linear predictor for the dyad `(i, j)`.
///
/// Panics if `i == j`.
pub fn mean_parameter(latents: &NodeLatents, config: &GenConfig, i: usize, j: usize) -> f64 {
    assert!(i != j, "mean_parameter is undefined on the diagonal");
    let (ai, aj) = (latents.alpha[i], latents.alpha[j]);
    let mut mu = ai + aj + config.mixing * ai * aj;
    if config.geometry.uses_distance() {
        let [xi, yi] = latents.position[i];
        let [xj, yj] = latents.position[j];
        mu -= config.geo_strength * (xi - xj).hypot(yi - yj);
    }
    if config.geometry.uses_clusters() && latents.cluster[i] == latents.cluster[j] {
        mu += config.cluster_pref;
    }
    mu
}

/// Maps a linear predictor to a strictly positive mean: `exp(mu - 1)` below 1,
/// identity above.
pub fn positive_transform(mu: f64) -> f64 {
    if mu < 1.0 {
        (mu - 1.0).exp()
    } else {
        mu
    }
}

fn draw_weight<R: Rng + ?Sized>(family: Family, mean: f64, rng: &mut R) -> f64 {
    match family {
        Family::Gamma => {
            // shape mean^2, rate mean: mean `mean`, variance 1
            let shape = mean * mean;
            if shape <= f64::MIN_POSITIVE {
                return 0.0;
            }
            let w: f64 = Gamma::new(shape, 1.0 / mean).expect("positive shape").sample(rng);
            if w.is_finite() {
                w
            } else {
                0.0
            }
        }
        Family::Poisson => {
            if mean <= 0.0 {
                return 0.0;
            }
            Poisson::new(mean).expect("positive rate").sample(rng)
        }
    }
}

/// Samples a valued graph, returning the latents that produced it.
pub fn sample_graph_with_latents(config: &GenConfig) -> (ValuedGraph, NodeLatents) {
    config.validate().expect("invalid GenConfig");
    let mut rng: SimRng = rng_from_seed(config.seed);
    let latents = sample_latents(config, &mut rng);
    let unit = match config.family {
        Family::Gamma => "units",
        Family::Poisson => "counts",
    };
    let mut g = ValuedGraph::empty(config.n, config.directed, unit);
    let dyads: Vec<(usize, usize)> = g.dyads().collect();
    for (i, j) in dyads {
        let mean = positive_transform(mean_parameter(&latents, config, i, j));
        let w = draw_weight(config.family, mean, &mut rng);
        g.set_weight(i, j, w);
    }
    (g, latents)
}

/// Samples a valued graph; deterministic in `config.seed`.
///
/// Panics on an invalid config (validate first when it comes from user input).
pub fn sample_graph(config: &GenConfig) -> ValuedGraph {
    sample_graph_with_latents(config).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cfg(n: usize) -> GenConfig {
        GenConfig { n, ..GenConfig::default() }
    }

    #[test]
    fn zero_sigma_gives_zero_effects() {
        let c = GenConfig { sigma_alpha: 0.0, ..cfg(20) };
        let lat = sample_latents(&c, &mut rng_from_seed(1));
        assert!(lat.alpha.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn ring_positions_equally_spaced() {
        let c = cfg(4).with_geometry(Geometry::Ring, 1.0);
        let lat = sample_latents(&c, &mut rng_from_seed(1));
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in lat.position.iter().zip(expect) {
            assert_abs_diff_eq!(p[0], e[0], epsilon = 1e-12);
            assert_abs_diff_eq!(p[1], e[1], epsilon = 1e-12);
            assert_abs_diff_eq!(p[0].hypot(p[1]), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn alpha_sample_sd_matches() {
        let c = GenConfig { sigma_alpha: 2.5, ..cfg(10_000) };
        let lat = sample_latents(&c, &mut rng_from_seed(42));
        let m = lat.alpha.iter().sum::<f64>() / 10_000.0;
        let sd = (lat.alpha.iter().map(|a| (a - m).powi(2)).sum::<f64>() / 9_999.0).sqrt();
        assert!((sd - 2.5).abs() < 0.1, "sd = {sd}");
    }

    #[test]
    fn clusters_are_uniform() {
        let c = cfg(9_000).with_geometry(Geometry::ClusterIn, 3.0);
        let lat = sample_latents(&c, &mut rng_from_seed(3));
        let mut counts = [0usize; 3];
        lat.cluster.iter().for_each(|&k| counts[k] += 1);
        for k in counts {
            assert!((k as f64 - 3_000.0).abs() < 4.0 * (9_000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt());
        }
    }

    #[test]
    fn mean_parameter_examples() {
        let c = GenConfig { mixing: 0.5, ..cfg(2) };
        let lat = NodeLatents {
            alpha: vec![1.0, 2.0],
            position: vec![[0.0, 0.0]; 2],
            cluster: vec![0; 2],
        };
        assert_abs_diff_eq!(mean_parameter(&lat, &c, 0, 1), 4.0, epsilon = 1e-15);

        let zero = NodeLatents { alpha: vec![0.0, 0.0], ..lat.clone() };
        assert_eq!(mean_parameter(&zero, &cfg(2), 0, 1), 0.0);

        let c = GenConfig { sigma_alpha: 0.0, ..cfg(4) }.with_geometry(Geometry::Ring, 1.0);
        let lat = sample_latents(&c, &mut rng_from_seed(0));
        assert_abs_diff_eq!(mean_parameter(&lat, &c, 0, 1), -(2.0f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn cluster_term_applies_within() {
        let c = cfg(2).with_geometry(Geometry::ClusterOut, 3.0);
        let lat = NodeLatents {
            alpha: vec![0.0, 0.0],
            position: vec![[0.0, 0.0]; 2],
            cluster: vec![1, 1],
        };
        assert_eq!(mean_parameter(&lat, &c, 0, 1), -3.0);
        let lat = NodeLatents { cluster: vec![0, 1], ..lat };
        assert_eq!(mean_parameter(&lat, &c, 0, 1), 0.0);
    }

    #[test]
    #[should_panic]
    fn mean_parameter_rejects_diagonal() {
        let c = cfg(3);
        let lat = sample_latents(&c, &mut rng_from_seed(0));
        mean_parameter(&lat, &c, 1, 1);
    }

    #[test]
    fn positive_transform_examples() {
        assert_eq!(positive_transform(1.0), 1.0);
        assert_eq!(positive_transform(2.0), 2.0);
        assert_abs_diff_eq!(positive_transform(0.0), (-1.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn validation() {
        assert!(GenConfig { n: 1, ..cfg(1) }.validate().is_err());
        assert!(GenConfig { sigma_alpha: -1.0, ..cfg(5) }.validate().is_err());
        let mut c = cfg(5).with_geometry(Geometry::Ring, 3.0);
        c.cluster_pref = 1.0;
        assert!(c.validate().is_err());
        let mut c = cfg(5).with_geometry(Geometry::ClusterIn, 3.0);
        c.cluster_pref = -1.0;
        assert!(c.validate().is_err());
        assert!(cfg(5).with_geometry(Geometry::ClusterOut, 0.25).validate().is_ok());
    }

    #[test]
    fn poisson_mean_moment() {
        let c = GenConfig { sigma_alpha: 0.0, n: 200, family: Family::Poisson, seed: 5, ..cfg(200) };
        let g = sample_graph(&c);
        let m = g.dyad_count() as f64;
        let mean = g.dyads().map(|(i, j)| g.weight(i, j)).sum::<f64>() / m;
        let mu = (-1.0f64).exp();
        assert!((mean - mu).abs() < 3.0 * (mu / m).sqrt(), "mean = {mean}");
    }

    #[test]
    fn gamma_variance_is_one() {
        // mean e^-1, variance 1; the sample variance of m draws has sd about
        // sqrt((mu4 - 1) / m) with gamma kurtosis 6/shape, shape = e^-2.
        let c = GenConfig { sigma_alpha: 0.0, n: 200, family: Family::Gamma, seed: 9, ..cfg(200) };
        let g = sample_graph(&c);
        let xs: Vec<f64> = g.dyads().map(|(i, j)| g.weight(i, j)).collect();
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let shape = (-2.0f64).exp();
        let mu4 = 3.0 + 6.0 / shape;
        let tol = 4.0 * ((mu4 - 1.0) / m).sqrt();
        assert!((var - 1.0).abs() < tol, "var = {var}, tol = {tol}");
        assert!((mean - (-1.0f64).exp()).abs() < 4.0 / m.sqrt());
    }

    #[test]
    fn graphs_are_valid_and_deterministic() {
        for family in [Family::Gamma, Family::Poisson] {
            for directed in [true, false] {
                let c = GenConfig { family, directed, seed: 11, sigma_alpha: 2.5, ..cfg(30) }
                    .with_geometry(Geometry::Cloud, 0.25);
                let a = sample_graph(&c);
                let b = sample_graph(&c);
                assert_eq!(a, b);
                assert!(ValuedGraph::from_matrix(30, a.weights().to_vec(), directed, "x").is_ok());
                let d = sample_graph(&GenConfig { seed: 12, ..c });
                assert_ne!(a, d);
            }
        }
    }

    #[test]
    fn extreme_heterogeneity_stays_finite() {
        let c = GenConfig { sigma_alpha: 100.0, family: Family::Gamma, ..cfg(40) };
        let g = sample_graph(&c);
        assert!(g.weights().iter().all(|w| w.is_finite() && *w >= 0.0));
    }

    #[test]
    fn toml_round_trip() {
        let c = GenConfig { mixing: -0.5, ..cfg(30) }.with_geometry(Geometry::ClusterIn, 3.0);
        let text = toml::to_string(&c).unwrap();
        assert!(text.contains("sigma_alpha") && text.contains("cluster_pref"));
        assert_eq!(GenConfig::from_toml(&text).unwrap(), c);
        assert!(GenConfig::from_toml("n = 1\nsigma_alpha = 1.0").is_err());
    }

    proptest! {
        #[test]
        fn positive_transform_positive_monotone(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(positive_transform(lo) > 0.0);
            prop_assert!(positive_transform(lo) <= positive_transform(hi));
        }

        #[test]
        fn mean_parameter_symmetric(seed in 0u64..1000, geo in 0usize..5) {
            let geometry = [Geometry::None, Geometry::Ring, Geometry::Cloud, Geometry::ClusterIn, Geometry::ClusterOut][geo];
            let c = GenConfig { sigma_alpha: 1.0, mixing: 0.5, seed, ..cfg(8) }.with_geometry(geometry, 3.0);
            let lat = sample_latents(&c, &mut rng_from_seed(seed));
            for i in 0..8 {
                for j in 0..8 {
                    if i != j {
                        prop_assert_eq!(mean_parameter(&lat, &c, i, j), mean_parameter(&lat, &c, j, i));
                    }
                }
            }
        }
    }

    #[test]
    fn positive_transform_continuous_at_one() {
        let eps = 1e-9;
        assert!((positive_transform(1.0 - eps) - positive_transform(1.0 + eps)).abs() < 1e-8);
    }
}
