//! The geometry experiment: replicate valued graphs, cut each along a
//! threshold ladder, and score every binary image against its own parent.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dichotomizer::{conversion_factor, dichotomize, log_spaced_targets, threshold_for_density, ThresholdLadder};
use crate::error::{Error, Result};
use crate::graph::{BinaryGraph, ValuedGraph};
use crate::metrics::{geodesic_distances, harmonic_closeness, rank, rank_discrepancy, OhmicSystem};
use crate::netgen::{sample_graph, GenConfig};
use crate::rng::derive_seed;

/// Comparison statistics between a binary graph and its valued parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    HarmonicRank,
    OhmicRank,
    PowerRank,
    HarmonicValue,
    OhmicValue,
    GeoDiameter,
    OhmicDiameter,
    InverseGeoDiameter,
    InverseOhmicDiameter,
}

impl Statistic {
    pub const ALL: [Statistic; 9] = [
        Statistic::HarmonicRank,
        Statistic::OhmicRank,
        Statistic::PowerRank,
        Statistic::HarmonicValue,
        Statistic::OhmicValue,
        Statistic::GeoDiameter,
        Statistic::OhmicDiameter,
        Statistic::InverseGeoDiameter,
        Statistic::InverseOhmicDiameter,
    ];

    /// The seven statistics compared in a default run.
    pub const DEFAULT: [Statistic; 7] = [
        Statistic::HarmonicRank,
        Statistic::OhmicRank,
        Statistic::PowerRank,
        Statistic::HarmonicValue,
        Statistic::OhmicValue,
        Statistic::GeoDiameter,
        Statistic::OhmicDiameter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::HarmonicRank => "harmonic_rank",
            Statistic::OhmicRank => "ohmic_rank",
            Statistic::PowerRank => "power_rank",
            Statistic::HarmonicValue => "harmonic_value",
            Statistic::OhmicValue => "ohmic_value",
            Statistic::GeoDiameter => "geo_diameter",
            Statistic::OhmicDiameter => "ohmic_diameter",
            Statistic::InverseGeoDiameter => "inverse_geo_diameter",
            Statistic::InverseOhmicDiameter => "inverse_ohmic_diameter",
        }
    }

    pub fn is_rank(self) -> bool {
        matches!(self, Statistic::HarmonicRank | Statistic::OhmicRank | Statistic::PowerRank)
    }

    fn index(self) -> u64 {
        Statistic::ALL.iter().position(|&s| s == self).unwrap() as u64
    }

    fn needs_geodesic(self) -> bool {
        matches!(
            self,
            Statistic::HarmonicRank | Statistic::HarmonicValue | Statistic::GeoDiameter | Statistic::InverseGeoDiameter
        )
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown statistic `{s}`")))
    }
}

/// How each replicate's ladder is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderSpec {
    /// Fixed cut values shared by every replicate.
    Thresholds(Vec<f64>),
    /// Edges-per-node targets; the cut is found per replicate and cells are
    /// aligned by target.
    Densities(Vec<f64>),
    /// `count` log-spaced targets from `lowest` up to the complete graph.
    LogDensities { count: usize, lowest: f64 },
}

impl Default for LadderSpec {
    fn default() -> Self {
        LadderSpec::LogDensities { count: 30, lowest: 0.25 }
    }
}

impl LadderSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LadderSpec::Thresholds(t) => ThresholdLadder::new(t.clone()).map(|_| ()),
            LadderSpec::Densities(d) if d.is_empty() || d.iter().any(|&x| !(x > 0.0 && x.is_finite())) => {
                Err(Error::InvalidConfig("density targets must be positive and nonempty".into()))
            }
            LadderSpec::LogDensities { count, lowest } if *count == 0 || !(*lowest > 0.0) => {
                Err(Error::InvalidConfig("log_densities needs count >= 1 and lowest > 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Resolves to `(threshold, target)` rungs for one graph.
    pub fn resolve(&self, g: &ValuedGraph) -> Result<Vec<(f64, Option<f64>)>> {
        match self {
            LadderSpec::Thresholds(t) => Ok(t.iter().map(|&x| (x, None)).collect()),
            LadderSpec::Densities(d) => d
                .iter()
                .map(|&t| threshold_for_density(g, t).map(|tau| (tau, Some(t))))
                .collect(),
            LadderSpec::LogDensities { count, lowest } => {
                let max = g.max_density();
                let targets = log_spaced_targets(max, lowest.min(max), *count);
                targets
                    .into_iter()
                    .map(|t| threshold_for_density(g, t).map(|tau| (tau, Some(t))))
                    .collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            LadderSpec::Thresholds(t) => t.len(),
            LadderSpec::Densities(d) => d.len(),
            LadderSpec::LogDensities { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn default_replicates() -> usize {
    10
}

fn default_statistics() -> Vec<Statistic> {
    Statistic::DEFAULT.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub gen: GenConfig,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub ladder: LadderSpec,
    #[serde(default = "default_statistics")]
    pub statistics: Vec<Statistic>,
    #[serde(default)]
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gen: GenConfig::default(),
            replicates: default_replicates(),
            ladder: LadderSpec::default(),
            statistics: default_statistics(),
            master_seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.gen.validate()?;
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.statistics.is_empty() {
            return Err(Error::InvalidConfig("no statistics requested".into()));
        }
        self.ladder.validate()
    }
}

/// Node statistics and diameters of one graph, computed on demand.
#[derive(Debug, Clone, Default)]
pub struct Profile {
    pub harmonic: Option<Vec<f64>>,
    pub ohmic: Option<Vec<f64>>,
    pub power: Option<Vec<f64>>,
    pub geo_diameter: Option<f64>,
    pub ohmic_diameter: Option<f64>,
}

impl Profile {
    pub fn compute(g: &ValuedGraph, stats: &[Statistic]) -> Result<Self> {
        let mut p = Profile::default();
        if stats.iter().any(|s| s.needs_geodesic()) {
            let d = geodesic_distances(g);
            p.geo_diameter = d.max_finite().filter(|&x| x > 0.0);
            p.harmonic = Some(harmonic_closeness(&d).values);
        }
        if stats.iter().any(|s| !s.needs_geodesic()) {
            let sys = OhmicSystem::new(g)?;
            p.ohmic = Some(sys.closeness().values);
            p.ohmic_diameter = sys.resistance_matrix().max_finite().filter(|&x| x > 0.0);
            if stats.contains(&Statistic::PowerRank) {
                p.power = Some(sys.fixed_power_betweenness().values);
            }
        }
        Ok(p)
    }

    fn values(&self, s: Statistic) -> &[f64] {
        let v = match s {
            Statistic::HarmonicRank | Statistic::HarmonicValue => &self.harmonic,
            Statistic::OhmicRank | Statistic::OhmicValue => &self.ohmic,
            Statistic::PowerRank => &self.power,
            _ => unreachable!("not a node statistic"),
        };
        v.as_deref().expect("profile computed without this statistic")
    }
}

/// Discrepancy of a binary profile from its valued parent.
///
/// Rank statistics use the top-weighted rank discrepancy; value statistics the
/// mean squared per-node deviation in valued units; diameters the squared
/// deviation in valued units. `None` when a unit conversion or diameter is
/// undefined. Both rankings break ties with `tie_seed`, so equal value vectors
/// always rank identically.
pub fn discrepancy(stat: Statistic, valued: &Profile, binary: &Profile, factor: Option<f64>, tie_seed: u64) -> Option<f64> {
    let sq = |x: f64| x * x;
    match stat {
        Statistic::HarmonicRank | Statistic::OhmicRank | Statistic::PowerRank => {
            let a = rank(valued.values(stat), tie_seed);
            let b = rank(binary.values(stat), tie_seed);
            Some(rank_discrepancy(&a, &b))
        }
        Statistic::HarmonicValue | Statistic::OhmicValue => {
            let c = factor?;
            let (v, b) = (valued.values(stat), binary.values(stat));
            Some(v.iter().zip(b).map(|(v, b)| sq(c * b - v)).sum::<f64>() / v.len() as f64)
        }
        Statistic::GeoDiameter => Some(sq(binary.geo_diameter? / factor? - valued.geo_diameter?)),
        Statistic::OhmicDiameter => Some(sq(binary.ohmic_diameter? / factor? - valued.ohmic_diameter?)),
        Statistic::InverseGeoDiameter => Some(sq(factor? / binary.geo_diameter? - 1.0 / valued.geo_diameter?)),
        Statistic::InverseOhmicDiameter => {
            Some(sq(factor? / binary.ohmic_diameter? - 1.0 / valued.ohmic_diameter?))
        }
    }
}

/// Rank tie-break seed for one statistic of a replicate, shared by the valued
/// parent and every rung.
pub fn tie_seed(replicate_seed: u64, stat: Statistic) -> u64 {
    derive_seed(derive_seed(replicate_seed, u64::MAX), stat.index())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub replicate: usize,
    pub ladder_index: usize,
    pub threshold: f64,
    pub target_density: Option<f64>,
    /// Realized edges per node.
    pub density: f64,
    pub statistic: Statistic,
    pub discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConversionRow {
    pub replicate: usize,
    pub ladder_index: usize,
    pub threshold: f64,
    pub target_density: Option<f64>,
    pub density: f64,
    pub factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub statistics: Vec<Statistic>,
    pub replicates: usize,
    pub ladder_len: usize,
    pub cells: Vec<SweepCell>,
    pub conversions: Vec<ConversionRow>,
}

/// Sweeps one valued graph as replicate `replicate`. Exposed for real data.
pub fn sweep_graph(
    g: &ValuedGraph,
    ladder: &LadderSpec,
    stats: &[Statistic],
    replicate: usize,
    seed: u64,
) -> Result<(Vec<SweepCell>, Vec<ConversionRow>)> {
    let rungs = ladder.resolve(g)?;
    let valued = Profile::compute(g, stats)?;
    let per_rung: Vec<Result<(Vec<SweepCell>, ConversionRow)>> = rungs
        .par_iter()
        .enumerate()
        .map(|(k, &(tau, target))| {
            let b: BinaryGraph = dichotomize(g, tau);
            let density = b.edges_per_node();
            let factor = conversion_factor(g, tau).ok().map(|c| c.factor);
            let prof = Profile::compute(&b.to_valued(), stats)?;
            let cells = stats
                .iter()
                .map(|&s| SweepCell {
                    replicate,
                    ladder_index: k,
                    threshold: tau,
                    target_density: target,
                    density,
                    statistic: s,
                    discrepancy: discrepancy(
                        s,
                        &valued,
                        &prof,
                        factor,
                        tie_seed(seed, s),
                    ),
                })
                .collect();
            let conv = ConversionRow {
                replicate,
                ladder_index: k,
                threshold: tau,
                target_density: target,
                density,
                factor,
            };
            Ok((cells, conv))
        })
        .collect();
    let mut cells = Vec::with_capacity(rungs.len() * stats.len());
    let mut convs = Vec::with_capacity(rungs.len());
    for r in per_rung {
        let (c, v) = r?;
        cells.extend(c);
        convs.push(v);
    }
    Ok((cells, convs))
}

/// Runs the full replicate-by-ladder experiment.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let reps: Vec<Result<(Vec<SweepCell>, Vec<ConversionRow>)>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(cfg.master_seed, r as u64);
            let gen = GenConfig { seed, ..cfg.gen.clone() };
            let g = sample_graph(&gen);
            sweep_graph(&g, &cfg.ladder, &cfg.statistics, r, seed)
        })
        .collect();
    let mut result = SweepResult {
        statistics: cfg.statistics.clone(),
        replicates: cfg.replicates,
        ladder_len: cfg.ladder.len(),
        cells: Vec::new(),
        conversions: Vec::new(),
    };
    for r in reps {
        let (c, v) = r?;
        result.cells.extend(c);
        result.conversions.extend(v);
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub statistic: Statistic,
    pub ladder_index: usize,
    /// Mean cut value across replicates at the chosen rung.
    pub threshold: f64,
    /// Mean realized edges per node at the chosen rung.
    pub edges_per_node: f64,
    /// Summed discrepancy over the available cells.
    pub total: f64,
    /// Cells that contributed (missing ones are excluded, not imputed).
    pub cells: usize,
}

/// The rung with the lowest discrepancy across replicates.
///
/// Rungs are scored by the mean over their non-missing cells, which equals the
/// replicate total up to a constant when nothing is missing. Ties go to the
/// higher threshold.
pub fn optimal_threshold(r: &SweepResult, stat: Statistic) -> Result<Optimum> {
    if !r.statistics.contains(&stat) {
        return Err(Error::InvalidConfig(format!("statistic {stat} was not swept")));
    }
    let len = r.cells.iter().map(|c| c.ladder_index + 1).max().unwrap_or(0);
    let mut best: Option<(f64, Optimum)> = None;
    for k in 0..len {
        let rung: Vec<&SweepCell> = r.cells.iter().filter(|c| c.statistic == stat && c.ladder_index == k).collect();
        if rung.is_empty() {
            continue;
        }
        let threshold = rung.iter().map(|c| c.threshold).sum::<f64>() / rung.len() as f64;
        let edges_per_node = rung.iter().map(|c| c.density).sum::<f64>() / rung.len() as f64;
        let avail: Vec<f64> = rung.iter().filter_map(|c| c.discrepancy).collect();
        if avail.is_empty() {
            continue;
        }
        let total: f64 = avail.iter().sum();
        let score = total / avail.len() as f64;
        let better = match &best {
            None => true,
            Some((s, o)) => score < *s || (score == *s && threshold > o.threshold),
        };
        if better {
            best = Some((
                score,
                Optimum {
                    statistic: stat,
                    ladder_index: k,
                    threshold,
                    edges_per_node,
                    total,
                    cells: avail.len(),
                },
            ));
        }
    }
    best.map(|b| b.1).ok_or_else(|| Error::AllCellsMissing(stat.to_string()))
}

/// Edges surviving at one rung of a ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub index: usize,
    pub threshold: f64,
    pub edges: Vec<(usize, usize, f64)>,
}

/// Per-threshold edge membership, one layer per rung; each layer is nested in
/// the one before it.
pub fn export_layers(g: &ValuedGraph, ladder: &ThresholdLadder) -> Vec<Layer> {
    ladder
        .thresholds()
        .iter()
        .enumerate()
        .map(|(index, &tau)| Layer {
            index,
            threshold: tau,
            edges: dichotomize(g, tau)
                .edges()
                .into_iter()
                .map(|(i, j)| (i, j, g.weight(i, j)))
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(rep: usize, k: usize, tau: f64, d: Option<f64>) -> SweepCell {
        SweepCell {
            replicate: rep,
            ladder_index: k,
            threshold: tau,
            target_density: None,
            density: 10.0 - tau,
            statistic: Statistic::HarmonicRank,
            discrepancy: d,
        }
    }

    fn result(cells: Vec<SweepCell>) -> SweepResult {
        SweepResult {
            statistics: vec![Statistic::HarmonicRank],
            replicates: 2,
            ladder_len: 3,
            cells,
            conversions: vec![],
        }
    }

    #[test]
    fn optimum_is_argmin() {
        let r = result(vec![
            cell(0, 0, 1.0, Some(3.0)),
            cell(0, 1, 2.0, Some(1.0)),
            cell(0, 2, 3.0, Some(2.0)),
            cell(1, 0, 1.0, Some(3.0)),
            cell(1, 1, 2.0, Some(1.5)),
            cell(1, 2, 3.0, Some(2.0)),
        ]);
        let o = optimal_threshold(&r, Statistic::HarmonicRank).unwrap();
        assert_eq!(o.threshold, 2.0);
        assert_eq!(o.total, 2.5);
        assert_eq!(o.edges_per_node, 8.0);
    }

    #[test]
    fn optimum_ties_go_sparse() {
        let r = result(vec![cell(0, 0, 1.0, Some(1.0)), cell(0, 1, 2.0, Some(1.0))]);
        assert_eq!(optimal_threshold(&r, Statistic::HarmonicRank).unwrap().threshold, 2.0);
    }

    #[test]
    fn optimum_single_rung_and_errors() {
        let r = result(vec![cell(0, 0, 4.0, Some(7.0))]);
        assert_eq!(optimal_threshold(&r, Statistic::HarmonicRank).unwrap().threshold, 4.0);
        let r = result(vec![cell(0, 0, 4.0, None)]);
        assert!(matches!(optimal_threshold(&r, Statistic::HarmonicRank), Err(Error::AllCellsMissing(_))));
        assert!(optimal_threshold(&r, Statistic::OhmicRank).is_err());
    }

    #[test]
    fn missing_cells_are_excluded() {
        let r = result(vec![
            cell(0, 0, 1.0, None),
            cell(1, 0, 1.0, Some(0.5)),
            cell(0, 1, 2.0, Some(1.0)),
            cell(1, 1, 2.0, Some(1.0)),
        ]);
        let o = optimal_threshold(&r, Statistic::HarmonicRank).unwrap();
        assert_eq!((o.ladder_index, o.cells), (0, 1));
    }

    #[test]
    fn layers_match_hand_filtering() {
        let mut g = ValuedGraph::empty(3, false, "u");
        g.set_weight(0, 1, 1.0);
        g.set_weight(1, 2, 2.0);
        g.set_weight(0, 2, 3.0);
        let ladder = ThresholdLadder::new(vec![0.5, 2.0, 3.0]).unwrap();
        let layers = export_layers(&g, &ladder);
        assert_eq!(layers[0].edges, vec![(0, 1, 1.0), (0, 2, 3.0), (1, 2, 2.0)]);
        assert_eq!(layers[1].edges, vec![(0, 2, 3.0), (1, 2, 2.0)]);
        assert_eq!(layers[2].edges, vec![(0, 2, 3.0)]);

        let full = export_layers(&g, &ThresholdLadder::new(vec![0.0]).unwrap());
        assert_eq!(full[0].edges.len(), 3);
    }

    #[test]
    fn statistic_names_round_trip() {
        for s in Statistic::ALL {
            assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
        }
        assert!("nope".parse::<Statistic>().is_err());
    }

    #[test]
    fn config_from_toml() {
        let text = r#"
            replicates = 3
            statistics = ["harmonic_rank", "ohmic_value"]
            master_seed = 9
            ladder = { densities = [0.5, 1.0, 2.0] }
            [gen]
            n = 20
            sigma_alpha = 0.5
            geometry = "ring"
            geo_strength = 0.25
        "#;
        let cfg: SweepConfig = toml::from_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.ladder, LadderSpec::Densities(vec![0.5, 1.0, 2.0]));
        assert_eq!(cfg.statistics, vec![Statistic::HarmonicRank, Statistic::OhmicValue]);
        let back: SweepConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
