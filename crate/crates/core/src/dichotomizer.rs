//! Threshold ladders, dichotomization and the valued-per-Phil unit change.

use serde::{Deserialize, Serialize};

use crate::components::UnionFind;
use crate::error::{Error, Result};
use crate::graph::{BinaryGraph, ValuedGraph};

/// Strictly increasing cut values, optionally tagged with the edges-per-node
/// targets that induced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdLadder {
    thresholds: Vec<f64>,
    target_density: Option<Vec<f64>>,
}

impl ThresholdLadder {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidConfig("threshold ladder is empty".into()));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidConfig("thresholds must be finite".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("thresholds must be strictly increasing".into()));
        }
        Ok(Self { thresholds, target_density: None })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn target_density(&self) -> Option<&[f64]> {
        self.target_density.as_deref()
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }
}

/// `1(w_ij >= tau)` off the diagonal.
pub fn dichotomize(g: &ValuedGraph, tau: f64) -> BinaryGraph {
    assert!(tau.is_finite(), "threshold must be finite");
    let n = g.n();
    let adjacency = g
        .weights()
        .iter()
        .enumerate()
        .map(|(k, &w)| k / n != k % n && w >= tau)
        .collect();
    BinaryGraph::from_parts(n, adjacency, g.is_directed(), Some(tau))
}

/// Distinct positive dyad weights, descending, with the number of dyads at
/// or above each.
fn cut_candidates(g: &ValuedGraph) -> Vec<(f64, usize)> {
    let mut ws: Vec<f64> = g.dyads().map(|(i, j)| g.weight(i, j)).filter(|&w| w > 0.0).collect();
    ws.sort_by(|a, b| b.total_cmp(a));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (k, w) in ws.iter().enumerate() {
        match out.last_mut() {
            Some(last) if last.0 == *w => last.1 = k + 1,
            _ => out.push((*w, k + 1)),
        }
    }
    out
}

fn closest_cut(cands: &[(f64, usize)], wanted_edges: f64) -> f64 {
    // candidates run from fewest to most edges; strict `<` keeps the sparser
    // cut on a tie
    let mut best = cands[0];
    let mut best_gap = (best.1 as f64 - wanted_edges).abs();
    for &c in &cands[1..] {
        let gap = (c.1 as f64 - wanted_edges).abs();
        if gap < best_gap {
            best = c;
            best_gap = gap;
        }
    }
    best.0
}

/// The cut whose edge count is closest to `target * n`, ties toward fewer
/// edges. Only positive weights are candidate cuts.
pub fn threshold_for_density(g: &ValuedGraph, target: f64) -> Result<f64> {
    let cands = cut_candidates(g);
    if cands.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(closest_cut(&cands, target * g.n() as f64))
}

/// Builds a ladder hitting each edges-per-node target as closely as the
/// weights allow. Duplicated cuts collapse to one rung.
pub fn ladder_for_densities(g: &ValuedGraph, targets: &[f64]) -> Result<ThresholdLadder> {
    if targets.is_empty() {
        return Err(Error::InvalidConfig("no density targets".into()));
    }
    let max = g.max_density();
    for &t in targets {
        if !(t > 0.0 && t <= max * (1.0 + 1e-12)) {
            return Err(Error::InvalidConfig(format!("density target {t} outside (0, {max}]")));
        }
    }
    let cands = cut_candidates(g);
    if cands.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = g.n() as f64;
    let mut rungs: Vec<(f64, f64)> = targets.iter().map(|&t| (closest_cut(&cands, t * n), t)).collect();
    rungs.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    rungs.dedup_by(|b, a| a.0 == b.0);
    Ok(ThresholdLadder {
        thresholds: rungs.iter().map(|r| r.0).collect(),
        target_density: Some(rungs.iter().map(|r| r.1).collect()),
    })
}

/// `count` edges-per-node targets spaced evenly on a log scale between
/// `lowest` and the graph's maximum density, sparsest first.
pub fn log_spaced_targets(max_density: f64, lowest: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1 && lowest > 0.0 && max_density >= lowest);
    if count == 1 {
        return vec![max_density];
    }
    let (a, b) = (lowest.ln(), max_density.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Valued units per Phil at a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitConversion {
    pub factor: f64,
    pub threshold: f64,
    pub unit_label: String,
}

/// Whether a statistic scales like connectivity or like its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    ClosenessLike,
    DistanceLike,
}

/// `mean(high) - mean(low)` over every off-diagonal entry, zeros included.
pub fn conversion_factor(g: &ValuedGraph, tau: f64) -> Result<UnitConversion> {
    let (mut hs, mut hn, mut ls, mut ln) = (0.0, 0usize, 0.0, 0usize);
    for w in g.off_diagonal() {
        if w >= tau {
            hs += w;
            hn += 1;
        } else {
            ls += w;
            ln += 1;
        }
    }
    split_factor(hs, hn, ls, ln, tau, g.unit_label())
}

/// Same split means as [`conversion_factor`], with the high group given by an
/// arbitrary binary image of `g` rather than a threshold.
pub fn conversion_factor_for(g: &ValuedGraph, b: &BinaryGraph) -> Result<UnitConversion> {
    assert_eq!(g.n(), b.n());
    let n = g.n();
    let (mut hs, mut hn, mut ls, mut ln) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = g.weight(i, j);
            if b.has_edge(i, j) {
                hs += w;
                hn += 1;
            } else {
                ls += w;
                ln += 1;
            }
        }
    }
    split_factor(hs, hn, ls, ln, b.source_threshold().unwrap_or(f64::NAN), g.unit_label())
}

fn split_factor(hs: f64, hn: usize, ls: f64, ln: usize, tau: f64, unit: &str) -> Result<UnitConversion> {
    if hn == 0 {
        return Err(Error::DegenerateSplit { threshold: tau, side: "high" });
    }
    if ln == 0 {
        return Err(Error::DegenerateSplit { threshold: tau, side: "low" });
    }
    Ok(UnitConversion {
        factor: hs / hn as f64 - ls / ln as f64,
        threshold: tau,
        unit_label: unit.to_string(),
    })
}

/// Converts a binary-graph statistic back into valued units.
pub fn to_valued_units(stat: f64, kind: StatKind, c: &UnitConversion) -> f64 {
    match kind {
        StatKind::ClosenessLike => stat * c.factor,
        StatKind::DistanceLike => stat / c.factor,
    }
}

/// Largest weight value whose dichotomized graph has a weakly connected
/// component holding at least `fraction` of the nodes.
pub fn giant_component_threshold(g: &ValuedGraph, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!("fraction {fraction} outside (0, 1]")));
    }
    let n = g.n();
    let need = fraction * n as f64;
    let mut arcs: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| (g.weight(i, j), i, j))
        .filter(|a| a.0 > 0.0)
        .collect();
    if arcs.is_empty() {
        return Err(Error::EmptyGraph);
    }
    arcs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut uf = UnionFind::new(n);
    let mut k = 0;
    while k < arcs.len() {
        let tau = arcs[k].0;
        while k < arcs.len() && arcs[k].0 == tau {
            uf.union(arcs[k].1, arcs[k].2);
            k += 1;
        }
        if uf.largest() as f64 >= need {
            return Ok(tau);
        }
    }
    Err(Error::NoGiantComponent { fraction })
}
