//! Metropolis search over binary images of a valued graph.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dichotomizer::conversion_factor_for;
use crate::error::{Error, Result};
use crate::graph::{BinaryGraph, ValuedGraph};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sweep::{discrepancy, tie_seed, Profile, Statistic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealConfig {
    /// Discrepancy used as the energy.
    pub energy: Statistic,
    pub initial_temperature: f64,
    /// Geometric cooling factor per step.
    pub cooling: f64,
    pub steps: usize,
    /// Jump back to the best state every this many steps.
    pub restart_every: Option<usize>,
    /// Seed of the chain's proposals and acceptances.
    pub seed: u64,
    /// Seed fixing rank tie-breaks in the energy; shared across chains so
    /// they minimize the same function.
    pub tie_seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            energy: Statistic::HarmonicRank,
            initial_temperature: 0.5,
            cooling: 0.995,
            steps: 2000,
            restart_every: None,
            seed: 0,
            tie_seed: 0,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_temperature > 0.0) {
            return Err(Error::InvalidConfig("initial temperature must be positive".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidConfig("cooling factor must lie in (0, 1)".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if self.restart_every == Some(0) {
            return Err(Error::InvalidConfig("restart_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Discrepancy of binary graphs from a fixed valued parent.
///
/// Tie-breaking seeds are fixed so the energy is a function of the state.
/// Undefined discrepancies (no unit conversion, no diameter) are infinite.
pub struct Energy<'a> {
    parent: &'a ValuedGraph,
    stat: Statistic,
    valued: Profile,
    tie_seed: u64,
}

impl<'a> Energy<'a> {
    pub fn new(parent: &'a ValuedGraph, stat: Statistic, seed: u64) -> Result<Self> {
        Ok(Self {
            parent,
            stat,
            valued: Profile::compute(parent, &[stat])?,
            tie_seed: tie_seed(seed, stat),
        })
    }

    pub fn eval(&self, b: &BinaryGraph) -> f64 {
        let factor = conversion_factor_for(self.parent, b)
            .ok()
            .map(|c| c.factor)
            .filter(|&c| c > 0.0);
        let Ok(prof) = Profile::compute(&b.to_valued(), &[self.stat]) else {
            return f64::INFINITY;
        };
        discrepancy(self.stat, &self.valued, &prof, factor, self.tie_seed)
            .unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealResult {
    pub best: BinaryGraph,
    pub best_energy: f64,
    /// Best energy seen after each iteration; entry 0 is the initial state.
    pub trace: Vec<f64>,
    /// Energy of the current state after each iteration.
    pub current: Vec<f64>,
    pub accepted: usize,
}

/// Pairs the annealer may flip: those with positive valued weight.
pub fn candidate_pairs(g: &ValuedGraph) -> Vec<(usize, usize)> {
    g.dyads().filter(|&(i, j)| g.weight(i, j) > 0.0).collect()
}

/// Single-edge-flip Metropolis search starting from `init`.
pub fn anneal_binary(g: &ValuedGraph, init: &BinaryGraph, cfg: &AnnealConfig) -> Result<AnnealResult> {
    cfg.validate()?;
    if init.n() != g.n() || init.is_directed() != g.is_directed() {
        return Err(Error::InvalidGraph("initial state does not match the valued graph".into()));
    }
    let energy = Energy::new(g, cfg.energy, cfg.tie_seed)?;
    let candidates = candidate_pairs(g);
    let mut state = init.clone();
    let mut e = energy.eval(&state);
    let mut best = state.clone();
    let mut best_e = e;
    let mut trace = vec![best_e];
    let mut current = vec![e];
    if candidates.is_empty() {
        return Ok(AnnealResult { best, best_energy: best_e, trace, current, accepted: 0 });
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut temp = cfg.initial_temperature;
    let mut accepted = 0;
    for step in 1..=cfg.steps {
        let (i, j) = candidates[rng.random_range(0..candidates.len())];
        state.flip(i, j);
        let e_new = energy.eval(&state);
        let u: f64 = rng.random();
        let accept = if e_new.is_infinite() {
            e.is_infinite()
        } else {
            e_new <= e || u < (-(e_new - e) / temp).exp()
        };
        if accept {
            e = e_new;
            accepted += 1;
            if e < best_e {
                best_e = e;
                best = state.clone();
            }
        } else {
            state.flip(i, j);
        }
        temp *= cfg.cooling;
        if cfg.restart_every.is_some_and(|k| step % k == 0) {
            state = best.clone();
            e = best_e;
        }
        trace.push(best_e);
        current.push(e);
    }
    Ok(AnnealResult { best, best_energy: best_e, trace, current, accepted })
}

/// Independent chains with derived seeds; the lowest-energy result wins, the
/// earliest chain on ties.
pub fn anneal_chains(g: &ValuedGraph, init: &BinaryGraph, cfg: &AnnealConfig, chains: usize) -> Result<AnnealResult> {
    if chains == 0 {
        return Err(Error::InvalidConfig("chains must be at least 1".into()));
    }
    let results: Vec<Result<AnnealResult>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let cfg = AnnealConfig { seed: derive_seed(cfg.seed, c as u64), ..cfg.clone() };
            anneal_binary(g, init, &cfg)
        })
        .collect();
    let mut best: Option<AnnealResult> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.best_energy < b.best_energy) {
            best = Some(r);
        }
    }
    Ok(best.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dichotomizer::dichotomize;
    use crate::netgen::{sample_graph, GenConfig};

    fn small(seed: u64) -> ValuedGraph {
        sample_graph(&GenConfig { n: 6, sigma_alpha: 1.0, directed: false, seed, ..GenConfig::default() })
    }

    #[test]
    fn best_trace_is_nonincreasing_and_deterministic() {
        let g = small(1);
        let init = dichotomize(&g, 1.0);
        let cfg = AnnealConfig { steps: 300, restart_every: Some(50), ..AnnealConfig::default() };
        let r = anneal_binary(&g, &init, &cfg).unwrap();
        assert_eq!(r.trace.len(), 301);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.best_energy, *r.trace.last().unwrap());
        assert_eq!(Energy::new(&g, cfg.energy, cfg.tie_seed).unwrap().eval(&r.best), r.best_energy);
        assert_eq!(r, anneal_binary(&g, &init, &cfg).unwrap());
    }

    #[test]
    fn greedy_limit_never_climbs() {
        let g = small(2);
        let init = dichotomize(&g, 1.0);
        let cfg = AnnealConfig { initial_temperature: 1e-300, steps: 200, ..AnnealConfig::default() };
        let r = anneal_binary(&g, &init, &cfg).unwrap();
        assert!(r.current.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn perfect_start_is_kept() {
        // uniform weights on an asymmetric tree: the support reproduces the
        // ranking and no node ties
        let mut g = ValuedGraph::empty(7, false, "u");
        for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (5, 6)] {
            g.set_weight(i, j, 2.0);
        }
        let init = dichotomize(&g, 1.0);
        let r = anneal_binary(&g, &init, &AnnealConfig { steps: 100, ..AnnealConfig::default() }).unwrap();
        assert_eq!(r.best_energy, 0.0);
        assert_eq!(r.best, init);
    }

    #[test]
    fn no_candidates_returns_init() {
        let g = ValuedGraph::empty(4, true, "u");
        let init = BinaryGraph::empty(4, true);
        let r = anneal_binary(&g, &init, &AnnealConfig::default()).unwrap();
        assert_eq!(r.best, init);
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn flips_stay_on_the_support() {
        let mut g = small(3);
        g.set_weight(0, 1, 0.0);
        let init = BinaryGraph::empty(6, false);
        let cfg = AnnealConfig { initial_temperature: 10.0, steps: 500, ..AnnealConfig::default() };
        let r = anneal_binary(&g, &init, &cfg).unwrap();
        for (i, j) in r.best.edges() {
            assert!(g.weight(i, j) > 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let g = small(4);
        assert!(anneal_binary(&g, &BinaryGraph::empty(5, false), &AnnealConfig::default()).is_err());
        assert!(anneal_binary(&g, &BinaryGraph::empty(6, true), &AnnealConfig::default()).is_err());
        let bad = AnnealConfig { cooling: 1.0, ..AnnealConfig::default() };
        assert!(anneal_binary(&g, &BinaryGraph::empty(6, false), &bad).is_err());
    }

    #[test]
    fn chains_pick_the_minimum() {
        let g = small(5);
        let init = dichotomize(&g, 2.0);
        let cfg = AnnealConfig { steps: 100, ..AnnealConfig::default() };
        let best = anneal_chains(&g, &init, &cfg, 4).unwrap();
        for c in 0..4 {
            let one = anneal_binary(&g, &init, &AnnealConfig { seed: derive_seed(0, c), ..cfg.clone() }).unwrap();
            assert!(best.best_energy <= one.best_energy);
        }
    }
}
