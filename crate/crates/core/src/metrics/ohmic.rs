//! Resistor-network view of a valued graph.
//!
//! Tie strengths act as conductances. Each connected component is grounded at
//! its last node and the reduced Laplacian is inverted by Cholesky; the
//! resulting Green's matrix (zero on the ground row and column) gives every
//! effective resistance and every unit-current potential profile.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{CentralityKind, CentralityVector, DistanceKind, DistanceMatrix};
use crate::components::weak_components;
use crate::error::{Error, Result};
use crate::graph::ValuedGraph;

/// Conductances below this fraction of the largest one are treated as open
/// circuits, and Cholesky pivots below it (relative) count as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Block {
    members: Vec<usize>,
    /// k x k, row-major; potentials for unit injection at a node, extraction
    /// at the ground.
    green: Vec<f64>,
}

impl Block {
    #[inline]
    fn green(&self, p: usize, q: usize) -> f64 {
        self.green[p * self.members.len() + q]
    }
}

#[derive(Debug, Clone)]
pub struct OhmicSystem {
    n: usize,
    conductance: Vec<f64>,
    block_of: Vec<usize>,
    local: Vec<usize>,
    blocks: Vec<Block>,
}

/// Potentials and branch currents for one terminal pair driven at 1 W.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    pub source: usize,
    pub sink: usize,
    /// `G_ab^eq` between the terminals.
    pub conductance: f64,
    /// `sqrt(G)`, the current delivering unit power.
    pub injected_current: f64,
    /// Node potentials, grounded at the component's last node; zero outside it.
    pub potentials: Vec<f64>,
    /// `(i, j, I_ij)` for each conducting pair with `i < j`; positive means
    /// current flows from `i` to `j`.
    pub currents: Vec<(usize, usize, f64)>,
    /// Half the absolute incident current; terminals carry the full injection.
    pub throughflow: Vec<f64>,
}

impl OhmicSystem {
    /// Directed graphs are symmetrized by averaging `w_ij` and `w_ji`.
    pub fn new(g: &ValuedGraph) -> Result<Self> {
        let sym = g.symmetrized();
        let n = sym.n();
        let cutoff = PIVOT_TOLERANCE * sym.max_weight();
        let mut conductance = sym.weights().to_vec();
        conductance.iter_mut().for_each(|c| {
            if *c < cutoff {
                *c = 0.0
            }
        });
        let cleaned = ValuedGraph::from_matrix(n, conductance.clone(), false, "")?;
        let labels = weak_components(&cleaned);
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); count];
        let mut local = vec![0; n];
        for (i, &l) in labels.iter().enumerate() {
            local[i] = members[l].len();
            members[l].push(i);
        }
        let blocks = members
            .into_par_iter()
            .map(|m| grounded_inverse(&conductance, n, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            conductance,
            block_of: labels,
            local,
            blocks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Symmetric conductance actually used, after symmetrization and cutoff.
    #[inline]
    pub fn conductance(&self, i: usize, j: usize) -> f64 {
        self.conductance[i * self.n + j]
    }

    pub fn connected(&self, i: usize, j: usize) -> bool {
        self.block_of[i] == self.block_of[j]
    }

    /// Two-terminal effective resistance; `+inf` across components.
    pub fn resistance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        if !self.connected(i, j) {
            return f64::INFINITY;
        }
        let b = &self.blocks[self.block_of[i]];
        let (p, q) = (self.local[i], self.local[j]);
        b.green(p, p) + b.green(q, q) - 2.0 * b.green(p, q)
    }

    /// `G_ij^eq = 1 / R_ij`; zero across components.
    pub fn effective_conductance(&self, i: usize, j: usize) -> f64 {
        assert!(i != j, "effective conductance needs distinct terminals");
        if !self.connected(i, j) {
            return 0.0;
        }
        1.0 / self.resistance(i, j)
    }

    pub fn resistance_matrix(&self) -> DistanceMatrix {
        let n = self.n;
        let d = (0..n * n).map(|k| self.resistance(k / n, k % n)).collect();
        DistanceMatrix::new(n, d, DistanceKind::Ohmic)
    }

    /// `C(i) = sum_j G_ij^eq`.
    pub fn closeness(&self) -> CentralityVector {
        let n = self.n;
        let values = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && self.connected(i, j))
                    .map(|j| self.effective_conductance(i, j))
                    .sum()
            })
            .collect();
        CentralityVector {
            values,
            statistic: CentralityKind::OhmicCloseness,
            units: String::new(),
        }
    }

    /// Solves the pair `(a, b)` at unit power. `None` if the terminals are
    /// equal or disconnected.
    pub fn flow(&self, a: usize, b: usize) -> Option<FlowSolution> {
        if a == b || !self.connected(a, b) {
            return None;
        }
        let n = self.n;
        let blk = &self.blocks[self.block_of[a]];
        let g_eq = self.effective_conductance(a, b);
        let current = g_eq.sqrt();
        let (pa, pb) = (self.local[a], self.local[b]);
        let mut potentials = vec![0.0; n];
        for (p, &m) in blk.members.iter().enumerate() {
            potentials[m] = current * (blk.green(p, pa) - blk.green(p, pb));
        }
        let mut currents = Vec::new();
        let mut throughflow = vec![0.0; n];
        for (p, &i) in blk.members.iter().enumerate() {
            for &j in &blk.members[p + 1..] {
                let c = self.conductance(i, j);
                if c > 0.0 {
                    let flow = c * (potentials[i] - potentials[j]);
                    currents.push((i, j, flow));
                    throughflow[i] += 0.5 * flow.abs();
                    throughflow[j] += 0.5 * flow.abs();
                }
            }
        }
        throughflow[a] = current;
        throughflow[b] = current;
        Some(FlowSolution {
            source: a,
            sink: b,
            conductance: g_eq,
            injected_current: current,
            potentials,
            currents,
            throughflow,
        })
    }

    /// `C_P(i) = sum_{a != b} T_i^{ab} / sqrt(G_ab)` at unit power.
    ///
    /// At unit power the injected current is `sqrt(G_ab)`, so each term is the
    /// throughflow at unit current. For a branch `e = (i, j)` the unit-current
    /// flow of pair `(a, b)` is `x_a - x_b` with `x_s = c_e (Z_is - Z_js)`; the
    /// absolute sum over all pairs is a sorted-order identity. Terminals see
    /// half their unit injection through incident branches, so each node gains
    /// a flat `(k - 1)` correction for the `2 (k - 1)` ordered pairs in which it
    /// is a terminal.
    pub fn fixed_power_betweenness(&self) -> CentralityVector {
        let mut values = vec![0.0; self.n];
        for blk in &self.blocks {
            let k = blk.members.len();
            if k < 2 {
                continue;
            }
            let branches: Vec<(usize, usize, f64)> = (0..k)
                .flat_map(|p| ((p + 1)..k).map(move |q| (p, q)))
                .map(|(p, q)| (p, q, self.conductance(blk.members[p], blk.members[q])))
                .filter(|b| b.2 > 0.0)
                .collect();
            let sums: Vec<f64> = branches
                .par_iter()
                .map(|&(p, q, c)| {
                    let mut x: Vec<f64> = (0..k).map(|s| c * (blk.green(p, s) - blk.green(q, s))).collect();
                    x.sort_by(f64::total_cmp);
                    let unordered: f64 = x
                        .iter()
                        .enumerate()
                        .map(|(r, v)| v * (2.0 * r as f64 + 1.0 - k as f64))
                        .sum();
                    2.0 * unordered
                })
                .collect();
            for (&(p, q, _), s) in branches.iter().zip(sums) {
                values[blk.members[p]] += 0.5 * s;
                values[blk.members[q]] += 0.5 * s;
            }
            for &m in &blk.members {
                values[m] += (k - 1) as f64;
            }
        }
        CentralityVector {
            values,
            statistic: CentralityKind::FixedPowerBetweenness,
            units: String::new(),
        }
    }
}

fn grounded_inverse(conductance: &[f64], n: usize, members: Vec<usize>) -> Result<Block> {
    let k = members.len();
    if k == 1 {
        return Ok(Block { members, green: vec![0.0] });
    }
    let r = k - 1;
    let mut lap = DMatrix::<f64>::zeros(r, r);
    for p in 0..r {
        let i = members[p];
        let degree: f64 = members.iter().map(|&j| conductance[i * n + j]).sum();
        lap[(p, p)] = degree;
        for q in 0..r {
            if q != p {
                lap[(p, q)] = -conductance[i * n + members[q]];
            }
        }
    }
    let max_diag = (0..r).map(|p| lap[(p, p)]).fold(0.0, f64::max);
    let chol = lap.cholesky().ok_or(Error::SingularLaplacian { size: k })?;
    let l = chol.l_dirty();
    if (0..r).any(|p| l[(p, p)] * l[(p, p)] < PIVOT_TOLERANCE * max_diag) {
        return Err(Error::SingularLaplacian { size: k });
    }
    let inv = chol.inverse();
    let mut green = vec![0.0; k * k];
    for p in 0..r {
        for q in 0..r {
            green[p * k + q] = inv[(p, q)];
        }
    }
    Ok(Block { members, green })
}

/// `G_ij^eq` of a graph; builds the full system, so prefer [`OhmicSystem`]
/// for repeated queries.
pub fn effective_conductance(g: &ValuedGraph, i: usize, j: usize) -> Result<f64> {
    Ok(OhmicSystem::new(g)?.effective_conductance(i, j))
}

pub fn ohmic_closeness(g: &ValuedGraph) -> Result<CentralityVector> {
    Ok(OhmicSystem::new(g)?.closeness())
}

pub fn fixed_power_betweenness(g: &ValuedGraph) -> Result<CentralityVector> {
    Ok(OhmicSystem::new(g)?.fixed_power_betweenness())
}
