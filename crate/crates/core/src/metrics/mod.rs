//! Geodesic and Ohmic node statistics, diameters and rank comparison.

mod geodesic;
mod ohmic;
mod ranking;

pub use geodesic::{geodesic_distances, harmonic_closeness};
pub use ohmic::{effective_conductance, fixed_power_betweenness, ohmic_closeness, FlowSolution, OhmicSystem};
pub use ranking::{rank, rank_discrepancy, Ranking, TIE_TOLERANCE};

use crate::error::{Error, Result};
use crate::graph::ValuedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    Geodesic,
    Ohmic,
}

/// Pairwise distances, `+inf` for unreachable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
    kind: DistanceKind,
}

impl DistanceMatrix {
    pub(crate) fn new(n: usize, d: Vec<f64>, kind: DistanceKind) -> Self {
        debug_assert_eq!(d.len(), n * n);
        Self { n, d, kind }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Largest finite off-diagonal distance, if any pair is connected.
    pub fn max_finite(&self) -> Option<f64> {
        let n = self.n;
        self.d
            .iter()
            .enumerate()
            .filter(|(k, v)| k / n != k % n && v.is_finite())
            .map(|(_, &v)| v)
            .reduce(f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralityKind {
    HarmonicGeodesic,
    OhmicCloseness,
    FixedPowerBetweenness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    pub statistic: CentralityKind,
    pub units: String,
}

/// Both diameter readings: the largest distance, and the smallest nonzero
/// connectivity (its reciprocal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diameters {
    pub geodesic_diameter: f64,
    pub ohmic_diameter: f64,
    pub inverse_geodesic_diameter: f64,
    pub inverse_ohmic_diameter: f64,
}

pub fn diameters_from(geo: &DistanceMatrix, ohm: &DistanceMatrix) -> Result<Diameters> {
    let g = geo.max_finite().ok_or(Error::UndefinedDiameter)?;
    let o = ohm.max_finite().ok_or(Error::UndefinedDiameter)?;
    if g <= 0.0 || o <= 0.0 {
        return Err(Error::UndefinedDiameter);
    }
    Ok(Diameters {
        geodesic_diameter: g,
        ohmic_diameter: o,
        inverse_geodesic_diameter: 1.0 / g,
        inverse_ohmic_diameter: 1.0 / o,
    })
}

pub fn diameters(g: &ValuedGraph) -> Result<Diameters> {
    let geo = geodesic_distances(g);
    let ohm = OhmicSystem::new(g)?.resistance_matrix();
    diameters_from(&geo, &ohm)
}
