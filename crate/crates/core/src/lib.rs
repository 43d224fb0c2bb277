//! Measuring what is lost when valued network ties are dichotomized.
//!
//! The crate generates valued graphs from GLM edge families ([`netgen`]),
//! cuts them at threshold ladders ([`dichotomizer`]), compares binary graphs
//! with their valued parents through geodesic and Ohmic statistics
//! ([`metrics`], [`sweep`]) and through lagged linear-model efficiency
//! ([`lagmodel`]), and searches binary graphs directly by simulated annealing
//! ([`annealer`]). [`datio`] reads real data and writes result tables.

pub mod annealer;
pub mod components;
pub mod datio;
pub mod dichotomizer;
pub mod error;
pub mod graph;
pub mod lagmodel;
pub mod metrics;
pub mod netgen;
pub mod rng;
pub mod stats;
pub mod sweep;

pub use dichotomizer::{
    conversion_factor, dichotomize, giant_component_threshold, ladder_for_densities, to_valued_units, StatKind,
    ThresholdLadder, UnitConversion,
};
pub use error::{Error, Result};
pub use graph::{BinaryGraph, ValuedGraph};
pub use netgen::{sample_graph, Family, GenConfig, Geometry, NodeLatents};
