//! Valued and binary sociomatrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative-weight sociomatrix with a zero diagonal.
///
/// Undirected graphs store both triangles, kept symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuedGraph {
    n: usize,
    weights: Vec<f64>,
    directed: bool,
    unit_label: String,
}

impl ValuedGraph {
    /// All-zero graph on `n` nodes.
    pub fn empty(n: usize, directed: bool, unit_label: impl Into<String>) -> Self {
        Self {
            n,
            weights: vec![0.0; n * n],
            directed,
            unit_label: unit_label.into(),
        }
    }

    /// Builds a graph from a row-major `n * n` matrix, checking the invariants.
    pub fn from_matrix(
        n: usize,
        weights: Vec<f64>,
        directed: bool,
        unit_label: impl Into<String>,
    ) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::InvalidGraph(format!(
                "expected {} entries for {n} nodes, got {}",
                n * n,
                weights.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidGraph(format!("weight ({i},{j}) = {w} is not a finite nonnegative value")));
                }
                if i == j && w != 0.0 {
                    return Err(Error::InvalidGraph(format!("diagonal entry ({i},{i}) = {w} is nonzero")));
                }
                if !directed && w != weights[j * n + i] {
                    return Err(Error::InvalidGraph(format!("undirected graph is asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self {
            n,
            weights,
            directed,
            unit_label: unit_label.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn unit_label(&self) -> &str {
        &self.unit_label
    }

    pub fn set_unit_label(&mut self, label: impl Into<String>) {
        self.unit_label = label.into();
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sets `w_ij` (and `w_ji` when undirected).
    ///
    /// Panics on a diagonal entry or a negative/non-finite weight.
    pub fn set_weight(&mut self, i: usize, j: usize, w: f64) {
        assert!(i != j, "diagonal entries are fixed at zero");
        assert!(w.is_finite() && w >= 0.0, "weights must be finite and nonnegative");
        self.weights[i * self.n + j] = w;
        if !self.directed {
            self.weights[j * self.n + i] = w;
        }
    }

    /// Iterates over the dyads once each: ordered pairs when directed,
    /// `i < j` pairs when undirected.
    pub fn dyads(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        let directed = self.directed;
        (0..n).flat_map(move |i| {
            let start = if directed { 0 } else { i + 1 };
            (start..n).filter(move |&j| j != i).map(move |j| (i, j))
        })
    }

    /// Number of dyads (ordered pairs if directed, unordered otherwise).
    pub fn dyad_count(&self) -> usize {
        if self.directed {
            self.n * self.n.saturating_sub(1)
        } else {
            self.n * self.n.saturating_sub(1) / 2
        }
    }

    /// Largest attainable edges-per-node density.
    pub fn max_density(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.dyad_count() as f64 / self.n as f64
        }
    }

    /// All off-diagonal entries, row-major.
    pub fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n;
        self.weights
            .iter()
            .enumerate()
            .filter(move |(k, _)| k / n != k % n)
            .map(|(_, &w)| w)
    }

    /// Count of dyads with strictly positive weight.
    pub fn positive_dyads(&self) -> usize {
        self.dyads().filter(|&(i, j)| self.weight(i, j) > 0.0).count()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Column sums, `sum_i w_ij`.
    pub fn indegree(&self) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|j| (0..n).map(|i| self.weight(i, j)).sum()).collect()
    }

    /// Multiplies every weight by `k > 0`.
    pub fn scaled(&self, k: f64) -> Self {
        assert!(k > 0.0 && k.is_finite());
        let mut g = self.clone();
        g.weights.iter_mut().for_each(|w| *w *= k);
        g
    }

    /// Undirected graph with `min(w_ij, w_ji)` on each pair.
    pub fn mutual(&self) -> Self {
        let n = self.n;
        let mut g = Self::empty(n, false, self.unit_label.clone());
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weight(i, j).min(self.weight(j, i));
                g.weights[i * n + j] = w;
                g.weights[j * n + i] = w;
            }
        }
        g
    }

    /// Undirected graph with `(w_ij + w_ji) / 2` on each pair.
    pub fn symmetrized(&self) -> Self {
        if !self.directed {
            return self.clone();
        }
        let n = self.n;
        let mut g = Self::empty(n, false, self.unit_label.clone());
        for i in 0..n {
            for j in (i + 1)..n {
                let w = 0.5 * (self.weight(i, j) + self.weight(j, i));
                g.weights[i * n + j] = w;
                g.weights[j * n + i] = w;
            }
        }
        g
    }
}

/// The 0/1 image of a valued graph under some dichotomization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGraph {
    n: usize,
    adjacency: Vec<bool>,
    directed: bool,
    source_threshold: Option<OrderedThreshold>,
}

/// Bit-exact threshold wrapper so `BinaryGraph` can derive `Eq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct OrderedThreshold(u64);

impl BinaryGraph {
    pub fn empty(n: usize, directed: bool) -> Self {
        Self {
            n,
            adjacency: vec![false; n * n],
            directed,
            source_threshold: None,
        }
    }

    pub(crate) fn from_parts(n: usize, adjacency: Vec<bool>, directed: bool, threshold: Option<f64>) -> Self {
        debug_assert_eq!(adjacency.len(), n * n);
        debug_assert!((0..n).all(|i| !adjacency[i * n + i]));
        Self {
            n,
            adjacency,
            directed,
            source_threshold: threshold.map(|t| OrderedThreshold(t.to_bits())),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// The threshold that produced this graph, if it came from `dichotomize`.
    pub fn source_threshold(&self) -> Option<f64> {
        self.source_threshold.map(|t| f64::from_bits(t.0))
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    /// Toggles the dyad `(i, j)`, keeping undirected graphs symmetric.
    pub fn flip(&mut self, i: usize, j: usize) {
        assert!(i != j);
        let v = !self.adjacency[i * self.n + j];
        self.adjacency[i * self.n + j] = v;
        if !self.directed {
            self.adjacency[j * self.n + i] = v;
        }
        self.source_threshold = None;
    }

    /// Edges counted once per dyad.
    pub fn edge_count(&self) -> usize {
        let ones = self.adjacency.iter().filter(|&&b| b).count();
        if self.directed {
            ones
        } else {
            ones / 2
        }
    }

    pub fn edges_per_node(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.edge_count() as f64 / self.n as f64
        }
    }

    /// Edge list, one entry per dyad (`i < j` when undirected).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            let start = if self.directed { 0 } else { i + 1 };
            for j in start..n {
                if self.adjacency[i * n + j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Unit-weight valued view, so every metric applies unchanged.
    pub fn to_valued(&self) -> ValuedGraph {
        ValuedGraph {
            n: self.n,
            weights: self.adjacency.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
            directed: self.directed,
            unit_label: "Phil".to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_matrix_rejects_bad_input() {
        assert!(ValuedGraph::from_matrix(2, vec![0.0, 1.0, 1.0], false, "u").is_err());
        assert!(ValuedGraph::from_matrix(2, vec![0.0, -1.0, -1.0, 0.0], false, "u").is_err());
        assert!(ValuedGraph::from_matrix(2, vec![1.0, 1.0, 1.0, 0.0], false, "u").is_err());
        assert!(ValuedGraph::from_matrix(2, vec![0.0, 1.0, 2.0, 0.0], false, "u").is_err());
        assert!(ValuedGraph::from_matrix(2, vec![0.0, 1.0, 2.0, 0.0], true, "u").is_ok());
    }

    #[test]
    fn dyads_counts() {
        let g = ValuedGraph::empty(4, false, "u");
        assert_eq!(g.dyads().count(), 6);
        let g = ValuedGraph::empty(4, true, "u");
        assert_eq!(g.dyads().count(), 12);
        assert_eq!(g.max_density(), 3.0);
    }

    #[test]
    fn mutual_and_symmetrized() {
        let g = ValuedGraph::from_matrix(2, vec![0.0, 1.0, 3.0, 0.0], true, "u").unwrap();
        assert_eq!(g.mutual().weight(0, 1), 1.0);
        assert_eq!(g.symmetrized().weight(1, 0), 2.0);
    }

    #[test]
    fn flip_keeps_symmetry() {
        let mut b = BinaryGraph::empty(3, false);
        b.flip(0, 2);
        assert!(b.has_edge(2, 0));
        assert_eq!(b.edge_count(), 1);
        assert_eq!(b.edges(), vec![(0, 2)]);
    }
}
