use rayon::prelude::*;

use super::{CentralityKind, CentralityVector, DistanceKind, DistanceMatrix};
use crate::graph::ValuedGraph;

/// Dense Dijkstra from one source with arc length `1 / w`.
fn single_source(g: &ValuedGraph, src: usize) -> Vec<f64> {
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        for v in 0..n {
            let w = g.weight(u, v);
            if done[v] || w <= 0.0 {
                continue;
            }
            let len = 1.0 / w;
            if !len.is_finite() {
                continue;
            }
            let alt = best + len;
            if alt < dist[v] {
                dist[v] = alt;
            }
        }
    }
    dist
}

/// All-pairs shortest paths where a tie of strength `w` has length `1 / w`.
pub fn geodesic_distances(g: &ValuedGraph) -> DistanceMatrix {
    let n = g.n();
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| single_source(g, s)).collect();
    DistanceMatrix::new(n, rows.concat(), DistanceKind::Geodesic)
}

/// `C(i) = sum_{j != i} (1/d(i,j) + 1/d(j,i))`, unreachable pairs adding 0.
pub fn harmonic_closeness(d: &DistanceMatrix) -> CentralityVector {
    assert_eq!(d.kind(), DistanceKind::Geodesic, "harmonic closeness needs geodesic distances");
    let n = d.n();
    let values = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / d.get(i, j) + 1.0 / d.get(j, i))
                .sum()
        })
        .collect();
    CentralityVector {
        values,
        statistic: CentralityKind::HarmonicGeodesic,
        units: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tests::{path, ring};
    use crate::rng::rng_from_seed;
    use rand::Rng;

    #[test]
    fn single_edge() {
        let mut g = ValuedGraph::empty(2, false, "u");
        g.set_weight(0, 1, 2.0);
        let d = geodesic_distances(&g);
        assert_eq!(d.get(0, 1), 0.5);
        assert_eq!(d.get(1, 0), 0.5);
    }

    #[test]
    fn binary_path() {
        let d = geodesic_distances(&path(3));
        assert_eq!(d.get(0, 2), 2.0);
    }

    #[test]
    fn directed_unreachable() {
        let mut g = ValuedGraph::empty(3, true, "u");
        g.set_weight(0, 1, 1.0);
        g.set_weight(1, 2, 1.0);
        let d = geodesic_distances(&g);
        assert_eq!(d.get(0, 2), 2.0);
        assert!(d.get(2, 0).is_infinite());
    }

    #[test]
    fn harmonic_examples() {
        let c = harmonic_closeness(&geodesic_distances(&ValuedGraph::empty(4, false, "u")));
        assert!(c.values.iter().all(|&v| v == 0.0));

        let c = harmonic_closeness(&geodesic_distances(&ring(3)));
        assert!(c.values.iter().all(|&v| v == 4.0));

        // triangle plus an isolated fourth node
        let mut g = ValuedGraph::empty(4, false, "u");
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            g.set_weight(a, b, 1.0);
        }
        let c = harmonic_closeness(&geodesic_distances(&g));
        assert_eq!(c.values[3], 0.0);
    }

    /// Shortest simple path by exhaustive DFS.
    fn brute_force(g: &ValuedGraph, s: usize, t: usize) -> f64 {
        fn go(g: &ValuedGraph, u: usize, t: usize, seen: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if u == t {
                *best = best.min(acc);
                return;
            }
            for v in 0..g.n() {
                let w = g.weight(u, v);
                if !seen[v] && w > 0.0 {
                    seen[v] = true;
                    go(g, v, t, seen, acc + 1.0 / w, best);
                    seen[v] = false;
                }
            }
        }
        let mut seen = vec![false; g.n()];
        seen[s] = true;
        let mut best = f64::INFINITY;
        go(g, s, t, &mut seen, 0.0, &mut best);
        best
    }

    #[test]
    fn matches_path_enumeration() {
        let mut rng = rng_from_seed(17);
        for trial in 0..40 {
            let directed = trial % 2 == 0;
            let mut g = ValuedGraph::empty(5, directed, "u");
            let dyads: Vec<_> = g.dyads().collect();
            for (i, j) in dyads {
                if rng.random_bool(0.5) {
                    g.set_weight(i, j, rng.random_range(0.1..5.0));
                }
            }
            let d = geodesic_distances(&g);
            for s in 0..5 {
                for t in 0..5 {
                    if s == t {
                        continue;
                    }
                    let b = brute_force(&g, s, t);
                    let got = d.get(s, t);
                    assert!(
                        (b.is_infinite() && got.is_infinite()) || (b - got).abs() <= 1e-12 * b,
                        "trial {trial} ({s},{t}): {got} vs {b}"
                    );
                }
            }
        }
    }
}
