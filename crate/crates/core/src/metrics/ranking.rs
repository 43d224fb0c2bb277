use rand::seq::SliceRandom;

use crate::rng::rng_from_seed;

/// Values within this relative distance are treated as tied, so that
/// summation-order noise does not decide ranks between equivalent nodes.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Ranks `1..=n`, 1 for the most central node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub ranks: Vec<usize>,
    pub tie_seed: u64,
}

fn tied(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Descending ranks; each block of tied values gets a random permutation of
/// its rank range, fixed by `tie_seed`.
pub fn rank(values: &[f64], tie_seed: u64) -> Ranking {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut rng = rng_from_seed(tie_seed);
    let mut ranks = vec![0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && tied(values[order[end - 1]], values[order[end]]) {
            end += 1;
        }
        let mut block: Vec<usize> = (start + 1..=end).collect();
        if block.len() > 1 {
            block.shuffle(&mut rng);
        }
        for (&node, r) in order[start..end].iter().zip(block) {
            ranks[node] = r;
        }
        start = end;
    }
    Ranking { ranks, tie_seed }
}

/// `D_ab = (1/N) sum_i (R_ai - R_bi)^2 / sqrt(R_ai R_bi)`.
///
/// Panics if the rankings cover different node counts.
pub fn rank_discrepancy(a: &Ranking, b: &Ranking) -> f64 {
    assert_eq!(a.ranks.len(), b.ranks.len(), "rankings must cover the same nodes");
    let n = a.ranks.len();
    if n == 0 {
        return 0.0;
    }
    let total: f64 = a
        .ranks
        .iter()
        .zip(&b.ranks)
        .map(|(&ra, &rb)| {
            let (ra, rb) = (ra as f64, rb as f64);
            (ra - rb).powi(2) / (ra * rb).sqrt()
        })
        .sum();
    total / n as f64
}
