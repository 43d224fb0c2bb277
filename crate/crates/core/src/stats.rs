//! Small summary statistics and nonparametric tests for simulation studies.

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::factorial::ln_binomial;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of nothing");
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Ranks with ties sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    pearson(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankCorrelation {
    pub rho: f64,
    /// One-sided p-value against `rho <= 0`.
    pub p_increasing: f64,
}

/// Spearman's rho with a t-approximation p-value for a positive trend.
pub fn spearman(x: &[f64], y: &[f64]) -> RankCorrelation {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    assert!(n >= 3, "need at least three points");
    let rho = pearson(&average_ranks(x), &average_ranks(y));
    let df = (n - 2) as f64;
    let p_increasing = if rho >= 1.0 {
        0.0
    } else if rho.is_nan() {
        1.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        1.0 - StudentsT::new(0.0, 1.0, df).expect("df > 0").cdf(t)
    };
    RankCorrelation { rho, p_increasing }
}

/// `P(X >= k)` for `X ~ Binomial(m, 1/2)`: the one-sided sign-test p-value
/// for `k` successes in `m` nonzero trials.
pub fn sign_test_upper(k: usize, m: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let ln_half = -(m as f64) * std::f64::consts::LN_2;
    (k..=m as u64 as usize)
        .map(|j| (ln_binomial(m as u64, j as u64) + ln_half).exp())
        .sum::<f64>()
        .min(1.0)
}

/// Two-sided Student-t critical value at confidence `level`.
pub fn t_critical(level: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("df > 0")
        .inverse_cdf(0.5 + level / 2.0)
}
