use std::path::{Path, PathBuf};

use dichot_core::datio::{load_correlation_matrix, load_edgelist, load_rank_matrix, parse_edgelist, write_edgelist};
use dichot_core::{conversion_factor, dichotomize, sample_graph, Error, Family, GenConfig};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn newcomb_weeks_are_complete_rankings() {
    for week in 1..=15 {
        let g = load_rank_matrix(&fixture(&format!("newcomb/week{week:02}.txt"))).unwrap();
        assert_eq!(g.n(), 17);
        assert!(g.is_directed());
        for i in 0..17 {
            let mut row: Vec<f64> = (0..17).filter(|&j| j != i).map(|j| g.weight(i, j) * 16.0).collect();
            row.sort_by(f64::total_cmp);
            assert_eq!(row, (1..=16).map(|k| k as f64).collect::<Vec<_>>(), "week {week} row {i}");
        }
        // Every row holds the same weights, so any interior cut splits the
        // same way and the factor is one half.
        let c = conversion_factor(&g, 0.5 + 1.0 / 32.0).unwrap().factor;
        assert!((c - 0.5).abs() < 1e-12, "week {week}: {c}");
    }
}

#[test]
fn message_counts_load_with_integer_weights() {
    let g = load_edgelist(&fixture("messages_synthetic.tsv"), true, "messages").unwrap();
    assert_eq!(g.n(), 32);
    assert_eq!(g.unit_label(), "messages");
    assert!(g.off_diagonal().all(|w| w.fract() == 0.0));
    let over10 = dichotomize(&g, 11.0).edge_count();
    assert_eq!(over10, g.off_diagonal().filter(|&w| w > 10.0).count());
}

#[test]
fn negative_correlations_are_dropped_unless_absolute() {
    let clamped = load_correlation_matrix(&fixture("correlation_synthetic.txt"), false).unwrap();
    let absolute = load_correlation_matrix(&fixture("correlation_synthetic.txt"), true).unwrap();
    assert!(!clamped.is_directed());
    for (a, b) in clamped.off_diagonal().zip(absolute.off_diagonal()) {
        assert!(a == 0.0 || a == b);
        assert!(b >= a);
    }
}

#[test]
fn failed_loads_return_no_graph() {
    let path = Path::new("bad.tsv");
    let text = "# nodes: 4\n0 1 1.5\n1 2 2\n2 3 -1\n";
    match parse_edgelist(text, path, true, "u") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn written_graphs_reload_exactly(seed in any::<u64>(), directed in any::<bool>(), gamma in any::<bool>()) {
        let family = if gamma { Family::Gamma } else { Family::Poisson };
        let g = sample_graph(&GenConfig { n: 12, sigma_alpha: 1.5, directed, family, seed, ..GenConfig::default() });
        let mut buf = Vec::new();
        write_edgelist(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = parse_edgelist(&text, Path::new("mem"), directed, g.unit_label()).unwrap();
        prop_assert_eq!(back.weights(), g.weights());
        prop_assert_eq!(back.n(), g.n());
    }
}
