use dichot_core::lagmodel::{
    batch_study, fit_ols, simulate_outcomes, threshold_efficiency, Criterion, LagConfig, LagPrior, StudyConfig,
    StudyRow,
};
use dichot_core::rng::derive_seed;
use dichot_core::sweep::LadderSpec;
use dichot_core::{ladder_for_densities, sample_graph, GenConfig};

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

fn optima<'a>(rows: &'a [StudyRow], gen_index: usize, c: Criterion) -> impl Iterator<Item = &'a StudyRow> {
    rows.iter().filter(move |r| r.gen_index == gen_index && r.criterion == c)
}

#[test]
fn valued_fits_explain_more_on_average() {
    let g = sample_graph(&GenConfig { n: 60, sigma_alpha: 1.0, seed: 8, ..GenConfig::default() });
    let ladder = ladder_for_densities(&g, &[0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
    let cfg = LagConfig { beta: 0.15, seed: 77, ..LagConfig::default() };
    let rep = threshold_efficiency(&g, &cfg, &ladder, 300).unwrap();
    let mut compared = 0;
    for row in rep.thresholds.iter().filter(|r| r.complete()) {
        compared += 1;
        assert!(
            rep.valued.r_squared >= row.r_squared,
            "rung {:?}: valued {} < binary {}",
            row.ladder_index,
            rep.valued.r_squared,
            row.r_squared
        );
    }
    assert!(compared >= 5);
}

#[test]
fn pure_noise_coefficients_stay_within_three_standard_errors() {
    let g = sample_graph(&GenConfig { n: 50, sigma_alpha: 1.0, seed: 3, ..GenConfig::default() });
    let sims = 2000;
    let mut inside = [0usize; 3];
    for k in 0..sims {
        let cfg = LagConfig { gamma_ar: 0.0, beta: 0.0, intercept: 0.0, seed: derive_seed(91, k), ..LagConfig::default() };
        let fit = fit_ols(&simulate_outcomes(&g, &cfg).unwrap()).unwrap();
        for c in 0..3 {
            if (fit.estimates[c] / fit.std_errors[c]).abs() <= 3.0 {
                inside[c] += 1;
            }
        }
    }
    for c in 0..3 {
        let share = inside[c] as f64 / sims as f64;
        // Nominal 0.9957 for t with 47 degrees of freedom; sampling SD is about 0.0015.
        assert!((0.990..=1.0).contains(&share), "coefficient {c}: {share}");
    }
}

#[test]
fn optimal_edges_per_node_grow_with_size_at_flat_density() {
    let sizes = [50usize, 100, 200];
    let cfg = StudyConfig {
        gen_grid: sizes.iter().map(|&n| GenConfig { n, sigma_alpha: 1.0, ..GenConfig::default() }).collect(),
        lag_grid: vec![LagPrior { beta_range: (0.05, 0.2), ..LagPrior::default() }],
        replicates: 8,
        ladder: LadderSpec::LogDensities { count: 20, lowest: 0.25 },
        sims: 20,
        master_seed: 5150,
    };
    let rows = batch_study(&cfg).unwrap();
    let mut epn = Vec::new();
    let mut dens = Vec::new();
    for gi in 0..sizes.len() {
        let picked: Vec<&StudyRow> = optima(&rows, gi, Criterion::MinBetaMse).collect();
        epn.push(median(picked.iter().filter_map(|r| r.edges_per_node).collect()));
        dens.push(median(picked.iter().filter_map(|r| r.density).collect()));
    }
    assert!(epn[0] < epn[1] && epn[1] < epn[2], "edges per node {epn:?}");
    let (lo, hi) = dens.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    // A fixed edges-per-node optimum would quarter the density over this range.
    assert!(hi / lo < 2.0, "densities {dens:?}");
}

#[test]
fn heterogeneity_raises_the_best_mse_ratio() {
    let cfg = StudyConfig {
        gen_grid: [0.1, 2.5]
            .iter()
            .map(|&s| GenConfig { n: 60, sigma_alpha: s, ..GenConfig::default() })
            .collect(),
        lag_grid: vec![LagPrior::default()],
        replicates: 10,
        ladder: LadderSpec::LogDensities { count: 20, lowest: 0.25 },
        sims: 20,
        master_seed: 99,
    };
    let rows = batch_study(&cfg).unwrap();
    let ratio = |gi| median(optima(&rows, gi, Criterion::MinBetaMse).filter_map(|r| r.beta_mse_ratio).collect());
    let (mild, strong) = (ratio(0), ratio(1));
    assert!(strong > mild, "median best ratio {mild} at low heterogeneity, {strong} at high");
}

#[test]
fn one_cell_study_matches_a_direct_report() {
    let gen = GenConfig { n: 30, ..GenConfig::default() };
    let cfg = StudyConfig {
        gen_grid: vec![gen.clone()],
        lag_grid: vec![LagPrior::default()],
        replicates: 1,
        ladder: LadderSpec::Densities(vec![1.0, 2.0, 4.0]),
        sims: 3,
        master_seed: 1,
    };
    let rows = batch_study(&cfg).unwrap();
    assert_eq!(rows.len(), Criterion::ALL.len());

    let seed = derive_seed(derive_seed(derive_seed(1, 0), 0), 0);
    let g = sample_graph(&GenConfig { seed: derive_seed(seed, 0), ..gen });
    let lag = LagPrior::default().draw(derive_seed(seed, 1));
    let ladder = ladder_for_densities(&g, &[1.0, 2.0, 4.0]).unwrap();
    let rep = threshold_efficiency(&g, &lag, &ladder, 3).unwrap();
    for row in &rows {
        let opt = rep.optimum(row.criterion);
        assert_eq!(row.ladder_index, opt.map(|o| o.ladder_index));
        assert_eq!(row.beta, lag.beta);
    }
}
