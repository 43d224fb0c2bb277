use std::path::Path;

use anyhow::{bail, Context, Result};
use dichot_core::annealer::{anneal_chains, AnnealConfig, Energy};
use dichot_core::datio::{self, fmt_num, Table};
use dichot_core::dichotomizer::{dichotomize, ladder_for_densities, ThresholdLadder};
use dichot_core::lagmodel::{batch_study, t_summary, threshold_efficiency, LagConfig, StudyConfig, LagPrior};
use dichot_core::netgen::{sample_graph, GenConfig};
use dichot_core::rng::derive_seed;
use dichot_core::sweep::{
    export_layers, optimal_threshold, run_sweep, sweep_graph, LadderSpec, Statistic, SweepConfig, SweepResult,
};
use dichot_core::ValuedGraph;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::manifest::Run;
use crate::{Cli, Command, InputArgs, InputFormat};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LmSweepConfig {
    gen: GenConfig,
    lag: LagConfig,
    ladder: LadderSpec,
    sims: usize,
}

impl Default for LmSweepConfig {
    fn default() -> Self {
        Self {
            gen: GenConfig { n: 100, sigma_alpha: 2.5, ..GenConfig::default() },
            lag: LagConfig::default(),
            ladder: LadderSpec::default(),
            sims: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct AnnealFile {
    gen: GenConfig,
    anneal: AnnealConfig,
    ladder: LadderSpec,
    chains: usize,
}

impl Default for AnnealFile {
    fn default() -> Self {
        Self {
            gen: GenConfig { n: 30, ..GenConfig::default() },
            anneal: AnnealConfig::default(),
            ladder: LadderSpec::default(),
            chains: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct AnalyzeConfig {
    ladder: LadderSpec,
    statistics: Vec<Statistic>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            ladder: LadderSpec::default(),
            statistics: Statistic::DEFAULT.to_vec(),
        }
    }
}

fn default_study() -> StudyConfig {
    StudyConfig {
        gen_grid: [0.1, 2.5, 10.0]
            .into_iter()
            .map(|s| GenConfig { n: 100, sigma_alpha: s, ..GenConfig::default() })
            .collect(),
        lag_grid: vec![LagPrior::default()],
        replicates: 2,
        ladder: LadderSpec::default(),
        sims: 1,
        master_seed: 0,
    }
}

/// Config from `--config`, or the default when absent. The config file is
/// recorded as an input.
fn load_config<T: DeserializeOwned>(cli: &Cli, run: &mut Run, default: T) -> Result<T> {
    match &cli.config {
        None => Ok(default),
        Some(path) => {
            run.input(path)?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
    }
}

fn load_graph(path: &Path, args: &InputArgs, run: &mut Run) -> Result<ValuedGraph> {
    run.input(path)?;
    let g = match args.format {
        InputFormat::Edgelist => datio::load_edgelist(path, !args.undirected, &args.unit)?,
        InputFormat::Correlation => datio::load_correlation_matrix(path, args.absolute)?,
        InputFormat::Rank => datio::load_rank_matrix(path)?,
    };
    Ok(if args.mutual { g.mutual() } else { g })
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Prepends a constant `dataset` column.
fn with_dataset(name: &str, t: Table, into: &mut Option<Table>) {
    let out = into.get_or_insert_with(|| Table::new(std::iter::once("dataset".to_string()).chain(t.header.clone())));
    for r in t.rows {
        out.push(std::iter::once(name.to_string()).chain(r).collect());
    }
}

fn optima_entries(label: &str, r: &SweepResult) -> Vec<(String, Statistic, Option<dichot_core::sweep::Optimum>)> {
    r.statistics
        .iter()
        .map(|&s| (label.to_string(), s, optimal_threshold(r, s).ok()))
        .collect()
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => {
            let mut run = Run::new(&cli.out, "generate", 0)?;
            let mut cfg = load_config(cli, &mut run, GenConfig::default())?;
            if let Some(n) = a.nodes {
                cfg.n = n;
            }
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.validate()?;
            run.seed(cfg.seed);
            run.config(&cfg)?;
            let g = sample_graph(&cfg);
            let mut buf = Vec::new();
            datio::write_edgelist(&g, &mut buf)?;
            run.write("graph.tsv", &buf)?;
            run.finish()
        }
        Command::Sweep(a) => {
            let mut run = Run::new(&cli.out, "sweep", 0)?;
            let mut cfg: SweepConfig = load_config(cli, &mut run, SweepConfig::default())?;
            if let Some(r) = a.replicates {
                cfg.replicates = r;
            }
            cfg.master_seed = cli.seed.unwrap_or(cfg.master_seed);
            run.seed(cfg.master_seed);
            run.config(&cfg)?;
            let r = run_sweep(&cfg)?;
            run.table("sweep.tsv", &datio::sweep_table(&r))?;
            run.table("conversions.tsv", &datio::conversion_table(&r))?;
            run.table("optima.tsv", &datio::optima_table(&optima_entries("simulated", &r)))?;
            run.finish()
        }
        Command::LmSweep(a) => {
            let mut run = Run::new(&cli.out, "lm-sweep", 0)?;
            let mut cfg: LmSweepConfig = load_config(cli, &mut run, LmSweepConfig::default())?;
            if let Some(s) = cli.seed {
                cfg.gen.seed = config_seed(s, 0);
                cfg.lag.seed = config_seed(s, 1);
            }
            if let Some(s) = a.sims {
                cfg.sims = s;
            }
            let seed = cli.seed.unwrap_or(cfg.lag.seed);
            run.seed(seed);
            let g = match &a.input {
                Some(p) => load_graph(p, &a.format, &mut run)?,
                None => {
                    cfg.gen.validate()?;
                    sample_graph(&cfg.gen)
                }
            };
            run.config(&cfg)?;
            let ladder = resolve_ladder(&g, &cfg.ladder)?;
            let rep = threshold_efficiency(&g, &cfg.lag, &ladder, cfg.sims)?;
            run.table("efficiency.tsv", &datio::efficiency_table(&rep))?;
            run.finish()
        }
        Command::Batch => {
            let mut run = Run::new(&cli.out, "batch", 0)?;
            let mut cfg: StudyConfig = load_config(cli, &mut run, default_study())?;
            cfg.master_seed = cli.seed.unwrap_or(cfg.master_seed);
            run.seed(cfg.master_seed);
            run.config(&cfg)?;
            let rows = batch_study(&cfg)?;
            run.table("study.tsv", &datio::study_table(&rows))?;
            run.finish()
        }
        Command::Anneal(a) => {
            let mut run = Run::new(&cli.out, "anneal", 0)?;
            let mut cfg: AnnealFile = load_config(cli, &mut run, AnnealFile::default())?;
            if let Some(s) = cli.seed {
                cfg.gen.seed = config_seed(s, 0);
                cfg.anneal.seed = config_seed(s, 1);
            }
            let seed = cli.seed.unwrap_or(cfg.anneal.seed);
            run.seed(seed);
            let g = match &a.input {
                Some(p) => load_graph(p, &a.format, &mut run)?,
                None => {
                    cfg.gen.validate()?;
                    sample_graph(&cfg.gen)
                }
            };
            run.config(&cfg)?;
            let ladder = resolve_ladder(&g, &cfg.ladder)?;
            let energy = Energy::new(&g, cfg.anneal.energy, cfg.anneal.tie_seed)?;
            // best rung as the starting state; ties go to the sparser graph
            let (mut init_tau, mut init_e) = (ladder.thresholds()[0], f64::INFINITY);
            for &tau in ladder.thresholds() {
                let e = energy.eval(&dichotomize(&g, tau));
                if e <= init_e {
                    (init_tau, init_e) = (tau, e);
                }
            }
            let init = dichotomize(&g, init_tau);
            let res = anneal_chains(&g, &init, &cfg.anneal, cfg.chains)?;
            run.table("trace.tsv", &datio::trace_table(&res.trace))?;
            let mut buf = Vec::new();
            datio::write_edgelist(&res.best.to_valued(), &mut buf)?;
            run.write("best_graph.tsv", &buf)?;
            let mut summary = Table::new(["ladder_threshold", "ladder_energy", "best_energy", "edges_per_node", "accepted"]);
            summary.push(vec![
                fmt_num(init_tau),
                fmt_num(init_e),
                fmt_num(res.best_energy),
                fmt_num(res.best.edges_per_node()),
                res.accepted.to_string(),
            ]);
            run.table("summary.tsv", &summary)?;
            run.finish()
        }
        Command::Analyze(a) => {
            let seed = cli.seed.unwrap_or(0);
            let mut run = Run::new(&cli.out, "analyze", seed)?;
            let cfg: AnalyzeConfig = load_config(cli, &mut run, AnalyzeConfig::default())?;
            cfg.ladder.validate()?;
            if cfg.statistics.is_empty() {
                bail!("no statistics requested");
            }
            run.config(&cfg)?;
            let (mut sweep, mut conv) = (None, None);
            let mut optima = Vec::new();
            for (k, path) in a.inputs.iter().enumerate() {
                let name = dataset_name(path);
                let g = load_graph(path, &a.format, &mut run)?;
                let (cells, convs) = sweep_graph(&g, &cfg.ladder, &cfg.statistics, 0, derive_seed(seed, k as u64))
                    .with_context(|| format!("sweeping {}", path.display()))?;
                let r = SweepResult {
                    statistics: cfg.statistics.clone(),
                    replicates: 1,
                    ladder_len: cfg.ladder.len(),
                    cells,
                    conversions: convs,
                };
                optima.extend(optima_entries(&name, &r));
                with_dataset(&name, datio::sweep_table(&r), &mut sweep);
                with_dataset(&name, datio::conversion_table(&r), &mut conv);
            }
            run.table("sweep.tsv", &sweep.expect("at least one input"))?;
            run.table("conversions.tsv", &conv.expect("at least one input"))?;
            run.table("optima.tsv", &datio::optima_table(&optima))?;
            run.finish()
        }
        Command::Layers(a) => {
            let mut run = Run::new(&cli.out, "layers", 0)?;
            let g = load_graph(&a.input, &a.format, &mut run)?;
            let ladder = if !a.thresholds.is_empty() {
                let mut t = a.thresholds.clone();
                t.sort_by(f64::total_cmp);
                t.dedup();
                ThresholdLadder::new(t)?
            } else if !a.densities.is_empty() {
                ladder_for_densities(&g, &a.densities)?
            } else {
                bail!("give --thresholds or --densities");
            };
            run.config(&LayersRecord {
                thresholds: ladder.thresholds().to_vec(),
            })?;
            run.table("layers.tsv", &datio::layers_table(&export_layers(&g, &ladder)))?;
            run.finish()
        }
        Command::Tsummary(a) => {
            let mut run = Run::new(&cli.out, "tsummary", 0)?;
            run.input(&a.input)?;
            let t = Table::read_tsv(&a.input)?;
            let col = t
                .numeric_column(&a.column)
                .with_context(|| format!("no column `{}` in {}", a.column, a.input.display()))?;
            let keep: Vec<bool> = match t.column_index("criterion") {
                Some(k) => t.rows.iter().map(|r| r[k] == a.criterion).collect(),
                None => vec![true; t.rows.len()],
            };
            let ts: Vec<f64> = col.into_iter().zip(keep).filter(|(_, k)| *k).filter_map(|(v, _)| v).collect();
            let s = t_summary(&ts, a.df, a.limit, a.width)?;
            run.config(&TsummaryRecord {
                column: a.column.clone(),
                criterion: a.criterion.clone(),
                df: a.df,
                limit: a.limit,
                width: a.width,
            })?;
            run.table("tsummary.tsv", &datio::tsummary_table(&s))?;
            let mut central = Table::new(["df", "total", "central_fraction", "reference"]);
            central.push(vec![fmt_num(s.df), s.total.to_string(), fmt_num(s.central_fraction), fmt_num(0.95)]);
            run.table("central.tsv", &central)?;
            run.finish()
        }
    }
}

#[derive(Serialize)]
struct LayersRecord {
    thresholds: Vec<f64>,
}

#[derive(Serialize)]
struct TsummaryRecord {
    column: String,
    criterion: String,
    df: f64,
    limit: f64,
    width: f64,
}

/// Child seed that fits the signed 64-bit integers of TOML manifests.
fn config_seed(parent: u64, index: u64) -> u64 {
    derive_seed(parent, index) >> 1
}

fn resolve_ladder(g: &ValuedGraph, spec: &LadderSpec) -> Result<ThresholdLadder> {
    spec.validate()?;
    let mut taus: Vec<f64> = spec.resolve(g)?.into_iter().map(|(t, _)| t).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    Ok(ThresholdLadder::new(taus)?)
}
