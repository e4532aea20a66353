//! Experiment commands. Each loads its datasets, runs the processing stages
//! and writes CSV artifacts plus `summary.json` into the output directory.
//!
//! CSV bytes depend only on the configuration; wall-clock timings go to
//! `summary.json` alone.

mod config;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::classify::{
    cross_validate, folds_csv, model_csv, train, EvalReport, FeatureView, TrainConfig,
};
use crate::clusterer::{
    absolute_threshold, agglomerate_complete, clusters_csv, cut_at, dendrogram_csv,
    manhattan_matrix, ClusterCut, Dendrogram, DistanceMatrix,
};
use crate::footprints::{
    build_matrix, contingency_csv, distinct_footprint_groups, FootprintMatrix,
};
use crate::graphdata::{
    balance_undersample, dataset_stats, load_tudataset, parse_spmf, parse_spmf_with_labels,
    GraphDataset,
};
use crate::measures::{rank_all, scores_csv, MeasureId, Ranking};
use crate::miner::{export_patterns, mine_frequent, PatternSet};
use crate::properties::{
    check_independence_equilibrium, check_ps2_exclusivity, equivalence_blocks, full_report,
    report_csv,
};
use crate::rankcmp::rbo;
use crate::shapley::{gold_standard, shapley_csv, GoldConfig, GoldStandard};
use crate::synthetic::{
    planted_footprints, planted_graph_dataset, random_footprints, PlantedConfig,
};

pub use config::{percent_count, Amount, DatasetFormat, RunConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

impl ExperimentError {
    pub fn is_config(&self) -> bool {
        matches!(self, Self::Config(_))
    }
}

fn at<E: std::error::Error + Send + Sync + 'static>(
    stage: &'static str,
) -> impl FnOnce(E) -> ExperimentError {
    move |e| ExperimentError::Stage {
        stage,
        source: Box::new(e),
    }
}

/// Wall-clock time per stage in milliseconds, in execution order.
#[derive(Debug, Default, Clone, Serialize)]
pub struct Timings(Vec<(String, f64)>);

impl Timings {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0
            .push((stage.to_string(), start.elapsed().as_secs_f64() * 1e3));
        out
    }

    fn to_json(&self) -> serde_json::Value {
        self.0
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect::<serde_json::Map<_, _>>()
            .into()
    }
}

/// A dataset after loading, balancing and mining.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub name: String,
    /// Absent for footprint-only formats.
    pub graphs: Option<GraphDataset>,
    pub patterns: Option<PatternSet>,
    pub matrix: FootprintMatrix,
    /// Planted column ids for planted synthetic formats.
    pub planted: Vec<usize>,
}

/// Names of the datasets a configuration refers to, in order.
pub fn dataset_names(cfg: &RunConfig) -> Vec<String> {
    if cfg.format.is_synthetic() {
        (0..cfg.replicates as u64)
            .map(|i| format!("{:?}-{}", cfg.format, cfg.synthetic_seed + i).to_lowercase())
            .collect()
    } else {
        std::iter::once(&cfg.dataset)
            .chain(&cfg.extra_datasets)
            .cloned()
            .collect()
    }
}

fn load_graphs(
    cfg: &RunConfig,
    index: usize,
    source: &str,
) -> Result<GraphDataset, ExperimentError> {
    match cfg.format {
        DatasetFormat::Tudataset => {
            let path = Path::new(source);
            let name = match (&cfg.dataset_name, index) {
                (Some(n), 0) => n.clone(),
                _ => path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .ok_or_else(|| {
                        ExperimentError::Config(format!(
                            "cannot derive a dataset name from {source:?}"
                        ))
                    })?,
            };
            load_tudataset(path, &name).map_err(at("load"))
        }
        DatasetFormat::Spmf => {
            let text = fs::read_to_string(source).map_err(at("load"))?;
            match (&cfg.labels, index) {
                (Some(l), 0) => {
                    let labels = fs::read_to_string(l).map_err(at("load"))?;
                    parse_spmf_with_labels(&text, &labels).map_err(at("load"))
                }
                _ => parse_spmf(&text).map_err(at("load")),
            }
        }
        DatasetFormat::PlantedGraphs => Ok(planted_graph_dataset(
            cfg.n_half,
            cfg.synthetic_seed + index as u64,
        )),
        DatasetFormat::PlantedFootprints | DatasetFormat::RandomFootprints => {
            unreachable!("footprint formats have no graphs")
        }
    }
}

/// Loads, balances and mines dataset `index` of [`dataset_names`].
pub fn prepare(cfg: &RunConfig, index: usize) -> Result<Prepared, ExperimentError> {
    let names = dataset_names(cfg);
    let name = names
        .get(index)
        .cloned()
        .ok_or_else(|| ExperimentError::Config(format!("no dataset {index}")))?;
    let seed = cfg.synthetic_seed + index as u64;
    match cfg.format {
        DatasetFormat::PlantedFootprints => {
            let p = planted_footprints(&PlantedConfig {
                n_half: cfg.n_half,
                n_planted: cfg.n_planted,
                n_noise: cfg.n_noise,
                seed,
                ..PlantedConfig::default()
            });
            return Ok(Prepared {
                name,
                graphs: None,
                patterns: None,
                matrix: p.matrix,
                planted: p.planted,
            });
        }
        DatasetFormat::RandomFootprints => {
            return Ok(Prepared {
                name,
                graphs: None,
                patterns: None,
                matrix: random_footprints(cfg.n_half, cfg.n_noise, seed),
                planted: Vec::new(),
            });
        }
        _ => {}
    }
    let mut graphs = load_graphs(cfg, index, &name)?;
    if cfg.balance {
        graphs = balance_undersample(&graphs, cfg.balance_seed).map_err(at("balance"))?;
    }
    let min_support = cfg.min_support.resolve(graphs.len()).max(1);
    let patterns = mine_frequent(
        &graphs,
        min_support,
        cfg.max_patterns,
        cfg.max_edges.unwrap_or(usize::MAX),
    )
    .map_err(at("mine"))?;
    if patterns.is_empty() {
        return Err(ExperimentError::Stage {
            stage: "mine",
            source: "no pattern reaches the minimum support".into(),
        });
    }
    let matrix = build_matrix(&patterns, &graphs).map_err(at("footprints"))?;
    Ok(Prepared {
        name,
        graphs: Some(graphs),
        patterns: Some(patterns),
        matrix,
        planted: Vec::new(),
    })
}

/// Distances and the complete-linkage dendrogram over every pattern.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub dist: DistanceMatrix,
    pub dendrogram: Dendrogram,
}

pub fn hierarchy(matrix: &FootprintMatrix) -> Result<Hierarchy, ExperimentError> {
    let ids: Vec<usize> = (0..matrix.n_patterns()).collect();
    let dist = manhattan_matrix(matrix, &ids).map_err(at("cluster"))?;
    let dendrogram = agglomerate_complete(&dist);
    Ok(Hierarchy { dist, dendrogram })
}

impl Hierarchy {
    /// Cut at a threshold given in percent of the graph count.
    pub fn cut_pct(&self, pct: f64, n_graphs: usize) -> Result<ClusterCut, ExperimentError> {
        let abs = absolute_threshold(pct / 100.0, n_graphs).map_err(at("cluster"))?;
        Ok(cut_at(&self.dendrogram, &self.dist, abs))
    }
}

fn train_config(cfg: &RunConfig) -> TrainConfig {
    TrainConfig {
        c: cfg.c,
        epochs: cfg.epochs,
        seed: cfg.train_seed,
    }
}

fn evaluate(
    cfg: &RunConfig,
    matrix: &FootprintMatrix,
    columns: &[usize],
) -> Result<EvalReport, ExperimentError> {
    let fv = FeatureView::new(matrix, columns);
    cross_validate(&fv, cfg.k_folds, &train_config(cfg), cfg.fold_seed).map_err(at("classify"))
}

/// Cross-validation results keyed by the sorted column set.
struct EvalCache<'a> {
    cfg: &'a RunConfig,
    matrix: &'a FootprintMatrix,
    memo: Mutex<HashMap<Vec<usize>, EvalReport>>,
}

impl<'a> EvalCache<'a> {
    fn new(cfg: &'a RunConfig, matrix: &'a FootprintMatrix) -> Self {
        Self {
            cfg,
            matrix,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, columns: &[usize]) -> Result<EvalReport, ExperimentError> {
        let mut key = columns.to_vec();
        key.sort_unstable();
        if let Some(r) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(r.clone());
        }
        let r = evaluate(self.cfg, self.matrix, &key)?;
        self.memo.lock().expect("memo lock").insert(key, r.clone());
        Ok(r)
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), ExperimentError> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(at("write"))?;
    }
    fs::write(path, contents).map_err(at("write"))
}

fn write_summary(
    cfg: &RunConfig,
    command: &str,
    body: serde_json::Value,
    timings: &Timings,
) -> Result<(), ExperimentError> {
    let mut summary = json!({
        "command": command,
        "config": cfg,
        "timings_ms": timings.to_json(),
    });
    if let (Some(obj), serde_json::Value::Object(extra)) = (summary.as_object_mut(), body) {
        obj.extend(extra);
    }
    let text = serde_json::to_string_pretty(&summary).map_err(at("write"))?;
    write(&cfg.output_dir, "summary.json", &(text + "\n"))
}

fn start(cfg: &RunConfig) -> Result<Vec<MeasureId>, ExperimentError> {
    cfg.validate()?;
    let measures = cfg.measure_ids()?;
    fs::create_dir_all(&cfg.output_dir).map_err(at("write"))?;
    Ok(measures)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    pub measure: MeasureId,
    /// Selected representatives, best first.
    pub selected: Vec<usize>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineSummary {
    pub dataset: String,
    pub n_graphs: usize,
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_patterns: usize,
    pub truncated: bool,
    pub distinct_footprints: usize,
    pub threshold: u32,
    pub n_representatives: usize,
    pub s: usize,
    pub results: Vec<MeasureResult>,
    #[serde(skip)]
    pub timings: Timings,
}

/// mine → cluster → rank → top-s → cross-validate, for every selected measure.
pub fn cmd_pipeline(cfg: &RunConfig) -> Result<PipelineSummary, ExperimentError> {
    let measures = start(cfg)?;
    let out = &cfg.output_dir;
    let mut timings = Timings::default();
    let prep = timings.time("mine", || prepare(cfg, 0))?;
    let m = &prep.matrix;
    if let (Some(g), Some(p)) = (&prep.graphs, &prep.patterns) {
        let (patterns, supports) = export_patterns(p, g);
        write(out, "patterns.txt", &patterns)?;
        write(out, "supports.txt", &supports)?;
    }
    write(out, "contingency.csv", &contingency_csv(m))?;

    let h = timings.time("cluster", || hierarchy(m))?;
    let cut = h.cut_pct(cfg.threshold_pct, m.n_graphs())?;
    let reps = cut.sorted_representatives();
    write(out, "dendrogram.csv", &dendrogram_csv(&h.dendrogram))?;
    write(out, "clusters.csv", &clusters_csv(&cut))?;

    let rankings = timings.time("rank", || rank_all(&measures, m, &reps));
    write(out, "scores.csv", &scores_csv(&measures, m, &reps))?;
    write(out, "rankings.csv", &rankings_csv(&measures, &rankings))?;

    let s = cfg.s.resolve(reps.len());
    if s == 0 {
        return Err(ExperimentError::Config(
            "s resolves to zero representatives".into(),
        ));
    }
    let s = s.min(reps.len());
    let train_cfg = train_config(cfg);
    let cache = EvalCache::new(cfg, m);
    let cells = timings.time("classify", || {
        measures
            .par_iter()
            .zip(&rankings)
            .map(|(&measure, ranking)| {
                let selected = ranking.top(s);
                let report = cache.get(&selected)?;
                let model =
                    train(&FeatureView::new(m, &selected), &train_cfg).map_err(at("classify"))?;
                Ok((measure, selected, report, model))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;
    let mut evaluation = String::from("measure,s,precision,recall,f1\n");
    let mut results = Vec::with_capacity(cells.len());
    for (measure, selected, report, model) in cells {
        let _ = writeln!(
            evaluation,
            "{measure},{s},{},{},{}",
            report.precision, report.recall, report.f1
        );
        write(out, &format!("folds/{measure}.csv"), &folds_csv(&report))?;
        write(out, &format!("models/{measure}.csv"), &model_csv(&model))?;
        results.push(MeasureResult {
            measure,
            selected,
            precision: report.precision,
            recall: report.recall,
            f1: report.f1,
        });
    }
    write(out, "evaluation.csv", &evaluation)?;

    let summary = PipelineSummary {
        dataset: prep.name.clone(),
        n_graphs: m.n_graphs(),
        n_pos: m.n_pos(),
        n_neg: m.n_neg(),
        n_patterns: m.n_patterns(),
        truncated: prep.patterns.as_ref().is_some_and(|p| p.truncated),
        distinct_footprints: distinct_footprint_groups(m).len(),
        threshold: cut.threshold,
        n_representatives: reps.len(),
        s,
        results,
        timings,
    };
    let body = serde_json::to_value(&summary).map_err(at("write"))?;
    write_summary(cfg, "pipeline", body, &summary.timings)?;
    Ok(summary)
}

/// `measure,rank,pattern_id` with 1-based ranks.
pub fn rankings_csv(measures: &[MeasureId], rankings: &[Ranking]) -> String {
    let mut out = String::from("measure,rank,pattern_id\n");
    for (m, r) in measures.iter().zip(rankings) {
        for (i, p) in r.ids().into_iter().enumerate() {
            let _ = writeln!(out, "{m},{},{p}", i + 1);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold_pct: f64,
    pub threshold: u32,
    pub n_representatives: usize,
    pub f1: f64,
}

/// Representative count and cross-validated F1 on all representatives per threshold.
pub fn cmd_cluster_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>, ExperimentError> {
    start(cfg)?;
    if cfg.thresholds.is_empty() {
        return Err(ExperimentError::Config(
            "thresholds must not be empty".into(),
        ));
    }
    let mut timings = Timings::default();
    let prep = timings.time("mine", || prepare(cfg, 0))?;
    let m = &prep.matrix;
    let h = timings.time("cluster", || hierarchy(m))?;
    let cache = EvalCache::new(cfg, m);
    let rows = timings.time("classify", || {
        cfg.thresholds
            .par_iter()
            .map(|&pct| {
                let cut = h.cut_pct(pct, m.n_graphs())?;
                let reps = cut.sorted_representatives();
                Ok(SweepRow {
                    threshold_pct: pct,
                    threshold: cut.threshold,
                    n_representatives: reps.len(),
                    f1: cache.get(&reps)?.f1,
                })
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;
    let mut csv = String::from("threshold_pct,threshold,n_representatives,f1\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.threshold_pct, r.threshold, r.n_representatives, r.f1
        );
    }
    write(&cfg.output_dir, "cluster_sweep.csv", &csv)?;
    let body = json!({
        "dataset": prep.name,
        "n_patterns": m.n_patterns(),
        "distinct_footprints": distinct_footprint_groups(m).len(),
        "rows": rows,
    });
    write_summary(cfg, "cluster-sweep", body, &timings)?;
    Ok(rows)
}

/// Per-dataset all-pairs tau over representative rankings, the minimum over
/// datasets and the blocks of measures tied at 1.
pub fn cmd_pairwise_tau(
    cfg: &RunConfig,
) -> Result<crate::properties::EquivalenceBlocks, ExperimentError> {
    let measures = start(cfg)?;
    let mut timings = Timings::default();
    let names = dataset_names(cfg);
    let mut per_dataset = Vec::with_capacity(names.len());
    let mut counts = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let prep = timings.time(&format!("prepare:{name}"), || prepare(cfg, i))?;
        let h = hierarchy(&prep.matrix)?;
        let reps = h
            .cut_pct(cfg.threshold_pct, prep.matrix.n_graphs())?
            .sorted_representatives();
        let rankings = rank_all(&measures, &prep.matrix, &reps);
        counts.push(json!({"dataset": name, "n_patterns": prep.matrix.n_patterns(), "n_representatives": reps.len()}));
        per_dataset.push(measures.iter().copied().zip(rankings).collect::<Vec<_>>());
    }
    let eb = timings
        .time("tau", || equivalence_blocks(&per_dataset))
        .map_err(at("tau"))?;
    let mut tau = String::from("measure_a,measure_b,dataset,tau\n");
    for (d, name) in names.iter().enumerate() {
        for (i, a) in eb.measures.iter().enumerate() {
            for (j, b) in eb.measures.iter().enumerate() {
                let _ = writeln!(tau, "{a},{b},{name},{}", eb.tau[d][i][j]);
            }
        }
    }
    let out = &cfg.output_dir;
    write(out, "tau.csv", &tau)?;
    write(out, "min_tau.csv", &eb.min_tau_csv())?;
    write(out, "blocks.csv", &eb.blocks_csv())?;
    let body = json!({ "datasets": counts, "blocks": eb.blocks });
    write_summary(cfg, "pairwise-tau", body, &timings)?;
    Ok(eb)
}

/// Label of the gold-standard ranking in curve outputs.
pub const GOLD: &str = "Gold";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub measure: String,
    pub s_pct: f64,
    pub s: usize,
    pub rbo_vs_gold: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldSummary {
    pub dataset: String,
    pub n_representatives: usize,
    pub planted: Vec<usize>,
    pub gold: GoldStandard,
    /// Grouped by measure (gold first, then measures in canonical order),
    /// ascending `s_pct` within a measure.
    pub curve: Vec<CurvePoint>,
    /// Per measure, first grid percentage whose F1 is within `tolerance` of
    /// the gold F1 at the same percentage.
    pub s_star: BTreeMap<String, Option<f64>>,
    pub tolerance: f64,
}

/// Tolerance used for [`GoldSummary::s_star`].
pub const MATCH_TOLERANCE: f64 = 0.02;

/// `s = max(1, ceil(pct · R / 100))` capped at `R`.
pub fn grid_count(pct: f64, n_representatives: usize) -> usize {
    percent_count(pct, n_representatives).clamp(1, n_representatives.max(1))
}

/// Smallest grid percentage at which `curve` reaches `gold - tolerance`.
pub fn matching_s(curve: &[CurvePoint], gold: &[CurvePoint], tolerance: f64) -> Option<f64> {
    curve
        .iter()
        .zip(gold)
        .find(|(c, g)| c.f1 >= g.f1 - tolerance)
        .map(|(c, _)| c.s_pct)
}

/// Gold standard over the representatives, then RBO and F1 against the grid of `s`.
pub fn cmd_gold(cfg: &RunConfig) -> Result<GoldSummary, ExperimentError> {
    let measures = start(cfg)?;
    let mut timings = Timings::default();
    let prep = timings.time("mine", || prepare(cfg, 0))?;
    let m = &prep.matrix;
    let h = timings.time("cluster", || hierarchy(m))?;
    let reps = h
        .cut_pct(cfg.threshold_pct, m.n_graphs())?
        .sorted_representatives();
    let gold_cfg = GoldConfig {
        exact_limit: cfg.exact_limit,
        n_permutations: cfg.n_permutations,
        permutation_seed: cfg.permutation_seed,
        k_folds: cfg.k_folds,
        fold_seed: cfg.fold_seed,
        train: train_config(cfg),
    };
    let gold = timings
        .time("shapley", || gold_standard(m, &reps, &gold_cfg))
        .map_err(at("shapley"))?;
    let mut grid = cfg.s_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut labelled: Vec<(String, Vec<usize>)> = vec![(GOLD.to_string(), gold.ranking.ids())];
    for (mid, r) in measures.iter().zip(rank_all(&measures, m, &reps)) {
        labelled.push((mid.to_string(), r.ids()));
    }
    let gold_ids = gold.ranking.ids();
    let cells: Vec<(usize, f64)> = (0..labelled.len())
        .flat_map(|i| grid.iter().map(move |&p| (i, p)))
        .collect();
    let cache = EvalCache::new(cfg, m);
    let curve = timings.time("curves", || {
        cells
            .par_iter()
            .map(|&(i, pct)| {
                let (name, ids) = &labelled[i];
                let s = grid_count(pct, reps.len());
                Ok(CurvePoint {
                    measure: name.clone(),
                    s_pct: pct,
                    s,
                    rbo_vs_gold: rbo(ids, &gold_ids, cfg.rbo_p, s).map_err(at("rbo"))?,
                    f1: cache.get(&ids[..s])?.f1,
                })
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;

    let per = grid.len();
    let gold_curve = &curve[..per];
    let s_star = curve
        .chunks(per)
        .map(|c| {
            (
                c[0].measure.clone(),
                matching_s(c, gold_curve, MATCH_TOLERANCE),
            )
        })
        .collect();

    let out = &cfg.output_dir;
    write(out, "shapley.csv", &shapley_csv(&gold))?;
    let mut rbo_csv = String::from("measure,s_pct,rbo_vs_gold\n");
    let mut f1_csv = String::from("measure,s_pct,s,f1\n");
    for c in &curve {
        let _ = writeln!(rbo_csv, "{},{},{}", c.measure, c.s_pct, c.rbo_vs_gold);
        let _ = writeln!(f1_csv, "{},{},{},{}", c.measure, c.s_pct, c.s, c.f1);
    }
    write(out, "rbo.csv", &rbo_csv)?;
    write(out, "f1_curve.csv", &f1_csv)?;
    let summary = GoldSummary {
        dataset: prep.name.clone(),
        n_representatives: reps.len(),
        planted: prep.planted.clone(),
        gold,
        curve,
        s_star,
        tolerance: MATCH_TOLERANCE,
    };
    let body = json!({
        "dataset": summary.dataset,
        "n_representatives": summary.n_representatives,
        "planted": summary.planted,
        "method": summary.gold.method,
        "gold_top": summary.gold.ranking.top(10),
        "s_star_pct": summary.s_star,
        "tolerance": summary.tolerance,
    });
    write_summary(cfg, "gold", body, &timings)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertiesSummary {
    pub n: u64,
    pub checks: usize,
    pub mismatches: Vec<(MeasureId, String)>,
    /// Mismatches not attributable to a degenerate table.
    pub unexplained: Vec<(MeasureId, String)>,
    pub independence_equilibrium: bool,
    pub ps2_exclusive: bool,
}

/// Exhaustive property verdicts on the balanced domain of size `property_n`.
pub fn cmd_properties(cfg: &RunConfig) -> Result<PropertiesSummary, ExperimentError> {
    let measures = start(cfg)?;
    let n = cfg.property_n;
    let mut timings = Timings::default();
    let reports = timings
        .time("properties", || full_report(&measures, n))
        .map_err(at("properties"))?;
    let ps2 = timings
        .time("ps2", || check_ps2_exclusivity(n))
        .map_err(at("properties"))?;
    let indep = timings.time("independence", || check_independence_equilibrium(n));
    let out = &cfg.output_dir;
    write(out, "properties.csv", &report_csv(&reports))?;
    let mut ps2_csv = String::from("measure,ps2,class_symmetric\n");
    for r in &ps2 {
        let _ = writeln!(
            ps2_csv,
            "{},{},{}",
            r.measure, r.ps2_holds, r.class_symmetric
        );
    }
    write(out, "ps2.csv", &ps2_csv)?;
    let flagged = |keep: &dyn Fn(&crate::properties::PropertyReport) -> bool| {
        reports
            .iter()
            .filter(|r| keep(r))
            .map(|r| (r.measure, r.property.to_string()))
            .collect::<Vec<_>>()
    };
    let summary = PropertiesSummary {
        n,
        checks: reports.len(),
        mismatches: flagged(&|r| r.matches_expected() == Some(false)),
        unexplained: flagged(&|r| !r.explained()),
        independence_equilibrium: indep,
        ps2_exclusive: ps2.iter().all(|r| !(r.ps2_holds && r.class_symmetric)),
    };
    let body = serde_json::to_value(&summary).map_err(at("write"))?;
    write_summary(cfg, "properties", body, &timings)?;
    Ok(summary)
}

/// Per-dataset graph statistics, before balancing.
pub fn cmd_stats(
    cfg: &RunConfig,
) -> Result<Vec<(String, crate::graphdata::DatasetStats)>, ExperimentError> {
    start(cfg)?;
    if cfg.format.is_footprint_only() {
        return Err(ExperimentError::Config(
            "stats needs a graph dataset".into(),
        ));
    }
    let mut timings = Timings::default();
    let mut rows = Vec::new();
    for (i, name) in dataset_names(cfg).into_iter().enumerate() {
        let g = timings.time("load", || load_graphs(cfg, i, &name))?;
        let st = dataset_stats(&g).map_err(at("stats"))?;
        rows.push((name, g.n_pos(), g.n_neg(), st));
    }
    let mut csv = String::from("dataset,n_graphs,n_pos,n_neg,avg_vertices,avg_edges,mean_avg_degree,avg_density,avg_global_clustering\n");
    for (name, pos, neg, st) in &rows {
        let cc = st
            .avg_global_clustering
            .map(|c| c.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            csv,
            "{name},{},{pos},{neg},{},{},{},{},{cc}",
            st.n_graphs, st.avg_vertices, st.avg_edges, st.mean_avg_degree, st.avg_density
        );
    }
    write(&cfg.output_dir, "stats.csv", &csv)?;
    let body = json!({ "datasets": rows.iter().map(|r| json!({"dataset": r.0, "n_pos": r.1, "n_neg": r.2, "stats": r.3})).collect::<Vec<_>>() });
    write_summary(cfg, "stats", body, &timings)?;
    Ok(rows.into_iter().map(|r| (r.0, r.3)).collect())
}

/// Every CSV under `dir`, relative path to contents, for determinism checks.
pub fn collect_csvs(dir: &Path) -> std::io::Result<BTreeMap<PathBuf, Vec<u8>>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else if path.extension().is_some_and(|e| e == "csv") {
                let rel = path.strip_prefix(root).expect("under root").to_path_buf();
                out.insert(rel, fs::read(&path)?);
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(dir: &Path) -> RunConfig {
        RunConfig {
            format: DatasetFormat::PlantedFootprints,
            n_half: 20,
            n_planted: 2,
            n_noise: 10,
            epochs: 30,
            output_dir: dir.to_path_buf(),
            ..RunConfig::default()
        }
    }

    #[test]
    fn pipeline_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            measures: vec!["Sup".into(), "GR".into()],
            s: Amount::Count(2),
            ..planted(dir.path())
        };
        let summary = cmd_pipeline(&cfg).unwrap();
        assert_eq!(summary.results.len(), 2);
        assert_eq!(summary.s, 2);
        for f in [
            "summary.json",
            "clusters.csv",
            "dendrogram.csv",
            "evaluation.csv",
            "folds/Sup.csv",
            "models/GR.csv",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
                .unwrap();
        assert_eq!(json["command"], "pipeline");
        assert_eq!(json["n_patterns"], 12);
    }

    #[test]
    fn zero_s_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            s: Amount::Count(0),
            ..planted(dir.path())
        };
        assert!(cmd_pipeline(&cfg).unwrap_err().is_config());
        let cfg = RunConfig {
            thresholds: vec![],
            ..planted(dir.path())
        };
        assert!(cmd_cluster_sweep(&cfg).unwrap_err().is_config());
    }

    #[test]
    fn gold_curve_of_gold_has_unit_rbo() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            measures: vec!["Sup".into()],
            threshold_pct: 0.0,
            s_grid: vec![50.0, 100.0],
            ..planted(dir.path())
        };
        let g = cmd_gold(&cfg).unwrap();
        assert_eq!(g.curve.len(), 4);
        assert!(g.curve[..2]
            .iter()
            .all(|c| c.measure == GOLD && c.rbo_vs_gold == 1.0));
        assert_eq!(g.curve[1].f1, g.curve[3].f1);
        assert_eq!(g.s_star[GOLD], Some(50.0));
    }

    #[test]
    fn grid_counts() {
        assert_eq!(grid_count(1.0, 50), 1);
        assert_eq!(grid_count(20.0, 205), 41);
        assert_eq!(grid_count(100.0, 205), 205);
        assert_eq!(grid_count(0.1, 3), 1);
    }
}
