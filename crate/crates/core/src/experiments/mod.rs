//! Cross-validated grids over training-set fraction and number of human
//! rules, with per-fold rows and median/quartile aggregates.

use std::fmt::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colgen::{train, ColgenError, HumanInput, Mode, Params};
use crate::dataset::{
    cell_name, fit_columns, transform, BinaryDataset, DataError, RawTable, TICTACTOE_LINES,
};
use crate::metrics::{accuracy, ruleset_similarity, MetricError};
use crate::par::{self, Execution};
use crate::ruledsl::{bind, Conjunction, Literal, Provenance, RuleError, RuleSet};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("cannot sample {requested} rules from {available}")]
    TooManyRules { requested: usize, available: usize },
    #[error("{positives} positive samples cannot be spread over {folds} folds")]
    TooFewPositives { positives: usize, folds: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Train(#[from] ColgenError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// The eight winning lines for `x`, one conjunction of three `== x` tests each.
pub fn tictactoe_rules() -> RuleSet {
    let conjunctions = TICTACTOE_LINES
        .iter()
        .map(|line| {
            let lits = line.iter().map(|&(r, c)| Literal::eq(cell_name(r, c), "x")).collect();
            Conjunction::new(lits, Provenance::Human).expect("winning lines are satisfiable")
        })
        .collect();
    RuleSet::new(conjunctions)
}

/// `count` rules drawn uniformly without replacement, kept in pool order.
pub fn sample_rules(pool: &RuleSet, count: usize, seed: u64) -> Result<RuleSet, ExperimentError> {
    if count > pool.len() {
        return Err(ExperimentError::TooManyRules { requested: count, available: pool.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, pool.len(), count).into_vec();
    picked.sort_unstable();
    let mut out = RuleSet::new(picked.into_iter().map(|i| pool.conjunctions[i].clone()).collect());
    out.positive_label = pool.positive_label.clone();
    Ok(out)
}

/// A random subset of the eight tic-tac-toe rules.
pub fn sample_human_rules(count: usize, seed: u64) -> Result<RuleSet, ExperimentError> {
    sample_rules(&tictactoe_rules(), count, seed)
}

/// Mixes a base seed with a tag into an independent stream seed.
pub fn derive_seed(base: u64, tag: &[u64]) -> u64 {
    let mut z = base;
    for &t in tag {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(t);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Splits sample indices into `k` disjoint folds covering everything, with
/// each class dealt round-robin after a seeded shuffle.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, ExperimentError> {
    if k < 2 {
        return Err(ExperimentError::InvalidGrid("at least 2 folds are needed".into()));
    }
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if pos.len() < k {
        return Err(ExperimentError::TooFewPositives { positives: pos.len(), folds: k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); k];
    for (n, i) in pos.into_iter().chain(neg).enumerate() {
        folds[n % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// A class-stratified sample of `fraction` of `indices`, at least one per
/// non-empty class, returned sorted.
pub fn stratified_sample(indices: &[usize], labels: &[bool], fraction: f64, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for class in [true, false] {
        let mut members: Vec<usize> = indices.iter().copied().filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        let take = ((fraction * members.len() as f64).round() as usize).clamp(1, members.len());
        members.shuffle(&mut rng);
        out.extend_from_slice(&members[..take]);
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub fractions: Vec<f64>,
    pub rule_counts: Vec<usize>,
    pub folds: usize,
    pub params: Params,
    /// Mode used for cells with at least one human rule.
    pub human_mode: Mode,
    pub bins: usize,
    pub seed: u64,
    /// Record wall-clock training time (makes output non-reproducible).
    pub timing: bool,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self {
            fractions: vec![0.05, 0.1, 0.25, 0.5, 1.0],
            rule_counts: vec![0, 2, 4, 6, 8],
            folds: 5,
            params: Params { complexity: 24, c_u: 0.05, ..Params::default() },
            human_mode: Mode::Soft,
            bins: crate::dataset::DEFAULT_BINS,
            seed: 0,
            timing: false,
            execution: Execution::default(),
        }
    }
}

impl ExperimentGrid {
    pub fn validate(&self, available_rules: usize) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::InvalidGrid(m));
        if self.fractions.is_empty() || self.rule_counts.is_empty() {
            return bad("grid needs at least one fraction and one rule count".into());
        }
        if let Some(f) = self.fractions.iter().find(|&&f| !(f > 0.0 && f <= 1.0)) {
            return bad(format!("fraction {f} is outside (0, 1]"));
        }
        if let Some(&c) = self.rule_counts.iter().find(|&&c| c > available_rules) {
            return bad(format!("rule count {c} exceeds the {available_rules} available rules"));
        }
        if self.folds < 2 {
            return bad("at least 2 folds are needed".into());
        }
        if !matches!(self.human_mode, Mode::Soft | Mode::Hard) {
            return bad("human mode must be soft or hard".into());
        }
        self.params.validate()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fraction: f64,
    pub human_rules: usize,
    pub fold: usize,
    /// `None` when the cell was skipped.
    pub accuracy: Option<f64>,
    pub similarity: Option<f64>,
    pub complexity: Option<usize>,
    pub train_seconds: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub fraction: f64,
    pub human_rules: usize,
    pub metric: String,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
    pub folds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResults {
    pub rows: Vec<FoldResult>,
    pub aggregates: Vec<Aggregate>,
}

/// Linear-interpolation quantile of sorted data (`q` in [0, 1]).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Median and quartiles per (fraction, rule count, metric) over the
/// non-skipped rows, in grid order.
type MetricOf = fn(&FoldResult) -> Option<f64>;

pub fn aggregate(rows: &[FoldResult]) -> Vec<Aggregate> {
    let mut keys: Vec<(f64, usize)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(f, h)| f == r.fraction && h == r.human_rules) {
            keys.push((r.fraction, r.human_rules));
        }
    }
    let mut out = Vec::new();
    for (fraction, human_rules) in keys {
        let cell: Vec<&FoldResult> =
            rows.iter().filter(|r| r.fraction == fraction && r.human_rules == human_rules).collect();
        let metrics: [(&str, MetricOf); 3] = [
            ("accuracy", |r| r.accuracy),
            ("similarity", |r| r.similarity),
            ("complexity", |r| r.complexity.map(|c| c as f64)),
        ];
        for (name, get) in metrics {
            let mut v: Vec<f64> = cell.iter().filter_map(|r| get(r)).collect();
            if v.is_empty() {
                continue;
            }
            v.sort_by(f64::total_cmp);
            out.push(Aggregate {
                fraction,
                human_rules,
                metric: name.to_string(),
                median: quantile(&v, 0.5),
                p25: quantile(&v, 0.25),
                p75: quantile(&v, 0.75),
                folds: v.len(),
            });
        }
    }
    out
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn results_csv(rows: &[FoldResult]) -> String {
    let mut s = String::from("fraction,human_rules,fold,accuracy,similarity,complexity,train_seconds\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.fraction,
            r.human_rules,
            r.fold,
            opt(&r.accuracy),
            opt(&r.similarity),
            opt(&r.complexity),
            opt(&r.train_seconds)
        );
    }
    s
}

pub fn aggregates_csv(aggs: &[Aggregate]) -> String {
    let mut s = String::from("fraction,human_rules,metric,median,p25,p75,folds\n");
    for a in aggs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            a.fraction, a.human_rules, a.metric, a.median, a.p25, a.p75, a.folds
        );
    }
    s
}

struct Job {
    fraction_idx: usize,
    count: usize,
    fold: usize,
}

/// Trains on a stratified fraction of one fold's training split and scores on
/// the held-out fold.
fn run_job(
    raw: &RawTable,
    labels: &[bool],
    folds: &[Vec<usize>],
    grid: &ExperimentGrid,
    human_pool: &RuleSet,
    reference: Option<&RuleSet>,
    job: &Job,
) -> Result<FoldResult, ExperimentError> {
    let fraction = grid.fractions[job.fraction_idx];
    let mut row = FoldResult {
        fraction,
        human_rules: job.count,
        fold: job.fold,
        accuracy: None,
        similarity: None,
        complexity: None,
        train_seconds: None,
        note: None,
    };
    let test_idx = &folds[job.fold];
    let train_all: Vec<usize> =
        folds.iter().enumerate().filter(|&(f, _)| f != job.fold).flat_map(|(_, v)| v.iter().copied()).collect();
    // the subsample depends on fraction and fold only, so cells that differ in
    // human input see the same training data
    let sample_seed = derive_seed(grid.seed, &[1, job.fraction_idx as u64, job.fold as u64]);
    let train_idx = stratified_sample(&train_all, labels, fraction, sample_seed);
    if !train_idx.iter().any(|&i| labels[i]) {
        row.note = Some("no positive training samples".into());
        return Ok(row);
    }
    let train_raw = raw.subset(&train_idx);
    let columns = fit_columns(&train_raw, grid.bins, true)?;
    let mut train_ds: BinaryDataset = transform(&train_raw, &columns)?;
    let rule_seed = derive_seed(grid.seed, &[2, job.count as u64, job.fold as u64]);
    let human_rules = sample_rules(human_pool, job.count, rule_seed)?;
    let bound = bind(&human_rules, &mut train_ds)?;
    let mut params = grid.params;
    params.execution = grid.execution;
    params.mode = if job.count == 0 { Mode::Machine } else { grid.human_mode };
    let started = Instant::now();
    let outcome = train(&train_ds, &HumanInput::rules(bound.conjunctions), &params)?;
    if grid.timing {
        row.train_seconds = Some(started.elapsed().as_secs_f64());
    }
    let test_ds = transform(&raw.subset(test_idx), train_ds.columns())?;
    row.accuracy = Some(accuracy(&outcome.rules, &test_ds)?);
    row.similarity = reference.map(|r| ruleset_similarity(&outcome.rule_set, r));
    row.complexity = Some(outcome.report.complexity);
    Ok(row)
}

/// Runs every (fraction, rule count, fold) cell. Human rules are sampled from
/// `human_pool`; similarity is measured against `reference` when given.
/// Output order and content depend only on the inputs and the seed.
pub fn run_grid_with(
    raw: &RawTable,
    grid: &ExperimentGrid,
    human_pool: &RuleSet,
    reference: Option<&RuleSet>,
) -> Result<GridResults, ExperimentError> {
    grid.validate(human_pool.len())?;
    let labels = raw.labels()?;
    let folds = stratified_folds(&labels, grid.folds, derive_seed(grid.seed, &[0]))?;
    let mut jobs = Vec::new();
    for fraction_idx in 0..grid.fractions.len() {
        for &count in &grid.rule_counts {
            for fold in 0..grid.folds {
                jobs.push(Job { fraction_idx, count, fold });
            }
        }
    }
    let rows = par::map(&jobs, grid.execution, |job| {
        run_job(raw, &labels, &folds, grid, human_pool, reference, job)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let aggregates = aggregate(&rows);
    Ok(GridResults { rows, aggregates })
}

/// The tic-tac-toe study: human rules and the similarity reference are the
/// eight winning lines.
pub fn run_grid(raw: &RawTable, grid: &ExperimentGrid) -> Result<GridResults, ExperimentError> {
    let rules = tictactoe_rules();
    run_grid_with(raw, grid, &rules, Some(&rules))
}
