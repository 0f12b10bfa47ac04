//! Feature-scaling sweeps: for each repetition, draw one design, noise vector,
//! split and target, then train the baseline and the RFM at every width in the
//! grid.
//!
//! Cells `(rep, d)` are independent work units run on a bounded rayon pool.
//! Their random inputs derive from `(master_seed, rep)` only, and the output is
//! sorted by `(rep, d, model, split)`, so the records do not depend on the
//! worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use ndarray::Array1;
use rayon::prelude::*;

use crate::data::{
    add_noise, eval_target, gen_design, make_split, slice_and_scale, NoiseSpec, SplitPlan,
    TargetKind, TargetSpec,
};
use crate::error::{Result, RfmError};
use crate::kernel::{DesignMatrix, PSD_REL_TOL};
use crate::linalg;
use crate::rfm::{
    mse, train_rfm_observed, CandidateMetric, SolveStage, TrainConfig, TrainObserver, TrainedModel,
};
use crate::seed::{streams, SeedStream};

/// Fraction of rows used for training in every repetition.
pub const TRAIN_FRACTION: f64 = 0.8;
/// z-value of the two-sided normal-approximation 95% interval.
pub const CI_Z: f64 = 1.96;
/// Default moving-average half width for inflection detection.
pub const DEFAULT_SMOOTHING_WINDOW: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    Baseline,
    Rfm,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Baseline => "baseline",
            ModelKind::Rfm => "rfm",
        }
    }
}

impl FromStr for ModelKind {
    type Err = RfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(ModelKind::Baseline),
            "rfm" => Ok(ModelKind::Rfm),
            other => Err(RfmError::Parse(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitKind {
    Train,
    Test,
}

impl SplitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitKind::Train => "train",
            SplitKind::Test => "test",
        }
    }
}

impl FromStr for SplitKind {
    type Err = RfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitKind::Train),
            "test" => Ok(SplitKind::Test),
            other => Err(RfmError::Parse(format!("unknown split '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// `{5..99} ∪ {100..2000}`, independent of N.
    Base,
    /// `{5..N/10} ∪ {N/10..2N}`.
    SizeScaled,
}

/// Grid shape with its two step sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub mode: GridMode,
    pub fine_step: usize,
    pub coarse_step: usize,
}

impl GridSpec {
    pub fn new(mode: GridMode) -> Self {
        Self {
            mode,
            fine_step: 1,
            coarse_step: 10,
        }
    }

    pub fn with_steps(mut self, fine_step: usize, coarse_step: usize) -> Self {
        self.fine_step = fine_step;
        self.coarse_step = coarse_step;
        self
    }
}

/// Default-step grid.
pub fn build_d_grid(n: usize, mode: GridMode) -> Result<Vec<usize>> {
    build_d_grid_with(n, &GridSpec::new(mode))
}

pub fn build_d_grid_with(n: usize, grid: &GridSpec) -> Result<Vec<usize>> {
    if n < 50 {
        return Err(RfmError::Precondition(format!(
            "N = {n} is too small for a feature grid (need N ≥ 50)"
        )));
    }
    if grid.fine_step == 0 || grid.coarse_step == 0 {
        return Err(RfmError::Precondition("grid steps must be positive".into()));
    }
    let (fine_end, coarse_start, coarse_end) = match grid.mode {
        GridMode::Base => (99, 100, 2000),
        GridMode::SizeScaled => (n / 10, n / 10, 2 * n),
    };
    let mut d: Vec<usize> = (5..=fine_end).step_by(grid.fine_step).collect();
    d.extend((coarse_start..=coarse_end).step_by(grid.coarse_step));
    d.sort_unstable();
    d.dedup();
    Ok(d)
}

/// Everything needed to reproduce one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub n: usize,
    pub d_grid: Vec<usize>,
    pub target: TargetKind,
    pub sigma: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub train_config: TrainConfig,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "_.-".contains(c))
        {
            return Err(RfmError::Precondition(format!(
                "experiment name '{}' must be non-empty and use only [A-Za-z0-9_.-]",
                self.name
            )));
        }
        if self.reps == 0 {
            return Err(RfmError::Precondition("reps must be at least 1".into()));
        }
        if self.d_grid.is_empty() {
            return Err(RfmError::Precondition("empty feature grid".into()));
        }
        if self.d_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RfmError::Precondition("feature grid must be strictly ascending".into()));
        }
        let min_d = 5.max(self.target.min_dim());
        if self.d_grid[0] < min_d {
            return Err(RfmError::Precondition(format!(
                "smallest width {} is below {min_d} for the {} target",
                self.d_grid[0],
                self.target.as_str()
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(RfmError::Precondition(format!("sigma must be non-negative, got {}", self.sigma)));
        }
        let n_train = (TRAIN_FRACTION * self.n as f64).round() as usize;
        if self.n < 5 || n_train < 5 || n_train == self.n {
            return Err(RfmError::Precondition(format!("N = {} is too small to split", self.n)));
        }
        self.train_config.validate()
    }

    pub fn max_d(&self) -> usize {
        *self.d_grid.last().expect("validated grid is non-empty")
    }
}

/// One MSE measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub experiment: String,
    pub rep: usize,
    pub n: usize,
    pub d: usize,
    pub sigma: f64,
    pub target: TargetKind,
    pub model: ModelKind,
    pub split: SplitKind,
    pub mse: f64,
    pub best_iter: usize,
    pub seed: u64,
}

impl SweepRecord {
    fn sort_key(&self) -> (&str, usize, usize, ModelKind, SplitKind) {
        (&self.experiment, self.rep, self.d, self.model, self.split)
    }
}

/// Puts records in canonical `(experiment, rep, d, model, split)` order.
pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Numerical health gathered while a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunDiagnostics {
    pub solves: usize,
    /// Worst `‖(K+λI)α − y‖∞ / (1 + ‖y‖∞)` over all solves.
    pub max_residual: f64,
    pub metrics_checked: usize,
    /// Worst `−λ_min / λ_max` over checked metrics, floored at 0.
    pub worst_negative_eig_ratio: f64,
    pub dense_metrics_checked: usize,
    /// Worst relative asymmetry of densely materialized metrics.
    pub max_asymmetry: f64,
    pub metric_failures: usize,
}

impl RunDiagnostics {
    fn merge(&mut self, other: &RunDiagnostics) {
        self.solves += other.solves;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.metrics_checked += other.metrics_checked;
        self.worst_negative_eig_ratio = self.worst_negative_eig_ratio.max(other.worst_negative_eig_ratio);
        self.dense_metrics_checked += other.dense_metrics_checked;
        self.max_asymmetry = self.max_asymmetry.max(other.max_asymmetry);
        self.metric_failures += other.metric_failures;
    }
}

/// How thoroughly to inspect the metrics produced during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricChecks {
    #[default]
    Off,
    /// Spectrum of every metric through its factor Gram; repetition 0 metrics
    /// are also materialized densely and checked for symmetry.
    Full,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses [`default_workers`].
    pub workers: Option<usize>,
    pub metric_checks: MetricChecks,
    /// Print a progress line to stderr after each repetition's worth of cells.
    pub progress: bool,
}

/// Worker count from `RFM_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var("RFM_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub diagnostics: RunDiagnostics,
}

struct RepData {
    design: DesignMatrix,
    noise: NoiseSpec,
    split: SplitPlan,
    target: TargetSpec,
    train_stream: SeedStream,
}

fn draw_rep(spec: &ExperimentSpec, rep: usize) -> Result<RepData> {
    let stream = SeedStream::for_rep(spec.master_seed, rep);
    Ok(RepData {
        design: gen_design(spec.n, spec.max_d(), &stream.child(streams::DESIGN))?,
        noise: NoiseSpec::draw(spec.n, spec.sigma, &stream.child(streams::NOISE))?,
        split: make_split(spec.n, TRAIN_FRACTION, &stream.child(streams::SPLIT))?,
        target: TargetSpec::draw(spec.target, &stream.child(streams::COEFFS)),
        train_stream: stream.child(streams::TRAIN),
    })
}

struct CellObserver {
    checks: MetricChecks,
    dense: bool,
    diag: RunDiagnostics,
}

impl CellObserver {
    fn check_metric(&mut self, metric: &CandidateMetric<'_>) -> Result<()> {
        let gram = metric.gram();
        let ev = linalg::symmetric_eigenvalues(gram.view())?;
        let max = ev[ev.len() - 1].max(0.0);
        // rank-deficient factors add exact zeros to the spectrum of M
        let min = if gram.nrows() < metric.dim() { ev[0].min(0.0) } else { ev[0] };
        let ratio = if max > 0.0 { -min / max } else if min < 0.0 { f64::INFINITY } else { 0.0 };
        self.diag.worst_negative_eig_ratio = self.diag.worst_negative_eig_ratio.max(ratio);
        self.diag.metrics_checked += 1;
        if ratio > PSD_REL_TOL {
            self.diag.metric_failures += 1;
        }
        if self.dense {
            let dense = metric.to_metric().to_matrix();
            let asym = dense.max_asymmetry();
            self.diag.max_asymmetry = self.diag.max_asymmetry.max(asym);
            self.diag.dense_metrics_checked += 1;
            if !dense.is_symmetric() {
                self.diag.metric_failures += 1;
            }
        }
        Ok(())
    }
}

impl TrainObserver for CellObserver {
    fn on_solve(&mut self, _stage: SolveStage, residual: f64) {
        self.diag.solves += 1;
        self.diag.max_residual = self.diag.max_residual.max(residual);
    }

    fn on_metric(&mut self, _iteration: usize, metric: &CandidateMetric<'_>) {
        if self.checks == MetricChecks::Off {
            return;
        }
        if self.check_metric(metric).is_err() {
            self.diag.metrics_checked += 1;
            self.diag.metric_failures += 1;
        }
    }
}

fn model_records(
    spec: &ExperimentSpec,
    rep: usize,
    d: usize,
    seed: u64,
    kind: ModelKind,
    model: &TrainedModel,
    (x_test, y_train, y_test): (&DesignMatrix, &Array1<f64>, &Array1<f64>),
) -> Result<[SweepRecord; 2]> {
    let train_mse = mse(model.predict_train().view(), y_train.view())?;
    let test_mse = mse(model.predict(x_test)?.view(), y_test.view())?;
    let best_iter = match kind {
        ModelKind::Baseline => 0,
        ModelKind::Rfm => model.best_iter(),
    };
    let make = |split, mse: f64| -> Result<SweepRecord> {
        if !(mse.is_finite() && mse >= 0.0) {
            return Err(RfmError::Numerical(format!(
                "{} {} MSE is {mse}",
                kind.as_str(),
                SplitKind::as_str(&split)
            )));
        }
        Ok(SweepRecord {
            experiment: spec.name.clone(),
            rep,
            n: spec.n,
            d,
            sigma: spec.sigma,
            target: spec.target,
            model: kind,
            split,
            mse,
            best_iter,
            seed,
        })
    };
    Ok([make(SplitKind::Train, train_mse)?, make(SplitKind::Test, test_mse)?])
}

fn run_cell(
    spec: &ExperimentSpec,
    rep: usize,
    data: &RepData,
    d: usize,
    checks: MetricChecks,
) -> Result<(Vec<SweepRecord>, RunDiagnostics)> {
    let xs = slice_and_scale(&data.design, d)?;
    let y = add_noise(eval_target(&xs, &data.target)?.view(), &data.noise)?;
    let x_train = xs.select_rows(&data.split.train);
    let x_test = xs.select_rows(&data.split.test);
    let y_train: Array1<f64> = data.split.train.iter().map(|&i| y[i]).collect();
    let y_test: Array1<f64> = data.split.test.iter().map(|&i| y[i]).collect();

    let mut obs = CellObserver {
        checks: MetricChecks::Off,
        dense: false,
        diag: RunDiagnostics::default(),
    };
    let baseline_cfg = TrainConfig::baseline(spec.train_config.hyperparams);
    let baseline = train_rfm_observed(&x_train, y_train.view(), &baseline_cfg, &data.train_stream, &mut obs)?;
    obs.checks = checks;
    obs.dense = checks == MetricChecks::Full && rep == 0;
    let rfm = train_rfm_observed(&x_train, y_train.view(), &spec.train_config, &data.train_stream, &mut obs)?;

    let seed = spec.master_seed;
    let splits = (&x_test, &y_train, &y_test);
    let mut out = Vec::with_capacity(4);
    out.extend(model_records(spec, rep, d, seed, ModelKind::Baseline, &baseline, splits)?);
    out.extend(model_records(spec, rep, d, seed, ModelKind::Rfm, &rfm, splits)?);
    Ok((out, obs.diag))
}

/// Runs a sweep with default options.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    Ok(run_experiment_with(spec, &RunOptions::default())?.records)
}

pub fn run_experiment_with(spec: &ExperimentSpec, options: &RunOptions) -> Result<SweepOutcome> {
    spec.validate()?;
    let workers = options.workers.unwrap_or_else(default_workers).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RfmError::Numerical(format!("cannot start worker pool: {e}")))?;

    pool.install(|| {
        let reps: Vec<RepData> = (0..spec.reps)
            .into_par_iter()
            .map(|rep| draw_rep(spec, rep))
            .collect::<Result<_>>()?;
        let cells: Vec<(usize, usize)> = (0..spec.reps)
            .flat_map(|rep| spec.d_grid.iter().map(move |&d| (rep, d)))
            .collect();
        let done = AtomicUsize::new(0);
        let total = cells.len();
        let results: Vec<Result<(Vec<SweepRecord>, RunDiagnostics)>> = cells
            .par_iter()
            .map(|&(rep, d)| {
                let r = run_cell(spec, rep, &reps[rep], d, options.metric_checks).map_err(|e| {
                    RfmError::Cell {
                        rep,
                        d,
                        source: Box::new(e),
                    }
                });
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                if options.progress && (k.is_multiple_of(spec.d_grid.len()) || k == total) {
                    eprintln!("[{}] {k}/{total} cells", spec.name);
                }
                r
            })
            .collect();

        let mut records = Vec::with_capacity(total * 4);
        let mut diagnostics = RunDiagnostics::default();
        for r in results {
            let (recs, diag) = r?;
            records.extend(recs);
            diagnostics.merge(&diag);
        }
        sort_records(&mut records);
        Ok(SweepOutcome { records, diagnostics })
    })
}

/// Cross-repetition statistics for one `(d, model, split)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub d: usize,
    pub model: ModelKind,
    pub split: SplitKind,
    pub n_reps: usize,
    pub mean_mse: f64,
    pub std_mse: f64,
    pub sem: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Mean, sample standard deviation, standard error and `mean ± 1.96·sem` for
/// each `(d, model, split)`. All records must belong to one experiment.
pub fn summarize(records: &[SweepRecord]) -> Result<Vec<SummaryRow>> {
    let first = records
        .first()
        .ok_or_else(|| RfmError::Precondition("nothing to summarize".into()))?;
    if let Some(other) = records.iter().find(|r| r.experiment != first.experiment) {
        return Err(RfmError::Precondition(format!(
            "records mix experiments '{}' and '{}'",
            first.experiment, other.experiment
        )));
    }
    let mut groups: BTreeMap<(usize, ModelKind, SplitKind), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.d, r.model, r.split)).or_default().push(r.mse);
    }
    Ok(groups
        .into_iter()
        .map(|((d, model, split), v)| {
            let k = v.len();
            let mean = v.iter().sum::<f64>() / k as f64;
            let (std, sem) = if k > 1 {
                let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1) as f64;
                let std = var.sqrt();
                (std, std / (k as f64).sqrt())
            } else {
                (0.0, 0.0)
            };
            SummaryRow {
                experiment: first.experiment.clone(),
                d,
                model,
                split,
                n_reps: k,
                mean_mse: mean,
                std_mse: std,
                sem,
                ci_lo: mean - CI_Z * sem,
                ci_hi: mean + CI_Z * sem,
            }
        })
        .collect())
}

/// [`summarize`] applied per experiment, in experiment-name order.
pub fn summarize_all(records: &[SweepRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(RfmError::Precondition("nothing to summarize".into()));
    }
    let mut by_exp: BTreeMap<&str, Vec<SweepRecord>> = BTreeMap::new();
    for r in records {
        by_exp.entry(&r.experiment).or_default().push(r.clone());
    }
    let mut out = Vec::new();
    for recs in by_exp.values() {
        out.extend(summarize(recs)?);
    }
    Ok(out)
}

/// `(d, mean_mse)` pairs for one model and split, ascending in `d`.
pub fn mean_curve(summary: &[SummaryRow], model: ModelKind, split: SplitKind) -> Vec<(usize, f64)> {
    let mut c: Vec<(usize, f64)> = summary
        .iter()
        .filter(|r| r.model == model && r.split == split)
        .map(|r| (r.d, r.mean_mse))
        .collect();
    c.sort_by_key(|p| p.0);
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumKind::Min => "min",
            ExtremumKind::Max => "max",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inflection {
    pub kind: ExtremumKind,
    pub d: usize,
    /// Smoothed curve value at `d`.
    pub value: f64,
}

/// Centered moving average of width `2·window + 1`, truncated at the ends.
pub fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(window);
            let hi = (i + window + 1).min(n);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Strict local minima and maxima of the smoothed curve, ordered by `d`.
/// A plateau counts once, at its leftmost point.
pub fn detect_inflections(curve: &[(usize, f64)], window: usize) -> Result<Vec<Inflection>> {
    if window == 0 {
        return Err(RfmError::Precondition("smoothing window must be at least 1".into()));
    }
    if curve.len() < 2 * window + 1 {
        return Err(RfmError::Precondition(format!(
            "curve of {} points is too short for window {window}",
            curve.len()
        )));
    }
    let values: Vec<f64> = curve.iter().map(|p| p.1).collect();
    let s = smooth(&values, window);
    // runs of equal smoothed values: (start index, value)
    let mut runs: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in s.iter().enumerate() {
        if runs.last().is_none_or(|r| r.1 != v) {
            runs.push((i, v));
        }
    }
    let mut out = Vec::new();
    for w in runs.windows(3) {
        let (prev, cur, next) = (w[0].1, w[1], w[2].1);
        let kind = if cur.1 < prev && cur.1 < next {
            ExtremumKind::Min
        } else if cur.1 > prev && cur.1 > next {
            ExtremumKind::Max
        } else {
            continue;
        };
        out.push(Inflection {
            kind,
            d: curve[cur.0].0,
            value: cur.1,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_grid() {
        let g = build_d_grid(1000, GridMode::Base).unwrap();
        assert_eq!(g.len(), 95 + 191);
        assert_eq!((g[0], *g.last().unwrap()), (5, 2000));
        assert!(g.contains(&99) && g.contains(&100));
        assert!(g.windows(2).filter(|w| w[0] >= 100).all(|w| w[1] - w[0] == 10));
    }

    #[test]
    fn coarse_base_grid() {
        let g = build_d_grid_with(1000, &GridSpec::new(GridMode::Base).with_steps(5, 25)).unwrap();
        assert_eq!(g.len(), 19 + 77);
        assert_eq!(&g[..3], &[5, 10, 15]);
        assert_eq!(g[18], 95);
        assert_eq!(g[19], 100);
        assert_eq!(*g.last().unwrap(), 2000);
    }

    #[test]
    fn size_scaled_grid() {
        let g = build_d_grid(200, GridMode::SizeScaled).unwrap();
        assert_eq!(*g.last().unwrap(), 400);
        assert_eq!(&g[..16], &(5..=20).collect::<Vec<_>>()[..]);
        assert_eq!(g[16], 30);
        // N/10 appears once
        assert_eq!(g.iter().filter(|&&d| d == 20).count(), 1);
        assert!(build_d_grid(40, GridMode::SizeScaled).is_err());
    }

    fn rec(rep: usize, d: usize, model: ModelKind, mse: f64) -> SweepRecord {
        SweepRecord {
            experiment: "t".into(),
            rep,
            n: 10,
            d,
            sigma: 0.0,
            target: TargetKind::Cubic,
            model,
            split: SplitKind::Test,
            mse,
            best_iter: 0,
            seed: 1,
        }
    }

    #[test]
    fn summary_single_rep_collapses() {
        let s = summarize(&[rec(0, 5, ModelKind::Rfm, 0.25)]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].ci_lo, s[0].mean_mse, s[0].ci_hi), (0.25, 0.25, 0.25));
        assert_eq!(s[0].std_mse, 0.0);
    }

    #[test]
    fn summary_identical_values_have_zero_width() {
        let r: Vec<_> = (0..4).map(|i| rec(i, 5, ModelKind::Rfm, 0.5)).collect();
        let s = summarize(&r).unwrap();
        assert_eq!(s[0].ci_lo, s[0].ci_hi);
        assert_eq!(s[0].n_reps, 4);
    }

    #[test]
    fn summary_rejects_mixed_or_empty() {
        assert!(summarize(&[]).is_err());
        let mut b = rec(0, 5, ModelKind::Rfm, 1.0);
        b.experiment = "other".into();
        assert!(summarize(&[rec(0, 5, ModelKind::Rfm, 1.0), b]).is_err());
    }

    #[test]
    fn inflections_basic_shapes() {
        let dec: Vec<(usize, f64)> = (0..20).map(|i| (i, 100.0 - i as f64)).collect();
        assert!(detect_inflections(&dec, 2).unwrap().is_empty());
        let v: Vec<(usize, f64)> = (0..21).map(|i| (i, (i as f64 - 10.0).abs())).collect();
        let ex = detect_inflections(&v, 2).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!((ex[0].kind, ex[0].d), (ExtremumKind::Min, 10));
        assert!(detect_inflections(&v[..4], 2).is_err());
        assert!(detect_inflections(&v, 0).is_err());
    }

    #[test]
    fn plateau_reports_leftmost_point() {
        let c: Vec<(usize, f64)> = [3.0, 2.0, 1.0, 1.0, 1.0, 2.0, 3.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| (i * 10, v))
            .collect();
        // window 1 smooths to 2.5, 2, 1.33, 1, 1.33, 2, 2.5
        let ex = detect_inflections(&c, 1).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].d, 30);
        let flat: Vec<(usize, f64)> = [3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, v))
            .collect();
        let ex = detect_inflections(&flat, 1).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!((ex[0].kind, ex[0].d), (ExtremumKind::Min, 2));
    }
}
