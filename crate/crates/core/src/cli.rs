//! Command-line front end: `run`, `summarize`, `plot` and `verify`.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime or numerical failure,
//! 3 verification failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::TargetKind;
use crate::error::{Result, RfmError};
use crate::presets::{run_metadata, Overrides, Preset};
use crate::report::{
    experiments, read_records_file, read_summary_file, render_svg, sidecar_path,
    write_records_file, write_summary_file, Metadata, PlotOptions,
};
use crate::sweep::{run_experiment_with, summarize_all, MetricChecks, ModelKind, RunOptions, SplitKind};
use crate::verify::{check_shape, Acceptance, AcceptanceConfig, BASELINE_WINDOWS, RFM_WINDOWS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rfm-sweep", version, about = "Feature-scaling sweeps for recursive feature machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a preset sweep; writes records.csv and records.meta.
    Run(RunArgs),
    /// Per-(d, model, split) statistics; writes summary.csv and summary.meta.
    Summarize(SummarizeArgs),
    /// One SVG per (experiment, split) from a summary CSV.
    Plot(PlotArgs),
    /// Acceptance checks; exits 3 if any fails.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentArg {
    Base,
    Noise,
    Size,
    Target,
}

impl From<ExperimentArg> for Preset {
    fn from(e: ExperimentArg) -> Self {
        match e {
            ExperimentArg::Base => Preset::Base,
            ExperimentArg::Noise => Preset::Noise,
            ExperimentArg::Size => Preset::Size,
            ExperimentArg::Target => Preset::Target,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Cubic,
    Randmat,
}

impl From<TargetArg> for TargetKind {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Cubic => TargetKind::Cubic,
            TargetArg::Randmat => TargetKind::RandMat,
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "base")]
    experiment: ExperimentArg,
    /// Sample size N (collapses the size preset to this N).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Label-noise σ (collapses the noise preset to this σ).
    #[arg(long)]
    sigma: Option<f64>,
    /// Target function (collapses the target preset to this target).
    #[arg(long, value_enum)]
    target: Option<TargetArg>,
    /// Laplace bandwidth L.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Ridge λ.
    #[arg(long)]
    ridge: Option<f64>,
    /// RFM iterations.
    #[arg(long)]
    iterations: Option<usize>,
    /// Step of the fine region of the grid (default 1).
    #[arg(long)]
    d_step_fine: Option<usize>,
    /// Step of the coarse region of the grid (default 10).
    #[arg(long)]
    d_step_coarse: Option<usize>,
    /// Worker threads (default: RFM_WORKERS, else available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Print progress to stderr.
    #[arg(long)]
    progress: bool,
}

#[derive(Args, Debug)]
struct SummarizeArgs {
    /// Records CSV written by `run`.
    #[arg(long)]
    records: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// Summary CSV written by `summarize`.
    #[arg(long)]
    summary: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Linear instead of logarithmic y axis.
    #[arg(long)]
    linear_y: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Criteria 1 and 2; with --records, checks that file instead of running.
    Shape,
    /// Criterion 3.
    Robustness,
    /// Criteria 4, 5 and 8.
    Properties,
    /// Criteria 6 and 7.
    Numerics,
    /// Criterion 9.
    NoiseFloor,
    /// Criterion 10.
    Determinism,
    All,
}

impl Suite {
    fn criteria(&self) -> &'static [u8] {
        match self {
            Suite::Shape => &[1, 2],
            Suite::Robustness => &[3],
            Suite::Properties => &[4, 5, 8],
            Suite::Numerics => &[6, 7],
            Suite::NoiseFloor => &[9],
            Suite::Determinism => &[10],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Existing records CSV to shape-check (shape suite only).
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    progress: bool,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_run(a: &RunArgs) -> Result<i32> {
    let preset = Preset::from(a.experiment);
    let overrides = Overrides {
        n: a.n,
        reps: a.reps,
        master_seed: a.seed,
        sigma: a.sigma,
        target: a.target.map(Into::into),
        bandwidth: a.bandwidth,
        ridge: a.ridge,
        iterations: a.iterations,
        d_step_fine: a.d_step_fine,
        d_step_coarse: a.d_step_coarse,
    };
    let specs = preset.specs(&overrides)?;
    let options = RunOptions {
        workers: a.workers,
        metric_checks: MetricChecks::Off,
        progress: a.progress,
    };
    let mut records = Vec::new();
    for spec in &specs {
        records.extend(run_experiment_with(spec, &options)?.records);
    }
    create_dir(&a.out_dir)?;
    let path = a.out_dir.join("records.csv");
    write_records_file(&path, &records)?;
    run_metadata(Some(preset), &specs).write_file(&sidecar_path(&path))?;
    println!("wrote {} records to {}", records.len(), path.display());
    Ok(EXIT_OK)
}

/// Seed shared by every record, if there is exactly one.
fn common_seed<I: IntoIterator<Item = u64>>(seeds: I) -> Option<u64> {
    let mut it = seeds.into_iter();
    let first = it.next()?;
    it.all(|s| s == first).then_some(first)
}

fn cmd_summarize(a: &SummarizeArgs) -> Result<i32> {
    let records = read_records_file(&a.records)?;
    let rows = summarize_all(&records)?;
    create_dir(&a.out_dir)?;
    let path = a.out_dir.join("summary.csv");
    write_summary_file(&path, &rows)?;
    let mut meta = Metadata::new();
    if let Some(seed) = common_seed(records.iter().map(|r| r.seed)) {
        meta.set("master_seed", seed);
    }
    meta.set("source", a.records.file_name().map_or(String::new(), |f| f.to_string_lossy().into_owned()));
    meta.set("ci", "normal approximation, mean +- 1.96 * sem");
    meta.set("std", "sample standard deviation (n_reps - 1)");
    meta.write_file(&sidecar_path(&path))?;
    println!("wrote {} summary rows to {}", rows.len(), path.display());
    Ok(EXIT_OK)
}

fn cmd_plot(a: &PlotArgs) -> Result<i32> {
    let rows = read_summary_file(&a.summary)?;
    let side = sidecar_path(&a.summary);
    let mut meta = if side.exists() { Metadata::read_file(&side)? } else { Metadata::new() };
    meta.set("tool_version", crate::report::TOOL_VERSION);
    let options = PlotOptions {
        log_y: !a.linear_y,
        ..PlotOptions::default()
    };
    create_dir(&a.out_dir)?;
    let mut written = 0;
    for exp in experiments(&rows) {
        for split in [SplitKind::Train, SplitKind::Test] {
            if !rows.iter().any(|r| r.experiment == exp && r.split == split) {
                continue;
            }
            let svg = render_svg(&rows, &exp, split, &options, &meta)?;
            fs::write(a.out_dir.join(format!("{exp}_{}.svg", split.as_str())), svg)?;
            written += 1;
        }
    }
    println!("wrote {written} plots to {}", a.out_dir.display());
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    if let Some(path) = &a.records {
        if a.suite != Suite::Shape {
            return Err(RfmError::Precondition("--records only applies to --suite shape".into()));
        }
        return verify_records_file(path);
    }
    let workers = a.workers.unwrap_or_else(crate::sweep::default_workers);
    let mut acc = Acceptance::new(AcceptanceConfig {
        reps: a.reps,
        master_seed: a.seed,
        workers,
        repeat_workers: workers + 2,
        progress: a.progress,
    });
    let mut all = true;
    for &id in a.suite.criteria() {
        let out = acc.criterion(id)?;
        all &= out.pass;
        println!("{out}");
    }
    Ok(if all { EXIT_OK } else { EXIT_VERIFY })
}

fn verify_records_file(path: &Path) -> Result<i32> {
    let records = read_records_file(path)?;
    let mut all = true;
    for exp in {
        let mut e: Vec<&str> = records.iter().map(|r| r.experiment.as_str()).collect();
        e.sort_unstable();
        e.dedup();
        e
    } {
        let recs: Vec<_> = records.iter().filter(|r| r.experiment == exp).cloned().collect();
        let n = recs[0].n;
        let rows = crate::sweep::summarize(&recs)?;
        for (model, windows, tail) in [(ModelKind::Rfm, RFM_WINDOWS, true), (ModelKind::Baseline, BASELINE_WINDOWS, false)] {
            let r = check_shape(&rows, n, model, windows, tail)?;
            all &= r.pass;
            println!("{exp}: {} {r}", if r.pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_VERIFY })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Summarize(a) => cmd_summarize(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                RfmError::Precondition(_) | RfmError::Parse(_) => EXIT_USAGE,
                _ => EXIT_RUNTIME,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors() {
        assert_eq!(run_cli(["rfm-sweep", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run_cli(["rfm-sweep", "run", "--bogus"]), EXIT_USAGE);
        assert_eq!(run_cli(["rfm-sweep", "run", "--experiment", "sizes"]), EXIT_USAGE);
        assert_eq!(run_cli(["rfm-sweep", "--help"]), EXIT_OK);
    }

    #[test]
    fn bad_overrides_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(run_cli(["rfm-sweep", "run", "--n", "40", "--reps", "1", "--out-dir", out]), EXIT_USAGE);
        assert_eq!(run_cli(["rfm-sweep", "run", "--ridge", "-1", "--out-dir", out]), EXIT_USAGE);
        assert_eq!(run_cli(["rfm-sweep", "run", "--reps", "0", "--out-dir", out]), EXIT_USAGE);
    }

    #[test]
    fn missing_input_is_runtime_error() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.csv");
        assert_eq!(
            run_cli(["rfm-sweep", "summarize", "--records", missing.to_str().unwrap()]),
            EXIT_RUNTIME
        );
    }

    #[test]
    fn seeds() {
        assert_eq!(common_seed([3, 3, 3]), Some(3));
        assert_eq!(common_seed([3, 4]), None);
        assert_eq!(common_seed([]), None);
    }
}
