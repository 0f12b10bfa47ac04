//! A small feature-scaling sweep: mean test MSE of the baseline and the RFM
//! as the number of features grows past the sample size, with the smoothed
//! curve's extrema.
//!
//!     cargo run --release --example feature_sweep [n] [reps]

use rfm::presets::{Overrides, Preset};
use rfm::sweep::*;

fn main() -> rfm::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(200);
    let reps = args.next().unwrap_or(3);
    let o = Overrides {
        n: Some(n),
        reps: Some(reps),
        d_step_fine: Some(5),
        d_step_coarse: Some(20),
        ..Overrides::default()
    };
    let spec = Preset::Base.specs(&o)?.remove(0);
    println!("n={n} reps={reps}, {} widths from {} to {}", spec.d_grid.len(), spec.d_grid[0], spec.max_d());

    let out = run_experiment_with(&spec, &RunOptions { progress: true, ..RunOptions::default() })?;
    let summary = summarize(&out.records)?;
    let base = mean_curve(&summary, ModelKind::Baseline, SplitKind::Test);
    let rfm = mean_curve(&summary, ModelKind::Rfm, SplitKind::Test);
    println!("{:>6} {:>12} {:>12}", "d", "baseline", "rfm");
    for (b, r) in base.iter().zip(&rfm) {
        println!("{:>6} {:>12.4e} {:>12.4e}", b.0, b.1, r.1);
    }
    for (label, curve) in [("baseline", &base), ("rfm", &rfm)] {
        let ext: Vec<String> = detect_inflections(curve, DEFAULT_SMOOTHING_WINDOW)?
            .iter()
            .map(|e| format!("{}@{}", e.kind, e.d))
            .collect();
        println!("{label} extrema: {}", ext.join(" "));
    }
    println!("worst solve residual: {:.2e}", out.diagnostics.max_residual);
    Ok(())
}
