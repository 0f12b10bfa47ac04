//! Trains an RFM on the cubic target and compares it with plain kernel ridge
//! regression, then shows that the learned metric concentrates on the three
//! relevant coordinates.
//!
//!     cargo run --release --example train_rfm [n] [d]

use rfm::data::{eval_target, gen_design, slice_and_scale, TargetSpec};
use rfm::kernel::KernelHyperparams;
use rfm::rfm::{fit_baseline, mse, train_rfm, TrainConfig};
use rfm::seed::SeedStream;

fn main() -> rfm::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(600);
    let d = args.next().unwrap_or(40);

    let s = SeedStream::from_master(3);
    let all = slice_and_scale(&gen_design(n + 400, d, &s.child("design"))?, d)?;
    let y_all = eval_target(&all, &TargetSpec::Cubic)?;
    let train: Vec<usize> = (0..n).collect();
    let test: Vec<usize> = (n..n + 400).collect();
    let (x, xt) = (all.select_rows(&train), all.select_rows(&test));
    let y = y_all.select(ndarray::Axis(0), &train);
    let yt = y_all.select(ndarray::Axis(0), &test);

    let base = fit_baseline(&x, y.view(), &KernelHyperparams::default())?;
    let model = train_rfm(&x, y.view(), &TrainConfig::default(), &s.child("train"))?;
    println!("n={n} d={d}");
    println!("baseline test mse: {:.4e}", mse(base.predict(&xt)?.view(), yt.view())?);
    println!("rfm      test mse: {:.4e}", mse(model.predict(&xt)?.view(), yt.view())?);
    println!("validation history:");
    for (t, v) in model.val_mse_history().iter().enumerate() {
        let mark = if t == model.best_iter() { "  <- selected" } else { "" };
        println!("  t={t:>2}  {v:.4e}{mark}");
    }

    let m = model.metric_matrix();
    let diag: Vec<f64> = (0..d).map(|i| m.view()[[i, i]]).collect();
    let total: f64 = diag.iter().sum();
    if total > 0.0 {
        println!("share of trace on x1..x3: {:.3}", diag[..3].iter().sum::<f64>() / total);
    }
    let spec = m.spectrum()?;
    println!("metric eigenvalues in [{:.3e}, {:.3e}]", spec.min, spec.max);
    Ok(())
}
