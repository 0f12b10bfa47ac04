//! Laplace kernel ridge regression under a Mahalanobis metric: distances,
//! the ridge solve, predictions and analytic input gradients.
//!
//!     cargo run --release --example kernel_basics

use ndarray::array;
use rfm::kernel::*;

fn main() -> rfm::Result<()> {
    let x = DesignMatrix::new(array![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.2]])?;
    let y = array![0.0, 1.0, 0.0, 1.0, 0.5];

    // only the first coordinate matters to this metric
    let m = Metric::Dense(MetricMatrix::new(array![[1.0, 0.0], [0.0, 0.01]])?);
    println!("distances under M:\n{:.3}", mahalanobis_distances(&x, &x, &m)?);

    let hp = KernelHyperparams { bandwidth: 1.0, ridge: 1e-3, ..KernelHyperparams::default() };
    let k = laplace_kernel(&x, &x, &m, hp.bandwidth)?;
    let alpha = solve_kernel_ridge(k.view(), y.view(), hp.ridge)?;
    println!("relative residual: {:.2e}", ridge_residual(k.view(), y.view(), hp.ridge, &alpha));

    let probe = DesignMatrix::new(array![[0.2, 0.9], [0.8, 0.1], [0.3, 0.3]])?;
    let pred = kernel_predict(&probe, &x, &alpha, &m, hp.bandwidth)?;
    let grad = predictor_gradients(&probe, &x, &alpha, &m, &hp)?;
    for i in 0..probe.rows() {
        println!("f({}) = {:.4}  ∇f = {:.4}", probe.row(i), pred[i], grad.row(i));
    }

    // the same model in factored form, M = FᵀF
    let f = Metric::Factored(array![[1.0, 0.0], [0.0, 0.1]]);
    let pf = kernel_predict(&probe, &x, &alpha, &f, hp.bandwidth)?;
    println!("factored vs dense max gap: {:.1e}", (&pf - &pred).mapv(f64::abs).fold(0.0, |a: f64, &b| a.max(b)));
    Ok(())
}
