//! Recursive feature machine training.
//!
//! Each round fits kernel ridge regression under the current metric `M` (starting
//! from `I`), scores it on a held-out validation slice, and replaces `M` with the
//! average gradient outer product (AGOP) of the fitted predictor over the
//! sub-training rows:
//!
//! ```text
//! M ← (1/m) Σᵢ ∇f(xᵢ) ∇f(xᵢ)ᵀ
//! ```
//!
//! The metric with the lowest validation MSE is kept and α is refit on every
//! training row.
//!
//! The loop never forms `M` densely. With `M = FᵀF` and coordinates `Y = X Fᵀ`,
//! the gradient matrix is `G = −(1/L) Ũ F` where `Ũ` is built from `Y` alone,
//! so the next factor is `B F` with `B = −Ũ/(L√m)` (or the `R` of a QR of `Ũ`
//! scaled the same way when that is smaller). Coordinates update as `Y ← Y Bᵀ`, and
//! each round costs `O(n²r)` with `r = min(m, d)` regardless of the input width.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::seq::SliceRandom;

use crate::error::{Result, RfmError};
use crate::kernel::{
    self, DesignMatrix, DualCoefficients, KernelHyperparams, Metric, MetricMatrix,
};
use crate::linalg;
use crate::seed::SeedStream;

/// Settings of one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub iterations: usize,
    pub val_fraction: f64,
    pub hyperparams: KernelHyperparams,
    /// Lets the starting identity metric compete in model selection.
    pub include_iteration_zero: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 10,
            val_fraction: 0.2,
            hyperparams: KernelHyperparams::default(),
            include_iteration_zero: true,
        }
    }
}

impl TrainConfig {
    /// The 0-iteration configuration, i.e. the plain Laplace kernel machine.
    pub fn baseline(hyperparams: KernelHyperparams) -> Self {
        Self {
            iterations: 0,
            hyperparams,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(RfmError::Precondition(format!(
                "val_fraction must lie in (0, 1), got {}",
                self.val_fraction
            )));
        }
        if self.iterations == 0 && !self.include_iteration_zero {
            return Err(RfmError::Precondition(
                "no eligible candidate: 0 iterations with iteration zero excluded".into(),
            ));
        }
        self.hyperparams.validate()
    }
}

/// A frozen kernel predictor.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    x_train: DesignMatrix,
    alpha: DualCoefficients,
    metric: Metric,
    hyperparams: KernelHyperparams,
    best_iter: usize,
    val_mse_history: Vec<f64>,
    /// Training rows mapped through the metric factor, when it has one.
    train_coords: Option<Array2<f64>>,
}

impl TrainedModel {
    pub fn x_train(&self) -> &DesignMatrix {
        &self.x_train
    }

    pub fn alpha(&self) -> &DualCoefficients {
        &self.alpha
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// Dense form of the selected metric.
    pub fn metric_matrix(&self) -> MetricMatrix {
        self.metric.to_matrix()
    }

    pub fn hyperparams(&self) -> &KernelHyperparams {
        &self.hyperparams
    }

    /// Candidate index whose metric was kept (0 = identity).
    pub fn best_iter(&self) -> usize {
        self.best_iter
    }

    /// Validation MSE of candidates `0..=iterations`; empty for a model fit
    /// without a validation split.
    pub fn val_mse_history(&self) -> &[f64] {
        &self.val_mse_history
    }

    pub fn feature_dim(&self) -> usize {
        self.x_train.cols()
    }

    pub fn predict(&self, x_eval: &DesignMatrix) -> Result<Array1<f64>> {
        predict(x_eval, self)
    }

    /// Predictions on the training rows themselves.
    pub fn predict_train(&self) -> Array1<f64> {
        match &self.train_coords {
            Some(c) => {
                let dist = coords_self_distances(c.view());
                let k = kernel::laplace_from_distances(&dist, self.hyperparams.bandwidth);
                k.dot(&self.alpha.view())
            }
            None => predict(&self.x_train, self).expect("training rows match the model"),
        }
    }
}

/// `ŷ = K_M(X_eval, X_train) α`.
pub fn predict(x_eval: &DesignMatrix, model: &TrainedModel) -> Result<Array1<f64>> {
    if x_eval.cols() != model.feature_dim() {
        return Err(RfmError::Dimension(format!(
            "model expects {} features, got {}",
            model.feature_dim(),
            x_eval.cols()
        )));
    }
    match (&model.train_coords, model.metric.embed(x_eval.view())) {
        (Some(tc), Some(ec)) => {
            let mut sq = kernel::euclidean_sq(ec.view(), tc.view());
            let ne: Vec<f64> = ec.rows().into_iter().map(|r| r.dot(&r)).collect();
            let nt: Vec<f64> = tc.rows().into_iter().map(|r| r.dot(&r)).collect();
            kernel::sqrt_distances(&mut sq, ec.view(), tc.view(), &ne, &nt);
            let k = kernel::laplace_from_distances(&sq, model.hyperparams.bandwidth);
            Ok(k.dot(&model.alpha.view()))
        }
        _ => kernel::kernel_predict(
            x_eval,
            &model.x_train,
            &model.alpha,
            &model.metric,
            model.hyperparams.bandwidth,
        ),
    }
}

/// `M = (1/m) GᵀG` for an `m × d` gradient matrix.
pub fn agop(gradients: ArrayView2<'_, f64>) -> Result<MetricMatrix> {
    let m = gradients.nrows();
    if m == 0 || gradients.ncols() == 0 {
        return Err(RfmError::Precondition("AGOP of an empty gradient matrix".into()));
    }
    if gradients.iter().any(|v| !v.is_finite()) {
        return Err(RfmError::NonFinite("gradient matrix".into()));
    }
    let mut g = linalg::gram_tn(gradients);
    g.mapv_inplace(|v| v / m as f64);
    Ok(MetricMatrix::from_symmetric_unchecked(g))
}

/// Mean squared error.
pub fn mse(predictions: ArrayView1<'_, f64>, targets: ArrayView1<'_, f64>) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(RfmError::Dimension(format!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if targets.is_empty() {
        return Err(RfmError::Precondition("MSE of empty vectors".into()));
    }
    let s: f64 = predictions
        .iter()
        .zip(targets.iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(s / targets.len() as f64)
}

/// Which solve a residual report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStage {
    Candidate(usize),
    Refit,
}

/// A metric produced by an AGOP update, handed to observers without being
/// materialized. `factor()` costs `O(r²d)`, `gram()` only `O(r³)`.
pub struct CandidateMetric<'a> {
    base: &'a Array2<f64>,
    mix: Option<&'a Array2<f64>>,
    base_gram: &'a std::cell::OnceCell<Array2<f64>>,
}

impl CandidateMetric<'_> {
    pub fn dim(&self) -> usize {
        self.base.ncols()
    }

    pub fn rank_bound(&self) -> usize {
        self.mix.map_or(self.base.nrows(), |p| p.nrows())
    }

    /// The factor `F` with `M = FᵀF`.
    pub fn factor(&self) -> Array2<f64> {
        match self.mix {
            Some(p) => linalg::matmul(p.view(), self.base.view()),
            None => self.base.clone(),
        }
    }

    pub fn to_metric(&self) -> Metric {
        Metric::Factored(self.factor())
    }

    /// `F Fᵀ`, whose nonzero spectrum equals that of `M`.
    pub fn gram(&self) -> Array2<f64> {
        let s = self.base_gram.get_or_init(|| linalg::gram_nt(self.base.view()));
        match self.mix {
            Some(p) => {
                let ps = linalg::matmul(p.view(), s.view());
                let mut g = linalg::matmul_nt(ps.view(), p.view());
                linalg::mirror_upper(&mut g);
                g
            }
            None => s.clone(),
        }
    }
}

/// Hooks into the training loop, used by diagnostics.
pub trait TrainObserver {
    fn on_solve(&mut self, _stage: SolveStage, _residual: f64) {}
    /// Called with the metric that becomes candidate `iteration`.
    fn on_metric(&mut self, _iteration: usize, _metric: &CandidateMetric<'_>) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl TrainObserver for NoObserver {}

/// Distances among one set of coordinates: exact zero diagonal, exactly symmetric.
fn coords_self_distances(y: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut sq = kernel::euclidean_sq(y, y);
    let n = sq.nrows();
    for i in 0..n {
        sq[[i, i]] = 0.0;
        for j in 0..i {
            sq[[i, j]] = sq[[j, i]];
        }
    }
    let norms: Vec<f64> = y.rows().into_iter().map(|r| r.dot(&r)).collect();
    kernel::sqrt_distances(&mut sq, y, y, &norms, &norms);
    sq
}

fn coords_cross_distances(y: ArrayView2<'_, f64>, w: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut sq = kernel::euclidean_sq(y, w);
    let ny: Vec<f64> = y.rows().into_iter().map(|r| r.dot(&r)).collect();
    let nw: Vec<f64> = w.rows().into_iter().map(|r| r.dot(&r)).collect();
    kernel::sqrt_distances(&mut sq, y, w, &ny, &nw);
    sq
}

struct Fit {
    dist: Array2<f64>,
    kern: Array2<f64>,
    alpha: DualCoefficients,
}

fn fit_coords(
    coords: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    hyper: &KernelHyperparams,
    stage: SolveStage,
    observer: &mut dyn TrainObserver,
) -> Result<Fit> {
    let dist = coords_self_distances(coords);
    let kern = kernel::laplace_from_distances(&dist, hyper.bandwidth);
    let alpha = kernel::solve_kernel_ridge(kern.view(), y, hyper.ridge)?;
    observer.on_solve(stage, kernel::ridge_residual(kern.view(), y, hyper.ridge, &alpha));
    Ok(Fit { dist, kern, alpha })
}

fn check_training_inputs(x: &DesignMatrix, y: ArrayView1<'_, f64>) -> Result<()> {
    if x.rows() != y.len() {
        return Err(RfmError::Dimension(format!(
            "{} rows but {} targets",
            x.rows(),
            y.len()
        )));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(RfmError::NonFinite(format!("target {i}")));
    }
    Ok(())
}

/// Kernel ridge regression with the identity metric on every row of `x`.
pub fn fit_baseline(
    x: &DesignMatrix,
    y: ArrayView1<'_, f64>,
    hyper: &KernelHyperparams,
) -> Result<TrainedModel> {
    check_training_inputs(x, y)?;
    hyper.validate()?;
    let fit = fit_coords(x.view(), y, hyper, SolveStage::Refit, &mut NoObserver)?;
    Ok(TrainedModel {
        x_train: x.clone(),
        alpha: fit.alpha,
        metric: Metric::identity(x.cols()),
        hyperparams: *hyper,
        best_iter: 0,
        val_mse_history: Vec::new(),
        train_coords: Some(x.view().to_owned()),
    })
}

/// Sizes of the sub-training and validation parts.
pub fn validation_split_sizes(n: usize, val_fraction: f64) -> (usize, usize) {
    let n_val = ((val_fraction * n as f64) - 1e-9).ceil().max(0.0) as usize;
    (n.saturating_sub(n_val), n_val)
}

pub fn train_rfm(
    x: &DesignMatrix,
    y: ArrayView1<'_, f64>,
    config: &TrainConfig,
    stream: &SeedStream,
) -> Result<TrainedModel> {
    train_rfm_observed(x, y, config, stream, &mut NoObserver)
}

/// Where the current metric lives: identity, or `F = P · A` with `A` the first
/// AGOP factor and `P` the product of later updates.
#[derive(Clone)]
struct FactorState {
    base: Option<Array2<f64>>,
    mix: Option<Array2<f64>>,
}

impl FactorState {
    fn materialize(&self, dim: usize) -> Metric {
        match (&self.base, &self.mix) {
            (None, _) => Metric::identity(dim),
            (Some(a), None) => Metric::Factored(a.clone()),
            (Some(a), Some(p)) => Metric::Factored(linalg::matmul(p.view(), a.view())),
        }
    }
}

/// [`train_rfm`] with an observer that sees every solve and metric update.
pub fn train_rfm_observed(
    x: &DesignMatrix,
    y: ArrayView1<'_, f64>,
    config: &TrainConfig,
    stream: &SeedStream,
    observer: &mut dyn TrainObserver,
) -> Result<TrainedModel> {
    check_training_inputs(x, y)?;
    config.validate()?;
    let n = x.rows();
    if n < 5 {
        return Err(RfmError::Precondition(format!(
            "need at least 5 training rows, got {n}"
        )));
    }
    let (n_sub, n_val) = validation_split_sizes(n, config.val_fraction);
    if n_sub == 0 || n_val == 0 {
        return Err(RfmError::Precondition(format!(
            "degenerate validation split: {n_sub} sub-training / {n_val} validation rows"
        )));
    }
    let hyper = config.hyperparams;

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut stream.rng());
    let mut inverse = vec![0usize; n];
    for (pos, &row) in perm.iter().enumerate() {
        inverse[row] = pos;
    }
    let xp = x.select_rows(&perm);
    let yp: Array1<f64> = perm.iter().map(|&i| y[i]).collect();
    let y_sub = yp.slice(ndarray::s![..n_sub]);
    let y_val = yp.slice(ndarray::s![n_sub..]);

    let scale = -1.0 / (hyper.bandwidth * (n_sub as f64).sqrt());
    let mut state = FactorState { base: None, mix: None };
    let base_gram = std::cell::OnceCell::new();
    let mut coords: Array2<f64> = xp.view().to_owned();
    let mut history = Vec::with_capacity(config.iterations + 1);
    let mut best: Option<(usize, f64, FactorState, Array2<f64>)> = None;

    for t in 0..=config.iterations {
        let sub = coords.slice(ndarray::s![..n_sub, ..]);
        let val = coords.slice(ndarray::s![n_sub.., ..]);
        let fit = fit_coords(sub, y_sub, &hyper, SolveStage::Candidate(t), observer)
            .map_err(|e| e.at_iteration(t))?;
        let k_val = kernel::laplace_from_distances(&coords_cross_distances(val, sub), hyper.bandwidth);
        let val_mse = mse(k_val.dot(&fit.alpha.view()).view(), y_val)?;
        if !val_mse.is_finite() {
            return Err(RfmError::Numerical(format!("validation MSE is {val_mse}")).at_iteration(t));
        }
        history.push(val_mse);
        let eligible = t > 0 || config.include_iteration_zero;
        if eligible && best.as_ref().is_none_or(|b| val_mse < b.1) {
            best = Some((t, val_mse, state.clone(), coords.clone()));
        }
        if t == config.iterations {
            break;
        }

        let c = kernel::gradient_weights(&fit.dist, &fit.kern, fit.alpha.view(), hyper.dist_floor);
        let u = kernel::weighted_differences(&c, sub, sub);
        if u.iter().any(|v| !v.is_finite()) {
            return Err(RfmError::Numerical("non-finite predictor gradients".into()).at_iteration(t));
        }
        let mut step = if n_sub <= u.ncols() { u } else { linalg::qr_r(u.view()) };
        step.mapv_inplace(|v| v * scale);
        coords = linalg::matmul_nt(coords.view(), step.view());
        state = match state {
            FactorState { base: None, .. } => FactorState { base: Some(step), mix: None },
            FactorState { base: Some(a), mix: None } => FactorState { base: Some(a), mix: Some(step) },
            FactorState { base: Some(a), mix: Some(p) } => FactorState {
                base: Some(a),
                mix: Some(linalg::matmul(step.view(), p.view())),
            },
        };
        let view = CandidateMetric {
            base: state.base.as_ref().expect("set above"),
            mix: state.mix.as_ref(),
            base_gram: &base_gram,
        };
        observer.on_metric(t + 1, &view);
    }

    let (best_iter, _, best_state, best_coords) = best.expect("at least one eligible candidate");
    let metric = best_state.materialize(x.cols());
    let train_coords = best_coords.select(ndarray::Axis(0), &inverse);
    let fit = fit_coords(train_coords.view(), y, &hyper, SolveStage::Refit, observer)?;
    Ok(TrainedModel {
        x_train: x.clone(),
        alpha: fit.alpha,
        metric,
        hyperparams: hyper,
        best_iter,
        val_mse_history: history,
        train_coords: Some(train_coords),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn agop_rank_one_and_zero() {
        let m = agop(array![[1.0, 2.0]].view()).unwrap();
        assert_eq!(m.view(), array![[1.0, 2.0], [2.0, 4.0]].view());
        let z = agop(Array2::zeros((3, 2)).view()).unwrap();
        assert!(z.view().iter().all(|&v| v == 0.0));
        assert!(agop(Array2::zeros((0, 2)).view()).is_err());
    }

    #[test]
    fn mse_cases() {
        let a = array![1.0, 2.0, 3.0];
        assert_eq!(mse(a.view(), a.view()).unwrap(), 0.0);
        let b = &a + 1.0;
        assert_eq!(mse(b.view(), a.view()).unwrap(), 1.0);
        assert!(mse(a.view(), array![1.0].view()).is_err());
        assert!(mse(Array1::zeros(0).view(), Array1::zeros(0).view()).is_err());
    }

    #[test]
    fn split_sizes() {
        assert_eq!(validation_split_sizes(800, 0.2), (640, 160));
        assert_eq!(validation_split_sizes(10, 0.2), (8, 2));
        assert_eq!(validation_split_sizes(5, 0.2), (4, 1));
    }

    #[test]
    fn rejects_small_or_mismatched_input() {
        let x = DesignMatrix::new(Array2::from_shape_fn((4, 2), |(i, j)| (i + j) as f64)).unwrap();
        let y = Array1::zeros(4);
        let s = SeedStream::from_master(1);
        assert!(matches!(
            train_rfm(&x, y.view(), &TrainConfig::default(), &s),
            Err(RfmError::Precondition(_))
        ));
        assert!(matches!(
            train_rfm(&x, Array1::zeros(3).view(), &TrainConfig::default(), &s),
            Err(RfmError::Dimension(_))
        ));
    }

    #[test]
    fn single_training_point_predicts_its_coefficient() {
        let x = DesignMatrix::new(array![[0.5, -1.0]]).unwrap();
        let model = TrainedModel {
            x_train: x.clone(),
            alpha: DualCoefficients::new(array![2.5]).unwrap(),
            metric: Metric::identity(2),
            hyperparams: KernelHyperparams::default(),
            best_iter: 0,
            val_mse_history: vec![],
            train_coords: Some(x.view().to_owned()),
        };
        assert_eq!(model.predict(&x).unwrap()[0], 2.5);
        assert_eq!(model.predict_train()[0], 2.5);
    }
}
