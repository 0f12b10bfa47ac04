//! Mahalanobis Laplace kernels and the kernel ridge solve.
//!
//! Distances are `‖x − z‖_M = √((x − z)ᵀ M (x − z))` and the kernel is
//! `K(x, z) = exp(−‖x − z‖_M / L)`. A metric can be held densely, as the
//! identity, or as a factor `F` with `M = FᵀF`; the factored form maps points to
//! `F x`, where metric distances become plain Euclidean distances.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};

use crate::error::{Result, RfmError};
use crate::linalg;

/// Relative tolerance for the symmetry invariant of [`MetricMatrix`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Smallest eigenvalue allowed, relative to the largest, for a metric to count as PSD.
pub const PSD_REL_TOL: f64 = 1e-10;

/// An `n × d` matrix of finite features, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    values: Array2<f64>,
}

impl DesignMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows == 0 || cols == 0 {
            return Err(RfmError::Precondition(format!(
                "design matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(RfmError::NonFinite(format!(
                "design matrix entry ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self {
            values: values.as_standard_layout().into_owned(),
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        let arr = Array2::from_shape_vec((rows, cols), values)
            .map_err(|e| RfmError::Dimension(e.to_string()))?;
        Self::new(arr)
    }

    pub(crate) fn from_array_unchecked(values: Array2<f64>) -> Self {
        Self { values }
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> DesignMatrix {
        Self {
            values: self.values.select(Axis(0), indices),
        }
    }
}

/// A dense symmetric positive-semidefinite `d × d` metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    values: Array2<f64>,
}

/// Extreme eigenvalues of a metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub min: f64,
    pub max: f64,
}

impl Spectrum {
    /// `min ≥ −rel_tol · max`.
    pub fn is_psd(&self, rel_tol: f64) -> bool {
        self.min >= -rel_tol * self.max.max(0.0)
    }
}

impl MetricMatrix {
    pub fn identity(dim: usize) -> Self {
        Self {
            values: Array2::eye(dim),
        }
    }

    /// Validates squareness, finiteness, symmetry and positive semidefiniteness.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c || r == 0 {
            return Err(RfmError::Dimension(format!(
                "metric must be square and non-empty, got {r}x{c}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RfmError::NonFinite("metric matrix".into()));
        }
        let m = Self {
            values: values.as_standard_layout().into_owned(),
        };
        let asym = m.max_asymmetry();
        if asym > SYMMETRY_TOL {
            return Err(RfmError::Precondition(format!(
                "metric is not symmetric (relative asymmetry {asym:e})"
            )));
        }
        let spec = m.spectrum()?;
        if !spec.is_psd(PSD_REL_TOL) {
            return Err(RfmError::Precondition(format!(
                "metric is not positive semidefinite (eigenvalues {:e} .. {:e})",
                spec.min, spec.max
            )));
        }
        Ok(m)
    }

    pub(crate) fn from_symmetric_unchecked(values: Array2<f64>) -> Self {
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }

    /// `max |M[i][j] − M[j][i]| / max(1, |M[i][j]|)` over all pairs.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                let a = self.values[[i, j]];
                let b = self.values[[j, i]];
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
        worst
    }

    pub fn is_symmetric(&self) -> bool {
        self.max_asymmetry() <= SYMMETRY_TOL
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        let ev = linalg::symmetric_eigenvalues(self.values.view())?;
        Ok(Spectrum {
            min: ev[0],
            max: ev[ev.len() - 1],
        })
    }

    /// `c · M`.
    pub fn scaled(&self, c: f64) -> MetricMatrix {
        Self {
            values: &self.values * c,
        }
    }
}

/// A metric in whichever representation is cheapest to apply.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Identity(usize),
    Dense(MetricMatrix),
    /// `M = FᵀF` with `F` stored as an `r × d` matrix.
    Factored(Array2<f64>),
}

impl Metric {
    pub fn identity(dim: usize) -> Self {
        Metric::Identity(dim)
    }

    pub fn dim(&self) -> usize {
        match self {
            Metric::Identity(d) => *d,
            Metric::Dense(m) => m.dim(),
            Metric::Factored(f) => f.ncols(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Metric::Identity(_))
    }

    /// Dense `d × d` form.
    pub fn to_matrix(&self) -> MetricMatrix {
        match self {
            Metric::Identity(d) => MetricMatrix::identity(*d),
            Metric::Dense(m) => m.clone(),
            Metric::Factored(f) => MetricMatrix::from_symmetric_unchecked(linalg::gram_tn(f.view())),
        }
    }

    /// Maps rows of `x` to coordinates where metric distance is Euclidean.
    /// Returns `None` for dense metrics, which have no factor at hand.
    pub(crate) fn embed(&self, x: ArrayView2<'_, f64>) -> Option<Array2<f64>> {
        match self {
            Metric::Identity(_) => Some(x.to_owned()),
            Metric::Factored(f) => Some(linalg::matmul_nt(x, f.view())),
            Metric::Dense(_) => None,
        }
    }
}

impl From<MetricMatrix> for Metric {
    fn from(m: MetricMatrix) -> Self {
        Metric::Dense(m)
    }
}

/// Bandwidth `L`, ridge `λ` and the gradient distance floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelHyperparams {
    pub bandwidth: f64,
    pub ridge: f64,
    pub dist_floor: f64,
}

impl Default for KernelHyperparams {
    fn default() -> Self {
        Self {
            bandwidth: 1.0,
            ridge: 1e-3,
            dist_floor: 1e-10,
        }
    }
}

impl KernelHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(RfmError::Precondition(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            )));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(RfmError::Precondition(format!(
                "ridge must be non-negative, got {}",
                self.ridge
            )));
        }
        if !(self.dist_floor > 0.0 && self.dist_floor <= 1e-6) {
            return Err(RfmError::Precondition(format!(
                "dist_floor must lie in (0, 1e-6], got {}",
                self.dist_floor
            )));
        }
        Ok(())
    }
}

/// Dual weights `α`, one per training row.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCoefficients {
    values: Array1<f64>,
}

impl DualCoefficients {
    pub fn new(values: Array1<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(RfmError::NonFinite(format!("dual coefficient {i}")));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.values.view()
    }
}

fn check_metric_dims(x: &DesignMatrix, z: &DesignMatrix, metric: &Metric) -> Result<()> {
    if x.cols() != z.cols() || x.cols() != metric.dim() {
        return Err(RfmError::Dimension(format!(
            "feature widths differ: X has {}, Z has {}, metric has {}",
            x.cols(),
            z.cols(),
            metric.dim()
        )));
    }
    Ok(())
}

/// Squared Euclidean distances between rows, from the expansion
/// `‖y‖² + ‖w‖² − 2 y·w`, with negative round-off clamped to zero.
pub(crate) fn euclidean_sq(y: ArrayView2<'_, f64>, w: ArrayView2<'_, f64>) -> Array2<f64> {
    let ny: Array1<f64> = y.rows().into_iter().map(|r| r.dot(&r)).collect();
    let nw: Array1<f64> = w.rows().into_iter().map(|r| r.dot(&r)).collect();
    let mut sq = linalg::matmul_nt(y, w);
    Zip::indexed(&mut sq).for_each(|(i, j), v| {
        *v = (ny[i] + nw[j] - 2.0 * *v).max(0.0);
    });
    sq
}

/// Takes square roots in place; pairs of bitwise-identical input rows get an
/// exact zero, which the Gram expansion alone cannot deliver.
pub(crate) fn sqrt_distances(
    sq: &mut Array2<f64>,
    x: ArrayView2<'_, f64>,
    z: ArrayView2<'_, f64>,
    scale_x: &[f64],
    scale_z: &[f64],
) {
    Zip::indexed(sq).for_each(|(i, j), v| {
        if *v <= 1e-12 * (scale_x[i] + scale_z[j]) && x.row(i) == z.row(j) {
            *v = 0.0;
        } else {
            *v = v.sqrt();
        }
    });
}

fn row_norms_sq(a: ArrayView2<'_, f64>) -> Vec<f64> {
    a.rows().into_iter().map(|r| r.dot(&r)).collect()
}

pub(crate) fn distances_view(
    x: ArrayView2<'_, f64>,
    z: ArrayView2<'_, f64>,
    metric: &Metric,
) -> Array2<f64> {
    let mut sq = match metric {
        Metric::Dense(m) => {
            let xm = linalg::matmul(x, m.view());
            let zm = linalg::matmul(z, m.view());
            let qx: Vec<f64> = xm.rows().into_iter().zip(x.rows()).map(|(a, b)| a.dot(&b)).collect();
            let qz: Vec<f64> = zm.rows().into_iter().zip(z.rows()).map(|(a, b)| a.dot(&b)).collect();
            let mut cross = linalg::matmul_nt(xm.view(), z);
            Zip::indexed(&mut cross).for_each(|(i, j), v| {
                *v = (qx[i] + qz[j] - 2.0 * *v).max(0.0);
            });
            cross
        }
        _ => {
            let ex = metric.embed(x).expect("factored or identity");
            let ez = metric.embed(z).expect("factored or identity");
            euclidean_sq(ex.view(), ez.view())
        }
    };
    sqrt_distances(&mut sq, x, z, &row_norms_sq(x), &row_norms_sq(z));
    sq
}

/// Pairwise Mahalanobis distances `√((xᵢ − zⱼ)ᵀ M (xᵢ − zⱼ))`, `n × m`.
pub fn mahalanobis_distances(
    x: &DesignMatrix,
    z: &DesignMatrix,
    metric: &Metric,
) -> Result<Array2<f64>> {
    check_metric_dims(x, z, metric)?;
    Ok(distances_view(x.view(), z.view(), metric))
}

pub(crate) fn laplace_from_distances(dist: &Array2<f64>, bandwidth: f64) -> Array2<f64> {
    dist.mapv(|v| (-v / bandwidth).exp())
}

/// Laplace kernel matrix `exp(−‖xᵢ − zⱼ‖_M / L)`.
pub fn laplace_kernel(
    x: &DesignMatrix,
    z: &DesignMatrix,
    metric: &Metric,
    bandwidth: f64,
) -> Result<Array2<f64>> {
    if !(bandwidth > 0.0) {
        return Err(RfmError::Precondition(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    let d = mahalanobis_distances(x, z, metric)?;
    Ok(laplace_from_distances(&d, bandwidth))
}

/// Solves `(K + λI) α = y` with a Cholesky factorization.
pub fn solve_kernel_ridge(
    kernel: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    ridge: f64,
) -> Result<DualCoefficients> {
    let n = kernel.nrows();
    if kernel.ncols() != n {
        return Err(RfmError::Dimension(format!(
            "kernel must be square, got {}x{}",
            n,
            kernel.ncols()
        )));
    }
    if y.len() != n {
        return Err(RfmError::Dimension(format!(
            "kernel has {n} rows but {} targets",
            y.len()
        )));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(RfmError::Precondition(format!("ridge must be non-negative, got {ridge}")));
    }
    if kernel.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(RfmError::NonFinite("kernel system".into()));
    }
    let mut system = kernel.to_owned();
    system.diag_mut().mapv_inplace(|v| v + ridge);
    let alpha = linalg::spd_solve(system.view(), y)?;
    DualCoefficients::new(alpha)
}

/// `‖(K + λI)α − y‖∞ / (1 + ‖y‖∞)`.
pub fn ridge_residual(
    kernel: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    ridge: f64,
    alpha: &DualCoefficients,
) -> f64 {
    let a = alpha.view();
    let ka = kernel.dot(&a);
    let worst = ka
        .iter()
        .zip(a.iter())
        .zip(y.iter())
        .map(|((k, a), y)| (k + ridge * a - y).abs())
        .fold(0.0, f64::max);
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    worst / (1.0 + scale)
}

/// Kernel predictor `ŷ = K_M(X_eval, X_train) α`.
pub fn kernel_predict(
    x_eval: &DesignMatrix,
    x_train: &DesignMatrix,
    alpha: &DualCoefficients,
    metric: &Metric,
    bandwidth: f64,
) -> Result<Array1<f64>> {
    if alpha.len() != x_train.rows() {
        return Err(RfmError::Dimension(format!(
            "{} dual coefficients for {} training rows",
            alpha.len(),
            x_train.rows()
        )));
    }
    let k = laplace_kernel(x_eval, x_train, metric, bandwidth)?;
    Ok(k.dot(&alpha.view()))
}

/// Weights `cᵢⱼ = αⱼ K(xᵢ, xⱼ) / max(dᵢⱼ, floor)`; coincident pairs get zero.
pub(crate) fn gradient_weights(
    dist: &Array2<f64>,
    kern: &Array2<f64>,
    alpha: ArrayView1<'_, f64>,
    dist_floor: f64,
) -> Array2<f64> {
    let mut c = Array2::<f64>::zeros(dist.dim());
    Zip::indexed(&mut c)
        .and(dist)
        .and(kern)
        .for_each(|(_, j), c, &d, &k| {
            *c = if d == 0.0 { 0.0 } else { alpha[j] * k / d.max(dist_floor) };
        });
    c
}

/// Rows `Σⱼ cᵢⱼ (yᵢ − wⱼ)`, computed as `rowsum(C)ᵢ yᵢ − (C W)ᵢ`.
pub(crate) fn weighted_differences(
    c: &Array2<f64>,
    y: ArrayView2<'_, f64>,
    w: ArrayView2<'_, f64>,
) -> Array2<f64> {
    let mut u = linalg::matmul(c.view(), w);
    u.mapv_inplace(|v| -v);
    for (i, mut row) in u.rows_mut().into_iter().enumerate() {
        let s: f64 = c.row(i).sum();
        row.scaled_add(s, &y.row(i));
    }
    u
}

fn check_gradient_rows(g: &Array2<f64>) -> Result<()> {
    for (i, row) in g.rows().into_iter().enumerate() {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(RfmError::Numerical(format!("non-finite gradient in row {i}")));
        }
    }
    Ok(())
}

/// Gradients of `f(x) = Σⱼ αⱼ K_M(x, xⱼ)` at each row of `x_eval`:
///
/// `∇f(x) = −(1/L) Σⱼ αⱼ K(x, xⱼ) M (x − xⱼ) / max(‖x − xⱼ‖_M, floor)`.
///
/// Terms with `x = xⱼ` contribute nothing.
pub fn predictor_gradients(
    x_eval: &DesignMatrix,
    x_train: &DesignMatrix,
    alpha: &DualCoefficients,
    metric: &Metric,
    hyper: &KernelHyperparams,
) -> Result<Array2<f64>> {
    check_metric_dims(x_eval, x_train, metric)?;
    hyper.validate()?;
    if alpha.len() != x_train.rows() {
        return Err(RfmError::Dimension(format!(
            "{} dual coefficients for {} training rows",
            alpha.len(),
            x_train.rows()
        )));
    }
    let dist = distances_view(x_eval.view(), x_train.view(), metric);
    let kern = laplace_from_distances(&dist, hyper.bandwidth);
    let c = gradient_weights(&dist, &kern, alpha.view(), hyper.dist_floor);
    let scale = -1.0 / hyper.bandwidth;
    let mut g = match metric {
        Metric::Identity(_) => weighted_differences(&c, x_eval.view(), x_train.view()),
        Metric::Dense(m) => {
            let u = weighted_differences(&c, x_eval.view(), x_train.view());
            linalg::matmul(u.view(), m.view())
        }
        Metric::Factored(f) => {
            let ye = linalg::matmul_nt(x_eval.view(), f.view());
            let yt = linalg::matmul_nt(x_train.view(), f.view());
            let u = weighted_differences(&c, ye.view(), yt.view());
            linalg::matmul(u.view(), f.view())
        }
    };
    g.mapv_inplace(|v| v * scale);
    check_gradient_rows(&g)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn dm(a: Array2<f64>) -> DesignMatrix {
        DesignMatrix::new(a).unwrap()
    }

    #[test]
    fn euclidean_reduction() {
        let x = dm(array![[3.0, 4.0]]);
        let z = dm(array![[0.0, 0.0]]);
        let d = mahalanobis_distances(&x, &z, &Metric::identity(2)).unwrap();
        assert!((d[[0, 0]] - 5.0).abs() < 1e-12);
        let k = laplace_kernel(&x, &z, &Metric::identity(2), 5.0).unwrap();
        assert!((k[[0, 0]] - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_have_zero_distance() {
        let x = dm(array![[0.3, -1.7, 2.2], [1e8, 3.0, -2.0]]);
        let m = MetricMatrix::new(array![[2.0, 0.5, 0.0], [0.5, 1.0, 0.1], [0.0, 0.1, 3.0]]).unwrap();
        let d = mahalanobis_distances(&x, &x, &Metric::Dense(m)).unwrap();
        assert_eq!(d[[0, 0]], 0.0);
        assert_eq!(d[[1, 1]], 0.0);
        let k = laplace_kernel(&x, &x, &Metric::identity(3), 2.0).unwrap();
        assert_eq!(k[[0, 0]], 1.0);
        assert_eq!(k[[1, 1]], 1.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let x = dm(array![[1.0, 2.0]]);
        let z = dm(array![[1.0, 2.0, 3.0]]);
        assert!(matches!(
            mahalanobis_distances(&x, &z, &Metric::identity(2)),
            Err(RfmError::Dimension(_))
        ));
        assert!(matches!(
            mahalanobis_distances(&x, &x, &Metric::identity(3)),
            Err(RfmError::Dimension(_))
        ));
    }

    #[test]
    fn non_finite_design_is_rejected() {
        assert!(matches!(
            DesignMatrix::new(array![[1.0, f64::NAN]]),
            Err(RfmError::NonFinite(_))
        ));
        assert!(DesignMatrix::new(Array2::zeros((0, 3))).is_err());
    }

    #[test]
    fn metric_validation() {
        assert!(MetricMatrix::new(array![[1.0, 2.0], [0.0, 1.0]]).is_err());
        assert!(MetricMatrix::new(array![[1.0, 2.0], [2.0, 1.0]]).is_err());
        assert!(MetricMatrix::new(array![[1.0, 0.0], [0.0, 0.0]]).is_ok());
    }

    #[test]
    fn ridge_solves_trivial_systems() {
        let a = solve_kernel_ridge(Array2::eye(3).view(), array![1.0, 2.0, 3.0].view(), 0.0).unwrap();
        assert_eq!(a.view(), array![1.0, 2.0, 3.0].view());
        let a = solve_kernel_ridge(Array2::eye(2).view(), array![2.0, 4.0].view(), 1.0).unwrap();
        assert!((a.view()[0] - 1.0).abs() < 1e-15 && (a.view()[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ridge_rejects_indefinite_system() {
        let k = array![[0.0, 1.0], [1.0, 0.0]];
        match solve_kernel_ridge(k.view(), array![1.0, 1.0].view(), 0.0) {
            Err(RfmError::Singular { index, pivot }) => {
                assert_eq!(index, 0);
                assert_eq!(pivot, 0.0);
            }
            other => panic!("expected singular error, got {other:?}"),
        }
        assert!(matches!(
            solve_kernel_ridge(Array2::eye(2).view(), array![1.0].view(), 0.0),
            Err(RfmError::Dimension(_))
        ));
    }

    #[test]
    fn hyperparams_validation() {
        assert!(KernelHyperparams::default().validate().is_ok());
        let bad = KernelHyperparams { bandwidth: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = KernelHyperparams { ridge: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = KernelHyperparams { dist_floor: 1e-3, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_term_gradient_closed_form() {
        let x = dm(array![[1.0, 0.0]]);
        let z = dm(array![[0.0, 0.0]]);
        let alpha = DualCoefficients::new(array![1.0]).unwrap();
        let hp = KernelHyperparams { bandwidth: 1.0, ..Default::default() };
        let g = predictor_gradients(&x, &z, &alpha, &Metric::identity(2), &hp).unwrap();
        assert!((g[[0, 0]] + (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(g[[0, 1]], 0.0);
    }

    #[test]
    fn zero_alpha_gives_zero_gradient_and_prediction() {
        let x = dm(array![[1.0, 0.5], [0.2, -0.3], [2.0, 1.0]]);
        let alpha = DualCoefficients::new(Array1::zeros(3)).unwrap();
        let hp = KernelHyperparams::default();
        let g = predictor_gradients(&x, &x, &alpha, &Metric::identity(2), &hp).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
        let p = kernel_predict(&x, &x, &alpha, &Metric::identity(2), 1.0).unwrap();
        assert!(p.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn self_term_contributes_nothing() {
        let x = dm(array![[0.4, -0.2]]);
        let alpha = DualCoefficients::new(array![3.0]).unwrap();
        let g = predictor_gradients(&x, &x, &alpha, &Metric::identity(2), &KernelHyperparams::default())
            .unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn factored_metric_matches_dense_form() {
        let f = array![[1.0, 0.5, -0.2], [0.0, 0.3, 1.1]];
        let fac = Metric::Factored(f);
        let dense = Metric::Dense(fac.to_matrix());
        let x = dm(array![[0.1, 0.2, 0.3], [1.0, -1.0, 0.5], [0.0, 2.0, -0.4]]);
        let z = dm(array![[0.5, 0.5, 0.5], [-1.0, 0.0, 1.0]]);
        let a = mahalanobis_distances(&x, &z, &fac).unwrap();
        let b = mahalanobis_distances(&x, &z, &dense).unwrap();
        assert!((&a - &b).iter().all(|v| v.abs() < 1e-12));
        let alpha = DualCoefficients::new(array![0.7, -1.3]).unwrap();
        let hp = KernelHyperparams::default();
        let ga = predictor_gradients(&x, &z, &alpha, &fac, &hp).unwrap();
        let gb = predictor_gradients(&x, &z, &alpha, &dense, &hp).unwrap();
        assert!((&ga - &gb).iter().all(|v| v.abs() < 1e-12));
    }
}
