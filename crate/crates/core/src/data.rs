//! Synthetic regression data for the feature-scaling sweeps.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, RfmError};
use crate::kernel::DesignMatrix;
use crate::seed::SeedStream;

/// Number of leading columns read by the random linear target.
pub const RANDMAT_WIDTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetKind {
    Cubic,
    RandMat,
}

impl TargetKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TargetKind::Cubic => "cubic",
            TargetKind::RandMat => "randmat",
        }
    }

    /// Narrowest feature width the target can be evaluated on.
    pub fn min_dim(&self) -> usize {
        match self {
            TargetKind::Cubic => 3,
            TargetKind::RandMat => RANDMAT_WIDTH,
        }
    }
}

impl std::str::FromStr for TargetKind {
    type Err = RfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cubic" => Ok(TargetKind::Cubic),
            "randmat" => Ok(TargetKind::RandMat),
            other => Err(RfmError::Parse(format!("unknown target '{other}'"))),
        }
    }
}

/// A target function: `5x₁³ + 2x₂² + 10x₃`, or `X′K` over the first ten columns.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Cubic,
    RandMat { coeffs: Array1<f64> },
}

impl TargetSpec {
    pub fn kind(&self) -> TargetKind {
        match self {
            TargetSpec::Cubic => TargetKind::Cubic,
            TargetSpec::RandMat { .. } => TargetKind::RandMat,
        }
    }

    /// Draws the random coefficients (standard normal) when the kind needs them.
    pub fn draw(kind: TargetKind, stream: &SeedStream) -> Self {
        match kind {
            TargetKind::Cubic => TargetSpec::Cubic,
            TargetKind::RandMat => {
                let mut rng = stream.rng();
                let coeffs = (0..RANDMAT_WIDTH).map(|_| rng.sample(StandardNormal)).collect();
                TargetSpec::RandMat { coeffs }
            }
        }
    }
}

/// Label noise for one repetition, shared by every feature width.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub noise: Array1<f64>,
}

impl NoiseSpec {
    /// `σ · z` with `z` standard normal; all zeros when `σ = 0`.
    pub fn draw(n: usize, sigma: f64, stream: &SeedStream) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(RfmError::Precondition(format!("sigma must be non-negative, got {sigma}")));
        }
        let noise = if sigma == 0.0 {
            Array1::zeros(n)
        } else {
            let mut rng = stream.rng();
            (0..n).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect()
        };
        Ok(Self { sigma, noise })
    }
}

/// Disjoint train/test indices covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// `n × d_max` matrix of i.i.d. standard normals, filled row by row.
pub fn gen_design(n: usize, d_max: usize, stream: &SeedStream) -> Result<DesignMatrix> {
    if n == 0 || d_max == 0 {
        return Err(RfmError::Precondition(format!(
            "design must be non-empty, got {n}x{d_max}"
        )));
    }
    let mut rng = stream.rng();
    let values = Array2::from_shape_simple_fn((n, d_max), || rng.sample(StandardNormal));
    Ok(DesignMatrix::from_array_unchecked(values))
}

/// First `d` columns, each entry multiplied by `1/√d` so rows keep unit
/// expected squared norm.
pub fn slice_and_scale(x: &DesignMatrix, d: usize) -> Result<DesignMatrix> {
    if d == 0 || d > x.cols() {
        return Err(RfmError::Precondition(format!(
            "feature width {d} outside 1..={}",
            x.cols()
        )));
    }
    let s = 1.0 / (d as f64).sqrt();
    let cols = x.view().slice_axis(Axis(1), (0..d).into()).mapv(|v| v * s);
    Ok(DesignMatrix::from_array_unchecked(cols))
}

pub fn eval_target(x: &DesignMatrix, spec: &TargetSpec) -> Result<Array1<f64>> {
    let need = spec.kind().min_dim();
    if x.cols() < need {
        return Err(RfmError::Precondition(format!(
            "{} target needs at least {need} features, got {}",
            spec.kind().as_str(),
            x.cols()
        )));
    }
    match spec {
        TargetSpec::Cubic => Ok(x
            .view()
            .rows()
            .into_iter()
            .map(|r| 5.0 * r[0] * r[0] * r[0] + 2.0 * r[1] * r[1] + 10.0 * r[2])
            .collect()),
        TargetSpec::RandMat { coeffs } => {
            if coeffs.len() != RANDMAT_WIDTH {
                return Err(RfmError::Dimension(format!(
                    "randmat needs {RANDMAT_WIDTH} coefficients, got {}",
                    coeffs.len()
                )));
            }
            Ok(x.view().slice_axis(Axis(1), (0..RANDMAT_WIDTH).into()).dot(coeffs))
        }
    }
}

pub fn add_noise(y: ArrayView1<'_, f64>, spec: &NoiseSpec) -> Result<Array1<f64>> {
    if y.len() != spec.noise.len() {
        return Err(RfmError::Dimension(format!(
            "{} targets but {} noise draws",
            y.len(),
            spec.noise.len()
        )));
    }
    Ok(&y + &spec.noise)
}

/// Seeded permutation; the first `round(fraction · n)` indices train.
pub fn make_split(n: usize, fraction: f64, stream: &SeedStream) -> Result<SplitPlan> {
    if n < 5 {
        return Err(RfmError::Precondition(format!("need at least 5 rows to split, got {n}")));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(RfmError::Precondition(format!("train fraction must lie in (0, 1), got {fraction}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut stream.rng());
    let n_train = (fraction * n as f64).round() as usize;
    let test = perm.split_off(n_train);
    Ok(SplitPlan { train: perm, test })
}
