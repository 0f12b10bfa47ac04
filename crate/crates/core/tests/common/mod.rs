#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rfm::kernel::{DesignMatrix, MetricMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.sample(StandardNormal))
}

pub fn normal_vector(rng: &mut impl Rng, n: usize) -> Array1<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn design(rng: &mut impl Rng, rows: usize, cols: usize) -> DesignMatrix {
    let s = 1.0 / (cols as f64).sqrt();
    DesignMatrix::new(normal_matrix(rng, rows, cols) * s).unwrap()
}

/// `AᵀA / k` for a random `k × d` matrix, built entry by entry.
pub fn psd(rng: &mut impl Rng, d: usize, k: usize) -> MetricMatrix {
    let a = normal_matrix(rng, k, d);
    let mut m = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let v: f64 = (0..k).map(|r| a[[r, i]] * a[[r, j]]).sum::<f64>() / k as f64;
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    MetricMatrix::new(m).unwrap()
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `(x − z)ᵀ M (x − z)` by explicit loops.
pub fn quad_form(x: &[f64], z: &[f64], m: &Array2<f64>) -> f64 {
    let d = x.len();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += (x[i] - z[i]) * m[[i, j]] * (x[j] - z[j]);
        }
    }
    s
}
