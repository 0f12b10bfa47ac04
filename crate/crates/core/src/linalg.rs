//! Thin bridge between `ndarray` storage and `faer` kernels.
//!
//! Every product here runs with `Par::Seq`; parallelism lives one level up, over
//! sweep cells, so each product is computed in a fixed order and reproduces
//! bit-for-bit across runs of the same build.

use faer::linalg::matmul::matmul as faer_matmul;
use faer::prelude::Solve;
use faer::{Accum, Mat, MatMut, MatRef, Par, Side};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Result, RfmError};

fn view<'a>(a: &'a ArrayView2<'_, f64>) -> Option<MatRef<'a, f64>> {
    let (r, c) = a.dim();
    a.as_slice()
        .map(|s| MatRef::from_row_major_slice(s, r, c))
}

fn product(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Array2<f64> {
    let (rows, cols) = (a.nrows(), b.ncols());
    let mut out = Array2::<f64>::zeros((rows, cols));
    if a.ncols() == 0 {
        return out;
    }
    let dst = MatMut::from_row_major_slice_mut(
        out.as_slice_mut().expect("fresh array is contiguous"),
        rows,
        cols,
    );
    faer_matmul(dst, Accum::Replace, a, b, 1.0, Par::Seq);
    out
}

fn with_view<R>(a: ArrayView2<'_, f64>, f: impl FnOnce(MatRef<'_, f64>) -> R) -> R {
    match view(&a) {
        Some(m) => f(m),
        None => {
            let owned = a.as_standard_layout().into_owned();
            let v = owned.view();
            f(view(&v).expect("standard layout"))
        }
    }
}

/// `a · b`
pub(crate) fn matmul(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul inner dimension");
    with_view(a, |ma| with_view(b, |mb| product(ma, mb)))
}

/// `a · bᵀ`
pub(crate) fn matmul_nt(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    assert_eq!(a.ncols(), b.ncols(), "matmul_nt inner dimension");
    with_view(a, |ma| with_view(b, |mb| product(ma, mb.transpose())))
}

/// `aᵀ · b`
pub(crate) fn matmul_tn(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    assert_eq!(a.nrows(), b.nrows(), "matmul_tn inner dimension");
    with_view(a, |ma| with_view(b, |mb| product(ma.transpose(), mb)))
}

/// Copies the upper triangle onto the lower one so the result is exactly symmetric.
pub(crate) fn mirror_upper(m: &mut Array2<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            m[[i, j]] = m[[j, i]];
        }
    }
}

/// `aᵀ · a`, exactly symmetric.
pub(crate) fn gram_tn(a: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut g = matmul_tn(a, a);
    mirror_upper(&mut g);
    g
}

/// `a · aᵀ`, exactly symmetric.
pub(crate) fn gram_nt(a: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut g = matmul_nt(a, a);
    mirror_upper(&mut g);
    g
}

fn to_faer_square(a: ArrayView2<'_, f64>) -> Mat<f64> {
    let n = a.nrows();
    Mat::from_fn(n, n, |i, j| a[[i, j]])
}

/// Unblocked Cholesky run only after the fast factorization has failed, to
/// report the offending pivot value.
fn first_bad_pivot(a: ArrayView2<'_, f64>) -> (usize, f64) {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    let mut smallest = (0, f64::INFINITY);
    for j in 0..n {
        let mut diag = a[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if diag < smallest.1 {
            smallest = (j, diag);
        }
        if !(diag > 0.0) {
            return (j, diag);
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in j + 1..n {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    smallest
}

/// Solves `a x = b` for symmetric positive-definite `a` through an `LLᵀ`
/// factorization. Only the lower triangle of `a` is read.
pub(crate) fn spd_solve(a: ArrayView2<'_, f64>, b: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    let fa = to_faer_square(a);
    let llt = fa.llt(Side::Lower).map_err(|_| {
        let (index, pivot) = first_bad_pivot(a);
        RfmError::Singular { index, pivot }
    })?;
    let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
    let x = llt.solve(&rhs);
    Ok(Array1::from_shape_fn(n, |i| x[(i, 0)]))
}

/// Eigenvalues of a symmetric matrix in nondecreasing order.
pub(crate) fn symmetric_eigenvalues(a: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    to_faer_square(a)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| RfmError::Numerical(format!("eigenvalue iteration failed: {e:?}")))
}

/// Upper-triangular `R` (cols × cols) of a thin QR of a tall matrix, so that
/// `aᵀa = RᵀR`.
pub(crate) fn qr_r(a: ArrayView2<'_, f64>) -> Array2<f64> {
    let (rows, cols) = a.dim();
    assert!(rows >= cols, "qr_r expects a tall matrix");
    with_view(a, |m| {
        let qr = m.qr();
        let r = qr.thin_R();
        Array2::from_shape_fn((cols, cols), |(i, j)| if j >= i { r[(i, j)] } else { 0.0 })
    })
}
