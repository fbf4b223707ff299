//! Small dense linear-algebra helpers on complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Build a complex matrix from real row-major data.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| real(data[i * cols + j]))
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn diag(entries: &[C64]) -> CMat {
    let n = entries.len();
    CMat::from_fn(n, n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) })
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint()
}

/// Largest entry modulus.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Entrywise modulus.
pub fn abs(a: &CMat) -> RMat {
    RMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].norm())
}

pub fn row_sums(a: &RMat) -> Vec<f64> {
    (0..a.nrows()).map(|i| a.row(i).sum()).collect()
}

/// Induced ∞-norm (max absolute row sum).
pub fn norm_inf(a: &CMat) -> f64 {
    row_sums(&abs(a)).into_iter().fold(0.0, f64::max)
}

/// Induced 1-norm (max absolute column sum).
pub fn norm_1(a: &CMat) -> f64 {
    norm_inf(&a.transpose())
}

/// Spectral norm.
pub fn norm_2(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Induced p→p norm for p ∈ {1, 2, ∞} (`p = f64::INFINITY` for the last).
pub fn induced_norm(a: &CMat, p: f64) -> Result<f64> {
    if p == 1.0 {
        Ok(norm_1(a))
    } else if p == 2.0 {
        Ok(norm_2(a))
    } else if p == f64::INFINITY {
        Ok(norm_inf(a))
    } else {
        Err(Error::Parameter(format!("induced norm only for p in {{1, 2, inf}}, got {p}")))
    }
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Numerical rank with tolerance relative to the largest singular value.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// 2-norm condition number; infinite for singular input.
pub fn cond(a: &CMat) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone()
        .try_inverse()
        .filter(|inv| inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::Numerical("matrix not invertible".into()))
}

/// Solve `a x = b` by LU.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    a.clone()
        .lu()
        .solve(b)
        .filter(|x| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::Numerical("singular linear system".into()))
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * real(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The QR-based result is polished by cyclic Jacobi sweeps on `V* A V`, which brings the
/// eigenvectors to `eps·‖A‖ / gap` accuracy even when the initial solve is looser.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    let herm = hermitian_part(a);
    let eig = herm.clone().symmetric_eigen();
    let (values, vectors) = jacobi_polish(&herm, eig.eigenvectors);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, k| vectors[(r, order[k])]);
    (sorted, vectors)
}

fn jacobi_polish(a: &CMat, mut v: CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    let mut d = hermitian_part(&(v.adjoint() * a * &v));
    let scale = max_abs(&d).max(f64::MIN_POSITIVE);
    for _ in 0..8 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(d[(p, q)].norm());
            }
        }
        if off <= 1e-18 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = d[(p, q)];
                let r = apq.norm();
                if r <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / r;
                let tau = (d[(q, q)].re - d[(p, p)].re) / (2.0 * r);
                let t = if tau == 0.0 { 1.0 } else { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = diag(1, conj(phase)) on (p, q) followed by the real rotation [[c, s], [−s, c]]
                let mut j = CMat::identity(n, n);
                j[(p, p)] = real(cs);
                j[(p, q)] = real(sn);
                j[(q, p)] = -phase.conj() * sn;
                j[(q, q)] = phase.conj() * cs;
                d = hermitian_part(&(j.adjoint() * &d * &j));
                v = &v * &j;
            }
        }
    }
    ((0..n).map(|i| d[(i, i)].re).collect(), v)
}

/// Smallest and largest eigenvalue of the Hermitian part.
pub fn hermitian_extremes(a: &CMat) -> (f64, f64) {
    let (vals, _) = hermitian_eigen(a);
    (vals[0], vals[vals.len() - 1])
}

/// `(A^{1/2}, A^{-1/2})` for Hermitian positive definite `A`.
pub fn hpd_sqrt(a: &CMat) -> Result<(CMat, CMat)> {
    let (vals, vecs) = hermitian_eigen(a);
    if vals[0] <= 0.0 {
        return Err(Error::Numerical("matrix not positive definite".into()));
    }
    let root: Vec<C64> = vals.iter().map(|v| real(v.sqrt())).collect();
    let inv_root: Vec<C64> = vals.iter().map(|v| real(1.0 / v.sqrt())).collect();
    let va = vecs.adjoint();
    Ok((&vecs * diag(&root) * &va, &vecs * diag(&inv_root) * &va))
}

/// Spectral radius of a real square matrix.
pub fn spectral_radius(a: &RMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.complex_eigenvalues().iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn is_diagonal(a: &CMat) -> bool {
    a.iter().enumerate().all(|(k, z)| {
        let (i, j) = (k % a.nrows(), k / a.nrows());
        i == j || *z == C64::new(0.0, 0.0)
    })
}

pub fn is_real(a: &CMat) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn vstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.ncols());
    let mut out = CMat::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// Left and right halves of an n×2n boundary matrix.
pub fn split_halves(w: &CMat) -> (CMat, CMat) {
    let n = w.nrows();
    (w.columns(0, n).into_owned(), w.columns(n, n).into_owned())
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(real)
}
