//! Tridiagonal solves, Sturm counts and Krylov eigen/norm estimates.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solves a tridiagonal system with sub-diagonal `lower`, diagonal `diag`,
/// super-diagonal `upper` (both of length n − 1).
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut beta = diag[0];
    if beta.norm() == 0.0 {
        return Err(Error::Solver("singular tridiagonal system".into()));
    }
    d[0] = rhs[0] / beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i - 1] * c[i - 1];
        if beta.norm() < 1e-300 {
            return Err(Error::Solver("singular tridiagonal system".into()));
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// Number of eigenvalues below x of the symmetric tridiagonal matrix (diag, off).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::EPSILON * (off[i - 1].abs() + 1.0) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Ritz pairs of a Hermitian operator from an m-step Lanczos run with full
/// reorthogonalisation. Eigenvalues ascend.
pub fn lanczos(
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    start: &[Complex64],
    m: usize,
) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = start.len();
    let m = m.min(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let nrm = cnorm(start);
    basis.push(start.iter().map(|x| x / nrm).collect());
    for j in 0..m {
        let mut w = apply(&basis[j]);
        let a = cdot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = cdot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = cnorm(&w);
        if j + 1 == m || b < 1e-12 * a.abs().max(1.0) {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            for (j, q) in basis.iter().enumerate().take(k) {
                let c = eig.eigenvectors[(j, i)];
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi += c * qi;
                }
            }
            v
        })
        .collect();
    (vals, vecs)
}

/// Operator norm estimate ‖A‖ by power iteration on A*A.
pub fn power_norm(
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    apply_adj: impl Fn(&[Complex64]) -> Vec<Complex64>,
    start: &[Complex64],
    iters: usize,
    rtol: f64,
) -> f64 {
    let mut v: Vec<Complex64> = start.to_vec();
    let n0 = cnorm(&v);
    v.iter_mut().for_each(|x| *x /= n0);
    let mut est = 0.0;
    for _ in 0..iters {
        let w = apply_adj(&apply(&v));
        let lam = cnorm(&w);
        if lam == 0.0 {
            return 0.0;
        }
        v = w.iter().map(|x| x / lam).collect();
        let new = lam.sqrt();
        if (new - est).abs() <= rtol * new {
            return new;
        }
        est = new;
    }
    est
}
