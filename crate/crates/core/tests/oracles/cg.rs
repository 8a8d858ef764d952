//! Correlated-Gaussian variational oracle for three identical bosons of unit
//! mass with the Yamaguchi pair interaction s|g⟩⟨g|, g(p) = 1/(p² + β²).
//!
//! Basis: Σ_α exp(−½(a p_α² + b q_α²)) over the three pair frames. Every term
//! is exp(−½ Pᵀ A P) in frame 0; the boson projection makes ⟨V⟩ = 3⟨V₀⟩.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use std::f64::consts::PI;

/// Map k (Σk = 0) of particles (i, j; spectator k) to (p, q); component-wise.
fn jacobi_row(alpha: usize) -> Matrix2<f64> {
    let (i, j, k) = [(0, 1, 2), (1, 2, 0), (2, 0, 1)][alpha];
    // coefficients on (k0, k1) with k2 = −k0 − k1
    let coef = |idx: usize| -> [f64; 2] {
        match idx {
            0 => [1.0, 0.0],
            1 => [0.0, 1.0],
            _ => [-1.0, -1.0],
        }
    };
    let (ci, cj, ck) = (coef(i), coef(j), coef(k));
    // p = (k_i − k_j)/2, q = (2k_k − k_i − k_j)/3 for unit masses
    Matrix2::new(
        0.5 * (ci[0] - cj[0]),
        0.5 * (ci[1] - cj[1]),
        (2.0 * ck[0] - ci[0] - cj[0]) / 3.0,
        (2.0 * ck[1] - ci[1] - cj[1]) / 3.0,
    )
}

/// (p_α, q_α) = T_α (p₀, q₀).
fn transition(alpha: usize) -> Matrix2<f64> {
    jacobi_row(alpha) * jacobi_row(0).try_inverse().unwrap()
}

/// Nodes and weights of n-point Gauss–Legendre on (0, ∞) via p = s u/(1 − u).
fn half_line(n: usize, s: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Golub–Welsch is overkill here; Newton on P_n from Chebyshev guesses
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        let u = 0.5 * (x + 1.0);
        out.push((s * u / (1.0 - u), 0.5 * w * s / ((1.0 - u) * (1.0 - u))));
    }
    out
}

/// Strength binding the pair (reduced mass ½) at −κ².
pub fn yamaguchi_strength(beta: f64, kappa: f64) -> f64 {
    -beta * (beta + kappa).powi(2) / (PI * PI)
}

/// Lowest eigenvalue of H in the boson basis with exponents from the two
/// geometric ranges; `nodes` points per radial quadrature.
pub fn ground_state(beta: f64, strength: f64, a: (f64, f64, usize), b: (f64, f64, usize), nodes: usize) -> f64 {
    spectrum(beta, strength, a, b, nodes)[0]
}

pub fn spectrum(beta: f64, strength: f64, a: (f64, f64, usize), b: (f64, f64, usize), nodes: usize) -> Vec<f64> {
    let geo = |(lo, hi, n): (f64, f64, usize)| -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64)).collect()
    };
    let t: Vec<Matrix2<f64>> = (0..3).map(transition).collect();
    let mut funcs: Vec<[Matrix2<f64>; 3]> = Vec::new();
    for &x in &geo(a) {
        for &y in &geo(b) {
            let d = Matrix2::new(x, 0.0, 0.0, y);
            funcs.push([0, 1, 2].map(|f| t[f].transpose() * d * t[f]));
        }
    }
    let n = funcs.len();
    // p²/2m + q²/2n = p² + ¾q²; ⟨PᵀΛP⟩ = 3 tr(Λ C⁻¹) per Gaussian pair
    let lam = Matrix2::new(1.0, 0.0, 0.0, 0.75);
    let mut s = DMatrix::<f64>::zeros(n, n);
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            for x in &funcs[i] {
                for y in &funcs[j] {
                    let c = x + y;
                    let ov = (2.0 * PI).powi(3) / c.determinant().powf(1.5);
                    s[(i, j)] += ov;
                    let ci: Matrix2<f64> = c.try_inverse().unwrap();
                    h[(i, j)] += 3.0 * (lam * ci).trace() * ov;
                }
            }
        }
    }
    // F_i(q) = ∫ d³p g(p) f_i(p, q) in frame 0
    let pr = half_line(nodes, beta);
    let qr = half_line(nodes, 1.0);
    let proj = |m: &Matrix2<f64>, q: f64| -> f64 {
        let c = m[(0, 1)].abs();
        pr.iter()
            .map(|&(p, w)| {
                let x = c * p * q;
                let sh = if x < 1e-10 { 1.0 } else { (1.0 - (-2.0 * x).exp()) / (2.0 * x) };
                w * 4.0 * PI * p * p / (p * p + beta * beta) * sh * (x - 0.5 * (m[(0, 0)] * p * p + m[(1, 1)] * q * q)).exp()
            })
            .sum()
    };
    let f = DMatrix::from_fn(n, qr.len(), |i, k| {
        let (q, w) = qr[k];
        let v: f64 = funcs[i].iter().map(|m| proj(m, q)).sum();
        v * q * (4.0 * PI * w).sqrt()
    });
    h += &f * f.transpose() * (3.0 * strength);
    let d: Vec<f64> = (0..n).map(|i| s[(i, i)].sqrt().recip()).collect();
    let sn = DMatrix::from_fn(n, n, |i, j| d[i] * s[(i, j)] * d[j]);
    let hn = DMatrix::from_fn(n, n, |i, j| d[i] * h[(i, j)] * d[j]);
    let e = SymmetricEigen::new(sn);
    let top = e.eigenvalues.max();
    let keep: Vec<usize> = (0..n).filter(|&k| e.eigenvalues[k] > 1e-10 * top).collect();
    let x = DMatrix::from_fn(n, keep.len(), |r, c| e.eigenvectors[(r, keep[c])] / e.eigenvalues[keep[c]].sqrt());
    let hh = x.transpose() * hn * &x;
    let mut ev: Vec<f64> = SymmetricEigen::new((&hh + hh.transpose()) * 0.5).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
