//! Phase-shift collections, amplitude synthesis, S-matrix and cross sections.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::nu_d;
use super::partial_wave::PhaseShiftSolver;
use crate::error::{domain, Error, Result};
use crate::numerics::grid::gauss_legendre;
use crate::numerics::special::legendre_array;
use crate::numerics::Potential;

/// |δ_ℓ| below this for two consecutive ℓ ends the partial-wave sum.
pub const TRUNCATION_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseShifts {
    pub k: f64,
    pub deltas: Vec<f64>,
    /// Largest |δ_ℓ| among the last two partial waves.
    pub tail: f64,
    pub converged: bool,
}

impl PhaseShifts {
    pub fn lambda(&self) -> f64 {
        self.k * self.k
    }

    pub fn l_max(&self) -> usize {
        self.deltas.len() - 1
    }

    fn require_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::TruncationNotReached { l_max: self.l_max(), tail: self.tail })
        }
    }
}

/// δ_ℓ for ℓ = 0, 1, … until two consecutive |δ_ℓ| fall below the threshold
/// or `l_cap` is reached.
pub fn phase_shifts(v: &Potential, lambda: f64, solver: &dyn PhaseShiftSolver, l_cap: usize) -> Result<PhaseShifts> {
    if !(lambda > 0.0) {
        return Err(domain(format!("energy must be positive, got {lambda}")));
    }
    let k = lambda.sqrt();
    if v.is_zero() {
        return Ok(PhaseShifts { k, deltas: vec![0.0, 0.0], tail: 0.0, converged: true });
    }
    let mut deltas = Vec::new();
    let mut small_run = 0;
    for l in 0..=l_cap {
        let d = solver.phase_shift(v, k, l)?;
        deltas.push(d);
        if d.abs() < TRUNCATION_THRESHOLD {
            small_run += 1;
            if small_run == 2 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    let n = deltas.len();
    let tail = deltas[n.saturating_sub(2)..].iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(PhaseShifts { k, deltas, tail, converged: small_run == 2 })
}

/// S_ℓ = e^{2iδ_ℓ}.
pub fn s_matrix(ps: &PhaseShifts) -> Vec<Complex64> {
    ps.deltas.iter().map(|d| Complex64::from_polar(1.0, 2.0 * d)).collect()
}

/// a as a function of cos γ = ⟨θ, ω⟩.
pub fn amplitude_cos(ps: &PhaseShifts, x: f64) -> Complex64 {
    let p = legendre_array(ps.l_max(), x);
    let mut a = Complex64::new(0.0, 0.0);
    for (l, d) in ps.deltas.iter().enumerate() {
        let e = Complex64::from_polar(d.sin(), *d);
        a += (2 * l + 1) as f64 * e * p[l];
    }
    a / ps.k
}

/// a(θ, ω; λ) for unit vectors θ (outgoing) and ω (incoming).
pub fn amplitude(ps: &PhaseShifts, theta: [f64; 3], omega: [f64; 3]) -> Result<Complex64> {
    ps.require_converged()?;
    let x = dot(theta, omega) / (norm(theta) * norm(omega));
    Ok(amplitude_cos(ps, x.clamp(-1.0, 1.0)))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Product rule on the unit sphere exact for spherical harmonics of degree ≤ `degree`.
pub fn sphere_rule(degree: usize) -> Vec<([f64; 3], f64)> {
    let nc = degree / 2 + 1;
    let nphi = degree + 1;
    let (x, w) = gauss_legendre(nc.max(2));
    let mut out = Vec::with_capacity(x.len() * nphi);
    let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
    for (c, wc) in x.iter().zip(&w) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..nphi {
            let phi = (j as f64 + 0.5) * dphi;
            out.push(([s * phi.cos(), s * phi.sin(), *c], wc * dphi));
        }
    }
    out
}

/// S_ℓ rebuilt from the amplitude kernel: S_ℓ = 1 + (ik/2π) ∫ a(θ,ω) P_ℓ(⟨θ,ω⟩) dθ.
pub fn s_from_kernel(ps: &PhaseShifts, omega: [f64; 3]) -> Result<Vec<Complex64>> {
    ps.require_converged()?;
    let lmax = ps.l_max();
    let rule = sphere_rule(2 * lmax + 2);
    let om = {
        let n = norm(omega);
        [omega[0] / n, omega[1] / n, omega[2] / n]
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); lmax + 1];
    for (th, w) in &rule {
        let x = dot(*th, om).clamp(-1.0, 1.0);
        let a = amplitude_cos(ps, x);
        let p = legendre_array(lmax, x);
        for l in 0..=lmax {
            acc[l] += a * p[l] * *w;
        }
    }
    let pref = Complex64::new(0.0, ps.k / (2.0 * std::f64::consts::PI));
    Ok(acc.into_iter().map(|s| Complex64::new(1.0, 0.0) + pref * s).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossSections {
    /// (scattering angle γ, dσ/dΩ) samples.
    pub dsigma: Vec<(f64, f64)>,
    pub sigma_total: f64,
    /// (4π/k²) Σ (2ℓ+1) sin²δ_ℓ.
    pub sigma_partial_waves: f64,
    /// |σ_total + λ^{−1/2} Im(ν₃^{−1} a(ω,ω))| = |σ_total − (4π/k) Im a(ω,ω)|.
    pub optical_residual: f64,
}

pub fn cross_sections(ps: &PhaseShifts, omega: [f64; 3], n_angles: usize) -> Result<CrossSections> {
    ps.require_converged()?;
    let lmax = ps.l_max();
    let om = {
        let n = norm(omega);
        [omega[0] / n, omega[1] / n, omega[2] / n]
    };
    let sigma_total: f64 = sphere_rule(2 * lmax + 2)
        .iter()
        .map(|(th, w)| w * amplitude_cos(ps, dot(*th, om).clamp(-1.0, 1.0)).norm_sqr())
        .sum();
    let sigma_partial_waves = 4.0 * std::f64::consts::PI / (ps.k * ps.k)
        * ps.deltas.iter().enumerate().map(|(l, d)| (2 * l + 1) as f64 * d.sin().powi(2)).sum::<f64>();
    let forward = amplitude_cos(ps, 1.0);
    let nu_inv = nu_d(3, ps.lambda())?.inv();
    let optical_residual = (sigma_total + (nu_inv * forward).im / ps.k).abs();
    let dsigma = (0..n_angles)
        .map(|i| {
            let g = std::f64::consts::PI * i as f64 / (n_angles.max(2) - 1) as f64;
            (g, amplitude_cos(ps, g.cos()).norm_sqr())
        })
        .collect();
    Ok(CrossSections { dsigma, sigma_total, sigma_partial_waves, optical_residual })
}
