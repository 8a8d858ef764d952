//! Rank-one pair interactions V = s|g⟩⟨g| and their two-body spectra.
//!
//! Form factors are s-wave functions g(|p|). The free matrix element
//! F(e) = ∫ d³p g(p)² / (p²/2m − e), e < 0, drives everything: the pair
//! resolvent is (h₀ − e)⁻¹ − (h₀ − e)⁻¹|g⟩ s/(1 + sF(e)) ⟨g|(h₀ − e)⁻¹ and a
//! bound state sits where 1 + sF(λ) = 0.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::numerics::grid::composite_gauss;
use crate::numerics::roots::brent;
use crate::numerics::MomentumGrid;

pub trait FormFactor: Send + Sync {
    fn name(&self) -> &'static str;
    /// Momentum scale (β for smooth forms, Λ for the contact cutoff).
    fn scale(&self) -> f64;
    fn eval(&self, p: f64) -> f64;
    /// Support bound when g is an indicator of |p| < Λ.
    fn cutoff(&self) -> Option<f64> {
        None
    }
    /// ∫ d³p g².
    fn norm_sq(&self) -> f64;
    /// F(e) = ∫ d³p g² / (p²/2m − e) for e ≤ 0.
    fn free_element(&self, m: f64, e: f64) -> f64;
    /// F(e) − F(0), without the cancellation of the direct difference.
    fn free_element_shift(&self, m: f64, e: f64) -> f64 {
        self.free_element(m, e) - self.free_element(m, 0.0)
    }
}

/// g(p) = (p² + β²)⁻¹.
pub struct Yamaguchi {
    pub beta: f64,
}

impl FormFactor for Yamaguchi {
    fn name(&self) -> &'static str {
        "yamaguchi"
    }
    fn scale(&self) -> f64 {
        self.beta
    }
    fn eval(&self, p: f64) -> f64 {
        1.0 / (p * p + self.beta * self.beta)
    }
    fn norm_sq(&self) -> f64 {
        PI * PI / self.beta
    }
    fn free_element(&self, m: f64, e: f64) -> f64 {
        let b = self.beta;
        let k = (-2.0 * m * e).max(0.0).sqrt();
        2.0 * PI * PI * m / (b * (b + k).powi(2))
    }
    fn free_element_shift(&self, m: f64, e: f64) -> f64 {
        let b = self.beta;
        let k = (-2.0 * m * e).max(0.0).sqrt();
        -2.0 * PI * PI * m * k * (2.0 * b + k) / (b.powi(3) * (b + k).powi(2))
    }
}

/// g(p) = exp(−p²/β²).
pub struct GaussianForm {
    pub beta: f64,
}

impl GaussianForm {
    /// ∫₀^∞ g² / (p² + κ²) dp by Gauss panels that resolve both κ and β; only
    /// ever multiplied by κ², so κ = 0 returns 0.
    fn resolvent_integral(&self, kappa: f64) -> f64 {
        let b = self.beta;
        if kappa == 0.0 {
            return 0.0;
        }
        let top = 7.0 * b;
        let mut edges = vec![0.0];
        let mut x = (kappa / 4.0).min(b / 4.0);
        while x < b {
            edges.push(x);
            x *= 2.0;
        }
        let last = *edges.last().unwrap();
        edges.extend((1..=14).map(|i| b + (top - b) * i as f64 / 14.0).filter(|e| *e > last));
        let (nodes, weights) = composite_gauss(&edges, 16);
        nodes.iter().zip(&weights).map(|(p, w)| w * (-2.0 * p * p / (b * b)).exp() / (p * p + kappa * kappa)).sum()
    }
}

impl FormFactor for GaussianForm {
    fn name(&self) -> &'static str {
        "gaussian"
    }
    fn scale(&self) -> f64 {
        self.beta
    }
    fn eval(&self, p: f64) -> f64 {
        (-p * p / (self.beta * self.beta)).exp()
    }
    fn norm_sq(&self) -> f64 {
        (0.5 * PI * self.beta * self.beta).powf(1.5)
    }
    fn free_element(&self, m: f64, e: f64) -> f64 {
        // ∫ p² g²/(p² + κ²) = ∫ g² − κ² ∫ g²/(p² + κ²)
        let k2 = (-2.0 * m * e).max(0.0);
        let plain = 0.5 * (0.5 * PI).sqrt() * self.beta;
        8.0 * PI * m * (plain - k2 * self.resolvent_integral(k2.sqrt()))
    }
    fn free_element_shift(&self, m: f64, e: f64) -> f64 {
        let k2 = (-2.0 * m * e).max(0.0);
        -8.0 * PI * m * k2 * self.resolvent_integral(k2.sqrt())
    }
}

/// g(p) = 1 for p < Λ, 0 beyond: a zero-range interaction with a momentum cutoff.
pub struct Contact {
    pub cutoff: f64,
}

impl FormFactor for Contact {
    fn name(&self) -> &'static str {
        "contact"
    }
    fn scale(&self) -> f64 {
        self.cutoff
    }
    fn eval(&self, p: f64) -> f64 {
        if p < self.cutoff {
            1.0
        } else {
            0.0
        }
    }
    fn cutoff(&self) -> Option<f64> {
        Some(self.cutoff)
    }
    fn norm_sq(&self) -> f64 {
        4.0 * PI * self.cutoff.powi(3) / 3.0
    }
    fn free_element(&self, m: f64, e: f64) -> f64 {
        let k = (-2.0 * m * e).max(0.0).sqrt();
        let l = self.cutoff;
        let tail = if k == 0.0 { 0.0 } else { k * (l / k).atan() };
        8.0 * PI * m * (l - tail)
    }
    fn free_element_shift(&self, m: f64, e: f64) -> f64 {
        let k = (-2.0 * m * e).max(0.0).sqrt();
        if k == 0.0 {
            return 0.0;
        }
        -8.0 * PI * m * k * (self.cutoff / k).atan()
    }
}

pub const FORM_FACTORS: &[&str] = &["yamaguchi", "gaussian", "contact"];

pub fn form_factor(name: &str, scale: f64) -> Result<Arc<dyn FormFactor>> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid(format!("form-factor scale must be positive, got {scale}")));
    }
    match name {
        "yamaguchi" => Ok(Arc::new(Yamaguchi { beta: scale })),
        "gaussian" => Ok(Arc::new(GaussianForm { beta: scale })),
        "contact" => Ok(Arc::new(Contact { cutoff: scale })),
        _ => Err(invalid(format!("unknown form factor '{name}' (known: {FORM_FACTORS:?})"))),
    }
}

/// V = s|g⟩⟨g| acting on the relative momentum of one pair.
#[derive(Clone)]
pub struct SeparablePotential {
    pub strength: f64,
    pub form: Arc<dyn FormFactor>,
}

impl std::fmt::Debug for SeparablePotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(scale {}, strength {})", self.form.name(), self.form.scale(), self.strength)
    }
}

impl SeparablePotential {
    pub fn new(strength: f64, form: Arc<dyn FormFactor>) -> Self {
        Self { strength, form }
    }

    pub fn off(form: Arc<dyn FormFactor>) -> Self {
        Self { strength: 0.0, form }
    }

    pub fn is_zero(&self) -> bool {
        self.strength == 0.0
    }

    /// D(e) = 1 + sF(e), the denominator of the pair t-matrix.
    pub fn denominator(&self, m: f64, e: f64) -> f64 {
        1.0 + self.strength * self.form.free_element(m, e)
    }
}

/// Strength s putting the bound state at energy e < 0 for reduced mass m.
pub fn tune_strength(form: &dyn FormFactor, m: f64, e: f64) -> Result<f64> {
    if !(e < 0.0) {
        return Err(invalid(format!("target energy must be negative, got {e}")));
    }
    Ok(-1.0 / form.free_element(m, e))
}

/// Strength at which the bound state reaches zero energy.
pub fn critical_strength(form: &dyn FormFactor, m: f64) -> f64 {
    -1.0 / form.free_element(m, 0.0)
}

/// Pair bound state of a rank-one potential; ψ(p) = N g(p) / (p²/2m − λ).
#[derive(Clone, Debug)]
pub struct PairBound {
    pub energy: f64,
    pub norm: f64,
}

impl PairBound {
    pub fn wavefunction(&self, v: &SeparablePotential, m: f64, p: f64) -> f64 {
        self.norm * v.form.eval(p) / (p * p / (2.0 * m) - self.energy)
    }
}

#[derive(Clone, Debug)]
pub struct PairSpectrum {
    /// At most one entry for a rank-one potential.
    pub bound: Vec<PairBound>,
}

impl PairSpectrum {
    pub fn lowest(&self) -> Option<f64> {
        self.bound.first().map(|b| b.energy)
    }
}

/// F(e) on a momentum grid: Σ w p² 4π g² / (p²/2m − e).
pub fn grid_free_element(v: &SeparablePotential, m: f64, e: f64, grid: &MomentumGrid) -> f64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&p, &w)| 4.0 * PI * w * p * p * v.form.eval(p).powi(2) / (p * p / (2.0 * m) - e))
        .sum()
}

/// Bound states from 1 + sF(λ) = 0, with F exact or on `grid`.
pub fn pair_spectrum(v: &SeparablePotential, m: f64, grid: Option<&MomentumGrid>) -> Result<PairSpectrum> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(invalid(format!("pair mass must be positive and finite, got {m}")));
    }
    if v.strength >= 0.0 {
        return Ok(PairSpectrum { bound: vec![] });
    }
    let f = |e: f64| match grid {
        Some(g) => grid_free_element(v, m, e, g),
        None => v.form.free_element(m, e),
    };
    let d = |kappa: f64| 1.0 + v.strength * f(-kappa * kappa / (2.0 * m));
    if d(0.0) >= 0.0 {
        return Ok(PairSpectrum { bound: vec![] });
    }
    let mut hi = v.form.scale();
    let mut tries = 0;
    while d(hi) < 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::RootBracket("pair secular equation has no sign change".into()));
        }
    }
    let kappa = brent(d, 0.0, hi, 1e-15 * hi)?;
    let energy = -kappa * kappa / (2.0 * m);
    // ‖g/(h₀ − λ)‖² = dF/dλ
    let h = 1e-4 * energy.abs();
    let slope = (f(energy + h) - f(energy - h)) / (2.0 * h);
    Ok(PairSpectrum { bound: vec![PairBound { energy, norm: slope.sqrt().recip() }] })
}

/// Negative eigenvalues of diag(p²/2m) + s u uᵀ with u = √(4πw) p g(p): the
/// same rank-one operator discretised on the grid.
pub fn dense_pair_spectrum(v: &SeparablePotential, m: f64, grid: &MomentumGrid) -> Vec<f64> {
    let n = grid.len();
    let u: Vec<f64> =
        grid.nodes.iter().zip(&grid.weights).map(|(&p, &w)| (4.0 * PI * w).sqrt() * p * v.form.eval(p)).collect();
    let h = DMatrix::from_fn(n, n, |i, j| {
        let kin = if i == j { grid.nodes[i].powi(2) / (2.0 * m) } else { 0.0 };
        kin + v.strength * u[i] * u[j]
    });
    let mut e: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().filter(|e| *e < 0.0).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// E = min over pairs of the lowest bound-state energy, 0 if nothing binds.
pub fn hvz_bottom(spectra: &[PairSpectrum]) -> f64 {
    spectra.iter().filter_map(|s| s.lowest()).fold(0.0, f64::min)
}
