//! Spectator-dependent channel in d = 1 with m₁ = m₂ = ½, m₃ = ∞ and V₃₁ = 0:
//!
//! H = −∂²₁ − ∂²₂ + V₁₂(x₁ − x₂) + V₂₃(x₂),
//!
//! with V₂₃ a hard wall at x₂ = 0. For V₁₂(r) ~ v r^{−ρ} the pair potential is
//! linear in x₂ near the wall, so the (23) bound state is an Airy function
//! whose width grows like x₁^σ, σ = (ρ + 1)/3:
//!
//! ψ(x₁, x₂) = x₁^{−σ/2} Ψ(x₁^{−σ} x₂),  −Ψ″ + vρ yΨ = ΛΨ,  Ψ(0) = 0,
//! λ(x₁) = v x₁^{−ρ} + Λ x₁^{−2σ}.
//!
//! The channel evolution is U₁(t)f = ψ e^{iΞ} (2it)^{−1/2} f̂(x₁/2t), where Ξ
//! solves the eikonal equation ∂ₜΞ + (∂₁Ξ)² + λ = 0 as a power series. The
//! Cook integrand ‖(i∂ₜ − H)U₁(t)f‖ is evaluated with exact derivatives.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::numerics::fit::{decay_exponent, loglog_slope};
use crate::numerics::grid::{composite_gauss, gauss_legendre};
use crate::numerics::special::{airy_ai_with_derivative, airy_zero};
use num_complex::Complex64;

/// Argument of Ai beyond which Ψ is treated as zero (Ai(12) ≈ 1e−11).
pub const AIRY_EDGE: f64 = 12.0;

/// Eikonal remainder terms of degree at least this are absorbed into Ξ.
pub const EIKONAL_DEGREE: f64 = -1.5;

/// (ρ, Airy level) pairs with a closed eikonal series.
pub const CHANNEL_PRESETS: &[(f64, usize)] = &[(0.3, 1), (0.4, 1), (0.3, 2)];

pub trait ChannelProfile: Send + Sync {
    fn name(&self) -> &'static str;
    /// Exponent σ of the width x₂ ~ x₁^σ of the pair state.
    fn scaling(&self, rho: f64) -> f64;
    /// V₁₂ at (x₁, x₂) for x₂ ≥ 0.
    fn potential(&self, rho: f64, v12: f64, x1: f64, x2: f64) -> f64;
    /// λ(x₁) as a sum of c x₁^b.
    fn lambda_terms(&self, rho: f64, v12: f64, airy_eigenvalue: f64) -> Vec<(f64, f64)>;
}

/// V₁₂(r) = v (1 + r²)^{−ρ/2}.
pub struct PowerTail;

impl ChannelProfile for PowerTail {
    fn name(&self) -> &'static str {
        "power-tail"
    }
    fn scaling(&self, rho: f64) -> f64 {
        (rho + 1.0) / 3.0
    }
    fn potential(&self, rho: f64, v12: f64, x1: f64, x2: f64) -> f64 {
        let r = x1 - x2;
        v12 * (1.0 + r * r).powf(-0.5 * rho)
    }
    fn lambda_terms(&self, rho: f64, v12: f64, airy_eigenvalue: f64) -> Vec<(f64, f64)> {
        vec![(v12, -rho), (airy_eigenvalue, -2.0 * self.scaling(rho))]
    }
}

/// The linear pair potential vρ x₂ with no x₁ dependence: Ψ is an exact
/// eigenfunction and λ = Λ is constant.
pub struct Static;

impl ChannelProfile for Static {
    fn name(&self) -> &'static str {
        "static"
    }
    fn scaling(&self, _rho: f64) -> f64 {
        0.0
    }
    fn potential(&self, rho: f64, v12: f64, _x1: f64, x2: f64) -> f64 {
        v12 * rho * x2
    }
    fn lambda_terms(&self, _rho: f64, _v12: f64, airy_eigenvalue: f64) -> Vec<(f64, f64)> {
        vec![(airy_eigenvalue, 0.0)]
    }
}

pub const CHANNEL_PROFILES: &[&str] = &["power-tail", "static"];

pub fn channel_profile(name: &str) -> Result<Arc<dyn ChannelProfile>> {
    match name {
        "power-tail" => Ok(Arc::new(PowerTail)),
        "static" => Ok(Arc::new(Static)),
        _ => Err(invalid(format!("unknown channel profile '{name}'; known: {}", CHANNEL_PROFILES.join(", ")))),
    }
}

/// c t^a x^b.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Monomial {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

impl Monomial {
    fn degree(&self) -> f64 {
        self.a + self.b
    }
    fn eval(&self, x: f64, t: f64) -> f64 {
        self.c * t.powf(self.a) * x.powf(self.b)
    }
}

fn merge(mut terms: Vec<Monomial>) -> Vec<Monomial> {
    terms.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    let mut out: Vec<Monomial> = Vec::new();
    for m in terms {
        match out.last_mut() {
            Some(l) if (l.a - m.a).abs() < 1e-12 && (l.b - m.b).abs() < 1e-12 => l.c += m.c,
            _ => out.push(m),
        }
    }
    out.retain(|m| m.c != 0.0);
    out
}

/// Ξ = x²/4t + Φ with Φ a finite sum of monomials.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EikonalSeries {
    pub terms: Vec<Monomial>,
    /// Leading degree of ∂ₜΞ + (∂₁Ξ)² + λ; the remainder is O(t^degree) on x₁ ~ t.
    pub remainder_degree: f64,
    pub iterations: usize,
}

impl EikonalSeries {
    /// Iterates Φ ← Φ − c t^{a+1} x^b/(a + b + 1) for every remainder term of
    /// degree ≥ `cut`, which cancels it in ∂ₜΦ + (x/t)∂ₓΦ. Coefficients below
    /// 1e−13 of the largest λ coefficient count as cancelled.
    pub fn solve(lambda: &[(f64, f64)], cut: f64) -> Result<Self> {
        let scale = lambda.iter().map(|(c, _)| c.abs()).fold(0.0, f64::max);
        let mut phi: Vec<Monomial> = Vec::new();
        for it in 0..32 {
            let mut rem = Self::remainder(&phi, lambda);
            rem.retain(|m| m.c.abs() > 1e-13 * scale);
            let big: Vec<&Monomial> = rem.iter().filter(|m| m.degree() >= cut).collect();
            if big.is_empty() {
                let remainder_degree = rem.iter().map(Monomial::degree).fold(f64::NEG_INFINITY, f64::max);
                return Ok(Self { terms: phi, remainder_degree, iterations: it });
            }
            for m in big {
                let d = m.degree() + 1.0;
                if d.abs() < 1e-9 {
                    return Err(Error::Solver("eikonal series hits a logarithmic term".into()));
                }
                phi.push(Monomial { c: -m.c / d, a: m.a + 1.0, b: m.b });
            }
            phi = merge(phi);
        }
        Err(Error::Solver("eikonal series did not close".into()))
    }

    fn remainder(phi: &[Monomial], lambda: &[(f64, f64)]) -> Vec<Monomial> {
        let mut r: Vec<Monomial> = lambda.iter().map(|&(c, b)| Monomial { c, a: 0.0, b }).collect();
        for m in phi {
            r.push(Monomial { c: m.c * (m.a + m.b), a: m.a - 1.0, b: m.b });
        }
        let dx: Vec<Monomial> = phi.iter().map(|m| Monomial { c: m.c * m.b, a: m.a, b: m.b - 1.0 }).collect();
        for p in &dx {
            for q in &dx {
                r.push(Monomial { c: p.c * q.c, a: p.a + q.a, b: p.b + q.b });
            }
        }
        merge(r)
    }

    /// (Ξ, ∂ₜΞ, ∂ₓΞ, ∂²ₓΞ).
    pub fn eval(&self, x: f64, t: f64) -> [f64; 4] {
        let mut out = [x * x / (4.0 * t), -x * x / (4.0 * t * t), x / (2.0 * t), 1.0 / (2.0 * t)];
        for m in &self.terms {
            let v = m.eval(x, t);
            out[0] += v;
            out[1] += m.a * v / t;
            out[2] += m.b * v / x;
            out[3] += m.b * (m.b - 1.0) * v / (x * x);
        }
        out
    }
}

#[derive(Clone)]
pub struct ChannelModel {
    pub rho: f64,
    pub v12: f64,
    pub level: usize,
    pub sigma: f64,
    /// n-th zero z_n of Ai and Ai'(z_n).
    pub airy_zero: (f64, f64),
    /// c = (vρ)^{1/3}, so Ψ(y) = N Ai(c y + z_n).
    pub slope: f64,
    /// Λ = −z_n c².
    pub airy_eigenvalue: f64,
    pub norm: f64,
    pub phase: EikonalSeries,
    pub profile: Arc<dyn ChannelProfile>,
}

impl fmt::Debug for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChannelModel")
            .field("profile", &self.profile.name())
            .field("rho", &self.rho)
            .field("v12", &self.v12)
            .field("level", &self.level)
            .field("sigma", &self.sigma)
            .field("airy_eigenvalue", &self.airy_eigenvalue)
            .finish()
    }
}

/// ψ and its partial derivatives at one point.
#[derive(Clone, Copy, Debug, Default)]
struct Amplitude {
    psi: f64,
    d1: f64,
    d11: f64,
    d2: f64,
    d22: f64,
}

impl ChannelModel {
    pub fn build(profile: &str, rho: f64, v12: f64, level: usize) -> Result<Self> {
        if !(rho > 0.0 && rho < 0.5) {
            return Err(domain(format!("ρ = {rho} lies outside (0, 1/2)")));
        }
        if !(v12 > 0.0) {
            return Err(domain(format!("v12 = {v12} must be positive")));
        }
        let profile = channel_profile(profile)?;
        let (z, ap) = airy_zero(level).map_err(|e| Error::Solver(format!("Airy eigenpair: {e}")))?;
        let slope = (v12 * rho).cbrt();
        let airy_eigenvalue = -z * slope * slope;
        let sigma = profile.scaling(rho);
        let phase = EikonalSeries::solve(&profile.lambda_terms(rho, v12, airy_eigenvalue), EIKONAL_DEGREE)?;
        Ok(Self {
            rho,
            v12,
            level,
            sigma,
            airy_zero: (z, ap),
            slope,
            airy_eigenvalue,
            norm: slope.sqrt() / ap.abs(),
            phase,
            profile,
        })
    }

    /// Ψ(y), Ψ'(y), Ψ''(y) on y ≥ 0.
    pub fn airy(&self, y: f64) -> (f64, f64, f64) {
        if y < 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let (ai, aip) = airy_ai_with_derivative(self.slope * y + self.airy_zero.0);
        let psi = self.norm * ai;
        (psi, self.norm * self.slope * aip, (self.slope.powi(3) * y - self.airy_eigenvalue) * psi)
    }

    /// y beyond which Ψ is negligible.
    pub fn airy_extent(&self) -> f64 {
        (AIRY_EDGE - self.airy_zero.0) / self.slope
    }

    /// Support of ψ(x₁, ·) in x₂.
    pub fn width(&self, x1: f64) -> f64 {
        self.airy_extent() * x1.powf(self.sigma)
    }

    pub fn lambda(&self, x1: f64) -> f64 {
        self.profile.lambda_terms(self.rho, self.v12, self.airy_eigenvalue).iter().map(|(c, b)| c * x1.powf(*b)).sum()
    }

    pub fn psi(&self, x1: f64, x2: f64) -> f64 {
        self.amplitude(x1, x2).psi
    }

    fn amplitude(&self, x1: f64, x2: f64) -> Amplitude {
        if x2 < 0.0 {
            return Amplitude::default();
        }
        let sg = self.sigma;
        let s = x1.powf(-sg);
        let y = s * x2;
        let (p, dp, ddp) = self.airy(y);
        let h = 0.5 * p + y * dp;
        let dh = 1.5 * dp + y * ddp;
        let rs = s.sqrt();
        Amplitude {
            psi: rs * p,
            d1: -sg / x1 * rs * h,
            d11: sg / (x1 * x1) * rs * (h + sg * (0.5 * h + y * dh)),
            d2: rs * s * dp,
            d22: rs * s * s * ddp,
        }
    }

    fn x2_rule(&self, x1: f64) -> (Vec<f64>, Vec<f64>) {
        let w = self.width(x1);
        let panels = 8 * self.level + 16;
        let edges: Vec<f64> = (0..=panels).map(|k| w * k as f64 / panels as f64).collect();
        composite_gauss(&edges, 16)
    }

    /// ‖(−∂²₂ + V₁₂ − λ(x₁))ψ(x₁, ·)‖.
    pub fn residual(&self, x1: f64) -> f64 {
        let lam = self.lambda(x1);
        let (xs, ws) = self.x2_rule(x1);
        let mut sum = 0.0;
        for (x2, w) in xs.iter().zip(&ws) {
            let a = self.amplitude(x1, *x2);
            let y = -a.d22 + (self.profile.potential(self.rho, self.v12, x1, *x2) - lam) * a.psi;
            sum += w * y * y;
        }
        sum.sqrt()
    }

    /// ∫|ψ(x₁, x₂)|² dx₂, which the scaling keeps at 1.
    pub fn norm_at(&self, x1: f64) -> f64 {
        let (xs, ws) = self.x2_rule(x1);
        xs.iter().zip(&ws).map(|(x2, w)| w * self.psi(x1, *x2).powi(2)).sum()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelResidual {
    pub x1: Vec<f64>,
    pub residual: Vec<f64>,
    /// p in ‖Y(x₁)‖ ~ x₁^{−p}, least squares over all points.
    pub exponent: f64,
}

pub fn channel_residual(model: &ChannelModel, x1: &[f64]) -> Result<ChannelResidual> {
    if x1.len() < 2 || x1.iter().any(|x| !(*x > 0.0)) {
        return Err(invalid("need at least two positive x1 values"));
    }
    let residual: Vec<f64> = x1.iter().map(|&x| model.residual(x)).collect();
    let exponent = if residual.iter().all(|r| *r < 1e-300) { f64::INFINITY } else { -loglog_slope(x1, &residual) };
    Ok(ChannelResidual { x1: x1.to_vec(), residual, exponent })
}

/// f̂₁(k) = exp(−1/(1 − u²)), u = (k − k₀)/w, supported on (k₀ − w, k₀ + w).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelProbeSpec {
    pub k0: f64,
    pub k_width: f64,
    /// Probe times 2^{j/per_octave} for j from first·per_octave to last·per_octave.
    pub first_octave: i32,
    pub last_octave: i32,
    pub per_octave: usize,
    /// Half-width of the x₂ arena; the channel must fit inside at the last time.
    pub x2_extent: f64,
    pub x1_nodes: usize,
}

impl Default for ChannelProbeSpec {
    fn default() -> Self {
        Self { k0: 4.0, k_width: 2.0, first_octave: 4, last_octave: 10, per_octave: 4, x2_extent: 2000.0, x1_nodes: 96 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelCookTrace {
    pub times: Vec<f64>,
    /// ‖(i∂ₜ − H)U₁(t)f₁‖.
    pub plain: Vec<f64>,
    /// Same with the extra phase exp(iσx₂²/4t).
    pub dressed: Vec<f64>,
    pub plain_exponent: f64,
    pub dressed_exponent: f64,
    /// ∫ over successive octaves of the dressed integrand.
    pub dressed_increments: Vec<f64>,
    pub eikonal_remainder_degree: f64,
}

fn bump(u: f64) -> [f64; 3] {
    if u.abs() >= 1.0 {
        return [0.0; 3];
    }
    let q = 1.0 - u * u;
    let f = (-1.0 / q).exp();
    let g1 = -2.0 * u / (q * q);
    let g2 = -2.0 / (q * q) - 8.0 * u * u / (q * q * q);
    [f, f * g1, f * (g1 * g1 + g2)]
}

fn probe_norm(model: &ChannelModel, spec: &ChannelProbeSpec, t: f64, tau: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(spec.x1_nodes);
    let lo = 2.0 * t * (spec.k0 - spec.k_width);
    let hi = 2.0 * t * (spec.k0 + spec.k_width);
    let a0 = Complex64::new(0.0, 2.0).powf(-0.5) * t.powf(-0.5);
    let i = Complex64::i();
    let mut total = 0.0;
    for (xn, wn) in nodes.iter().zip(&weights) {
        let x1 = lo + 0.5 * (hi - lo) * (xn + 1.0);
        let w1 = 0.5 * (hi - lo) * wn;
        let k = x1 / (2.0 * t);
        let [f, f1, f2] = bump((k - spec.k0) / spec.k_width);
        let (f1, f2) = (f1 / spec.k_width, f2 / spec.k_width.powi(2));
        let a = a0 * f;
        let at = a0 * (-0.5 * f / t - f1 * x1 / (2.0 * t * t));
        let a1 = a0 * f1 / (2.0 * t);
        let a11 = a0 * f2 / (4.0 * t * t);
        let [_, xt, x1d, x11] = model.phase.eval(x1, t);
        let (xs, ws) = model.x2_rule(x1);
        let mut inner = 0.0;
        for (x2, w2) in xs.iter().zip(&ws) {
            let p = model.amplitude(x1, *x2);
            let v = model.profile.potential(model.rho, model.v12, x1, *x2);
            let th_t = -tau * x2 * x2 / (4.0 * t * t);
            let th_2 = tau * x2 / (2.0 * t);
            let th_22 = tau / (2.0 * t);
            let w = a * p.psi;
            let wt = at * p.psi;
            let w1 = a1 * p.psi + a * p.d1;
            let w11 = a11 * p.psi + 2.0 * a1 * p.d1 + a * p.d11;
            let w2d = a * p.d2;
            let w22 = a * p.d22;
            let r = i * wt - w * (xt + th_t) + w11 + 2.0 * i * w1 * x1d + i * w * x11 - w * x1d * x1d + w22
                + 2.0 * i * w2d * th_2
                + i * w * th_22
                - w * th_2 * th_2
                - v * w;
            inner += w2 * r.norm_sqr();
        }
        total += w1 * inner;
    }
    total.sqrt()
}

pub fn channel_cook_probe(model: &ChannelModel, spec: &ChannelProbeSpec) -> Result<ChannelCookTrace> {
    if !(spec.k_width > 0.0 && spec.k0 - spec.k_width > 0.0) {
        return Err(Error::Precondition("f̂₁ must be supported away from k = 0".into()));
    }
    if spec.last_octave <= spec.first_octave || spec.per_octave == 0 || spec.x1_nodes < 8 {
        return Err(invalid("probe needs at least one octave, one time per octave and 8 x1 nodes"));
    }
    let times: Vec<f64> = (spec.first_octave * spec.per_octave as i32..=spec.last_octave * spec.per_octave as i32)
        .map(|j| 2f64.powf(j as f64 / spec.per_octave as f64))
        .collect();
    let t_max = *times.last().unwrap();
    let needed = model.width(2.0 * t_max * (spec.k0 + spec.k_width));
    if needed > spec.x2_extent {
        return Err(Error::Horizon(format!(
            "the channel reaches x2 = {needed:.1} at t = {t_max}, beyond the arena half-width {}",
            spec.x2_extent
        )));
    }
    let plain: Vec<f64> = times.iter().map(|&t| probe_norm(model, spec, t, 0.0)).collect();
    let dressed: Vec<f64> = times.iter().map(|&t| probe_norm(model, spec, t, model.sigma)).collect();
    let dressed_increments = times
        .windows(2)
        .zip(dressed.windows(2))
        .map(|(t, d)| 0.5 * (t[1] - t[0]) * (d[0] + d[1]))
        .collect::<Vec<_>>()
        .chunks(spec.per_octave)
        .map(|c| c.iter().sum())
        .collect();
    Ok(ChannelCookTrace {
        plain_exponent: decay_exponent(&times, &plain, f64::INFINITY),
        dressed_exponent: decay_exponent(&times, &dressed, f64::INFINITY),
        times,
        plain,
        dressed,
        dressed_increments,
        eikonal_remainder_degree: model.phase.remainder_degree,
    })
}
