//! Free and full propagation on the periodic arena.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::Fft;
use serde::{Deserialize, Serialize};

use super::arena::{l2, plans, Arena, Wavepacket};
use crate::error::{invalid, Error, Result};
use crate::numerics::Potential;

/// Default bound on the boundary-layer mass fraction.
pub const DEFAULT_LEAK_TOLERANCE: f64 = 1e-8;

/// Allowed relative norm drift per unit time before a run is declared unstable.
pub const NORM_DRIFT_BOUND: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    /// Horizon T used for the a-priori box check.
    pub horizon: f64,
    pub scheme: String,
    pub leak_tolerance: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self { dt: 0.01, horizon: 10.0, scheme: "strang-split".into(), leak_tolerance: DEFAULT_LEAK_TOLERANCE }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.leak_tolerance > 0.0 && self.leak_tolerance < 1.0) {
            return Err(invalid(format!("leak tolerance must be in (0,1), got {}", self.leak_tolerance)));
        }
        propagation_scheme(&self.scheme).map(|_| ())
    }

    /// Number of steps for time `t`; `t` must be a multiple of `dt`.
    pub fn steps(&self, t: f64) -> Result<usize> {
        let n = (t.abs() / self.dt).round();
        if (n * self.dt - t.abs()).abs() > 1e-9 * t.abs().max(1.0) {
            return Err(invalid(format!("time {t} is not a multiple of dt = {}", self.dt)));
        }
        Ok(n as usize)
    }
}

/// Kinetic and potential sub-flows on one arena.
pub struct Flows {
    pub arena: Arena,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    xi2: Vec<f64>,
    pub v: Vec<f64>,
}

impl Flows {
    pub fn new(arena: Arena, v: &Potential) -> Self {
        let (fwd, inv) = plans(arena.n);
        let xi2 = arena.momenta().iter().map(|x| x * x).collect();
        Self { arena, fwd, inv, xi2, v: arena.sample(v) }
    }

    /// ψ ← e^{−iH₀τ} ψ.
    pub fn kinetic(&self, psi: &mut [Complex64], tau: f64) {
        self.fwd.process(psi);
        let s = 1.0 / self.arena.n as f64;
        for (z, k2) in psi.iter_mut().zip(&self.xi2) {
            *z *= Complex64::from_polar(s, -k2 * tau);
        }
        self.inv.process(psi);
    }

    /// ψ ← e^{−iVτ} ψ.
    pub fn potential(&self, psi: &mut [Complex64], tau: f64) {
        for (z, v) in psi.iter_mut().zip(&self.v) {
            *z *= Complex64::from_polar(1.0, -v * tau);
        }
    }

    /// ψ ← Hψ.
    pub fn apply_h(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut buf = psi.to_vec();
        self.fwd.process(&mut buf);
        let s = 1.0 / self.arena.n as f64;
        for (z, k2) in buf.iter_mut().zip(&self.xi2) {
            *z *= k2 * s;
        }
        self.inv.process(&mut buf);
        buf.iter().zip(psi).zip(&self.v).map(|((k, p), v)| k + p * v).collect()
    }
}

/// A one-step map ψ(t) → ψ(t + τ).
pub trait PropagationScheme: Send + Sync {
    fn name(&self) -> &'static str;
    /// Global order in τ.
    fn order(&self) -> u32;
    /// True when the scheme ignores V (valid only for V = 0).
    fn free_only(&self) -> bool {
        false
    }
    fn step(&self, flows: &Flows, psi: &mut [Complex64], tau: f64);
}

pub struct ExactFreeMultiplier;

impl PropagationScheme for ExactFreeMultiplier {
    fn name(&self) -> &'static str {
        "exact-free-multiplier"
    }
    fn order(&self) -> u32 {
        u32::MAX
    }
    fn free_only(&self) -> bool {
        true
    }
    fn step(&self, flows: &Flows, psi: &mut [Complex64], tau: f64) {
        flows.kinetic(psi, tau);
    }
}

/// e^{−iVτ/2} e^{−iH₀τ} e^{−iVτ/2}.
pub struct StrangSplit;

impl PropagationScheme for StrangSplit {
    fn name(&self) -> &'static str {
        "strang-split"
    }
    fn order(&self) -> u32 {
        2
    }
    fn step(&self, flows: &Flows, psi: &mut [Complex64], tau: f64) {
        flows.potential(psi, 0.5 * tau);
        flows.kinetic(psi, tau);
        flows.potential(psi, 0.5 * tau);
    }
}

/// Triple-jump composition of Strang steps.
pub struct Yoshida4;

impl PropagationScheme for Yoshida4 {
    fn name(&self) -> &'static str {
        "yoshida4"
    }
    fn order(&self) -> u32 {
        4
    }
    fn step(&self, flows: &Flows, psi: &mut [Complex64], tau: f64) {
        let c = 2f64.powf(1.0 / 3.0);
        let w1 = 1.0 / (2.0 - c);
        let w0 = -c / (2.0 - c);
        for w in [w1, w0, w1] {
            StrangSplit.step(flows, psi, w * tau);
        }
    }
}

pub const PROPAGATION_SCHEMES: &[&str] = &["exact-free-multiplier", "strang-split", "yoshida4"];

pub fn propagation_scheme(name: &str) -> Result<Box<dyn PropagationScheme>> {
    match name {
        "exact-free-multiplier" => Ok(Box::new(ExactFreeMultiplier)),
        "strang-split" => Ok(Box::new(StrangSplit)),
        "yoshida4" => Ok(Box::new(Yoshida4)),
        _ => Err(invalid(format!("unknown propagation scheme '{name}' (known: {PROPAGATION_SCHEMES:?})"))),
    }
}

/// Box rule: half-width ≥ 2·v_max·T.
pub fn check_box(f: &Wavepacket, horizon: f64) -> Result<()> {
    let required = 2.0 * f.max_velocity() * horizon.abs();
    if f.arena.half_width < required {
        return Err(Error::BoxTooSmall { half_width: f.arena.half_width, required, horizon });
    }
    Ok(())
}

fn check_leak(f: &Wavepacket, tol: f64, time: f64) -> Result<()> {
    let fraction = f.boundary_fraction();
    if fraction > tol {
        return Err(Error::Leak { fraction, time });
    }
    Ok(())
}

/// e^{−iH₀t} f by the exact Fourier multiplier.
pub fn propagate_free(f: &Wavepacket, t: f64) -> Result<Wavepacket> {
    propagate_free_with(f, t, DEFAULT_LEAK_TOLERANCE)
}

pub fn propagate_free_with(f: &Wavepacket, t: f64, leak_tolerance: f64) -> Result<Wavepacket> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    check_box(f, t)?;
    let flows = Flows::new(f.arena, &Potential::zero());
    let mut psi = f.samples.clone();
    flows.kinetic(&mut psi, t);
    let out = f.with_samples(psi);
    check_leak(&out, leak_tolerance, t)?;
    Ok(out)
}

/// Observer called after every step with (time, ψ).
pub type Observer<'a> = &'a mut dyn FnMut(f64, &[Complex64]);

/// e^{−iHt} f with the configured scheme; `t` may be negative.
pub fn propagate_full(f: &Wavepacket, v: &Potential, cfg: &EvolutionConfig, t: f64) -> Result<Wavepacket> {
    propagate_observed(f, v, cfg, t, None)
}

pub fn propagate_observed(
    f: &Wavepacket,
    v: &Potential,
    cfg: &EvolutionConfig,
    t: f64,
    mut observer: Option<Observer<'_>>,
) -> Result<Wavepacket> {
    cfg.validate()?;
    let scheme = propagation_scheme(&cfg.scheme)?;
    if scheme.free_only() && !v.is_zero() {
        return Err(Error::Precondition(format!("scheme '{}' requires V = 0", scheme.name())));
    }
    let n = cfg.steps(t)?;
    if n == 0 {
        return Ok(f.clone());
    }
    check_box(f, cfg.horizon)?;
    let flows = Flows::new(f.arena, v);
    let vmax = flows.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if vmax * cfg.dt > 1.0 {
        return Err(Error::Instability(format!("dt·max|V| = {:.3} exceeds 1", vmax * cfg.dt)));
    }
    let tau = t.signum() * cfg.dt;
    let dx = f.dx();
    let n0 = f.norm;
    let check_every = ((1.0 / cfg.dt).round() as usize).max(1);
    let mut psi = f.samples.clone();
    for i in 1..=n {
        scheme.step(&flows, &mut psi, tau);
        let time = i as f64 * tau;
        if let Some(obs) = observer.as_mut() {
            obs(time, &psi);
        }
        if i % check_every == 0 || i == n {
            let drift = (l2(&psi, dx) - n0).abs() / n0.max(f64::MIN_POSITIVE);
            if drift > NORM_DRIFT_BOUND * time.abs().max(1.0) {
                return Err(Error::Instability(format!("norm drift {drift:.3e} at t = {time}")));
            }
            check_leak(&f.with_samples(psi.clone()), cfg.leak_tolerance, time)?;
        }
    }
    Ok(f.with_samples(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::preset;

    fn packet() -> Wavepacket {
        Wavepacket::gaussian(Arena::new(1024, 60.0).unwrap(), -5.0, 1.0, 1.5).unwrap()
    }

    #[test]
    fn registry() {
        for name in PROPAGATION_SCHEMES {
            assert_eq!(propagation_scheme(name).unwrap().name(), *name);
        }
        assert!(propagation_scheme("euler").is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let f = packet();
        assert_eq!(propagate_free(&f, 0.0).unwrap().samples, f.samples);
    }

    #[test]
    fn free_propagation_is_unitary_and_reversible() {
        let f = packet();
        let g = propagate_free(&f, 3.0).unwrap();
        assert!((g.norm - 1.0).abs() < 1e-12);
        let h = propagate_free(&g, -3.0).unwrap();
        assert!(h.distance(&f) < 1e-12);
    }

    #[test]
    fn box_and_leak_errors() {
        let f = packet();
        assert!(matches!(propagate_free(&f, 100.0), Err(Error::BoxTooSmall { .. })));
        let cfg = EvolutionConfig { dt: 0.05, horizon: 5.0, ..Default::default() };
        let g = Wavepacket::gaussian(f.arena, 45.0, 1.0, 1.5).unwrap();
        assert!(matches!(propagate_full(&g, &preset("gaussian").unwrap(), &cfg, 10.0), Err(Error::Leak { .. })));
    }

    #[test]
    fn free_scheme_refuses_potential() {
        let cfg = EvolutionConfig { scheme: "exact-free-multiplier".into(), ..Default::default() };
        assert!(matches!(
            propagate_full(&packet(), &preset("gaussian").unwrap(), &cfg, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn time_must_be_multiple_of_dt() {
        let cfg = EvolutionConfig { dt: 0.3, ..Default::default() };
        assert!(propagate_full(&packet(), &Potential::zero(), &cfg, 1.0).is_err());
    }
}
