//! Møller operators W_T = e^{iHT} U(T) and the scattering map.
//!
//! U(T) is e^{−iH₀T} without a modifier; with a modified phase Ξ it is the
//! coordinate form (U(T) f)(x) = e^{iΞ(x,T)} (2iT)^{−1/2} f̂(x/2T).

use num_complex::Complex64;

use super::arena::Wavepacket;
use super::phase::ModifiedPhase;
use super::propagate::{check_box, propagate_free_with, propagate_full, EvolutionConfig};
use crate::error::{invalid, Error, Result};
use crate::numerics::Potential;

/// Spectral cutoff below which f̂₀ must vanish for modified dynamics.
pub const MODIFIED_SUPPORT_CUTOFF: f64 = 0.25;

/// Norm fraction near the scatterer after the full evolution that counts as capture.
pub const CAPTURE_TOLERANCE: f64 = 1e-3;

/// Asymptotic evolution U(t) f₀ (t > 0).
pub fn asymptotic(f0: &Wavepacket, t: f64, modifier: Option<&dyn ModifiedPhase>, leak: f64) -> Result<Wavepacket> {
    let Some(phase) = modifier else {
        return propagate_free_with(f0, t, leak);
    };
    if !(t > 0.0) {
        return Err(invalid(format!("modified evolution needs t > 0, got {t}")));
    }
    check_box(f0, t)?;
    let xs = f0.arena.positions();
    let xis: Vec<f64> = xs.iter().map(|x| x / (2.0 * t)).collect();
    let fhat = f0.spectrum_at(&xis);
    let pref = (Complex64::new(0.0, 2.0 * t)).sqrt().inv();
    // Ξ may be singular at x = 0, where f̂(0) vanishes by precondition
    let samples = xs
        .iter()
        .zip(&fhat)
        .map(|(&x, g)| {
            let p = phase.xi(x, t);
            if p.is_finite() {
                Complex64::from_polar(1.0, p) * pref * g
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(f0.with_samples(samples))
}

#[derive(Clone, Debug)]
pub struct MollerTrace {
    pub times: Vec<f64>,
    /// W_T f₀ for each horizon.
    pub snapshots: Vec<Wavepacket>,
    pub norms: Vec<f64>,
    /// ‖W_{T_{i+1}} f₀ − W_{T_i} f₀‖.
    pub residuals: Vec<f64>,
    /// ⟨H⟩ of W_T f₀.
    pub energies: Vec<f64>,
}

pub fn moller_estimate(
    v: &Potential,
    f0: &Wavepacket,
    times: &[f64],
    modifier: Option<&dyn ModifiedPhase>,
    cfg: &EvolutionConfig,
) -> Result<MollerTrace> {
    if (f0.norm - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("f₀ must be normalised, got norm {}", f0.norm)));
    }
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("Møller horizons must be positive and increasing"));
    }
    if modifier.is_some() {
        let low = f0.low_frequency_mass(MODIFIED_SUPPORT_CUTOFF);
        if low > super::cook::SUPPORT_TOLERANCE {
            return Err(Error::Precondition(format!("f̂₀ has mass {low:.3e} near ξ = 0")));
        }
    }
    let vs = f0.arena.sample(v);
    let mut snapshots = Vec::with_capacity(times.len());
    for &t in times {
        let w = if v.is_zero() && modifier.is_none() {
            f0.clone()
        } else {
            let u = asymptotic(f0, t, modifier, cfg.leak_tolerance)?;
            let cfg_t = EvolutionConfig { horizon: cfg.horizon.max(t), ..cfg.clone() };
            propagate_full(&u, v, &cfg_t, -t)?
        };
        snapshots.push(w);
    }
    let residuals = snapshots.windows(2).map(|p| p[1].distance(&p[0])).collect();
    let norms = snapshots.iter().map(|s| s.norm).collect();
    let energies = snapshots.iter().map(|s| s.energy(&vs)).collect();
    Ok(MollerTrace { times: times.to_vec(), snapshots, norms, residuals, energies })
}

#[derive(Clone, Debug)]
pub struct ScatteringMap {
    pub f_plus: Wavepacket,
    pub norm_in: f64,
    pub norm_out: f64,
    /// Norm fraction left near the scatterer after the full evolution.
    pub captured: f64,
    /// Spectral mass of f₀⁺ with ξ > 0 (relative).
    pub forward: f64,
    /// L¹ distance between the energy densities |f̂(ξ)|² + |f̂(−ξ)|² of f₀⁺ and f₀⁻.
    pub energy_l1: f64,
}

/// f₀⁺ = e^{iH₀T} e^{−2iHT} e^{iH₀T} f₀⁻ with T = cfg.horizon.
pub fn scattering_map(v: &Potential, f_minus: &Wavepacket, cfg: &EvolutionConfig) -> Result<ScatteringMap> {
    cfg.validate()?;
    let t = cfg.horizon;
    let (f_plus, captured) = if v.is_zero() {
        (f_minus.clone(), 0.0)
    } else {
        let back = propagate_free_with(f_minus, -t, cfg.leak_tolerance)?;
        let full = propagate_full(&back, v, cfg, 2.0 * t)?;
        let reach = v.effective_range(1e-8) + 10.0;
        let captured = full.mass_in(0.0, reach);
        if captured > CAPTURE_TOLERANCE {
            return Err(Error::BoundStateCapture { fraction: captured });
        }
        (propagate_free_with(&full, -t, cfg.leak_tolerance)?, captured)
    };
    let spec_in = f_minus.spectrum();
    let spec_out = f_plus.spectrum();
    let arena = f_minus.arena;
    let total: f64 = spec_out.iter().map(|z| z.norm_sqr()).sum();
    let forward =
        spec_out.iter().enumerate().filter(|(k, _)| arena.xi(*k) > 0.0).map(|(_, z)| z.norm_sqr()).sum::<f64>() / total;
    let n = arena.n;
    let density = |s: &[Complex64], k: usize| {
        if k == 0 || k == n / 2 {
            s[k].norm_sqr()
        } else {
            s[k].norm_sqr() + s[n - k].norm_sqr()
        }
    };
    let energy_l1 = (0..=n / 2).map(|k| (density(&spec_out, k) - density(&spec_in, k)).abs()).sum::<f64>()
        * arena.dxi()
        / f_minus.norm.powi(2);
    Ok(ScatteringMap { norm_in: f_minus.norm, norm_out: f_plus.norm, f_plus, captured, forward, energy_l1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timedep::arena::Arena;
    use crate::timedep::phase::ShortRange;

    #[test]
    fn free_moller_is_identity() {
        let f = Wavepacket::gaussian(Arena::new(1024, 200.0).unwrap(), 0.0, 1.0, 2.0).unwrap();
        let tr = moller_estimate(&Potential::zero(), &f, &[1.0, 2.0, 4.0], None, &EvolutionConfig::default()).unwrap();
        assert!(tr.snapshots.iter().all(|s| s.samples == f.samples));
        assert!(tr.residuals.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn free_scattering_map_is_identity() {
        let f = Wavepacket::gaussian(Arena::new(1024, 200.0).unwrap(), 0.0, 1.0, 2.0).unwrap();
        let s = scattering_map(&Potential::zero(), &f, &EvolutionConfig::default()).unwrap();
        assert_eq!(s.f_plus.samples, f.samples);
        assert_eq!(s.energy_l1, 0.0);
    }

    #[test]
    fn coordinate_form_approaches_free_evolution() {
        let f = Wavepacket::bump(Arena::new(4096, 600.0).unwrap(), 0.0, 1.0, 2.0).unwrap();
        // the dropped factor e^{ix²/4t} on the right costs O(1/t)
        let d: Vec<f64> = [40.0, 80.0]
            .iter()
            .map(|&t| {
                let a = asymptotic(&f, t, Some(&ShortRange), 1e-8).unwrap();
                a.distance(&propagate_free_with(&f, t, 1e-8).unwrap())
            })
            .collect();
        assert!((d[1] / d[0] - 0.5).abs() < 0.1, "{d:?}");
    }

    #[test]
    fn preconditions() {
        let f = Wavepacket::gaussian(Arena::new(1024, 200.0).unwrap(), 0.0, 0.1, 2.0).unwrap();
        let cfg = EvolutionConfig::default();
        assert!(moller_estimate(&Potential::zero(), &f, &[1.0], Some(&ShortRange), &cfg).is_err());
        assert!(moller_estimate(&Potential::zero(), &f, &[2.0, 1.0], None, &cfg).is_err());
        let mut g = f.clone();
        g.norm = 2.0;
        assert!(moller_estimate(&Potential::zero(), &g, &[1.0], None, &cfg).is_err());
    }
}
