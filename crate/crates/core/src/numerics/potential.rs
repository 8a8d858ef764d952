//! Radial potentials with a decay envelope |V(r)| ≤ C (1 + r)^{-ρ}.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};

/// Analytic radial shape. Negative strengths attract.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Zero,
    /// v0 for r < radius, 0 outside.
    SquareWell { v0: f64, radius: f64 },
    /// v0 · exp(−r²/width²).
    Gaussian { v0: f64, width: f64 },
    /// g · e^{−μr} (1 − e^{−r/core}) / r; `core = 0` gives the bare Yukawa form.
    Yukawa {
        g: f64,
        mu: f64,
        #[serde(default)]
        core: f64,
    },
    /// g · (1 + r²)^{−ρ/2}.
    PowerTail { g: f64, rho: f64 },
    /// κ / √(r² + core²), multiplied by a Fermi taper 1/(1 + e^{(r − cutoff)/w})
    /// with w = [`COULOMB_TAPER`] when a cutoff is given.
    TruncatedCoulomb {
        kappa: f64,
        core: f64,
        #[serde(default)]
        cutoff: Option<f64>,
    },
}

/// Decay envelope C (1 + r)^{−ρ}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub c: f64,
    pub rho: f64,
}

impl Envelope {
    pub fn at(&self, r: f64) -> f64 {
        self.c * (1.0 + r).powf(-self.rho)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub shape: Shape,
    pub envelope: Envelope,
}

impl Potential {
    /// Validates shape parameters. The envelope itself is checked by [`Potential::check_envelope`].
    pub fn new(shape: Shape, envelope: Envelope) -> Result<Self> {
        let bad = |m: &str| Err(invalid(m.to_string()));
        match &shape {
            Shape::Zero => {}
            Shape::SquareWell { v0, radius } => {
                if !(radius.is_finite() && *radius > 0.0) || !v0.is_finite() {
                    return bad("square well needs finite v0 and radius > 0");
                }
            }
            Shape::Gaussian { v0, width } => {
                if !(width.is_finite() && *width > 0.0) || !v0.is_finite() {
                    return bad("gaussian needs finite v0 and width > 0");
                }
            }
            Shape::Yukawa { g, mu, core } => {
                if !g.is_finite() || !(*mu >= 0.0) || !(*core >= 0.0) {
                    return bad("yukawa needs finite g, mu >= 0, core >= 0");
                }
            }
            Shape::PowerTail { g, rho } => {
                if !g.is_finite() || !(*rho > 0.0) {
                    return bad("power-tail needs finite g and rho > 0");
                }
            }
            Shape::TruncatedCoulomb { kappa, core, cutoff } => {
                if !kappa.is_finite() || !(*core > 0.0) {
                    return bad("truncated-coulomb needs finite kappa and core > 0");
                }
                if let Some(rc) = cutoff {
                    if !(*rc > 0.0) {
                        return bad("truncated-coulomb cutoff must be positive");
                    }
                }
            }
        }
        if !(envelope.c > 0.0 && envelope.rho > 0.0) {
            return bad("envelope needs C > 0 and rho > 0");
        }
        Ok(Self { shape, envelope })
    }

    /// Shape with the tightest envelope exponent it admits and a constant
    /// covering the shape on [0, 10³]. Short-range shapes report ρ = 2 unless
    /// stated otherwise.
    pub fn with_natural_envelope(shape: Shape) -> Result<Self> {
        let rho = match &shape {
            Shape::PowerTail { rho, .. } => *rho,
            Shape::TruncatedCoulomb { cutoff: None, .. } => 1.0,
            _ => 2.0,
        };
        let probe = Self::new(shape.clone(), Envelope { c: 1.0, rho })?;
        let c = envelope_constant(&probe, rho, 1e3, 20_000).max(f64::MIN_POSITIVE);
        Self::new(shape, Envelope { c: c * (1.0 + 1e-9), rho })
    }

    pub fn zero() -> Self {
        Self { shape: Shape::Zero, envelope: Envelope { c: 1.0, rho: 2.0 } }
    }

    pub fn is_zero(&self) -> bool {
        match &self.shape {
            Shape::Zero => true,
            Shape::SquareWell { v0, .. } | Shape::Gaussian { v0, .. } => *v0 == 0.0,
            Shape::Yukawa { g, .. } | Shape::PowerTail { g, .. } => *g == 0.0,
            Shape::TruncatedCoulomb { kappa, .. } => *kappa == 0.0,
        }
    }

    pub fn rho(&self) -> f64 {
        self.envelope.rho
    }

    pub fn kind(&self) -> &'static str {
        match &self.shape {
            Shape::Zero => "zero",
            Shape::SquareWell { .. } => "square-well",
            Shape::Gaussian { .. } => "gaussian",
            Shape::Yukawa { .. } => "yukawa",
            Shape::PowerTail { .. } => "power-tail",
            Shape::TruncatedCoulomb { .. } => "truncated-coulomb",
        }
    }

    /// V(r) for r ≥ 0.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        match &self.shape {
            Shape::Zero => 0.0,
            Shape::SquareWell { v0, radius } => {
                if r < *radius {
                    *v0
                } else {
                    0.0
                }
            }
            Shape::Gaussian { v0, width } => v0 * (-(r / width).powi(2)).exp(),
            Shape::Yukawa { g, mu, core } => {
                if *core > 0.0 {
                    let shield = if r < 1e-8 * core { r / core } else { -(-r / core).exp_m1() };
                    if r == 0.0 {
                        g / core
                    } else {
                        g * (-mu * r).exp() * shield / r
                    }
                } else if r == 0.0 {
                    f64::INFINITY * g.signum()
                } else {
                    g * (-mu * r).exp() / r
                }
            }
            Shape::PowerTail { g, rho } => g * (1.0 + r * r).powf(-0.5 * rho),
            Shape::TruncatedCoulomb { kappa, core, cutoff } => {
                kappa / (r * r + core * core).sqrt() * cutoff.map_or(1.0, |rc| fermi(r, rc))
            }
        }
    }

    /// `eval` with the pre/post-conditions enforced.
    pub fn eval_checked(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(domain(format!("potential evaluated at r = {r} < 0")));
        }
        let v = self.eval(r);
        if !(v.abs() <= self.envelope.at(r) * (1.0 + 1e-12)) {
            return Err(domain(format!(
                "|V({r})| = {} exceeds envelope {}",
                v.abs(),
                self.envelope.at(r)
            )));
        }
        Ok(v)
    }

    /// dV/dr (zero across the jump of discontinuous shapes).
    pub fn derivative(&self, r: f64) -> f64 {
        let r = r.abs();
        match &self.shape {
            Shape::Zero | Shape::SquareWell { .. } => 0.0,
            Shape::Gaussian { width, .. } => -2.0 * r / (width * width) * self.eval(r),
            Shape::Yukawa { g, mu, core } => {
                if r == 0.0 {
                    return if *core > 0.0 { -g * (mu + 0.5 / core) / core } else { f64::NAN };
                }
                let (s, ds) = if *core > 0.0 {
                    (-(-r / core).exp_m1(), (-r / core).exp() / core)
                } else {
                    (1.0, 0.0)
                };
                g * (-mu * r).exp() * ((ds - mu * s) / r - s / (r * r))
            }
            Shape::PowerTail { g, rho } => -g * rho * r * (1.0 + r * r).powf(-0.5 * rho - 1.0),
            Shape::TruncatedCoulomb { kappa, core, cutoff } => {
                let bare = kappa / (r * r + core * core).sqrt();
                let dbare = -kappa * r * (r * r + core * core).powf(-1.5);
                match cutoff {
                    None => dbare,
                    Some(rc) => {
                        let f = fermi(r, *rc);
                        dbare * f - bare * f * (1.0 - f) / COULOMB_TAPER
                    }
                }
            }
        }
    }

    /// Radii where V or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::SquareWell { radius, .. } => vec![*radius],
            _ => Vec::new(),
        }
    }

    /// Compact support radius, if any.
    pub fn support(&self) -> Option<f64> {
        match &self.shape {
            Shape::Zero => Some(0.0),
            Shape::SquareWell { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// Radius beyond which |V| < tol (exact for compactly supported shapes).
    pub fn effective_range(&self, tol: f64) -> f64 {
        if let Some(r) = self.support() {
            return r;
        }
        match &self.shape {
            Shape::Gaussian { v0, width } => {
                let ratio = v0.abs() / tol;
                if ratio <= 1.0 {
                    0.0
                } else {
                    width * ratio.ln().sqrt()
                }
            }
            _ => {
                // bracket then bisect on the monotone tail
                let mut hi = 1.0;
                while self.eval(hi).abs() >= tol && hi < 1e12 {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid).abs() >= tol {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    /// True when the potential decays faster than any power, or the envelope has ρ > 1.
    pub fn is_short_range(&self) -> bool {
        match &self.shape {
            Shape::PowerTail { rho, .. } => *rho > 1.0,
            Shape::TruncatedCoulomb { cutoff: None, .. } => false,
            _ => true,
        }
    }

    /// Same shape with strength multiplied by κ.
    pub fn scaled(&self, kappa: f64) -> Self {
        let shape = match self.shape.clone() {
            Shape::Zero => Shape::Zero,
            Shape::SquareWell { v0, radius } => Shape::SquareWell { v0: kappa * v0, radius },
            Shape::Gaussian { v0, width } => Shape::Gaussian { v0: kappa * v0, width },
            Shape::Yukawa { g, mu, core } => Shape::Yukawa { g: kappa * g, mu, core },
            Shape::PowerTail { g, rho } => Shape::PowerTail { g: kappa * g, rho },
            Shape::TruncatedCoulomb { kappa: k, core, cutoff } => {
                Shape::TruncatedCoulomb { kappa: kappa * k, core, cutoff }
            }
        };
        let c = (kappa.abs() * self.envelope.c).max(f64::MIN_POSITIVE);
        Self { shape, envelope: Envelope { c, rho: self.envelope.rho } }
    }

    /// Checks |V(r)| ≤ C(1+r)^{−ρ} on the given radii.
    pub fn check_envelope(&self, radii: &[f64]) -> Result<()> {
        for &r in radii {
            let v = self.eval(r).abs();
            let bound = self.envelope.at(r);
            if !(v <= bound * (1.0 + 1e-12)) {
                return Err(Error::Domain(format!(
                    "envelope violated at r = {r}: |V| = {v:.6e} > {bound:.6e}"
                )));
            }
        }
        Ok(())
    }

    /// Envelope check on `n` points spread over [0, r_max] (half linear, half logarithmic).
    pub fn check_envelope_sampled(&self, n: usize, r_max: f64) -> Result<()> {
        self.check_envelope(&envelope_samples(n, r_max))
    }
}

/// Width of the smooth cutoff applied to truncated Coulomb tails.
pub const COULOMB_TAPER: f64 = 0.5;

fn fermi(r: f64, rc: f64) -> f64 {
    1.0 / (1.0 + ((r - rc) / COULOMB_TAPER).exp())
}

pub fn envelope_samples(n: usize, r_max: f64) -> Vec<f64> {
    let half = n / 2;
    let mut out: Vec<f64> = (0..half).map(|i| r_max.min(20.0) * i as f64 / half as f64).collect();
    let (a, b) = (1e-3f64.ln(), r_max.ln());
    let rest = n - half;
    out.extend((0..rest).map(|i| (a + (b - a) * i as f64 / (rest - 1).max(1) as f64).exp()));
    out
}

fn envelope_constant(p: &Potential, rho: f64, r_max: f64, n: usize) -> f64 {
    let mut samples = envelope_samples(n, r_max);
    samples.extend(p.breakpoints().iter().map(|b| b * (1.0 - 1e-12)));
    samples
        .iter()
        .map(|&r| p.eval(r).abs() * (1.0 + r).powf(rho))
        .fold(0.0, f64::max)
}

/// Named potential presets shipped with the toolkit.
pub fn preset(name: &str) -> Result<Potential> {
    let shape = match name {
        "zero" => return Ok(Potential::zero()),
        "square-well" => Shape::SquareWell { v0: -1.0, radius: 1.0 },
        "square-well-deep" => Shape::SquareWell { v0: -10.0, radius: 1.0 },
        "gaussian" => Shape::Gaussian { v0: -2.0, width: 1.0 },
        "yukawa" => Shape::Yukawa { g: -1.5, mu: 1.0, core: 0.25 },
        "power-tail-2" => Shape::PowerTail { g: 1.0, rho: 2.0 },
        "power-tail-1.5" => Shape::PowerTail { g: 1.0, rho: 1.5 },
        "power-tail-0.8" => Shape::PowerTail { g: 1.0, rho: 0.8 },
        "truncated-coulomb" => Shape::TruncatedCoulomb { kappa: 1.0, core: 1.0, cutoff: None },
        "truncated-coulomb-screened" => Shape::TruncatedCoulomb { kappa: 1.0, core: 1.0, cutoff: Some(12.0) },
        _ => return Err(invalid(format!("unknown potential preset '{name}'"))),
    };
    Potential::with_natural_envelope(shape)
}

pub const PRESET_NAMES: &[&str] = &[
    "zero",
    "square-well",
    "square-well-deep",
    "gaussian",
    "yukawa",
    "power-tail-2",
    "power-tail-1.5",
    "power-tail-0.8",
    "truncated-coulomb",
    "truncated-coulomb-screened",
];

/// Presets usable in stationary solves (compact support or faster-than-power decay).
pub const STATIONARY_PRESETS: &[&str] = &["square-well", "gaussian", "yukawa", "truncated-coulomb-screened"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_well_outside_is_zero() {
        let v = Potential::with_natural_envelope(Shape::SquareWell { v0: -3.0, radius: 2.0 }).unwrap();
        assert_eq!(v.eval(2.5), 0.0);
        assert_eq!(v.eval(1.0), -3.0);
    }

    #[test]
    fn zero_potential() {
        let v = Potential::new(Shape::Zero, Envelope { c: 123.0, rho: 0.5 }).unwrap();
        assert!([0.0, 1.0, 1e6].iter().all(|&r| v.eval(r) == 0.0));
    }

    #[test]
    fn yukawa_at_one() {
        let (g, mu, rho) = (0.8f64, 1.3f64, 1.5f64);
        let shape = Shape::Yukawa { g, mu, core: 0.0 };
        let v = Potential::new(shape.clone(), Envelope { c: g * 2f64.powf(rho), rho }).unwrap();
        assert!((v.eval(1.0) - g * (-mu).exp()).abs() < 1e-15);
        v.check_envelope(&[1.0]).unwrap();
        let tight = Potential::new(shape, Envelope { c: 0.99 * g * (-mu).exp() * 2f64.powf(rho), rho }).unwrap();
        assert!(tight.check_envelope(&[1.0]).is_err());
    }

    #[test]
    fn presets_pass_envelope() {
        for name in PRESET_NAMES {
            let v = preset(name).unwrap();
            v.check_envelope_sampled(1000, 1e3).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Potential::with_natural_envelope(Shape::SquareWell { v0: 1.0, radius: -1.0 }).is_err());
        assert!(Potential::new(Shape::Zero, Envelope { c: 0.0, rho: 1.0 }).is_err());
    }

    #[test]
    fn checked_eval_rejects_negative_radius() {
        assert!(preset("gaussian").unwrap().eval_checked(-1.0).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for name in ["gaussian", "yukawa", "power-tail-0.8", "truncated-coulomb", "truncated-coulomb-screened"] {
            let v = preset(name).unwrap();
            for &r in &[0.3, 1.7, 6.0] {
                let h = 1e-5;
                let fd = (v.eval(r + h) - v.eval(r - h)) / (2.0 * h);
                assert!((fd - v.derivative(r)).abs() < 1e-6, "{name} r={r}");
            }
        }
    }

    #[test]
    fn scaling_is_linear() {
        let v = preset("yukawa").unwrap();
        let w = v.scaled(0.5);
        assert!((w.eval(0.7) - 0.5 * v.eval(0.7)).abs() < 1e-15);
        w.check_envelope_sampled(1000, 1e3).unwrap();
    }

    #[test]
    fn serde_round_trip() {
        let v = preset("truncated-coulomb-screened").unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"kind\":\"truncated-coulomb\""));
        let back: Potential = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
