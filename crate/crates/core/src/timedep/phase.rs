//! Modified free phases Ξ(x, t) and the eikonal residual ∂Ξ/∂t + |∇Ξ|² + V.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::grid::gauss_legendre;
use crate::numerics::{fit, Potential, Shape};

pub trait ModifiedPhase: Send + Sync {
    fn name(&self) -> &'static str;
    /// Ξ(x, t).
    fn xi(&self, x: f64, t: f64) -> f64;
    /// (∂Ξ/∂t, ∂Ξ/∂x).
    fn gradient(&self, x: f64, t: f64) -> (f64, f64);
}

/// Ξ = x²/(4t).
pub struct ShortRange;

impl ModifiedPhase for ShortRange {
    fn name(&self) -> &'static str {
        "short-range"
    }
    fn xi(&self, x: f64, t: f64) -> f64 {
        x * x / (4.0 * t)
    }
    fn gradient(&self, x: f64, t: f64) -> (f64, f64) {
        (-x * x / (4.0 * t * t), x / (2.0 * t))
    }
}

/// Ξ = x²/(4t) − t ∫₀¹ V(θx) dθ.
pub struct AveragePotential {
    v: Potential,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl AveragePotential {
    pub fn new(v: Potential) -> Self {
        let (x, w) = gauss_legendre(64);
        let nodes = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let weights = w.iter().map(|w| 0.5 * w).collect();
        Self { v, nodes, weights }
    }

    /// (∫₀¹ V(θx) dθ, ∫₀¹ θ V'(θx) dθ) with V taken radially.
    fn averages(&self, x: f64) -> (f64, f64) {
        let a = x.abs();
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        // two panels keep the integrand resolved when |x| is large
        for (lo, hi) in [(0.0, 1.0 / a.max(1.0)), (1.0 / a.max(1.0), 1.0)] {
            if hi <= lo {
                continue;
            }
            for (t, w) in self.nodes.iter().zip(&self.weights) {
                let th = lo + (hi - lo) * t;
                let wt = (hi - lo) * w;
                m0 += wt * self.v.eval(th * a);
                m1 += wt * th * self.v.derivative(th * a);
            }
        }
        (m0, m1 * x.signum())
    }
}

impl ModifiedPhase for AveragePotential {
    fn name(&self) -> &'static str {
        "average-potential"
    }
    fn xi(&self, x: f64, t: f64) -> f64 {
        x * x / (4.0 * t) - t * self.averages(x).0
    }
    fn gradient(&self, x: f64, t: f64) -> (f64, f64) {
        let (m0, m1) = self.averages(x);
        (-x * x / (4.0 * t * t) - m0, x / (2.0 * t) - t * m1)
    }
}

/// Ξ = x²/(4t) − κ t ln t / |x|.
pub struct CoulombLog {
    pub kappa: f64,
}

impl ModifiedPhase for CoulombLog {
    fn name(&self) -> &'static str {
        "coulomb-log"
    }
    fn xi(&self, x: f64, t: f64) -> f64 {
        x * x / (4.0 * t) - self.kappa * t * t.abs().ln() / x.abs().max(f64::MIN_POSITIVE)
    }
    fn gradient(&self, x: f64, t: f64) -> (f64, f64) {
        let a = x.abs().max(f64::MIN_POSITIVE);
        let lt = t.abs().ln();
        (
            -x * x / (4.0 * t * t) - self.kappa * (lt + 1.0) / a,
            x / (2.0 * t) + self.kappa * t * lt * x.signum() / (a * a),
        )
    }
}

pub const MODIFIED_PHASES: &[&str] = &["short-range", "average-potential", "coulomb-log"];

/// Looks up a modified phase; the potential supplies κ or the averaged profile.
pub fn modified_phase(name: &str, v: &Potential) -> Result<Box<dyn ModifiedPhase>> {
    match name {
        "short-range" => Ok(Box::new(ShortRange)),
        "average-potential" => Ok(Box::new(AveragePotential::new(v.clone()))),
        "coulomb-log" => match v.shape {
            Shape::TruncatedCoulomb { kappa, .. } => Ok(Box::new(CoulombLog { kappa })),
            Shape::Zero => Ok(Box::new(CoulombLog { kappa: 0.0 })),
            _ => Err(invalid(format!("coulomb-log phase needs a coulomb potential, got {}", v.kind()))),
        },
        _ => Err(invalid(format!("unknown modified phase '{name}' (known: {MODIFIED_PHASES:?})"))),
    }
}

/// Sampling region {(x, t): t ∈ times, |x| ∈ [lo·t, hi·t]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Region {
    pub times: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EikonalField {
    pub times: Vec<f64>,
    /// (x, residual) samples per time.
    pub samples: Vec<Vec<(f64, f64)>>,
    /// max |residual| per time.
    pub sup: Vec<f64>,
    /// −slope of log sup vs log t over the fit window.
    pub exponent: f64,
}

pub fn eikonal_residual(phase: &dyn ModifiedPhase, v: &Potential, region: &Region, window: f64) -> Result<EikonalField> {
    if region.times.is_empty() || region.times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Domain("eikonal region needs positive times".into()));
    }
    if !(region.lo > 0.0 && region.hi > region.lo) || region.points < 2 {
        return Err(Error::Domain("eikonal region must exclude x = 0 and have 0 < lo < hi".into()));
    }
    let mut samples = Vec::new();
    let mut sup = Vec::new();
    for &t in &region.times {
        let row: Vec<(f64, f64)> = (0..region.points)
            .map(|i| {
                let x = t * (region.lo + (region.hi - region.lo) * i as f64 / (region.points - 1) as f64);
                let (dt, dx) = phase.gradient(x, t);
                (x, dt + dx * dx + v.eval(x))
            })
            .collect();
        sup.push(row.iter().fold(0.0f64, |m, p| m.max(p.1.abs())));
        samples.push(row);
    }
    let exponent = if sup.iter().all(|s| *s == 0.0) {
        f64::INFINITY
    } else {
        fit::decay_exponent(&region.times, &sup, window)
    };
    Ok(EikonalField { times: region.times.clone(), samples, sup, exponent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::preset;

    fn check_gradient(p: &dyn ModifiedPhase, x: f64, t: f64) {
        let h = 1e-5;
        let dt = (p.xi(x, t + h) - p.xi(x, t - h)) / (2.0 * h);
        let dx = (p.xi(x + h, t) - p.xi(x - h, t)) / (2.0 * h);
        let (gt, gx) = p.gradient(x, t);
        assert!((dt - gt).abs() < 1e-6 * (1.0 + gt.abs()), "{} dt {dt} vs {gt}", p.name());
        assert!((dx - gx).abs() < 1e-6 * (1.0 + gx.abs()), "{} dx {dx} vs {gx}", p.name());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let v = preset("power-tail-0.8").unwrap();
        for name in MODIFIED_PHASES {
            let p = modified_phase(name, &preset("truncated-coulomb").unwrap()).unwrap();
            check_gradient(p.as_ref(), 7.3, 4.1);
            check_gradient(p.as_ref(), -3.2, 9.0);
        }
        check_gradient(&AveragePotential::new(v), 12.0, 5.0);
    }

    #[test]
    fn free_phase_solves_free_eikonal_exactly() {
        let region = Region { times: vec![1.0, 2.0, 4.0], lo: 0.5, hi: 2.0, points: 11 };
        let f = eikonal_residual(&ShortRange, &Potential::zero(), &region, 10.0).unwrap();
        assert!(f.sup.iter().all(|s| *s < 1e-15));
    }

    #[test]
    fn bad_regions() {
        let region = Region { times: vec![0.0, 1.0], lo: 0.5, hi: 2.0, points: 5 };
        assert!(eikonal_residual(&ShortRange, &Potential::zero(), &region, 10.0).is_err());
        let region = Region { times: vec![1.0], lo: 0.0, hi: 2.0, points: 5 };
        assert!(eikonal_residual(&ShortRange, &Potential::zero(), &region, 10.0).is_err());
    }

    #[test]
    fn coulomb_log_requires_coulomb() {
        assert!(modified_phase("coulomb-log", &preset("gaussian").unwrap()).is_err());
        assert!(modified_phase("dollard", &Potential::zero()).is_err());
    }
}
