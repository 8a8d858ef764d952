use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coordinate::{self, reduce_half_pi, RadialOptions};
use super::momentum::{self, MomentumOptions};
use crate::error::{invalid, Error, Result};
use crate::numerics::{GridScheme, Potential, RadialGrid};

/// Agreement required between the coordinate and momentum-space phase shifts.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

/// A method that turns (V, k, ℓ) into δ_ℓ mod π.
pub trait PhaseShiftSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn phase_shift(&self, v: &Potential, k: f64, l: usize) -> Result<f64>;
}

#[derive(Clone, Debug, Default)]
pub struct CoordinateSolver {
    pub grid: Option<RadialGrid>,
    pub opts: RadialOptions,
}

impl PhaseShiftSolver for CoordinateSolver {
    fn name(&self) -> &'static str {
        "coordinate"
    }

    fn phase_shift(&self, v: &Potential, k: f64, l: usize) -> Result<f64> {
        let grid = match &self.grid {
            Some(g) => g.clone(),
            None => default_radial_grid(v, k)?,
        };
        Ok(coordinate::integrate(v, k, l, &grid, &self.opts)?.delta)
    }
}

#[derive(Clone, Debug, Default)]
pub struct MomentumSolver {
    pub opts: MomentumOptions,
}

impl PhaseShiftSolver for MomentumSolver {
    fn name(&self) -> &'static str {
        "momentum"
    }

    fn phase_shift(&self, v: &Potential, k: f64, l: usize) -> Result<f64> {
        Ok(momentum::solve(v, k, l, &self.opts)?.delta)
    }
}

pub const PHASE_SHIFT_SOLVERS: &[&str] = &["coordinate", "momentum"];

/// Looks up a phase-shift solver by name with default settings.
pub fn phase_shift_solver(name: &str) -> Result<Box<dyn PhaseShiftSolver>> {
    match name {
        "coordinate" => Ok(Box::new(CoordinateSolver::default())),
        "momentum" => Ok(Box::new(MomentumSolver::default())),
        _ => Err(invalid(format!("unknown phase-shift solver '{name}' (known: {PHASE_SHIFT_SOLVERS:?})"))),
    }
}

/// Radial grid reaching past the potential's range by a few wavelengths.
pub fn default_radial_grid(v: &Potential, k: f64) -> Result<RadialGrid> {
    let range = v.effective_range(1e-12).max(1.0);
    let r_max = (range + 2.0 * std::f64::consts::PI / k.max(1e-3)).ceil();
    let panels = (2.0 * r_max).ceil() as usize;
    RadialGrid::new(8 * panels, r_max, GridScheme::CompositeGauss { panels })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartialWaveSolution {
    pub l: usize,
    pub k: f64,
    /// Phase shift in (−π/2, π/2].
    pub delta: f64,
    /// Integer count n with unreduced phase δ + nπ.
    pub branch: i64,
    /// Radial function on `grid`, normalised to u ~ sin(kr − ℓπ/2 + δ).
    pub u: Vec<f64>,
    pub grid: RadialGrid,
    /// Momentum-space phase shift and its distance (mod π) from `delta`.
    pub delta_momentum: f64,
    pub cross_check: f64,
}

impl PartialWaveSolution {
    pub fn s(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * self.delta)
    }
}

/// Solves one partial wave in coordinate space and cross-checks it against the
/// momentum-space Lippmann–Schwinger solution.
pub fn solve_partial_wave(v: &Potential, k: f64, l: usize, grid: &RadialGrid) -> Result<PartialWaveSolution> {
    if !v.is_short_range() {
        return Err(Error::Precondition(format!(
            "stationary solves need a short-range potential; {} has rho = {}",
            v.kind(),
            v.rho()
        )));
    }
    let run = coordinate::integrate(v, k, l, grid, &RadialOptions::default())?;
    let mom = momentum::solve(v, k, l, &MomentumOptions::default())?;
    let cross_check = reduce_half_pi(run.delta - mom.delta).abs();
    if cross_check > CROSS_CHECK_TOL {
        return Err(Error::Discretization(format!(
            "coordinate and momentum phase shifts differ by {cross_check:.3e} at k = {k}, l = {l}"
        )));
    }
    Ok(PartialWaveSolution {
        l,
        k,
        delta: run.delta,
        branch: run.branch,
        u: run.u,
        grid: grid.clone(),
        delta_momentum: mom.delta,
        cross_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::preset;

    #[test]
    fn registry_knows_both_solvers() {
        for name in PHASE_SHIFT_SOLVERS {
            assert_eq!(phase_shift_solver(name).unwrap().name(), *name);
        }
        assert!(phase_shift_solver("wkb").is_err());
    }

    #[test]
    fn long_range_rejected() {
        let v = preset("truncated-coulomb").unwrap();
        let g = default_radial_grid(&preset("gaussian").unwrap(), 1.0).unwrap();
        assert!(matches!(solve_partial_wave(&v, 1.0, 0, &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn free_wave_is_riccati_bessel() {
        let v = Potential::zero();
        let g = default_radial_grid(&v, 0.8).unwrap();
        let sol = solve_partial_wave(&v, 0.8, 2, &g).unwrap();
        assert!(sol.delta.abs() < 1e-11);
        let i = g.len() / 2;
        let (jh, ..) = coordinate::riccati(2, 0.8 * g.nodes[i]).unwrap();
        assert!((sol.u[i] - jh).abs() < 1e-9);
    }
}
