//! Efimov counting: three-body bound states below a fixed infrared energy as
//! the ultraviolet cutoff grows, with pairs held at zero-energy resonance.
//!
//! Pairs interact through the contact form factor with cutoff Λ. A coupling
//! c_α ∈ [0, 1] sets s_α = c_α s₀(Λ), where s₀ is the critical strength; c = 1
//! is the resonance. The count is the number of eigenvalues of −Q(z_IR) above 1.

use serde::{Deserialize, Serialize};

use super::faddeev::{FaddeevProblem, Reduction};
use super::jacobi::JacobiSystem;
use super::separable::{critical_strength, form_factor, SeparablePotential};
use crate::error::{invalid, Error, Result};
use crate::numerics::{GridScheme, MomentumGrid};

/// |c − 1| below which a pair counts as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-5;

/// States with |E| above this fraction of Λ² feel the cutoff and are left out
/// of the ratio comparison.
pub const UNIVERSAL_WINDOW: f64 = 1e-2;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EfimovSetup {
    pub masses: [f64; 3],
    /// c_α = s_α / s₀ for pairs (12), (23), (31).
    pub couplings: [f64; 3],
    /// Infrared energy z_IR < 0 below which states are counted.
    pub ir_energy: f64,
    /// Spectator-grid nodes per decade of momentum.
    pub nodes_per_decade: usize,
    pub reduction: Reduction,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EfimovRow {
    pub cutoff: f64,
    pub count: usize,
    /// Bound-state energies below z_IR, ascending.
    pub energies: Vec<f64>,
    /// Leading eigenvalues of −Q(z_IR).
    pub top_eigenvalues: Vec<f64>,
    pub grid_nodes: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EfimovCount {
    pub rows: Vec<EfimovRow>,
    /// |E_{n+1}| / |E_n| at the largest cutoff.
    pub ratios: Vec<f64>,
    pub resonant_pairs: usize,
}

impl EfimovCount {
    /// Ratios at the largest cutoff whose deeper state lies inside the universal window.
    pub fn universal_ratios(&self) -> Vec<f64> {
        let Some(row) = self.rows.last() else { return vec![] };
        let limit = UNIVERSAL_WINDOW * row.cutoff * row.cutoff;
        row.energies.windows(2).filter(|w| w[0].abs() <= limit).map(|w| w[1] / w[0]).collect()
    }
}

impl EfimovSetup {
    pub fn validate(&self) -> Result<usize> {
        if !(self.ir_energy < 0.0) {
            return Err(invalid(format!("infrared energy must be negative, got {}", self.ir_energy)));
        }
        if self.nodes_per_decade < 4 {
            return Err(invalid("need at least 4 grid nodes per decade"));
        }
        let mut resonant = 0;
        for (a, &c) in self.couplings.iter().enumerate() {
            if !(c >= 0.0) {
                return Err(invalid(format!("coupling of pair {a} must be nonnegative")));
            }
            if (c - 1.0).abs() <= RESONANCE_TOLERANCE {
                resonant += 1;
            } else if c > 1.0 {
                return Err(Error::Precondition(format!(
                    "pair {a} is past resonance (c = {c}); it binds and moves the threshold"
                )));
            }
        }
        if resonant == 0 {
            return Err(Error::Precondition("no pair is at zero-energy resonance".into()));
        }
        Ok(resonant)
    }

    /// Faddeev problem at cutoff Λ on a log grid from 10⁻² κ_IR to 4Λ.
    pub fn problem(&self, cutoff: f64) -> Result<FaddeevProblem> {
        let jacobi = JacobiSystem::new(self.masses)?;
        let form = form_factor("contact", cutoff)?;
        let potentials: [SeparablePotential; 3] = std::array::from_fn(|a| {
            let s0 = critical_strength(form.as_ref(), jacobi.pair_mass(a));
            let c = if (self.couplings[a] - 1.0).abs() <= RESONANCE_TOLERANCE { 1.0 } else { self.couplings[a] };
            SeparablePotential::new(c * s0, form.clone())
        });
        let n_min = (0..3).map(|a| jacobi.spectator_mass(a)).fold(f64::INFINITY, f64::min);
        let k_ir = (2.0 * n_min * self.ir_energy.abs()).sqrt();
        let (lo, hi) = (1e-2 * k_ir, 4.0 * cutoff);
        if !(lo < hi) {
            return Err(invalid("infrared scale lies above the cutoff"));
        }
        let nodes = ((hi / lo).log10() * self.nodes_per_decade as f64).ceil() as usize;
        let grid = MomentumGrid::new(nodes, hi, GridScheme::LogGauss { lower: lo })?;
        FaddeevProblem::new(jacobi, potentials, grid)
    }
}

/// Counts at each cutoff; energies are located by bisection below z_IR.
pub fn efimov_count(setup: &EfimovSetup, cutoffs: &[f64]) -> Result<EfimovCount> {
    let resonant = setup.validate()?;
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[1] <= w[0]) || cutoffs[0] <= 0.0 {
        return Err(invalid("cutoffs must be positive and increasing"));
    }
    let z = setup.ir_energy;
    let mut rows = Vec::new();
    for &cutoff in cutoffs {
        let problem = setup.problem(cutoff)?;
        let op = problem.assemble(z, setup.reduction)?;
        let mu = op.eigenvalues();
        let count = mu.iter().filter(|m| **m > 1.0).count();
        let energies = if count == 0 {
            vec![]
        } else {
            // a floor deep enough that nothing is bound below it
            let mut floor = -cutoff * cutoff;
            while problem.assemble(floor, setup.reduction)?.leading() > 1.0 {
                floor *= 10.0;
                if floor < -1e12 * cutoff * cutoff {
                    return Err(Error::GridResolution("no energy floor below the deepest state".into()));
                }
            }
            problem.bound_states(floor, z, setup.reduction)?
        };
        if energies.len() != count {
            return Err(Error::GridResolution(format!(
                "found {} energies for {count} eigenvalues above 1 at cutoff {cutoff}",
                energies.len()
            )));
        }
        rows.push(EfimovRow {
            cutoff,
            count,
            energies,
            top_eigenvalues: mu.iter().take(6).copied().collect(),
            grid_nodes: problem.grid.len(),
        });
    }
    let ratios = rows.last().map(|r| r.energies.windows(2).map(|w| w[1] / w[0]).collect()).unwrap_or_default();
    Ok(EfimovCount { rows, ratios, resonant_pairs: resonant })
}
