//! Stationary two-body scattering in d = 3.
//!
//! Phase shifts come from outward radial integration ([`coordinate`]); the
//! momentum-space Lippmann–Schwinger solve ([`momentum`]) is an independent
//! cross-check. Amplitudes, S-matrix elements and cross sections are
//! synthesised from phase shifts in [`amplitude`].

pub mod absorption;
pub mod amplitude;
pub mod born;
pub mod coordinate;
pub mod momentum;
pub mod partial_wave;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use absorption::{limiting_absorption_probe, AbsorptionTrace, SandwichedResolvent};
pub use amplitude::{amplitude, cross_sections, phase_shifts, s_from_kernel, s_matrix, CrossSections, PhaseShifts};
pub use born::{born_series, BornOptions, BornResult};
pub use partial_wave::{
    default_radial_grid, phase_shift_solver, solve_partial_wave, PartialWaveSolution, PhaseShiftSolver,
};

use crate::error::{domain, Error, Result};
use crate::numerics::{ComplexEnergy, Potential};

/// ν_d(λ) = −e^{πi(d−3)/4} 2^{−1} (2π)^{−(d−1)/2} λ^{(d−3)/4}.
pub fn nu_d(d: u32, lambda: f64) -> Result<Complex64> {
    if d < 2 {
        return Err(domain(format!("dimension must be at least 2, got {d}")));
    }
    if !(lambda > 0.0) {
        return Err(domain(format!("energy must be positive, got {lambda}")));
    }
    let df = d as f64;
    let phase = Complex64::from_polar(1.0, std::f64::consts::PI * (df - 3.0) / 4.0);
    let modulus = 0.5 * (2.0 * std::f64::consts::PI).powf(-(df - 1.0) / 2.0) * lambda.powf((df - 3.0) / 4.0);
    Ok(-phase * modulus)
}

/// Kernel of (−Δ − z)^{−1} in R³: e^{i√z|x−x'|} / (4π|x−x'|), Im √z > 0.
pub fn free_resolvent_kernel(x: [f64; 3], xp: [f64; 3], z: ComplexEnergy) -> Result<Complex64> {
    let d = ((x[0] - xp[0]).powi(2) + (x[1] - xp[1]).powi(2) + (x[2] - xp[2]).powi(2)).sqrt();
    if d == 0.0 {
        return Err(Error::SingularPoint);
    }
    let s = z.sqrt();
    Ok((Complex64::new(0.0, d) * s).exp() / (4.0 * std::f64::consts::PI * d))
}

/// Per-energy summary of a stationary solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScatteringResult {
    pub lambda: f64,
    pub phase_shifts: Vec<(usize, f64)>,
    pub s_matrix: Vec<Complex64>,
    /// (cos γ, a) samples of the amplitude.
    pub amplitude: Vec<(f64, Complex64)>,
    pub cross_sections: CrossSections,
    /// max_ℓ |1 − |S_ℓ||.
    pub unitarity_deviation: f64,
    /// max_ℓ |S_ℓ(kernel) − e^{2iδ_ℓ}|.
    pub kernel_deviation: f64,
}

/// Incoming direction used for kernel reconstruction and cross sections.
pub const DEFAULT_OMEGA: [f64; 3] = [0.36, -0.48, 0.8];

pub fn scatter(v: &Potential, lambda: f64, solver: &dyn PhaseShiftSolver, n_angles: usize) -> Result<ScatteringResult> {
    let ps = phase_shifts(v, lambda, solver, 200)?;
    if !ps.converged {
        return Err(Error::TruncationNotReached { l_max: ps.l_max(), tail: ps.tail });
    }
    let s = s_matrix(&ps);
    let sk = s_from_kernel(&ps, DEFAULT_OMEGA)?;
    let unitarity_deviation = s.iter().map(|x| (1.0 - x.norm()).abs()).fold(0.0, f64::max);
    let kernel_deviation = s.iter().zip(&sk).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let cs = cross_sections(&ps, DEFAULT_OMEGA, n_angles)?;
    let amplitude = cs
        .dsigma
        .iter()
        .map(|(g, _)| (g.cos(), amplitude::amplitude_cos(&ps, g.cos())))
        .collect();
    Ok(ScatteringResult {
        lambda,
        phase_shifts: ps.deltas.iter().copied().enumerate().collect(),
        s_matrix: s,
        amplitude,
        cross_sections: cs,
        unitarity_deviation,
        kernel_deviation,
    })
}
