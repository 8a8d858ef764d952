//! Weighted resolvents near the real axis.
//!
//! The radial (ℓ = 0) operator −d²/dr² + V is discretised by second differences
//! on a uniform grid. The long-box probe closes the grid with the exact discrete
//! outgoing (or incoming) condition u_{N+1} = μ u_N, μ + 1/μ = 2 − h²z, |μ| < 1,
//! so the finite system reproduces the half-line resolvent for V = 0 beyond the box.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::linalg::{power_norm, solve_tridiagonal, sturm_count};
use crate::numerics::{ComplexEnergy, Potential, Side};

#[derive(Clone, Copy, Debug)]
pub struct ProbeGrid {
    pub h: f64,
    pub length: f64,
}

impl ProbeGrid {
    pub fn for_energy(lambda: f64) -> Self {
        let k = lambda.abs().sqrt().max(1e-3);
        Self { h: (0.3 / k).min(0.05), length: 400.0 }
    }

    fn nodes(&self) -> Vec<f64> {
        let n = (self.length / self.h).round() as usize;
        (1..=n).map(|i| i as f64 * self.h).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbsorptionTrace {
    pub lambda: f64,
    pub r_weight: f64,
    pub eps: Vec<f64>,
    pub norms_plus: Vec<f64>,
    pub norms_minus: Vec<f64>,
    /// |n_last − n_prev| / n_last on the + side.
    pub last_relative_change: f64,
    /// Hilbert-identity residual on the dense 50-point discretisation at the smallest ε.
    pub hilbert_residual: f64,
}

impl AbsorptionTrace {
    pub fn stabilizes(&self, tol: f64) -> bool {
        self.last_relative_change < tol
    }
}

fn exterior_mu(z: Complex64, h: f64) -> Complex64 {
    // μ² − (2 − h²z) μ + 1 = 0; pick |μ| < 1
    let b = Complex64::new(2.0, 0.0) - z * h * h;
    let disc = (b * b - 4.0).sqrt();
    let m1 = 0.5 * (b + disc);
    let m2 = 0.5 * (b - disc);
    if m1.norm() < m2.norm() {
        m1
    } else {
        m2
    }
}

/// Tridiagonal (lower, diag, upper) of H − z with the transparent outer condition.
fn shifted_operator(v: &Potential, grid: &ProbeGrid, z: Complex64) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let r = grid.nodes();
    let n = r.len();
    let ih2 = 1.0 / (grid.h * grid.h);
    let mut diag: Vec<Complex64> = r.iter().map(|&x| Complex64::new(2.0 * ih2 + v.eval(x), 0.0) - z).collect();
    diag[n - 1] -= exterior_mu(z, grid.h) * ih2;
    let off = vec![Complex64::new(-ih2, 0.0); n - 1];
    (off.clone(), diag, off)
}

fn weights(grid: &ProbeGrid, r_weight: f64) -> Vec<f64> {
    grid.nodes().iter().map(|x| (1.0 + x * x).powf(-0.5 * r_weight)).collect()
}

/// ‖⟨x⟩^{−r} R(z) ⟨x⟩^{−r}‖ on the long transparent box.
pub fn weighted_resolvent_norm(v: &Potential, z: ComplexEnergy, r_weight: f64, grid: &ProbeGrid) -> Result<f64> {
    let w = weights(grid, r_weight);
    let zc = z.z();
    let (lo, di, up) = shifted_operator(v, grid, zc);
    let (lo_a, di_a, up_a) = shifted_operator(v, grid, zc.conj());
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        let rhs: Vec<Complex64> = x.iter().zip(&w).map(|(a, b)| a * b).collect();
        let y = solve_tridiagonal(&lo, &di, &up, &rhs).unwrap_or_else(|_| vec![Complex64::new(f64::NAN, 0.0); x.len()]);
        y.iter().zip(&w).map(|(a, b)| a * b).collect()
    };
    let apply_adj = |x: &[Complex64]| -> Vec<Complex64> {
        let rhs: Vec<Complex64> = x.iter().zip(&w).map(|(a, b)| a * b).collect();
        let y = solve_tridiagonal(&lo_a, &di_a, &up_a, &rhs).unwrap_or_else(|_| vec![Complex64::new(f64::NAN, 0.0); x.len()]);
        y.iter().zip(&w).map(|(a, b)| a * b).collect()
    };
    let n = w.len();
    let start: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 / (1.0 + i as f64 * grid.h), 0.0)).collect();
    let est = power_norm(apply, apply_adj, &start, 400, 1e-12);
    if !est.is_finite() {
        return Err(Error::Solver("resolvent solve failed".into()));
    }
    Ok(est)
}

/// Dense Dirichlet discretisation of −d²/dr² + V on n interior points of (0, length).
pub fn dense_hamiltonian(v: &Potential, n: usize, length: f64) -> DMatrix<f64> {
    let h = length / (n + 1) as f64;
    let ih2 = 1.0 / (h * h);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * ih2 + v.eval((i + 1) as f64 * h)
        } else if i.abs_diff(j) == 1 {
            -ih2
        } else {
            0.0
        }
    })
}

fn dense_resolvent(hm: &DMatrix<f64>, z: Complex64) -> Result<DMatrix<Complex64>> {
    let n = hm.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(hm[(i, j)], 0.0) - if i == j { z } else { Complex64::new(0.0, 0.0) }
    });
    m.try_inverse().ok_or_else(|| Error::Solver("singular shifted Hamiltonian".into()))
}

/// Discretised ⟨x⟩^{−r} R(z) ⟨x⟩^{−r} on a dense Dirichlet grid.
#[derive(Clone, Debug)]
pub struct SandwichedResolvent {
    pub z: ComplexEnergy,
    pub r_weight: f64,
    pub nodes: Vec<f64>,
    pub matrix: DMatrix<Complex64>,
}

impl SandwichedResolvent {
    pub fn new(v: &Potential, z: ComplexEnergy, r_weight: f64, n: usize, length: f64) -> Result<Self> {
        if !(r_weight > 0.5) {
            return Err(invalid(format!("weight exponent must exceed 1/2, got {r_weight}")));
        }
        let hm = dense_hamiltonian(v, n, length);
        check_not_eigenvalue(&hm, z)?;
        let h = length / (n + 1) as f64;
        let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
        let w: Vec<f64> = nodes.iter().map(|x| (1.0 + x * x).powf(-0.5 * r_weight)).collect();
        let r = dense_resolvent(&hm, z.z())?;
        let matrix = DMatrix::from_fn(n, n, |i, j| r[(i, j)] * w[i] * w[j]);
        Ok(Self { z, r_weight, nodes, matrix })
    }

    pub fn norm(&self) -> f64 {
        self.matrix.clone().svd(false, false).singular_values.max()
    }
}

fn check_not_eigenvalue(hm: &DMatrix<f64>, z: ComplexEnergy) -> Result<()> {
    if z.eps > 0.0 {
        return Ok(());
    }
    let n = hm.nrows();
    let diag: Vec<f64> = (0..n).map(|i| hm[(i, i)]).collect();
    let off: Vec<f64> = (0..n - 1).map(|i| hm[(i, i + 1)]).collect();
    let tol = 1e-10 * (1.0 + z.lambda.abs());
    if sturm_count(&diag, &off, z.lambda + tol) != sturm_count(&diag, &off, z.lambda - tol) {
        return Err(Error::ExcludedEnergy { energy: z.lambda });
    }
    Ok(())
}

/// max |R(λ+iε) − R(λ−iε) − 2iε R(λ+iε) R(λ−iε)| relative to ‖R(λ+iε)‖².
pub fn hilbert_identity_residual(v: &Potential, lambda: f64, eps: f64, n: usize, length: f64) -> Result<f64> {
    let hm = dense_hamiltonian(v, n, length);
    let rp = dense_resolvent(&hm, Complex64::new(lambda, eps))?;
    let rm = dense_resolvent(&hm, Complex64::new(lambda, -eps))?;
    let lhs = &rp - &rm;
    let rhs = (&rp * &rm) * Complex64::new(0.0, 2.0 * eps);
    let scale = rp.iter().map(|x| x.norm()).fold(0.0, f64::max).powi(2).max(1.0) * eps.max(1.0);
    Ok((lhs - rhs).iter().map(|x| x.norm()).fold(0.0, f64::max) / scale)
}

/// max |R − R₀ + R₀ V R| relative to ‖R₀‖ ‖V‖ ‖R‖.
pub fn resolvent_identity_residual(v: &Potential, z: Complex64, n: usize, length: f64) -> Result<f64> {
    let hm = dense_hamiltonian(v, n, length);
    let h0 = dense_hamiltonian(&Potential::zero(), n, length);
    let r = dense_resolvent(&hm, z)?;
    let r0 = dense_resolvent(&h0, z)?;
    let step = length / (n + 1) as f64;
    let vd = DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(if i == j { v.eval((i + 1) as f64 * step) } else { 0.0 }, 0.0)
    });
    let res = &r - &r0 + &r0 * &vd * &r;
    let mx = |m: &DMatrix<Complex64>| m.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let scale = (mx(&r0) * mx(&vd).max(1.0) * mx(&r)).max(mx(&r));
    Ok(mx(&res) / scale)
}

/// Weighted resolvent norms along a decreasing ε sequence on both sides of the axis.
pub fn limiting_absorption_probe(
    v: &Potential,
    lambda: f64,
    r_weight: f64,
    eps_sequence: &[f64],
    grid: Option<ProbeGrid>,
) -> Result<AbsorptionTrace> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("energy must be positive, got {lambda}")));
    }
    if eps_sequence.len() < 2 || eps_sequence.windows(2).any(|p| !(p[1] < p[0])) || eps_sequence.iter().any(|e| !(*e > 0.0)) {
        return Err(invalid("epsilon sequence must be positive and strictly decreasing"));
    }
    let grid = grid.unwrap_or_else(|| ProbeGrid::for_energy(lambda));
    let hm = dense_hamiltonian(v, 50, 10.0);
    check_not_eigenvalue(&hm, ComplexEnergy::real(lambda))?;
    let mut norms_plus = Vec::new();
    let mut norms_minus = Vec::new();
    for &eps in eps_sequence {
        norms_plus.push(weighted_resolvent_norm(v, ComplexEnergy::new(lambda, eps, Side::Plus)?, r_weight, &grid)?);
        norms_minus.push(weighted_resolvent_norm(v, ComplexEnergy::new(lambda, eps, Side::Minus)?, r_weight, &grid)?);
    }
    let n = norms_plus.len();
    let last_relative_change = (norms_plus[n - 1] - norms_plus[n - 2]).abs() / norms_plus[n - 1];
    let hilbert_residual = hilbert_identity_residual(v, lambda, *eps_sequence.last().unwrap(), 50, 10.0)?;
    Ok(AbsorptionTrace {
        lambda,
        r_weight,
        eps: eps_sequence.to_vec(),
        norms_plus,
        norms_minus,
        last_relative_change,
        hilbert_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::preset;

    #[test]
    fn identities_on_small_grid() {
        let v = preset("gaussian").unwrap();
        assert!(hilbert_identity_residual(&v, 1.0, 0.05, 50, 10.0).unwrap() < 1e-10);
        let r = resolvent_identity_residual(&v, Complex64::new(1.0, 0.05), 50, 10.0).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn transparent_condition_is_exact_for_free_lattice() {
        // For V = 0 the Green's function of the half-line lattice is known:
        // G(i, j) = (μ^{|i−j|} − μ^{i+j}) / (h^{-2}(1/μ − μ)) with 1-based sites.
        let grid = ProbeGrid { h: 0.1, length: 5.0 };
        let z = Complex64::new(1.0, 0.2);
        let (lo, di, up) = shifted_operator(&Potential::zero(), &grid, z);
        let n = di.len();
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[9] = Complex64::new(1.0, 0.0);
        let col = solve_tridiagonal(&lo, &di, &up, &e).unwrap();
        let mu = exterior_mu(z, grid.h);
        let ih2 = 1.0 / (grid.h * grid.h);
        for i in [0usize, 9, 30, 49] {
            let (a, b) = ((i + 1) as i32, 10i32);
            let g = (mu.powi((a - b).abs()) - mu.powi(a + b)) / ((mu.inv() - mu) * ih2);
            assert!((col[i] - g).norm() < 1e-12 * g.norm().max(1e-3), "site {i}");
        }
    }

    #[test]
    fn sandwiched_resolvent_symmetry() {
        let v = preset("gaussian").unwrap();
        let z = ComplexEnergy::new(1.0, 0.1, Side::Plus).unwrap();
        let a = SandwichedResolvent::new(&v, z, 1.0, 40, 10.0).unwrap();
        let b = SandwichedResolvent::new(&v, z.conj(), 1.0, 40, 10.0).unwrap();
        let diff = (a.matrix.adjoint() - b.matrix).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
        assert!(a.norm().is_finite());
        assert!(SandwichedResolvent::new(&v, z, 0.4, 40, 10.0).is_err());
    }

    #[test]
    fn exact_eigenvalue_is_excluded() {
        let v = Potential::zero();
        let hm = dense_hamiltonian(&v, 50, 10.0);
        let h = 10.0 / 51.0;
        let ev = (2.0 - 2.0 * (std::f64::consts::PI / 51.0).cos()) / (h * h);
        assert!(hm.nrows() == 50);
        let e = SandwichedResolvent::new(&v, ComplexEnergy::real(ev), 1.0, 50, 10.0).unwrap_err();
        assert!(matches!(e, Error::ExcludedEnergy { .. }));
    }

    #[test]
    fn rejects_bad_sequences() {
        let v = Potential::zero();
        assert!(limiting_absorption_probe(&v, 1.0, 1.0, &[0.1, 0.2], None).is_err());
        assert!(limiting_absorption_probe(&v, -1.0, 1.0, &[0.2, 0.1], None).is_err());
    }
}
