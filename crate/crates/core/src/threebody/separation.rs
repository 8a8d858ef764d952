//! Separation of variables for m₃ = ∞ and V₁₂ = 0 in d = 1.
//!
//! With the heavy particle at the origin, H = H⁽¹⁾ ⊗ I + I ⊗ H⁽²⁾ where
//! H⁽¹⁾ = −(2m₁)⁻¹∂² + V₃₁(−x₁) and H⁽²⁾ = −(2m₂)⁻¹∂² + V₂₃(x₂). The check
//! evolves random vectors with the dense two-dimensional H and with the
//! product of the one-dimensional evolutions, and verifies that the four
//! products of the point/continuous projectors resolve the identity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::jacobi::JacobiSystem;
use crate::error::{invalid, Error, Result};
use crate::numerics::Potential;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparationSpec {
    /// Interior nodes per coordinate; Dirichlet walls at ±half_width.
    pub nodes: usize,
    pub half_width: f64,
    pub time: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SeparationSpec {
    fn default() -> Self {
        Self { nodes: 24, half_width: 8.0, time: 3.0, samples: 4, seed: 7 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparationReport {
    /// max ‖e^{−iHt}v − (e^{−iH⁽¹⁾t} ⊗ e^{−iH⁽²⁾t})v‖ / ‖v‖ over the samples.
    pub evolution_deviation: f64,
    /// ‖Σ P_a ⊗ P_b − I‖ over a, b ∈ {p, c}, entrywise maximum.
    pub completeness_deviation: f64,
    /// max ‖Q² − Q‖ over the four product projectors.
    pub idempotency_deviation: f64,
    /// Bound states of H⁽¹⁾ and H⁽²⁾ on the grid.
    pub bound_counts: [usize; 2],
    /// Ranks of the pp, pc, cp, cc sectors.
    pub sector_ranks: [usize; 4],
}

fn laplacian_nodes(spec: &SeparationSpec) -> (Vec<f64>, f64) {
    let h = 2.0 * spec.half_width / (spec.nodes + 1) as f64;
    ((1..=spec.nodes).map(|j| -spec.half_width + j as f64 * h).collect(), h)
}

fn one_body(mass: f64, v: &Potential, x: &[f64], h: f64) -> DMatrix<f64> {
    let n = x.len();
    let c = 1.0 / (2.0 * mass * h * h);
    DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0 * c + v.eval(x[i].abs()),
        1 => -c,
        _ => 0.0,
    })
}

/// Five-point stencil on the product grid, index (i, j) ↦ i n + j.
fn two_body(masses: [f64; 2], v31: &Potential, v23: &Potential, x: &[f64], h: f64) -> DMatrix<f64> {
    let n = x.len();
    let c = [1.0 / (2.0 * masses[0] * h * h), 1.0 / (2.0 * masses[1] * h * h)];
    let mut m = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            m[(k, k)] = 2.0 * (c[0] + c[1]) + v31.eval(x[i].abs()) + v23.eval(x[j].abs());
            if i + 1 < n {
                m[(k, k + n)] = -c[0];
                m[(k + n, k)] = -c[0];
            }
            if j + 1 < n {
                m[(k, k + 1)] = -c[1];
                m[(k + 1, k)] = -c[1];
            }
        }
    }
    m
}

fn evolution(e: &SymmetricEigen<f64, nalgebra::Dyn>, t: f64) -> DMatrix<Complex64> {
    let q = e.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * t)));
    &q * d * q.transpose()
}

fn point_projector(e: &SymmetricEigen<f64, nalgebra::Dyn>) -> (DMatrix<f64>, usize) {
    let n = e.eigenvalues.len();
    let mut p = DMatrix::zeros(n, n);
    let mut count = 0;
    for (k, l) in e.eigenvalues.iter().enumerate() {
        if *l < 0.0 {
            let v = e.eigenvectors.column(k);
            p += v * v.transpose();
            count += 1;
        }
    }
    (p, count)
}

pub fn separation_check(jacobi: &JacobiSystem, potentials: [&Potential; 3], spec: &SeparationSpec) -> Result<SeparationReport> {
    if jacobi.masses[2].is_finite() {
        return Err(Error::Precondition("separation needs an infinitely heavy third particle".into()));
    }
    if !potentials[0].is_zero() {
        return Err(Error::Precondition("separation needs V12 = 0".into()));
    }
    if spec.nodes < 4 || !(spec.half_width > 0.0) || spec.samples == 0 || !spec.time.is_finite() {
        return Err(invalid("separation grid needs nodes ≥ 4, half_width > 0 and at least one sample"));
    }
    let (x, h) = laplacian_nodes(spec);
    let masses = [jacobi.masses[0], jacobi.masses[1]];
    let (v23, v31) = (potentials[1], potentials[2]);
    let e1 = SymmetricEigen::new(one_body(masses[0], v31, &x, h));
    let e2 = SymmetricEigen::new(one_body(masses[1], v23, &x, h));
    let e = SymmetricEigen::new(two_body(masses, v31, v23, &x, h));
    let u = evolution(&e, spec.time);
    let u12 = evolution(&e1, spec.time).kronecker(&evolution(&e2, spec.time));

    let n = x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut evolution_deviation: f64 = 0.0;
    for _ in 0..spec.samples {
        let v = DVector::from_fn(n * n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        evolution_deviation = evolution_deviation.max((&u * &v - &u12 * &v).norm() / v.norm());
    }

    let (p1, b1) = point_projector(&e1);
    let (p2, b2) = point_projector(&e2);
    let id = DMatrix::<f64>::identity(n, n);
    let (c1, c2) = (&id - &p1, &id - &p2);
    let sectors = [p1.kronecker(&p2), p1.kronecker(&c2), c1.kronecker(&p2), c1.kronecker(&c2)];
    let sum = sectors.iter().fold(DMatrix::zeros(n * n, n * n), |acc, q| acc + q);
    let completeness_deviation = (sum - DMatrix::<f64>::identity(n * n, n * n)).amax();
    let idempotency_deviation = sectors.iter().map(|q| (q * q - q).amax()).fold(0.0, f64::max);
    let sector_ranks = [b1 * b2, b1 * (n - b2), (n - b1) * b2, (n - b1) * (n - b2)];
    Ok(SeparationReport {
        evolution_deviation,
        completeness_deviation,
        idempotency_deviation,
        bound_counts: [b1, b2],
        sector_ranks,
    })
}
