//! Three-body H on a finite basis of momentum-space Gaussians.
//!
//! Basis functions are exp(−½(a p_α² + b q_α²)) in a Jacobi frame α, or their
//! sum over the three frames for identical bosons. Every term is a correlated
//! Gaussian exp(−½ Pᵀ A P) in the (p, q) variables of frame 0, so overlaps and
//! kinetic energies are closed-form; separable potentials reduce to one radial
//! quadrature over q of products of projected form factors.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jacobi::JacobiSystem;
use super::separable::SeparablePotential;
use crate::error::{invalid, Error, Result};
use crate::numerics::{GridScheme, MomentumGrid};

/// Overlap eigenvalues below this fraction of the largest are dropped.
pub const OVERLAP_CUTOFF: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    /// Gaussians in each of the three frames separately.
    Distinguishable,
    /// Each function summed over the three frames.
    Boson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisSpec {
    /// Geometric range (min, max, count) of the pair-coordinate exponent a.
    pub a: (f64, f64, usize),
    /// Geometric range of the spectator exponent b.
    pub b: (f64, f64, usize),
    pub symmetry: Symmetry,
    /// Radial quadrature nodes for the potential matrix elements.
    pub nodes: usize,
}

fn geometric((lo, hi, n): (f64, f64, usize)) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

impl BasisSpec {
    fn validate(&self) -> Result<()> {
        for (lo, hi, n) in [self.a, self.b] {
            if !(lo > 0.0 && hi >= lo && n >= 1) {
                return Err(invalid(format!("basis range ({lo}, {hi}, {n}) must be positive and ordered")));
            }
        }
        if self.nodes < 8 {
            return Err(invalid("potential quadrature needs at least 8 nodes"));
        }
        Ok(())
    }
}

/// H = H₀ + Σ V_α in an orthonormalised Gaussian basis.
#[derive(Clone, Debug)]
pub struct DiscreteHamiltonian {
    pub kinetic: DMatrix<f64>,
    pub potentials: [DMatrix<f64>; 3],
    /// Pair strengths, for the signs of √V_α.
    pub strengths: [f64; 3],
}

/// ∫ d³p g(p) exp(−½(a p² + 2c p·q + d q²)) = e^{−½dq²} 4π ∫ p² g e^{−½ap²} sinh(cpq)/(cpq) dp.
fn projected(v: &SeparablePotential, a: &Matrix2<f64>, q: f64, grid: &MomentumGrid) -> f64 {
    let (a11, c, a22) = (a[(0, 0)], a[(0, 1)].abs(), a[(1, 1)]);
    let mut sum = 0.0;
    for (&p, &w) in grid.nodes.iter().zip(&grid.weights) {
        let x = c * p * q;
        // sinh(x)/x e^{−…} written so the exponent never exceeds zero
        let shape = if x < 1e-8 { 1.0 } else { -(-2.0 * x).exp_m1() / (2.0 * x) };
        let expo = -0.5 * (a11 * p * p + a22 * q * q) + x;
        sum += w * p * p * v.form.eval(p) * shape * expo.exp();
    }
    4.0 * PI * sum
}

impl DiscreteHamiltonian {
    pub fn build(jacobi: &JacobiSystem, potentials: &[SeparablePotential; 3], spec: &BasisSpec) -> Result<Self> {
        spec.validate()?;
        for a in 0..3 {
            if !jacobi.spectator_mass(a).is_finite() || !jacobi.pair_mass(a).is_finite() {
                return Err(invalid("the Gaussian basis needs finite reduced masses"));
            }
        }
        if spec.symmetry == Symmetry::Boson {
            let m = jacobi.masses;
            if m[0] != m[1] || m[1] != m[2] {
                return Err(Error::Precondition("boson basis needs equal masses".into()));
            }
        }
        // frame-0 matrices A = Tᵀ diag(a, b) T of every term, grouped by basis function
        let to_frame: Vec<Matrix2<f64>> = (0..3)
            .map(|f| {
                let t = jacobi.transition(0, f).t;
                Matrix2::new(t[0][0], t[0][1], t[1][0], t[1][1])
            })
            .collect();
        let mut functions: Vec<Vec<Matrix2<f64>>> = Vec::new();
        for a in geometric(spec.a) {
            for b in geometric(spec.b) {
                let d = Matrix2::new(a, 0.0, 0.0, b);
                let terms: Vec<Matrix2<f64>> = to_frame.iter().map(|t| t.transpose() * d * t).collect();
                match spec.symmetry {
                    Symmetry::Boson => functions.push(terms),
                    Symmetry::Distinguishable => functions.extend(terms.into_iter().map(|t| vec![t])),
                }
            }
        }
        let n = functions.len();
        let lam = Matrix2::new(1.0 / jacobi.pair_mass(0), 0.0, 0.0, 1.0 / jacobi.spectator_mass(0));
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let elements: Vec<(f64, f64)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut s = 0.0;
                let mut t = 0.0;
                for a in &functions[i] {
                    for b in &functions[j] {
                        let c = a + b;
                        let ov = (2.0 * PI).powi(3) / c.determinant().powf(1.5);
                        s += ov;
                        t += 1.5 * (lam * c.try_inverse().expect("positive definite")).trace() * ov;
                    }
                }
                (s, t)
            })
            .collect();
        let mut overlap = DMatrix::zeros(n, n);
        let mut kin = DMatrix::zeros(n, n);
        for (&(i, j), &(s, t)) in pairs.iter().zip(&elements) {
            overlap[(i, j)] = s;
            overlap[(j, i)] = s;
            kin[(i, j)] = t;
            kin[(j, i)] = t;
        }
        let (lo, hi) = (spec.a.0.min(spec.b.0), spec.a.1.max(spec.b.1));
        let grid = MomentumGrid::new(spec.nodes, 16.0 / lo.sqrt(), GridScheme::LogGauss { lower: 1e-4 / hi.sqrt() })?;
        let mut pots: [DMatrix<f64>; 3] = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
        for (alpha, v) in potentials.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let back = to_frame[alpha].try_inverse().expect("unimodular");
            // F_i(q_k) in frame α, weighted by √(4π q² w)
            let rows: Vec<Vec<f64>> = functions
                .par_iter()
                .map(|terms| {
                    let framed: Vec<Matrix2<f64>> = terms.iter().map(|a| back.transpose() * a * back).collect();
                    grid.nodes
                        .iter()
                        .zip(&grid.weights)
                        .map(|(&q, &w)| {
                            let f: f64 = framed.iter().map(|a| projected(v, a, q, &grid)).sum();
                            (4.0 * PI * w).sqrt() * q * f
                        })
                        .collect()
                })
                .collect();
            let f = DMatrix::from_fn(n, grid.len(), |i, k| rows[i][k]);
            pots[alpha] = &f * f.transpose() * v.strength;
        }
        // normalise, then orthonormalise against the overlap
        let unit: Vec<f64> = (0..n).map(|i| overlap[(i, i)].sqrt().recip()).collect();
        let scaled = DMatrix::from_fn(n, n, |i, j| unit[i] * overlap[(i, j)] * unit[j]);
        let eig = SymmetricEigen::new(scaled);
        let top = eig.eigenvalues.max();
        let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > OVERLAP_CUTOFF * top).collect();
        let x = DMatrix::from_fn(n, keep.len(), |r, c| {
            unit[r] * eig.eigenvectors[(r, keep[c])] / eig.eigenvalues[keep[c]].sqrt()
        });
        let project = |m: &DMatrix<f64>| {
            let p = x.transpose() * m * &x;
            (&p + p.transpose()) * 0.5
        };
        Ok(Self {
            kinetic: project(&kin),
            potentials: [project(&pots[0]), project(&pots[1]), project(&pots[2])],
            strengths: [potentials[0].strength, potentials[1].strength, potentials[2].strength],
        })
    }

    pub fn dim(&self) -> usize {
        self.kinetic.nrows()
    }

    pub fn hamiltonian(&self) -> DMatrix<f64> {
        &self.kinetic + &self.potentials[0] + &self.potentials[1] + &self.potentials[2]
    }

    /// Eigenvalues of H, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.hamiltonian()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    fn complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
        m.map(|x| Complex64::new(x, 0.0))
    }

    /// √|V_α| from the eigen-decomposition of σ_α V_α ≥ 0.
    fn sqrt_abs(&self, alpha: usize) -> DMatrix<f64> {
        let sign = self.strengths[alpha].signum();
        let eig = SymmetricEigen::new(&self.potentials[alpha] * sign);
        let d = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
        &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
    }

    fn resolvent(&self, h: &DMatrix<f64>, z: Complex64) -> Result<DMatrix<Complex64>> {
        let n = h.nrows();
        let shifted = Self::complex(h) - DMatrix::from_diagonal_element(n, n, z);
        shifted.try_inverse().ok_or_else(|| Error::SpectralParameter(format!("z = {z} is an eigenvalue")))
    }
}

#[derive(Clone, Debug)]
pub struct ResolventCheck {
    /// R(z)v recovered from the Faddeev components for α = 0, 1, 2.
    pub reconstructions: Vec<DVector<Complex64>>,
    /// (H − z)⁻¹ v by a direct solve.
    pub direct: DVector<Complex64>,
    /// Largest pairwise distance between the three reconstructions, relative to ‖R v‖.
    pub discrepancy: f64,
    /// ‖(H − z) R v − v‖ / ‖v‖ for the α = 0 reconstruction.
    pub residual: f64,
}

/// Solves (I + Q(z)) T = b with Q_αβ = √|V_α| R_α(z) √V_β (β ≠ α) and
/// b_α = √|V_α| R_α v, then R(z)v = R_α v − R_α Σ_{β≠α} √V_β T_β for each α.
pub fn resolvent_reconstruct(h: &DiscreteHamiltonian, z: Complex64, v: &DVector<f64>) -> Result<ResolventCheck> {
    let n = h.dim();
    if v.len() != n {
        return Err(invalid(format!("test vector has length {}, basis has {n}", v.len())));
    }
    let vc = v.map(|x| Complex64::new(x, 0.0));
    let roots: Vec<DMatrix<Complex64>> = (0..3).map(|a| DiscreteHamiltonian::complex(&h.sqrt_abs(a))).collect();
    let signed: Vec<DMatrix<Complex64>> =
        (0..3).map(|a| &roots[a] * Complex64::new(h.strengths[a].signum(), 0.0)).collect();
    let partial: Vec<DMatrix<Complex64>> =
        (0..3).map(|a| h.resolvent(&(&h.kinetic + &h.potentials[a]), z)).collect::<Result<_>>()?;
    let mut big = DMatrix::<Complex64>::identity(3 * n, 3 * n);
    let mut rhs = DVector::<Complex64>::zeros(3 * n);
    for a in 0..3 {
        let left = &roots[a] * &partial[a];
        rhs.rows_mut(a * n, n).copy_from(&(&left * &vc));
        for b in 0..3 {
            if a != b {
                let q = &left * &signed[b];
                let mut view = big.view_mut((a * n, b * n), (n, n));
                view += q;
            }
        }
    }
    let t = big.lu().solve(&rhs).ok_or_else(|| Error::Solver("Faddeev system is singular".into()))?;
    let reconstructions: Vec<DVector<Complex64>> = (0..3)
        .map(|a| {
            let mut acc = DVector::<Complex64>::zeros(n);
            for b in 0..3 {
                if b != a {
                    acc += &signed[b] * t.rows(b * n, n);
                }
            }
            &partial[a] * (&vc - acc)
        })
        .collect();
    let full = h.hamiltonian();
    let direct = h.resolvent(&full, z)? * &vc;
    let scale = direct.norm();
    let mut discrepancy = 0.0f64;
    for a in 0..3 {
        for b in a + 1..3 {
            discrepancy = discrepancy.max((&reconstructions[a] - &reconstructions[b]).norm() / scale);
        }
    }
    let shifted = DiscreteHamiltonian::complex(&full) - DMatrix::from_diagonal_element(n, n, z);
    let residual = (shifted * &reconstructions[0] - &vc).norm() / vc.norm();
    Ok(ResolventCheck { reconstructions, direct, discrepancy, residual })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OnsetEstimate {
    /// Discrete eigenvalues of H, ascending.
    pub eigenvalues: Vec<f64>,
    /// Lowest eigenvalue e with at least `cluster` eigenvalues in [e, e + window|e|].
    pub onset: f64,
    pub threshold: f64,
    /// |onset − threshold| / |threshold|.
    pub relative_error: f64,
}

/// Continuum onset of the discretised H read off from where its eigenvalues start to crowd.
pub fn continuum_onset(eigenvalues: &[f64], threshold: f64, window: f64, cluster: usize) -> Result<OnsetEstimate> {
    if !(window > 0.0) || cluster < 2 {
        return Err(invalid("onset detection needs window > 0 and cluster ≥ 2"));
    }
    let mut e = eigenvalues.to_vec();
    e.sort_by(f64::total_cmp);
    let onset = (0..e.len())
        .find(|&i| {
            let top = e[i] + window * e[i].abs();
            e[i..].iter().take_while(|x| **x <= top).count() >= cluster
        })
        .map(|i| e[i])
        .ok_or_else(|| Error::GridResolution("no eigenvalue cluster found; enlarge the basis".into()))?;
    let relative_error = if threshold == 0.0 { onset.abs() } else { ((onset - threshold) / threshold).abs() };
    Ok(OnsetEstimate { eigenvalues: e, onset, threshold, relative_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threebody::separable::{form_factor, tune_strength};

    fn small(symmetry: Symmetry) -> BasisSpec {
        BasisSpec { a: (0.05, 5.0, 4), b: (0.05, 5.0, 4), symmetry, nodes: 64 }
    }

    #[test]
    fn free_hamiltonian_is_positive() {
        let g = form_factor("yamaguchi", 2.0).unwrap();
        let off = SeparablePotential::off(g);
        let h = DiscreteHamiltonian::build(
            &JacobiSystem::equal(1.0).unwrap(),
            &[off.clone(), off.clone(), off],
            &small(Symmetry::Distinguishable),
        )
        .unwrap();
        assert!(h.eigenvalues()[0] > 0.0);
    }

    #[test]
    fn relabelling_particles_keeps_the_spectrum() {
        let g = form_factor("yamaguchi", 2.0).unwrap();
        let v = |s: f64| SeparablePotential::new(s, g.clone());
        let spec = small(Symmetry::Distinguishable);
        let one =
            DiscreteHamiltonian::build(&JacobiSystem::new([1.0, 2.0, 3.0]).unwrap(), &[v(-3.0), v(-1.0), v(0.0)], &spec)
                .unwrap();
        // cyclic shift of the labels moves pair (12) to (31) and (23) to (12)
        let two =
            DiscreteHamiltonian::build(&JacobiSystem::new([2.0, 3.0, 1.0]).unwrap(), &[v(-1.0), v(0.0), v(-3.0)], &spec)
                .unwrap();
        for (x, y) in one.eigenvalues().iter().zip(two.eigenvalues()).take(6) {
            assert!((x - y).abs() < 1e-8 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn free_resolvent_reconstruction_is_direct() {
        let g = form_factor("yamaguchi", 2.0).unwrap();
        let off = SeparablePotential::off(g);
        let h = DiscreteHamiltonian::build(
            &JacobiSystem::equal(1.0).unwrap(),
            &[off.clone(), off.clone(), off],
            &small(Symmetry::Distinguishable),
        )
        .unwrap();
        let v = DVector::from_fn(h.dim(), |i, _| (i as f64 * 0.37).sin());
        let r = resolvent_reconstruct(&h, Complex64::new(-1.0, 0.3), &v).unwrap();
        assert!((&r.reconstructions[0] - &r.direct).norm() < 1e-12 * r.direct.norm());
    }

    #[test]
    fn attractive_pairs_bind() {
        let g = form_factor("yamaguchi", 2.0).unwrap();
        let v = SeparablePotential::new(tune_strength(g.as_ref(), 0.5, -1.0).unwrap(), g);
        let h = DiscreteHamiltonian::build(
            &JacobiSystem::equal(1.0).unwrap(),
            &[v.clone(), v.clone(), v],
            &small(Symmetry::Boson),
        )
        .unwrap();
        assert!(h.eigenvalues()[0] < -1.0);
    }

    #[test]
    fn onset_picks_first_crowded_eigenvalue() {
        let e = [-5.0, -1.02, -0.99, -0.97, -0.9, -0.5, 0.3];
        let o = continuum_onset(&e, -1.0, 0.1, 3).unwrap();
        assert_eq!(o.onset, -1.02);
        assert!(continuum_onset(&[-5.0, 1.0], -1.0, 0.01, 3).is_err());
    }
}
