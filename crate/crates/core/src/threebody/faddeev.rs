//! Faddeev equations for separable pair interactions, s-wave.
//!
//! With V_α = s_α|g_α⟩⟨g_α| the component √|V_α|Φ factorises as
//! g_α(p_α) φ_α(q_α) and the homogeneous system Φ = −Q(z)Φ becomes
//!
//! φ_α(q) = −Σ_{β≠α} σ_β |s_α s_β|^{1/2} / D_α(z − q²/2n_α) ∫ q'² dq' K_αβ(q, q'; z) φ_β(q'),
//!
//! K_αβ = 2π/|t₂₁|³ ∫₋₁¹ dx g_α(|p_α|) g_β(|p_β|) / (p_α²/2m_α + q²/2n_α − z),
//!
//! where t is the (p, q) transition between the two Jacobi frames and
//! D_α(e) = 1 + s_α F_α(e). Bound states are the z where an eigenvalue of −Q(z)
//! reaches 1.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jacobi::JacobiSystem;
use super::separable::{hvz_bottom, pair_spectrum, PairSpectrum, SeparablePotential};
use crate::error::{invalid, Error, Result};
use crate::numerics::grid::gauss_legendre;
use crate::numerics::roots::bisect;
use crate::numerics::MomentumGrid;

pub const DEFAULT_ANGULAR: usize = 48;

/// Relative tolerance on bound-state energies.
pub const ENERGY_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// All three components.
    Full,
    /// Identical bosons: φ₁ = φ₂ = φ₃.
    Boson,
}

#[derive(Clone, Debug)]
pub struct FaddeevProblem {
    pub jacobi: JacobiSystem,
    /// Interaction of pair α = (12), (23), (31).
    pub potentials: [SeparablePotential; 3],
    /// Spectator-momentum grid shared by all components.
    pub grid: MomentumGrid,
    pub angular: usize,
}

/// −Q(z) on the grid: entry ((α,i),(β,j)) acts on φ_β(q_j).
#[derive(Clone, Debug)]
pub struct FaddeevOperator {
    pub z: f64,
    /// Pairs with nonzero strength, in block order.
    pub active: Vec<usize>,
    pub matrix: DMatrix<f64>,
    /// Symmetric similarity transform of `matrix`, when every active pair attracts.
    pub symmetric: Option<DMatrix<f64>>,
    /// q² w per node and D_α per block row.
    measure: Vec<f64>,
    denominators: Vec<Vec<f64>>,
}

impl FaddeevProblem {
    pub fn new(jacobi: JacobiSystem, potentials: [SeparablePotential; 3], grid: MomentumGrid) -> Result<Self> {
        for a in 0..3 {
            if !jacobi.pair_mass(a).is_finite() {
                return Err(invalid("pair masses must be finite"));
            }
        }
        Ok(Self { jacobi, potentials, grid, angular: DEFAULT_ANGULAR })
    }

    pub fn with_angular(mut self, n: usize) -> Self {
        self.angular = n;
        self
    }

    pub fn active(&self) -> Vec<usize> {
        (0..3).filter(|&a| !self.potentials[a].is_zero()).collect()
    }

    pub fn pair_spectra(&self) -> Result<Vec<PairSpectrum>> {
        (0..3).map(|a| pair_spectrum(&self.potentials[a], self.jacobi.pair_mass(a), None)).collect()
    }

    /// Bottom E of the continuous spectrum.
    pub fn threshold(&self) -> Result<f64> {
        Ok(hvz_bottom(&self.pair_spectra()?))
    }

    fn check_z(&self, z: f64) -> Result<()> {
        let e = self.threshold()?;
        if !(z < e) {
            return Err(Error::SpectralParameter(format!("z = {z} is not below the continuum onset {e}")));
        }
        Ok(())
    }

    /// D_α(z − q²/2n_α), written as (1 + sF(0)) + s(F(e) − F(0)) to keep
    /// resonant pairs accurate near zero energy.
    fn denominator(&self, alpha: usize, z: f64, q: f64) -> f64 {
        let v = &self.potentials[alpha];
        let m = self.jacobi.pair_mass(alpha);
        let e = z - q * q / (2.0 * self.jacobi.spectator_mass(alpha));
        (1.0 + v.strength * v.form.free_element(m, 0.0)) + v.strength * v.form.free_element_shift(m, e)
    }

    /// K_αβ(q, q'; z).
    pub fn kernel(&self, alpha: usize, beta: usize, q: f64, qp: f64, z: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
        let t = self.jacobi.transition(alpha, beta).t;
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        let t21 = t[1][0];
        let ma = self.jacobi.pair_mass(alpha);
        let na = self.jacobi.spectator_mass(alpha);
        let ga = &self.potentials[alpha].form;
        let gb = &self.potentials[beta].form;
        // |p_α|² = a1 − b1 x, |p_β|² = a2 − b2 x
        let s = t21 * t21;
        let a1 = (qp * qp + t[1][1] * t[1][1] * q * q) / s;
        let b1 = 2.0 * t[1][1] * q * qp / s;
        let a2 = (t[0][0] * t[0][0] * qp * qp + det * det * q * q) / s;
        let b2 = 2.0 * t[0][0] * det * q * qp / s;
        let big_a = a1 / (2.0 * ma) + q * q / (2.0 * na) - z;
        let big_b = b1 / (2.0 * ma);
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        for (a, b, cut) in [(a1, b1, ga.cutoff()), (a2, b2, gb.cutoff())] {
            let Some(l) = cut else { continue };
            // a − b x < l²
            if b > 0.0 {
                lo = lo.max((a - l * l) / b);
            } else if b < 0.0 {
                hi = hi.min((a - l * l) / b);
            } else if a >= l * l {
                return 0.0;
            }
        }
        if hi <= lo {
            return 0.0;
        }
        let pref = 2.0 * PI / t21.abs().powi(3);
        if ga.cutoff().is_some() && gb.cutoff().is_some() {
            let span = hi - lo;
            let integral = if big_b.abs() * span < 1e-300 * big_a {
                span / big_a
            } else {
                (big_b * span / (big_a - big_b * hi)).ln_1p() / big_b
            };
            return pref * integral;
        }
        let (x, w) = rule;
        let h = 0.5 * (hi - lo);
        let mut sum = 0.0;
        for (u, wt) in x.iter().zip(w) {
            let xx = lo + h * (u + 1.0);
            let pa = (a1 - b1 * xx).max(0.0).sqrt();
            let pb = (a2 - b2 * xx).max(0.0).sqrt();
            sum += wt * ga.eval(pa) * gb.eval(pb) / (big_a - big_b * xx);
        }
        pref * h * sum
    }

    /// Nodal block (−Q_αβ)_{ij}, acting on φ_β(q_j).
    pub fn block(&self, alpha: usize, beta: usize, z: f64) -> Result<DMatrix<f64>> {
        self.check_z(z)?;
        Ok(self.block_unchecked(alpha, beta, z))
    }

    fn block_unchecked(&self, alpha: usize, beta: usize, z: f64) -> DMatrix<f64> {
        let n = self.grid.len();
        if alpha == beta || self.potentials[alpha].is_zero() || self.potentials[beta].is_zero() {
            return DMatrix::zeros(n, n);
        }
        let rule = gauss_legendre(self.angular);
        let sa = self.potentials[alpha].strength;
        let sb = self.potentials[beta].strength;
        let coupling = -sb.signum() * (sa * sb).abs().sqrt();
        let q = &self.grid.nodes;
        let w = &self.grid.weights;
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let d = self.denominator(alpha, z, q[i]);
                (0..n).map(|j| coupling * self.kernel(alpha, beta, q[i], q[j], z, &rule) * q[j] * q[j] * w[j] / d).collect()
            })
            .collect();
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    }

    pub fn assemble(&self, z: f64, reduction: Reduction) -> Result<FaddeevOperator> {
        self.check_z(z)?;
        let n = self.grid.len();
        let measure: Vec<f64> = self.grid.nodes.iter().zip(&self.grid.weights).map(|(q, w)| q * q * w).collect();
        let active = self.active();
        let (matrix, rows) = match reduction {
            Reduction::Full => {
                let k = active.len();
                let mut m = DMatrix::zeros(k * n, k * n);
                for (bi, &a) in active.iter().enumerate() {
                    for (bj, &b) in active.iter().enumerate() {
                        if a != b {
                            m.view_mut((bi * n, bj * n), (n, n)).copy_from(&self.block_unchecked(a, b, z));
                        }
                    }
                }
                (m, active.clone())
            }
            Reduction::Boson => {
                self.check_identical()?;
                if active.is_empty() {
                    (DMatrix::zeros(n, n), vec![])
                } else {
                    (self.block_unchecked(0, 1, z) + self.block_unchecked(0, 2, z), vec![0])
                }
            }
        };
        let denominators: Vec<Vec<f64>> =
            rows.iter().map(|&a| self.grid.nodes.iter().map(|&q| self.denominator(a, z, q)).collect()).collect();
        let attractive = active.iter().all(|&a| self.potentials[a].strength < 0.0)
            && denominators.iter().flatten().all(|d| *d > 0.0);
        let symmetric = if attractive && !rows.is_empty() {
            // S M S⁻¹ with S = diag(√(q²w D))
            let scale: Vec<f64> =
                denominators.iter().flat_map(|ds| ds.iter().zip(&measure).map(|(d, c)| (d * c).sqrt())).collect();
            let dim = matrix.nrows();
            let mut g = DMatrix::from_fn(dim, dim, |i, j| scale[i] * matrix[(i, j)] / scale[j]);
            g = (&g + g.transpose()) * 0.5;
            Some(g)
        } else {
            None
        };
        Ok(FaddeevOperator { z, active: rows, matrix, symmetric, measure, denominators })
    }

    fn check_identical(&self) -> Result<()> {
        let m = self.jacobi.masses;
        let p = &self.potentials;
        let same = |a: &SeparablePotential, b: &SeparablePotential| {
            a.strength == b.strength && a.form.name() == b.form.name() && a.form.scale() == b.form.scale()
        };
        if m[0] == m[1] && m[1] == m[2] && same(&p[0], &p[1]) && same(&p[1], &p[2]) {
            Ok(())
        } else {
            Err(Error::Precondition("boson reduction needs equal masses and identical pair potentials".into()))
        }
    }

    /// Bound-state energies in [z_lo, z_hi], ascending.
    pub fn bound_states(&self, z_lo: f64, z_hi: f64, reduction: Reduction) -> Result<Vec<f64>> {
        if !(z_lo < z_hi) {
            return Err(invalid(format!("empty energy range [{z_lo}, {z_hi}]")));
        }
        self.check_z(z_hi)?;
        let count = |z: f64| -> Result<usize> {
            Ok(self.assemble(z, reduction)?.eigenvalues().iter().filter(|m| **m > 1.0).count())
        };
        let n_hi = count(z_hi)?;
        let n_lo = count(z_lo)?;
        let mut energies = Vec::new();
        for n in n_lo..n_hi {
            let f = |z: f64| {
                let mu = self.assemble(z, reduction).map(|op| op.eigenvalues()).unwrap_or_default();
                mu.get(n).copied().unwrap_or(0.0) - 1.0
            };
            let tol = ENERGY_TOLERANCE * z_hi.abs().max(f64::MIN_POSITIVE);
            let lo = energies.last().copied().unwrap_or(z_lo).max(z_lo);
            energies.push(bisect_energy(f, lo, z_hi, tol)?);
        }
        energies.sort_by(f64::total_cmp);
        Ok(energies)
    }
}

/// Bisection in ln|z| when the bracket spans decades, in z otherwise.
fn bisect_energy(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if hi < 0.0 && lo / hi > 16.0 {
        let u = bisect(|u: f64| f(-u.exp()), (-hi).ln(), (-lo).ln(), ENERGY_TOLERANCE)?;
        return Ok(-u.exp());
    }
    bisect(f, lo, hi, tol)
}

impl FaddeevOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues of −Q(z) (real parts), descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return vec![];
        }
        let mut mu: Vec<f64> = match &self.symmetric {
            Some(g) => SymmetricEigen::new(g.clone()).eigenvalues.iter().copied().collect(),
            None => self.matrix.complex_eigenvalues().iter().map(|c| c.re).collect(),
        };
        mu.sort_by(|a, b| b.total_cmp(a));
        mu
    }

    /// Largest eigenvalue μ(z).
    pub fn leading(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// The operator in an L²(q² dq)-orthonormal frame: √(q_i²w_i) M_ij / √(q_j²w_j).
    pub fn weighted(&self) -> DMatrix<f64> {
        let n = self.measure.len();
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |i, j| {
            self.measure[i % n].sqrt() * self.matrix[(i, j)] / self.measure[j % n].sqrt()
        })
    }

    /// Singular values of the (α, β) block, descending.
    pub fn block_singular_values(&self, alpha: usize, beta: usize) -> Result<Vec<f64>> {
        let n = self.measure.len();
        let bi = self.active.iter().position(|&a| a == alpha);
        let bj = self.active.iter().position(|&a| a == beta);
        let (Some(bi), Some(bj)) = (bi, bj) else {
            return Ok(vec![0.0; n]);
        };
        if self.active.len() == 1 {
            return Err(invalid("blocks are not available for a reduced operator"));
        }
        let w = self.weighted().view((bi * n, bj * n), (n, n)).into_owned();
        let mut s: Vec<f64> = w.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s)
    }

    /// Operator norm ‖Q(z)‖ on L²(q² dq)³.
    pub fn norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.weighted().singular_values().iter().copied().fold(0.0, f64::max)
    }

    pub fn denominators(&self) -> &[Vec<f64>] {
        &self.denominators
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::GridScheme;
    use crate::threebody::separable::{form_factor, tune_strength};

    fn bosons(beta: f64, n: usize) -> FaddeevProblem {
        let g = form_factor("yamaguchi", beta).unwrap();
        let s = tune_strength(g.as_ref(), 0.5, -1.0).unwrap();
        let v = SeparablePotential::new(s, g);
        let grid = MomentumGrid::new(n, 400.0 * beta, GridScheme::GaussRational { scale: beta }).unwrap();
        FaddeevProblem::new(JacobiSystem::equal(1.0).unwrap(), [v.clone(), v.clone(), v], grid).unwrap()
    }

    #[test]
    fn kernel_is_symmetric_under_frame_exchange() {
        let p = bosons(2.0, 16);
        let rule = gauss_legendre(32);
        let a = p.kernel(0, 1, 0.7, 1.9, -1.5, &rule);
        let b = p.kernel(1, 0, 1.9, 0.7, -1.5, &rule);
        assert!((a - b).abs() < 1e-13 * a.abs());
    }

    #[test]
    fn contact_kernel_matches_quadrature() {
        let g = form_factor("contact", 3.0).unwrap();
        let v = SeparablePotential::new(-0.01, g);
        let grid = MomentumGrid::new(8, 6.0, GridScheme::Gauss).unwrap();
        let p = FaddeevProblem::new(JacobiSystem::new([1.0, 2.0, 0.5]).unwrap(), [v.clone(), v.clone(), v], grid)
            .unwrap();
        let analytic = p.kernel(0, 1, 1.1, 2.3, -0.4, &gauss_legendre(8));
        // brute force over x with the indicator form factors
        let t = p.jacobi.transition(0, 1).t;
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        let (q, qp, z) = (1.1f64, 2.3f64, -0.4);
        let m = 200_000;
        let mut sum = 0.0;
        for k in 0..m {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / m as f64;
            let pa2 = (qp * qp - 2.0 * t[1][1] * q * qp * x + t[1][1] * t[1][1] * q * q) / (t[1][0] * t[1][0]);
            let pb2 = (t[0][0] * t[0][0] * qp * qp - 2.0 * t[0][0] * det * q * qp * x + det * det * q * q)
                / (t[1][0] * t[1][0]);
            if pa2 < 9.0 && pb2 < 9.0 {
                let den = pa2 / (2.0 * p.jacobi.pair_mass(0)) + q * q / (2.0 * p.jacobi.spectator_mass(0)) - z;
                sum += 2.0 / m as f64 / den;
            }
        }
        let brute = 2.0 * PI / t[1][0].abs().powi(3) * sum;
        assert!((analytic - brute).abs() < 1e-4 * brute, "{analytic} vs {brute}");
    }

    #[test]
    fn vanishing_pair_gives_zero_block() {
        let mut p = bosons(2.0, 12);
        p.potentials[1].strength = 0.0;
        assert!(p.block(0, 1, -2.0).unwrap().iter().all(|x| *x == 0.0));
        assert!(p.block(0, 0, -2.0).unwrap().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn spectral_parameter_must_be_below_threshold() {
        let p = bosons(2.0, 12);
        assert!(matches!(p.assemble(-0.5, Reduction::Full), Err(Error::SpectralParameter(_))));
    }

    #[test]
    fn no_interaction_no_bound_states() {
        let mut p = bosons(2.0, 12);
        for v in p.potentials.iter_mut() {
            v.strength = 0.0;
        }
        assert!(p.bound_states(-10.0, -0.1, Reduction::Full).unwrap().is_empty());
    }

    #[test]
    fn symmetric_form_has_the_same_spectrum() {
        let p = bosons(2.0, 16);
        let op = p.assemble(-2.0, Reduction::Full).unwrap();
        let mut general: Vec<f64> = op.matrix.complex_eigenvalues().iter().map(|c| c.re).collect();
        general.sort_by(|a, b| b.total_cmp(a));
        let sym = op.eigenvalues();
        for (a, b) in general.iter().zip(&sym).take(5) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}
