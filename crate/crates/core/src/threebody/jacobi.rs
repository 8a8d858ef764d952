//! Jacobi coordinates and momenta for three particles.
//!
//! Pair α = (i, j) with spectator k runs cyclically: α = 0 ↔ (1,2;3),
//! α = 1 ↔ (2,3;1), α = 2 ↔ (3,1;2) (indices zero-based in code). At most one
//! mass may be infinite; it then pins the centre of mass.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Particle indices (i, j, k) of pair α.
pub const PAIRS: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

pub const PAIR_LABELS: [&str; 3] = ["12", "23", "31"];

/// m_a / (m_a + m_b) with an infinite mass taking the whole weight.
fn fraction(ma: f64, mb: f64) -> f64 {
    match (ma.is_infinite(), mb.is_infinite()) {
        (true, _) => 1.0,
        (false, true) => 0.0,
        _ => ma / (ma + mb),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiSystem {
    pub masses: [f64; 3],
}

/// Linear map (p_α, q_α) ↦ (p_β, q_β) at zero total momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub t: [[f64; 2]; 2],
}

impl Transition {
    pub fn det(&self) -> f64 {
        self.t[0][0] * self.t[1][1] - self.t[0][1] * self.t[1][0]
    }

    pub fn apply(&self, p: f64, q: f64) -> (f64, f64) {
        (self.t[0][0] * p + self.t[0][1] * q, self.t[1][0] * p + self.t[1][1] * q)
    }
}

impl JacobiSystem {
    pub fn new(masses: [f64; 3]) -> Result<Self> {
        for m in masses {
            if !(m > 0.0) {
                return Err(invalid(format!("masses must be positive, got {m}")));
            }
        }
        if masses.iter().filter(|m| m.is_infinite()).count() > 1 {
            return Err(invalid("at most one mass may be infinite"));
        }
        Ok(Self { masses })
    }

    pub fn equal(m: f64) -> Result<Self> {
        Self::new([m; 3])
    }

    /// m_α with m_α⁻¹ = m_i⁻¹ + m_j⁻¹.
    pub fn pair_mass(&self, alpha: usize) -> f64 {
        let (i, j, _) = PAIRS[alpha];
        1.0 / (1.0 / self.masses[i] + 1.0 / self.masses[j])
    }

    /// n_α with n_α⁻¹ = (m_i + m_j)⁻¹ + m_k⁻¹.
    pub fn spectator_mass(&self, alpha: usize) -> f64 {
        let (i, j, k) = PAIRS[alpha];
        1.0 / (1.0 / (self.masses[i] + self.masses[j]) + 1.0 / self.masses[k])
    }

    /// (f_i, f_j, w_k): pair centre-of-mass fractions and the spectator's share of the total.
    fn fractions(&self, alpha: usize) -> (f64, f64, f64) {
        let (i, j, k) = PAIRS[alpha];
        let m = self.masses;
        let fi = fraction(m[i], m[j]);
        (fi, 1.0 - fi, fraction(m[k], m[i] + m[j]))
    }

    /// (x_α, y_α, X) for one Cartesian component; X is the centre of mass.
    pub fn to_jacobi(&self, alpha: usize, x: [f64; 3]) -> (f64, f64, f64) {
        let (i, j, k) = PAIRS[alpha];
        let (fi, fj, wk) = self.fractions(alpha);
        let r = fi * x[i] + fj * x[j];
        (x[i] - x[j], x[k] - r, (1.0 - wk) * r + wk * x[k])
    }

    pub fn from_jacobi(&self, alpha: usize, xa: f64, ya: f64, cm: f64) -> [f64; 3] {
        let (i, j, k) = PAIRS[alpha];
        let (fi, fj, wk) = self.fractions(alpha);
        let mut x = [0.0; 3];
        x[k] = cm + (1.0 - wk) * ya;
        let r = x[k] - ya;
        x[i] = r + fj * xa;
        x[j] = r - fi * xa;
        x
    }

    /// Particle momenta for (p_α, q_α) at zero total momentum.
    pub fn momenta(&self, alpha: usize, p: f64, q: f64) -> [f64; 3] {
        let (i, j, k) = PAIRS[alpha];
        let (fi, fj, _) = self.fractions(alpha);
        let mut k3 = [0.0; 3];
        k3[k] = q;
        k3[i] = p - fi * q;
        k3[j] = -p - fj * q;
        k3
    }

    /// (p_α, q_α) of particle momenta summing to zero.
    pub fn jacobi_momenta(&self, alpha: usize, k3: [f64; 3]) -> (f64, f64) {
        let (i, j, k) = PAIRS[alpha];
        let (fi, fj, _) = self.fractions(alpha);
        (fj * k3[i] - fi * k3[j], k3[k])
    }

    pub fn transition(&self, alpha: usize, beta: usize) -> Transition {
        let col = |p: f64, q: f64| self.jacobi_momenta(beta, self.momenta(alpha, p, q));
        let (a, c) = col(1.0, 0.0);
        let (b, d) = col(0.0, 1.0);
        Transition { t: [[a, b], [c, d]] }
    }

    /// Σ k_i²/2m_i for the momenta of (p_α, q_α), infinite masses contributing nothing.
    pub fn kinetic(&self, alpha: usize, p: f64, q: f64) -> f64 {
        self.momenta(alpha, p, q).iter().zip(&self.masses).map(|(k, m)| k * k / (2.0 * m)).sum()
    }
}
