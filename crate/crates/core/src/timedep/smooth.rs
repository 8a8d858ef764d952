//! Bound states of the discretised H and the smoothness integral
//! ∫_{−T}^{T} ‖⟨x⟩^{−r} e^{−iHt} f‖² dt.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::arena::{plans, Arena, Wavepacket};
use super::propagate::{propagate_observed, EvolutionConfig};
use crate::error::{invalid, Error, Result};
use crate::numerics::Potential;

/// Relative growth over the last doubling below which the integral counts as saturated.
pub const SATURATION_TOLERANCE: f64 = 0.01;

/// Largest sub-box handed to the dense eigensolver.
pub const MAX_DENSE: usize = 2048;

#[derive(Clone, Debug)]
pub struct BoundStates {
    pub energies: Vec<f64>,
    /// Normalised eigenvectors on the full arena.
    pub vectors: Vec<Vec<Complex64>>,
    /// Largest edge mass of any eigenvector in the final sub-box.
    pub tail: f64,
}

/// Spectral kinetic matrix of a periodic m-point grid with spacing dx.
fn kinetic_matrix(m: usize, dx: f64) -> DMatrix<f64> {
    let sub = Arena::new(m, 0.5 * m as f64 * dx).expect("valid sub-arena");
    let (_, inv) = plans(m);
    let mut col: Vec<Complex64> = sub.momenta().iter().map(|x| Complex64::new(x * x / m as f64, 0.0)).collect();
    inv.process(&mut col);
    DMatrix::from_fn(m, m, |i, j| col[(i + m - j) % m].re)
}

/// Negative-energy eigenpairs of the spectral H, from dense solves on a centred
/// sub-box that doubles until the eigenvectors vanish at its edges or the
/// sub-box reaches `MAX_DENSE` points; `tail` reports what was left at the edges.
pub fn bound_states(arena: Arena, v: &Potential) -> Result<BoundStates> {
    if v.is_zero() {
        return Ok(BoundStates { energies: vec![], vectors: vec![], tail: 0.0 });
    }
    let dx = arena.dx();
    let mut m = (((2.0 * v.effective_range(1e-10) + 40.0) / dx).ceil() as usize).max(64);
    m += m % 2;
    loop {
        let m_eff = m.min(arena.n).min(MAX_DENSE);
        let start = arena.n / 2 - m_eff / 2;
        let xs: Vec<f64> = (start..start + m_eff).map(|j| arena.x(j)).collect();
        let mut h = kinetic_matrix(m_eff, dx);
        for (i, x) in xs.iter().enumerate() {
            h[(i, i)] += v.eval(x.abs());
        }
        let eig = SymmetricEigen::new(h);
        let mut pairs: Vec<(f64, usize)> =
            eig.eigenvalues.iter().copied().enumerate().filter(|(_, e)| *e < 0.0).map(|(i, e)| (e, i)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let edge = m_eff / 20 + 1;
        let tail = pairs.iter().fold(0.0f64, |acc, &(_, i)| {
            let c = eig.eigenvectors.column(i);
            acc.max(c.iter().take(edge).chain(c.iter().skip(m_eff - edge)).map(|x| x * x).sum())
        });
        if tail < 1e-26 || m_eff == arena.n || m_eff == MAX_DENSE {
            let mut energies = Vec::new();
            let mut vectors = Vec::new();
            for (e, i) in pairs {
                let c = eig.eigenvectors.column(i);
                let mut vec = vec![Complex64::new(0.0, 0.0); arena.n];
                for (k, x) in c.iter().enumerate() {
                    vec[start + k] = Complex64::new(x / dx.sqrt(), 0.0);
                }
                energies.push(e);
                vectors.push(vec);
            }
            return Ok(BoundStates { energies, vectors, tail });
        }
        m *= 2;
    }
}

impl BoundStates {
    /// f minus its components along the bound states.
    pub fn project_out(&self, f: &Wavepacket) -> Wavepacket {
        let dx = f.dx();
        let mut s = f.samples.clone();
        for b in &self.vectors {
            let c: Complex64 = b.iter().zip(&s).map(|(u, w)| u.conj() * w).sum::<Complex64>() * dx;
            for (w, u) in s.iter_mut().zip(b) {
                *w -= c * u;
            }
        }
        f.with_samples(s)
    }

    /// Σ |⟨b, f⟩|² / ‖f‖².
    pub fn overlap(&self, f: &Wavepacket) -> f64 {
        let dx = f.dx();
        self.vectors
            .iter()
            .map(|b| (b.iter().zip(&f.samples).map(|(u, w)| u.conj() * w).sum::<Complex64>() * dx).norm_sqr())
            .sum::<f64>()
            / f.norm.powi(2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothnessStatus {
    Saturated,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothnessTrace {
    pub r_weight: f64,
    pub times: Vec<f64>,
    /// ∫_{−T}^{T} ‖⟨x⟩^{−r} e^{−iHt} f‖² dt for each T reached.
    pub partial: Vec<f64>,
    /// (I(T_last) − I(T_prev)) / I(T_last).
    pub last_growth: f64,
    pub status: SmoothnessStatus,
    /// True when the run stopped early because the packet reached the box edge.
    pub leaked: bool,
}

pub fn smoothness_integral(
    r_weight: f64,
    v: &Potential,
    f: &Wavepacket,
    times: &[f64],
    cfg: &EvolutionConfig,
) -> Result<SmoothnessTrace> {
    if times.len() < 2 || times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("smoothness horizons must be at least two increasing positive times"));
    }
    if !(r_weight > 0.0) {
        return Err(invalid(format!("weight exponent must be positive, got {r_weight}")));
    }
    let weight: Vec<f64> = f.arena.positions().iter().map(|x| (1.0 + x * x).powf(-r_weight)).collect();
    let dx = f.dx();
    let weighted = |psi: &[Complex64]| psi.iter().zip(&weight).map(|(z, w)| w * z.norm_sqr()).sum::<f64>() * dx;
    let t_end = *times.last().unwrap();
    let mut cfg = cfg.clone();
    cfg.horizon = cfg.horizon.max(t_end);
    if v.is_zero() {
        cfg.scheme = "exact-free-multiplier".into();
    }
    let w0 = weighted(&f.samples);
    let mut leaked = false;
    // cumulative ∫_0^{±t} for each direction, sampled on the step grid
    let mut run = |sign: f64| -> Result<Vec<(f64, f64)>> {
        let mut acc = vec![(0.0, 0.0)];
        let mut last = w0;
        let mut total = 0.0;
        let res = propagate_observed(
            f,
            v,
            &cfg,
            sign * t_end,
            Some(&mut |t: f64, psi: &[Complex64]| {
                let w = weighted(psi);
                total += 0.5 * cfg.dt * (w + last);
                last = w;
                acc.push((t.abs(), total));
            }),
        );
        match res {
            Ok(_) => Ok(acc),
            Err(Error::Leak { .. }) => {
                leaked = true;
                Ok(acc)
            }
            Err(e) => Err(e),
        }
    };
    let fwd = run(1.0)?;
    let bwd = run(-1.0)?;
    let reach = fwd.last().unwrap().0.min(bwd.last().unwrap().0);
    let at = |trace: &[(f64, f64)], t: f64| {
        let i = ((t / cfg.dt).round() as usize).min(trace.len() - 1);
        trace[i].1
    };
    let mut done = Vec::new();
    let mut partial = Vec::new();
    for &t in times {
        if t <= reach + 1e-9 {
            done.push(t);
            partial.push(at(&fwd, t) + at(&bwd, t));
        }
    }
    let last_growth = if partial.len() >= 2 {
        let n = partial.len();
        (partial[n - 1] - partial[n - 2]) / partial[n - 1]
    } else {
        f64::INFINITY
    };
    let status = if !leaked && partial.len() == times.len() && last_growth < SATURATION_TOLERANCE {
        SmoothnessStatus::Saturated
    } else {
        SmoothnessStatus::Inconclusive
    };
    Ok(SmoothnessTrace { r_weight, times: done, partial, last_growth, status, leaked })
}
