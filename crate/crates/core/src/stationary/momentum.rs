//! Momentum-space Lippmann–Schwinger equation for one partial wave.
//!
//! T(p,k) = V(p,k) + ∫ q² dq V(p,q) T(q,k) / (k² − q² + i0), with
//! V_ℓ(p,q) = (2/π) ∫ r² j_ℓ(pr) V(r) j_ℓ(qr) dr. The pole is removed by
//! principal-value subtraction and the on-shell −iπ/2k term added explicitly;
//! S_ℓ = 1 − iπ k T(k,k).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::grid::{composite_gauss, panel_edges};
use crate::numerics::special::sph_j_array;
use crate::numerics::{Potential, Shape};

#[derive(Clone, Copy, Debug)]
pub struct MomentumOptions {
    /// Ultraviolet cutoff; chosen from the potential's smoothness when `None`.
    pub q_max: Option<f64>,
    /// Gauss points on each of [0,k] and [k,2k].
    pub near_points: usize,
    /// Maximum panel width and points per panel on [2k, q_max].
    pub far_width: f64,
    pub far_points: usize,
    /// Gauss points per radial panel.
    pub radial_points: usize,
    /// Potential magnitude treated as zero when truncating radial integrals.
    pub range_tol: f64,
}

impl Default for MomentumOptions {
    fn default() -> Self {
        Self {
            q_max: None,
            near_points: 24,
            far_width: 4.0,
            far_points: 12,
            radial_points: 12,
            range_tol: 1e-14,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MomentumRun {
    pub delta: f64,
    pub s: Complex64,
    /// Ratio of the largest to the smallest LU pivot magnitude.
    pub condition: f64,
}

/// Default cutoff: large enough that the dropped tail of V(k,q) is below ~1e−8.
pub fn default_q_max(v: &Potential, k: f64) -> f64 {
    let tail = match &v.shape {
        Shape::Zero => 10.0,
        Shape::SquareWell { radius, .. } => 240.0 / radius.min(1.0),
        Shape::Gaussian { width, .. } => 16.0 / width,
        Shape::Yukawa { .. } => 80.0,
        Shape::TruncatedCoulomb { core, .. } => 15.0 / core.min(crate::numerics::potential::COULOMB_TAPER),
        Shape::PowerTail { .. } => 80.0,
    };
    2.0 * k + tail
}

/// Radial quadrature (nodes, w·r²·V) covering the potential.
fn radial_measure(v: &Potential, q_max: f64, opts: &MomentumOptions) -> (Vec<f64>, Vec<f64>) {
    let r_end = v.effective_range(opts.range_tol).max(1e-3);
    let width = (4.0 / q_max).min(0.5);
    let edges = panel_edges(0.0, r_end, &v.breakpoints(), width);
    let (r, w) = composite_gauss(&edges, opts.radial_points);
    let f = r.iter().zip(&w).map(|(&x, &wt)| wt * x * x * v.eval(x)).collect();
    (r, f)
}

/// Momentum nodes and weights on (0, q_max) avoiding k. Panel widths shrink
/// with the bulk range of the potential so oscillations of V(p,q) in q stay resolved.
fn momentum_nodes(v: &Potential, k: f64, q_max: f64, opts: &MomentumOptions) -> (Vec<f64>, Vec<f64>) {
    let width = opts.far_width.min(12.0 / v.effective_range(1e-6).max(1e-3));
    let near = panel_edges(0.0, 2.0 * k, &[k], width);
    let (mut q, mut w) = composite_gauss(&near, opts.near_points);
    let far = panel_edges(2.0 * k, q_max, &[], width);
    let (qf, wf) = composite_gauss(&far, opts.far_points);
    q.extend(qf);
    w.extend(wf);
    (q, w)
}

/// V_ℓ(p_i, p_j) for all pairs of the given momenta.
pub fn potential_matrix(l: usize, momenta: &[f64], r: &[f64], f: &[f64]) -> DMatrix<f64> {
    let n = momenta.len();
    let m = r.len();
    let rows: Vec<Vec<f64>> = momenta
        .par_iter()
        .map(|&p| r.iter().map(|&x| sph_j_array(l, p * x)[l]).collect())
        .collect();
    let b = DMatrix::from_fn(n, m, |i, a| rows[i][a]);
    let bf = DMatrix::from_fn(n, m, |i, a| rows[i][a] * f[a]);
    (bf * b.transpose()) * (2.0 / std::f64::consts::PI)
}

pub fn solve(v: &Potential, k: f64, l: usize, opts: &MomentumOptions) -> Result<MomentumRun> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("momentum must be positive, got {k}")));
    }
    if v.is_zero() {
        return Ok(MomentumRun { delta: 0.0, s: Complex64::new(1.0, 0.0), condition: 1.0 });
    }
    let q_max = opts.q_max.unwrap_or_else(|| default_q_max(v, k));
    if q_max <= 2.0 * k {
        return Err(Error::InvalidArgument(format!("q_max = {q_max} must exceed 2k = {}", 2.0 * k)));
    }
    let (r, f) = radial_measure(v, q_max, opts);
    let (q, w) = momentum_nodes(v, k, q_max, opts);
    let n = q.len();
    let mut momenta = q.clone();
    momenta.push(k);
    let vm = potential_matrix(l, &momenta, &r, &f);

    let k2 = k * k;
    let mut a = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut sub = 0.0;
    for j in 0..n {
        let d = k2 - q[j] * q[j];
        a[j] = Complex64::new(w[j] * q[j] * q[j] / d, 0.0);
        sub += w[j] / d;
    }
    a[n] = Complex64::new(
        -k2 * sub + 0.5 * k * ((q_max + k) / (q_max - k)).ln(),
        -0.5 * std::f64::consts::PI * k,
    );

    let dim = n + 1;
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - vm[(i, j)] * a[j]
    });
    let rhs = DMatrix::from_fn(dim, 1, |i, _| Complex64::new(vm[(i, n)], 0.0));
    let lu = m.lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..dim).map(|i| u[(i, i)].norm()).collect();
    let dmax = diag.iter().copied().fold(0.0, f64::max);
    let dmin = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = dmax / dmin;
    if !(condition < 1e12) {
        return Err(Error::NearResonance { k, condition });
    }
    let t = lu
        .solve(&rhs)
        .ok_or(Error::NearResonance { k, condition: f64::INFINITY })?;
    let s = Complex64::new(1.0, 0.0) - Complex64::new(0.0, std::f64::consts::PI * k) * t[(n, 0)];
    let delta = super::coordinate::reduce_half_pi(0.5 * s.arg());
    Ok(MomentumRun { delta, s, condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::preset;

    #[test]
    fn zero_potential_is_trivial() {
        let run = solve(&Potential::zero(), 1.0, 0, &MomentumOptions::default()).unwrap();
        assert_eq!(run.delta, 0.0);
    }

    #[test]
    fn s_is_nearly_unitary() {
        let v = preset("gaussian").unwrap();
        let run = solve(&v, 1.0, 0, &MomentumOptions::default()).unwrap();
        assert!((run.s.norm() - 1.0).abs() < 1e-7, "|S| = {}", run.s.norm());
    }

    #[test]
    fn rejects_small_cutoff() {
        let v = preset("gaussian").unwrap();
        let opts = MomentumOptions { q_max: Some(1.0), ..Default::default() };
        assert!(solve(&v, 1.0, 0, &opts).is_err());
    }
}
