//! Outward radial integration with asymptotic matching.
//!
//! Integrates u'' = (V + ℓ(ℓ+1)/r² − k²) u from a small r₀ together with the
//! Prüfer angles of the interacting and free solutions, then matches to
//! Riccati–Bessel functions at the outer end of the grid.

use crate::error::{Error, Result};
use crate::numerics::ode::{dopri5, Tolerance};
use crate::numerics::special::sph_bessel;
use crate::numerics::{Potential, RadialGrid};

/// Settings of the coordinate-space solver.
#[derive(Clone, Copy, Debug)]
pub struct RadialOptions {
    pub rtol: f64,
    pub r0: f64,
    /// |V| below this counts as outside the potential when checking the matching radius.
    pub range_tol: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, r0: 1e-6, range_tol: 1e-10 }
    }
}

/// Result of one outward integration.
#[derive(Clone, Debug)]
pub struct RadialRun {
    /// Phase shift reduced to (−π/2, π/2].
    pub delta: f64,
    /// Integer n with δ_total = δ + nπ, from the Prüfer angles.
    pub branch: i64,
    /// u on the grid nodes, normalised to u ~ sin(kr − ℓπ/2 + δ).
    pub u: Vec<f64>,
}

/// Reduces an angle modulo π into (−π/2, π/2].
pub fn reduce_half_pi(x: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut y = x - pi * (x / pi).round();
    if y <= -0.5 * pi {
        y += pi;
    }
    if y > 0.5 * pi {
        y -= pi;
    }
    y
}

/// Riccati–Bessel ĵ = x j_ℓ(x), n̂ = x y_ℓ(x) and their x-derivatives.
pub fn riccati(l: usize, x: f64) -> Result<(f64, f64, f64, f64)> {
    let b = sph_bessel(l, x)?;
    Ok((x * b.j, x * b.y, b.j + x * b.dj, b.y + x * b.dy))
}

pub fn integrate(v: &Potential, k: f64, l: usize, grid: &RadialGrid, opts: &RadialOptions) -> Result<RadialRun> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("momentum must be positive, got {k}")));
    }
    let r_match = grid.r_max();
    let range = v.effective_range(opts.range_tol);
    if range > r_match {
        return Err(Error::GridTooSmall { r_match, range });
    }
    let lf = l as f64;
    let cent = lf * (lf + 1.0);
    let k2 = k * k;
    let rhs = |r: f64, y: &[f64; 4]| {
        let q = v.eval(r) + cent / (r * r) - k2;
        let q0 = cent / (r * r) - k2;
        let (s, c) = y[2].sin_cos();
        let (s0, c0) = y[3].sin_cos();
        [y[1], q * y[0], k * c * c - q / k * s * s, k * c0 * c0 - q0 / k * s0 * s0]
    };

    // u ≈ (r/r₀)^{ℓ+1} (1 + a₁ r + c r²) near the origin.
    let r0 = opts.r0.min(0.5 * grid.nodes[0]);
    let vr0 = v.eval(r0);
    let a1 = r0 * vr0 / (2.0 * lf + 2.0);
    let c2 = (vr0 - k2) / (2.0 * (2.0 * lf + 3.0));
    let u0 = 1.0 + a1 * r0 + c2 * r0 * r0;
    let du0 = (lf + 1.0) / r0 * u0 + a1 + 2.0 * c2 * r0;
    let c2f = -k2 / (2.0 * (2.0 * lf + 3.0));
    let u0f = 1.0 + c2f * r0 * r0;
    let du0f = (lf + 1.0) / r0 * u0f + 2.0 * c2f * r0;
    let mut y = [u0, du0, (k * u0).atan2(du0), (k * u0f).atan2(du0f)];

    // stops: log-spaced ramp to the first node, grid nodes, breakpoints, matching radius
    let mut stops: Vec<(f64, Option<usize>)> = Vec::new();
    let mut r = r0;
    while r * 10.0 < grid.nodes[0] {
        r *= 10.0;
        stops.push((r, None));
    }
    for (i, &x) in grid.nodes.iter().enumerate() {
        stops.push((x, Some(i)));
    }
    for b in v.breakpoints() {
        if b > r0 && b < r_match {
            stops.push((b, None));
        }
    }
    stops.push((r_match, None));
    stops.sort_by(|a, b| a.0.total_cmp(&b.0));

    let tol = Tolerance { rtol: opts.rtol, atol: 1e-300 };
    let mut samples = vec![0.0; grid.len()];
    let mut log_scale = vec![0.0f64; grid.len()];
    let mut cur_log = 0.0f64;
    let mut t = r0;
    let mut h = r0;
    for (stop, idx) in stops {
        if stop > t {
            y = dopri5(&rhs, t, y, stop, tol, &mut h)?;
            t = stop;
        }
        let mag = y[0].abs() + y[1].abs() / k;
        if mag > 1e100 {
            y[0] /= mag;
            y[1] /= mag;
            cur_log += mag.ln();
        }
        if let Some(i) = idx {
            samples[i] = y[0];
            log_scale[i] = cur_log;
        }
    }

    let (u, du) = (y[0], y[1]);
    let x = k * r_match;
    let (jh, nh, djh, dnh) = riccati(l, x)?;
    let num = k * u * djh - du * jh;
    let den = k * u * dnh - du * nh;
    let delta = reduce_half_pi(num.atan2(den));

    let (sd, cd) = delta.sin_cos();
    let f = jh * cd - nh * sd;
    let df = djh * cd - dnh * sd;
    let amp = ((u * u + du * du / (k * k)) / (f * f + df * df)).sqrt();
    let u_norm = samples
        .iter()
        .zip(&log_scale)
        .map(|(s, ls)| s * (ls - cur_log).exp() / amp)
        .collect();

    let total = y[2] - y[3];
    let branch = ((total - delta) / std::f64::consts::PI).round() as i64;
    Ok(RadialRun { delta, branch, u: u_norm })
}
