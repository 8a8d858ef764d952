//! Coupling-constant scans of H(κ) = −Δ + κV (2m = 1) and the critical κ₀
//! at which the first bound state appears from a zero-energy resonance.
//!
//! Local potentials are counted per partial wave with a finite-difference
//! radial operator on [0, R]. At R the boundary condition u'/u = −ℓ/R copies
//! the decaying zero-energy solution, so the count of negative eigenvalues is
//! the count of the whole half-line whenever V vanishes beyond R.

use serde::{Deserialize, Serialize};

use super::separable::SeparablePotential;
use crate::error::{invalid, Error, Result};
use crate::numerics::linalg::sturm_count;
use crate::numerics::Potential;

/// Relative width of the final κ₀ bracket.
pub const KAPPA_TOLERANCE: f64 = 1e-7;

/// Margins κ/κ₀ − 1 at which the lowest eigenvalue is sampled.
pub const MARGINS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialGridSpec {
    /// Outer radius R.
    pub radius: f64,
    /// Mesh width h.
    pub step: f64,
    pub l_max: usize,
}

impl RadialGridSpec {
    /// R beyond the point where |V| < 1e−12, at least 20.
    pub fn for_potential(v: &Potential, step: f64) -> Self {
        Self { radius: (v.effective_range(1e-12) + 5.0).max(20.0), step, l_max: 40 }
    }
}

pub enum ScanTarget<'a> {
    Local { potential: &'a Potential, grid: RadialGridSpec },
    /// Rank-one pair potential with reduced mass m; κ multiplies its strength.
    Separable { potential: &'a SeparablePotential, mass: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CouplingScan {
    pub kappas: Vec<f64>,
    /// Bound states counted with their 2ℓ+1 degeneracy.
    pub counts: Vec<usize>,
    /// Largest κ with count 0 and smallest with count ≥ 1.
    pub bracket: Option<(f64, f64)>,
    pub kappa0: Option<f64>,
    /// (κ/κ₀ − 1, lowest eigenvalue) just above κ₀.
    pub margins: Vec<(f64, f64)>,
    /// True when κ₀ was found: H(κ₀) has a zero-energy resonance.
    pub resonance: bool,
}

/// V at a node, averaged over the cell when a jump falls inside it.
fn node_value(v: &Potential, r: f64, h: f64) -> f64 {
    if v.breakpoints().iter().all(|b| (b - r).abs() >= 0.5 * h) {
        return v.eval(r);
    }
    let m = 64;
    (0..m).map(|k| v.eval(r - 0.5 * h + h * (k as f64 + 0.5) / m as f64)).sum::<f64>() / m as f64
}

/// Tridiagonal radial operator for one ℓ, symmetrised at the Robin end.
fn radial_operator(v: &Potential, kappa: f64, l: usize, g: &RadialGridSpec) -> (Vec<f64>, Vec<f64>) {
    let n = (g.radius / g.step).round() as usize;
    let h = g.radius / n as f64;
    let h2 = h * h;
    let cent = (l * (l + 1)) as f64;
    let mut diag: Vec<f64> = (1..=n)
        .map(|i| {
            let r = i as f64 * h;
            2.0 / h2 + cent / (r * r) + kappa * node_value(v, r, h)
        })
        .collect();
    let mut off = vec![-1.0 / h2; n - 1];
    // ghost node u_{n+1} = u_{n−1} − 2h(ℓ/R)u_n, trapezoid weight ½ at the end
    let r = g.radius;
    diag[n - 1] = 2.0 * (1.0 + h * l as f64 / r) / h2 + cent / (r * r) + kappa * v.eval(r);
    off[n - 2] = -(2.0f64).sqrt() / h2;
    (diag, off)
}

fn local_count(v: &Potential, kappa: f64, g: &RadialGridSpec) -> Result<usize> {
    let mut total = 0;
    for l in 0..=g.l_max {
        let (d, o) = radial_operator(v, kappa, l, g);
        let c = sturm_count(&d, &o, 0.0);
        if c == 0 {
            return Ok(total);
        }
        total += (2 * l + 1) * c;
    }
    Err(Error::GridResolution(format!("bound states persist up to l = {}", g.l_max)))
}

/// Lowest s-wave eigenvalue by bisection on the Sturm count.
fn local_ground(v: &Potential, kappa: f64, g: &RadialGridSpec) -> f64 {
    let (d, o) = radial_operator(v, kappa, 0, g);
    let mut lo = d.iter().zip(o.iter().chain([&0.0])).map(|(a, b)| a - 2.0 * b.abs()).fold(f64::MAX, f64::min);
    let mut hi = 0.0;
    if sturm_count(&d, &o, hi) == 0 {
        return f64::NAN;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&d, &o, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn coupling_scan(target: &ScanTarget, kappas: &[f64]) -> Result<CouplingScan> {
    if kappas.is_empty() || kappas.iter().any(|k| !(*k >= 0.0)) || kappas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("coupling values must be nonnegative and increasing"));
    }
    match target {
        ScanTarget::Local { potential, grid } => {
            if !potential.is_short_range() {
                return Err(Error::Precondition(format!("{} is long-range; counts do not converge", potential.kind())));
            }
            if !(grid.step > 0.0 && grid.radius > 4.0 * grid.step) {
                return Err(invalid("radial grid needs 0 < step ≪ radius"));
            }
            let count = |k: f64| local_count(potential, k, grid);
            let counts: Vec<usize> = kappas.iter().map(|&k| count(k)).collect::<Result<_>>()?;
            check_monotone(kappas, &counts)?;
            let Some(first) = counts.iter().position(|&c| c >= 1) else {
                return Ok(CouplingScan { kappas: kappas.to_vec(), counts, bracket: None, kappa0: None, margins: vec![], resonance: false });
            };
            if first == 0 {
                return Err(invalid("scan must start below the critical coupling"));
            }
            let (mut lo, mut hi) = (kappas[first - 1], kappas[first]);
            while hi - lo > KAPPA_TOLERANCE * hi {
                let mid = 0.5 * (lo + hi);
                if count(mid)? >= 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let margins = MARGINS.iter().map(|&m| (m, local_ground(potential, hi * (1.0 + m), grid))).collect();
            Ok(CouplingScan {
                kappas: kappas.to_vec(),
                counts,
                bracket: Some((lo, hi)),
                kappa0: Some(hi),
                margins,
                resonance: true,
            })
        }
        ScanTarget::Separable { potential, mass } => {
            let s = potential.strength;
            let f0 = potential.form.free_element(*mass, 0.0);
            // count 1 exactly when 1 + κ s F(0) < 0
            let critical = if s < 0.0 { Some(-1.0 / (s * f0)) } else { None };
            let counts: Vec<usize> =
                kappas.iter().map(|&k| usize::from(critical.is_some_and(|c| k > c))).collect();
            let found = critical.filter(|&c| c <= *kappas.last().unwrap());
            let margins = found
                .map(|c| {
                    MARGINS
                        .iter()
                        .map(|&m| {
                            let scaled = SeparablePotential::new(s * c * (1.0 + m), potential.form.clone());
                            let e = super::separable::pair_spectrum(&scaled, *mass, None)
                                .ok()
                                .and_then(|p| p.lowest())
                                .unwrap_or(f64::NAN);
                            (m, e)
                        })
                        .collect()
                })
                .unwrap_or_default();
            Ok(CouplingScan {
                kappas: kappas.to_vec(),
                counts,
                bracket: found.map(|c| (c, c)),
                kappa0: found,
                margins,
                resonance: found.is_some(),
            })
        }
    }
}

fn check_monotone(kappas: &[f64], counts: &[usize]) -> Result<()> {
    for i in 1..counts.len() {
        if counts[i] < counts[i - 1] {
            return Err(Error::GridResolution(format!(
                "bound-state count drops from {} to {} between κ = {} and {}",
                counts[i - 1],
                counts[i],
                kappas[i - 1],
                kappas[i]
            )));
        }
    }
    Ok(())
}
