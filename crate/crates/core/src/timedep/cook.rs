//! Cook-criterion integrals ∫‖V e^{−iH₀t} f‖ dt.

use serde::{Deserialize, Serialize};

use super::arena::Wavepacket;
use super::propagate::{check_box, Flows};
use crate::error::{invalid, Error, Result};
use crate::numerics::{fit, Potential};

/// Largest spectral mass allowed below the support cutoff.
pub const SUPPORT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CookOptions {
    pub t_max: f64,
    /// Samples per unit of ln t after `t_min`.
    pub samples_per_e_fold: usize,
    pub t_min: f64,
    /// f̂ must be negligible on |ξ| < support_cutoff.
    pub support_cutoff: f64,
    /// Decay exponent fitted on t ≥ t_max / window.
    pub window: f64,
}

impl Default for CookOptions {
    fn default() -> Self {
        Self { t_max: 400.0, samples_per_e_fold: 24, t_min: 1.0, support_cutoff: 0.5, window: 10.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CookTrace {
    pub times: Vec<f64>,
    /// ‖V e^{−iH₀t} f‖.
    pub integrand: Vec<f64>,
    /// ∫₀^t of the integrand at each sample time.
    pub partial: Vec<f64>,
    pub exponent: f64,
}

impl CookTrace {
    /// Increments of the partial integral over successive doublings of t,
    /// ending at the last sample.
    pub fn dyadic_increments(&self, count: usize) -> Vec<f64> {
        let at = |t: f64| {
            let i = self.times.iter().position(|&s| s >= t * (1.0 - 1e-12)).unwrap_or(self.times.len() - 1);
            self.partial[i]
        };
        let t_end = *self.times.last().unwrap();
        (0..count)
            .rev()
            .map(|i| {
                let hi = t_end / 2f64.powi(i as i32);
                at(hi) - at(hi / 2.0)
            })
            .collect()
    }
}

fn sample_times(opts: &CookOptions) -> Vec<f64> {
    let mut times = Vec::new();
    let early = (opts.t_min * opts.samples_per_e_fold as f64).ceil().max(4.0) as usize;
    for i in 0..early {
        times.push(opts.t_min * i as f64 / early as f64);
    }
    let n = ((opts.t_max / opts.t_min).ln() * opts.samples_per_e_fold as f64).ceil() as usize;
    for i in 0..=n {
        times.push(opts.t_min * (opts.t_max / opts.t_min).powf(i as f64 / n as f64));
    }
    times
}

pub fn cook_integral(v: &Potential, f: &Wavepacket, opts: &CookOptions) -> Result<CookTrace> {
    if !(opts.t_max > opts.t_min && opts.t_min > 0.0) || opts.samples_per_e_fold == 0 {
        return Err(invalid("cook sampling needs 0 < t_min < t_max and samples > 0"));
    }
    let low = f.low_frequency_mass(opts.support_cutoff);
    if low > SUPPORT_TOLERANCE {
        return Err(Error::Precondition(format!(
            "f̂ has mass {low:.3e} on |ξ| < {} (needs < {SUPPORT_TOLERANCE:e})",
            opts.support_cutoff
        )));
    }
    check_box(f, opts.t_max)?;
    let times = sample_times(opts);
    let flows = Flows::new(f.arena, v);
    let dx = f.dx();
    let integrand: Vec<f64> = times
        .iter()
        .map(|&t| {
            let mut psi = f.samples.clone();
            flows.kinetic(&mut psi, t);
            psi.iter().zip(&flows.v).map(|(z, v)| (v * z.norm()).powi(2)).sum::<f64>().sqrt() * dx.sqrt()
        })
        .collect();
    let mut partial = vec![0.0; times.len()];
    for i in 1..times.len() {
        partial[i] = partial[i - 1] + 0.5 * (times[i] - times[i - 1]) * (integrand[i] + integrand[i - 1]);
    }
    let exponent = if integrand.iter().all(|x| *x == 0.0) {
        f64::INFINITY
    } else {
        fit::decay_exponent(&times[1..], &integrand[1..], opts.window)
    };
    Ok(CookTrace { times, integrand, partial, exponent })
}
