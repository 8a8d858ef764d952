//! Periodic 1D arena and wavepackets.
//!
//! Grid points x_j = −L + j·dx, j = 0..n, with dx = 2L/n. Spectra use the
//! unitary convention f̂(ξ) = (2π)^{−1/2} ∫ e^{−ixξ} f(x) dx sampled at the
//! FFT frequencies ξ_k = k·π/L (k wrapped to [−n/2, n/2)).

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::Potential;

/// Fraction of the box (on each side) treated as the boundary layer.
pub const BOUNDARY_LAYER: f64 = 0.05;

/// Quantile of |f̂|² used to define the maximal group velocity.
pub const VELOCITY_QUANTILE: f64 = 0.999;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub n: usize,
    pub half_width: f64,
}

impl Arena {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(invalid(format!("arena needs an even number of points >= 8, got {n}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(invalid(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self { n, half_width })
    }

    /// Arena with spacing at most `dx` (rounded to an even point count).
    pub fn with_spacing(half_width: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(invalid(format!("spacing must be positive, got {dx}")));
        }
        let n = ((2.0 * half_width / dx).ceil() as usize).max(8);
        Self::new(n + n % 2, half_width)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.half_width
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn xi(&self, k: usize) -> f64 {
        let k = k as i64;
        let n = self.n as i64;
        let m = if k < n / 2 { k } else { k - n };
        m as f64 * self.dxi()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.xi(k)).collect()
    }

    /// V(|x|) at the grid points.
    pub fn sample(&self, v: &Potential) -> Vec<f64> {
        (0..self.n).map(|j| v.eval(self.x(j).abs())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Wavepacket {
    pub arena: Arena,
    pub samples: Vec<Complex64>,
    pub norm: f64,
}

impl Wavepacket {
    pub fn new(arena: Arena, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != arena.n {
            return Err(invalid(format!("expected {} samples, got {}", arena.n, samples.len())));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("wavepacket samples must be finite"));
        }
        let norm = l2(&samples, arena.dx());
        Ok(Self { arena, samples, norm })
    }

    /// (2πs²)^{−1/4} exp(−(x−x₀)²/(4s²) + i k₀ x), normalised on the grid.
    pub fn gaussian(arena: Arena, x0: f64, k0: f64, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(invalid(format!("width must be positive, got {s}")));
        }
        let c = (2.0 * PI * s * s).powf(-0.25);
        let samples = arena
            .positions()
            .iter()
            .map(|&x| c * Complex64::from_polar((-(x - x0).powi(2) / (4.0 * s * s)).exp(), k0 * x))
            .collect();
        Self::new(arena, samples)?.normalized()
    }

    /// Packet with spectrum `fhat(ξ)·e^{−iξx₀}`, normalised.
    pub fn from_spectrum(arena: Arena, x0: f64, fhat: impl Fn(f64) -> Complex64) -> Result<Self> {
        let spec: Vec<Complex64> = arena
            .momenta()
            .iter()
            .map(|&xi| fhat(xi) * Complex64::from_polar(1.0, -xi * x0))
            .collect();
        Self::from_spectrum_samples(arena, spec)?.normalized()
    }

    /// Smooth bump spectrum supported exactly on [a, b] (negated for b < a ≤ 0).
    pub fn bump(arena: Arena, x0: f64, a: f64, b: f64) -> Result<Self> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !(hi > lo) {
            return Err(invalid("bump support must have positive length"));
        }
        Self::from_spectrum(arena, x0, move |xi| {
            if xi > lo && xi < hi {
                Complex64::new((-1.0 / ((xi - lo) * (hi - xi)) * (hi - lo)).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_spectrum_samples(arena: Arena, spec: Vec<Complex64>) -> Result<Self> {
        if spec.len() != arena.n {
            return Err(invalid(format!("expected {} spectral samples, got {}", arena.n, spec.len())));
        }
        let (_, inv) = plans(arena.n);
        let mut buf: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(k, v)| v * Complex64::from_polar(1.0, -arena.xi(k) * arena.half_width))
            .collect();
        inv.process(&mut buf);
        let scale = (2.0 * PI).sqrt() / (arena.dx() * arena.n as f64);
        for z in &mut buf {
            *z *= scale;
        }
        Self::new(arena, buf)
    }

    pub fn dx(&self) -> f64 {
        self.arena.dx()
    }

    pub fn normalized(mut self) -> Result<Self> {
        if self.norm == 0.0 {
            return Err(Error::Precondition("cannot normalise a zero wavepacket".into()));
        }
        let s = 1.0 / self.norm;
        for z in &mut self.samples {
            *z *= s;
        }
        self.norm = 1.0;
        Ok(self)
    }

    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        let norm = l2(&samples, self.dx());
        Self { arena: self.arena, samples, norm }
    }

    /// f̂(ξ_k) in FFT order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let (fwd, _) = plans(self.arena.n);
        let mut buf = self.samples.clone();
        fwd.process(&mut buf);
        let c = self.dx() / (2.0 * PI).sqrt();
        buf.iter()
            .enumerate()
            .map(|(k, v)| v * c * Complex64::from_polar(1.0, self.arena.xi(k) * self.arena.half_width))
            .collect()
    }

    /// f̂ at arbitrary ξ by direct quadrature over the numerical support of f;
    /// zero outside the grid band |ξ| ≤ π/dx.
    pub fn spectrum_at(&self, xis: &[f64]) -> Vec<Complex64> {
        let band = PI / self.dx();
        let peak = self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let support: Vec<(f64, Complex64)> = self
            .samples
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-17 * peak)
            .map(|(j, z)| (self.arena.x(j), *z))
            .collect();
        let c = self.dx() / (2.0 * PI).sqrt();
        xis.par_iter()
            .map(|&xi| {
                if xi.abs() > band {
                    return Complex64::new(0.0, 0.0);
                }
                support.iter().map(|(x, z)| z * Complex64::from_polar(1.0, -x * xi)).sum::<Complex64>() * c
            })
            .collect()
    }

    pub fn inner(&self, other: &Wavepacket) -> Complex64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.dx()
    }

    pub fn distance(&self, other: &Wavepacket) -> f64 {
        l2_diff(&self.samples, &other.samples, self.dx())
    }

    /// Mass in the outer boundary layer relative to the total.
    pub fn boundary_fraction(&self) -> f64 {
        let n = self.arena.n;
        let m = ((BOUNDARY_LAYER * n as f64).ceil() as usize).max(1);
        let edge: f64 = self.samples[..m].iter().chain(&self.samples[n - m..]).map(|z| z.norm_sqr()).sum();
        let total: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            0.0
        } else {
            edge / total
        }
    }

    /// Mass (relative) with |x| in [lo, hi].
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        let total: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        let part: f64 = self
            .samples
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let a = self.arena.x(*j).abs();
                a >= lo && a <= hi
            })
            .map(|(_, z)| z.norm_sqr())
            .sum();
        part / total
    }

    /// 2·|ξ| at the quantile of |f̂|² (group velocity of H₀ = −Δ).
    pub fn max_velocity(&self) -> f64 {
        let spec = self.spectrum();
        let mut pairs: Vec<(f64, f64)> =
            spec.iter().enumerate().map(|(k, v)| (self.arena.xi(k).abs(), v.norm_sqr())).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let mut acc = 0.0;
        for (xi, w) in &pairs {
            acc += w;
            if acc >= VELOCITY_QUANTILE * total {
                return 2.0 * xi;
            }
        }
        2.0 * pairs.last().map(|p| p.0).unwrap_or(0.0)
    }

    /// Relative spectral mass with |ξ| < a.
    pub fn low_frequency_mass(&self, a: f64) -> f64 {
        let spec = self.spectrum();
        let total: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
        let low: f64 =
            spec.iter().enumerate().filter(|(k, _)| self.arena.xi(*k).abs() < a).map(|(_, v)| v.norm_sqr()).sum();
        low / total
    }

    /// ⟨H₀⟩ = ∫ ξ² |f̂|² dξ.
    pub fn kinetic_energy(&self) -> f64 {
        let spec = self.spectrum();
        spec.iter().enumerate().map(|(k, v)| self.arena.xi(k).powi(2) * v.norm_sqr()).sum::<f64>() * self.arena.dxi()
    }

    /// ⟨H⟩ with V sampled at |x|.
    pub fn energy(&self, v: &[f64]) -> f64 {
        let pot: f64 = self.samples.iter().zip(v).map(|(z, v)| v * z.norm_sqr()).sum::<f64>() * self.dx();
        self.kinetic_energy() + pot
    }

    /// Odd part (f(x) − f(−x))/2 about x = 0; the ℓ = 0 radial sector.
    pub fn odd_part(&self) -> Wavepacket {
        let n = self.arena.n;
        // x_j = −L + j dx, so −x_j is index n − j (mod n)
        let s = (0..n).map(|j| 0.5 * (self.samples[j] - self.samples[(n - j) % n])).collect();
        self.with_samples(s)
    }
}

pub(crate) fn l2(s: &[Complex64], dx: f64) -> f64 {
    (s.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt()
}

pub(crate) fn l2_diff(a: &[Complex64], b: &[Complex64], dx: f64) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() * dx).sqrt()
}
