//! Partial-wave Born series.
//!
//! With the radial outgoing kernel g_ℓ(r,r') = ik j_ℓ(kr<) h_ℓ(kr>),
//! S_ℓ − 1 = −2ik Σₙ (−1)ⁿ ⟨j_ℓ, V (g_ℓ V)ⁿ j_ℓ⟩ (measure r² dr, no conjugation).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::grid::{composite_gauss, gauss_legendre, panel_edges};
use crate::numerics::special::{sph_j_array, sph_y_array};
use crate::numerics::Potential;

#[derive(Clone, Copy, Debug)]
pub struct BornOptions {
    pub panel_width: f64,
    pub points: usize,
    pub l_cap: usize,
    pub range_tol: f64,
}

impl Default for BornOptions {
    fn default() -> Self {
        Self { panel_width: 0.25, points: 12, l_cap: 80, range_tol: 1e-14 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BornWave {
    pub l: usize,
    /// Partial sums of S_ℓ after each order 0..=N.
    pub partial_s: Vec<Complex64>,
    /// |term n| for n = 0..=N.
    pub term_norms: Vec<f64>,
    /// Spectral radius estimate of g_ℓ V on the grid.
    pub spectral_radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BornResult {
    pub lambda: f64,
    pub order: usize,
    pub waves: Vec<BornWave>,
    /// False when some partial wave has growing terms or spectral radius ≥ 1.
    pub convergent: bool,
}

impl BornResult {
    pub fn s(&self) -> Vec<Complex64> {
        self.waves.iter().map(|w| *w.partial_s.last().unwrap()).collect()
    }

    /// Amplitude synthesised from the Born S_ℓ as a function of cos γ.
    pub fn amplitude_cos(&self, x: f64) -> Complex64 {
        let k = self.lambda.sqrt();
        let p = crate::numerics::special::legendre_array(self.waves.len().saturating_sub(1), x);
        self.waves
            .iter()
            .enumerate()
            .map(|(l, w)| (2 * l + 1) as f64 * (w.partial_s.last().unwrap() - 1.0) * p[l])
            .sum::<Complex64>()
            / Complex64::new(0.0, 2.0 * k)
    }
}

pub fn born_series(v: &Potential, lambda: f64, order: usize, opts: &BornOptions) -> Result<BornResult> {
    if !(lambda > 0.0) {
        return Err(domain(format!("energy must be positive, got {lambda}")));
    }
    let k = lambda.sqrt();
    if v.is_zero() {
        let wave = BornWave {
            l: 0,
            partial_s: vec![Complex64::new(1.0, 0.0); order + 1],
            term_norms: vec![0.0; order + 1],
            spectral_radius: 0.0,
        };
        return Ok(BornResult { lambda, order, waves: vec![wave], convergent: true });
    }
    let r_end = v.effective_range(opts.range_tol).max(1e-3);
    let edges = panel_edges(0.0, r_end, &v.breakpoints(), opts.panel_width);
    let (r, w) = composite_gauss(&edges, opts.points);
    let vr2: Vec<f64> = r.iter().map(|x| x * x * v.eval(*x)).collect();

    let mut waves = Vec::new();
    let mut small = 0;
    let mut convergent = true;
    for l in 0..=opts.l_cap {
        let wave = born_wave(l, k, &edges, opts.points, &r, &w, &vr2, order)?;
        let first = wave.term_norms[0];
        let grows = order >= 1 && wave.term_norms[order] > wave.term_norms[order - 1] && wave.term_norms[order] > 1e-14;
        if grows || wave.spectral_radius >= 1.0 {
            convergent = false;
        }
        waves.push(wave);
        if first < 1e-10 {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(BornResult { lambda, order, waves, convergent })
}

/// Product-integration form of g_ℓ V on a composite Gauss grid. Within the
/// panel holding r_i the kernel is integrated exactly against the interpolant
/// of V x r², so no rounding error is ever multiplied by an unbounded h_ℓ(kr).
struct VolterraKernel {
    points: usize,
    weights: Vec<f64>,
    j: Vec<f64>,
    h: Vec<Complex64>,
    /// ∫_{a}^{r_i} j(kr') L_m(r') dr' for the panel [a, b] containing r_i.
    left: Vec<Vec<f64>>,
    /// ∫_{r_i}^{b} h(kr') L_m(r') dr'.
    right: Vec<Vec<Complex64>>,
}

impl VolterraKernel {
    fn new(l: usize, k: f64, edges: &[f64], points: usize, r: &[f64], weights: &[f64]) -> Result<Self> {
        let (t, gw) = gauss_legendre(points);
        let lagrange = |m: usize, x: f64| {
            (0..points).filter(|&q| q != m).map(|q| (x - t[q]) / (t[m] - t[q])).product::<f64>()
        };
        let bessel = |x: f64| -> Result<(f64, Complex64)> {
            let j = sph_j_array(l, x)[l];
            Ok((j, Complex64::new(j, sph_y_array(l, x)?[l])))
        };
        let n = r.len();
        let mut j = Vec::with_capacity(n);
        let mut h = Vec::with_capacity(n);
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for (panel, e) in edges.windows(2).enumerate() {
            let (a, b) = (e[0], e[1]);
            let half = 0.5 * (b - a);
            for li in 0..points {
                let ri = r[panel * points + li];
                let (jr, hr) = bessel(k * ri)?;
                j.push(jr);
                h.push(hr);
                let mut lw = vec![0.0; points];
                let mut rw = vec![Complex64::new(0.0, 0.0); points];
                let (hl, hrt) = (0.5 * (ri - a), 0.5 * (b - ri));
                for (x, w) in t.iter().zip(&gw) {
                    let sl = a + hl * (x + 1.0);
                    let sr = ri + hrt * (x + 1.0);
                    let (jl, _) = bessel(k * sl)?;
                    let (_, hs) = bessel(k * sr)?;
                    let (ul, ur) = ((sl - a) / half - 1.0, (sr - a) / half - 1.0);
                    for m in 0..points {
                        lw[m] += hl * w * jl * lagrange(m, ul);
                        rw[m] += hrt * w * hs * lagrange(m, ur);
                    }
                }
                left.push(lw);
                right.push(rw);
            }
        }
        Ok(Self { points, weights: weights.to_vec(), j, h, left, right })
    }

    /// (g V x)(r_i) given f = V x r² at the nodes.
    fn apply(&self, f: &[Complex64], ik: Complex64) -> Vec<Complex64> {
        let p = self.points;
        let panels = f.len() / p;
        let panel_sum = |g: &dyn Fn(usize) -> Complex64, q: usize| -> Complex64 {
            (q * p..(q + 1) * p).map(|i| g(i) * self.weights[i]).sum()
        };
        let inner: Vec<Complex64> = (0..panels).map(|q| panel_sum(&|i| self.j[i] * f[i], q)).collect();
        let outer: Vec<Complex64> = (0..panels).map(|q| panel_sum(&|i| self.h[i] * f[i], q)).collect();
        let mut suffix = vec![Complex64::new(0.0, 0.0); panels + 1];
        for q in (0..panels).rev() {
            suffix[q] = suffix[q + 1] + outer[q];
        }
        let mut out = Vec::with_capacity(f.len());
        let mut prefix = Complex64::new(0.0, 0.0);
        for q in 0..panels {
            let fp = &f[q * p..(q + 1) * p];
            for li in 0..p {
                let i = q * p + li;
                let a: Complex64 = prefix + self.left[i].iter().zip(fp).map(|(w, v)| v * *w).sum::<Complex64>();
                let b: Complex64 = suffix[q + 1] + self.right[i].iter().zip(fp).map(|(w, v)| v * w).sum::<Complex64>();
                out.push(ik * (self.h[i] * a + self.j[i] * b));
            }
            prefix += inner[q];
        }
        out
    }
}

fn born_wave(l: usize, k: f64, edges: &[f64], points: usize, r: &[f64], w: &[f64], vr2: &[f64], order: usize) -> Result<BornWave> {
    let n = r.len();
    let kern = VolterraKernel::new(l, k, edges, points, r, w)?;
    let ik = Complex64::new(0.0, k);
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        let f: Vec<Complex64> = (0..n).map(|i| vr2[i] * x[i]).collect();
        kern.apply(&f, ik)
    };

    let mut x: Vec<Complex64> = kern.j.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let pref = Complex64::new(0.0, -2.0 * k);
    let mut s = Complex64::new(1.0, 0.0);
    let mut partial_s = Vec::with_capacity(order + 1);
    let mut term_norms = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let inner: Complex64 = (0..n).map(|i| w[i] * kern.j[i] * vr2[i] * x[i]).sum();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let term = pref * inner * sign;
        s += term;
        partial_s.push(s);
        term_norms.push(term.norm());
        if m < order {
            x = apply(&x);
        }
    }
    Ok(BornWave { l, partial_s, term_norms, spectral_radius: spectral_radius(n, apply) })
}

fn spectral_radius(n: usize, apply: impl Fn(&[Complex64]) -> Vec<Complex64>) -> f64 {
    let mut v: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(1.0 + 0.37 * (i as f64).sin(), 0.1 * i as f64 / n as f64)).collect();
    let mut log_growth = 0.0;
    let iters = 300;
    for it in 0..iters {
        let w = apply(&v);
        let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        if it >= iters / 2 {
            log_growth += nw.ln();
        }
        v = w.into_iter().map(|z| z / nw).collect();
    }
    (log_growth / (iters - iters / 2) as f64).exp()
}
