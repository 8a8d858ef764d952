//! Gauss-type quadrature grids on (0, extent].

use serde::{Deserialize, Serialize};
use std::ops::Deref;

use crate::error::{invalid, Result};

/// Gauss–Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Node placement rule for a grid on (0, extent].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GridScheme {
    /// Gauss–Legendre mapped linearly onto (0, extent).
    Gauss,
    /// Gauss–Legendre in u ∈ (0,1) with x = c·u / (1 − u + c/extent); clusters nodes
    /// near the origin and stretches the tail.
    GaussRational { scale: f64 },
    /// `panels` equal sub-intervals with n/panels Gauss points each.
    CompositeGauss { panels: usize },
    /// Trapezoid nodes h, 2h, …, extent with the end weight halved; assumes the
    /// integrand vanishes at the origin.
    Uniform,
    /// Gauss–Legendre in ln x on (lower, extent); the region below `lower` is dropped.
    LogGauss { lower: f64 },
}

impl GridScheme {
    /// Polynomial degree integrated exactly with `n` nodes (0 when no polynomial is exact).
    pub fn exact_degree(&self, n: usize) -> usize {
        match self {
            GridScheme::Gauss => 2 * n - 1,
            GridScheme::GaussRational { .. } => 0,
            GridScheme::CompositeGauss { panels } => 2 * (n / panels) - 1,
            GridScheme::Uniform => 1,
            GridScheme::LogGauss { .. } => 0,
        }
    }
}

/// Nodes and positive weights on (0, extent].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub extent: f64,
    pub scheme: GridScheme,
}

impl QuadratureGrid {
    pub fn build(n: usize, extent: f64, scheme: GridScheme) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("grid needs n >= 2, got {n}")));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(invalid(format!("grid extent must be positive and finite, got {extent}")));
        }
        let (nodes, weights) = match &scheme {
            GridScheme::Gauss => {
                let (x, w) = gauss_legendre(n);
                let h = 0.5 * extent;
                (
                    x.iter().map(|t| h * (t + 1.0)).collect(),
                    w.iter().map(|v| h * v).collect(),
                )
            }
            GridScheme::GaussRational { scale } => {
                if !(*scale > 0.0) {
                    return Err(invalid("rational map scale must be positive"));
                }
                let c = *scale;
                let (x, w) = gauss_legendre(n);
                let mut nodes = Vec::with_capacity(n);
                let mut weights = Vec::with_capacity(n);
                for (t, wt) in x.iter().zip(&w) {
                    let u = 0.5 * (t + 1.0);
                    let den = 1.0 - u + c / extent;
                    nodes.push(c * u / den);
                    // dx/du = c (1 + c/E) / den²
                    weights.push(0.5 * wt * c * (1.0 + c / extent) / (den * den));
                }
                (nodes, weights)
            }
            GridScheme::CompositeGauss { panels } => {
                let p = *panels;
                if p == 0 || n % p != 0 || n / p < 1 {
                    return Err(invalid(format!("composite grid: n = {n} not divisible into {p} panels")));
                }
                let edges: Vec<f64> = (0..=p).map(|i| extent * i as f64 / p as f64).collect();
                composite_gauss(&edges, n / p)
            }
            GridScheme::Uniform => {
                let h = extent / n as f64;
                let nodes: Vec<f64> = (1..=n).map(|i| h * i as f64).collect();
                let mut weights = vec![h; n];
                weights[n - 1] = 0.5 * h;
                (nodes, weights)
            }
            GridScheme::LogGauss { lower } => {
                if !(*lower > 0.0 && *lower < extent) {
                    return Err(invalid(format!("log grid needs 0 < lower < extent, got {lower}")));
                }
                let (x, w) = gauss_legendre(n);
                let (a, b) = (lower.ln(), extent.ln());
                let h = 0.5 * (b - a);
                x.iter()
                    .zip(&w)
                    .map(|(t, wt)| {
                        let u = (a + h * (t + 1.0)).exp();
                        (u, h * wt * u)
                    })
                    .unzip()
            }
        };
        Ok(Self { nodes, weights, extent, scheme })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Order-sensitive byte image of nodes and weights, used for provenance hashes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.len() + 8);
        out.extend_from_slice(&self.extent.to_le_bytes());
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.extend_from_slice(&x.to_le_bytes());
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }
}

/// Gauss–Legendre with `per_panel` points on each interval of `edges`.
pub fn composite_gauss(edges: &[f64], per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(per_panel * edges.len());
    let mut weights = Vec::with_capacity(per_panel * edges.len());
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let h = 0.5 * (b - a);
        for (t, wt) in x.iter().zip(&w) {
            nodes.push(a + h * (t + 1.0));
            weights.push(h * wt);
        }
    }
    (nodes, weights)
}

/// Panel edges covering [a, b] with no panel wider than `max_width`, honouring
/// interior `breaks` exactly.
pub fn panel_edges(a: f64, b: f64, breaks: &[f64], max_width: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut edges = vec![a];
    let mut left = a;
    for c in cuts {
        if c - left <= 0.0 {
            continue;
        }
        let m = ((c - left) / max_width).ceil().max(1.0) as usize;
        for i in 1..=m {
            edges.push(left + (c - left) * i as f64 / m as f64);
        }
        left = c;
    }
    edges
}

macro_rules! grid_newtype {
    ($name:ident, $extent:ident) => {
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub QuadratureGrid);

        impl $name {
            pub fn new(n: usize, extent: f64, scheme: GridScheme) -> Result<Self> {
                QuadratureGrid::build(n, extent, scheme).map(Self)
            }

            pub fn $extent(&self) -> f64 {
                self.0.extent
            }
        }

        impl Deref for $name {
            type Target = QuadratureGrid;
            fn deref(&self) -> &QuadratureGrid {
                &self.0
            }
        }
    };
}

grid_newtype!(RadialGrid, r_max);
grid_newtype!(MomentumGrid, p_max);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_integrates_power_laws() {
        let g = QuadratureGrid::build(40, 1e3, GridScheme::LogGauss { lower: 1e-3 }).unwrap();
        let exact = (1e3f64.powf(0.5) - 1e-3f64.powf(0.5)) / 0.5;
        assert!((g.integrate(|x| x.powf(-0.5)) - exact).abs() < 1e-10 * exact);
        assert!(QuadratureGrid::build(8, 1.0, GridScheme::LogGauss { lower: 2.0 }).is_err());
    }

    #[test]
    fn two_point_gauss() {
        let g = QuadratureGrid::build(2, 1.0, GridScheme::Gauss).unwrap();
        let s = 0.5 / 3f64.sqrt();
        assert!((g.nodes[0] - (0.5 - s)).abs() < 1e-15);
        assert!((g.nodes[1] - (0.5 + s)).abs() < 1e-15);
        assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_exact_with_four_nodes() {
        let r = 3.7;
        let g = QuadratureGrid::build(4, r, GridScheme::Gauss).unwrap();
        let v = g.integrate(|x| x * x);
        assert!((v - r.powi(3) / 3.0).abs() < 1e-13 * r.powi(3));
    }

    #[test]
    fn exponential_on_long_interval() {
        let g = QuadratureGrid::build(64, 40.0, GridScheme::Gauss).unwrap();
        let v = g.integrate(|x| (-x).exp());
        assert!((v - (1.0 - (-40f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(QuadratureGrid::build(1, 1.0, GridScheme::Gauss).is_err());
        assert!(QuadratureGrid::build(4, 0.0, GridScheme::Gauss).is_err());
        assert!(QuadratureGrid::build(4, -1.0, GridScheme::Uniform).is_err());
        assert!(QuadratureGrid::build(5, 1.0, GridScheme::CompositeGauss { panels: 2 }).is_err());
    }

    #[test]
    fn schemes_satisfy_invariants() {
        let schemes = [
            GridScheme::Gauss,
            GridScheme::GaussRational { scale: 2.0 },
            GridScheme::CompositeGauss { panels: 4 },
            GridScheme::Uniform,
        ];
        for s in schemes {
            let g = QuadratureGrid::build(32, 10.0, s.clone()).unwrap();
            assert!(g.nodes.windows(2).all(|p| p[0] < p[1]), "{s:?}");
            assert!(g.nodes[0] > 0.0 && *g.nodes.last().unwrap() <= 10.0 + 1e-12);
            assert!(g.weights.iter().all(|&w| w > 0.0));
            // the trapezoid rule drops the half-weight origin node
            let slack = if s == GridScheme::Uniform { 0.5 * 10.0 / 32.0 } else { 0.0 };
            let total: f64 = g.weights.iter().sum();
            assert!((total + slack - 10.0).abs() < 1e-6, "{s:?}: {total}");
        }
    }

    #[test]
    fn doubling_improves_by_scheme_order() {
        let f = |x: f64| (x).sin() * (-0.3 * x).exp();
        let exact = {
            // ∫_0^L e^{-a x} sin x dx
            let (a, l) = (0.3f64, 6.0f64);
            (1.0 - (-a * l).exp() * (a * l.sin() + l.cos())) / (1.0 + a * a)
        };
        let err = |n: usize, s: GridScheme| {
            (QuadratureGrid::build(n, 6.0, s).unwrap().integrate(f) - exact).abs()
        };
        let (e1, e2) = (err(40, GridScheme::Uniform), err(80, GridScheme::Uniform));
        assert!(e1 / e2 > 3.5, "trapezoid ratio {}", e1 / e2);
        let (e1, e2) = (err(4, GridScheme::Gauss), err(8, GridScheme::Gauss));
        assert!(e1 / e2 > 2f64.powi(7), "gauss ratio {}", e1 / e2);
    }

    #[test]
    fn panel_edges_keep_breakpoints() {
        let e = panel_edges(0.0, 10.0, &[2.5], 1.0);
        assert!(e.contains(&2.5));
        assert!(e.windows(2).all(|p| p[1] - p[0] <= 1.0 + 1e-12));
        assert_eq!(*e.last().unwrap(), 10.0);
    }
}
