use num_complex::Complex64;
use scatterkit::numerics::special::sph_j;
use scatterkit::numerics::{preset, GridScheme, Potential, RadialGrid, Shape};
use scatterkit::stationary::coordinate::{self, RadialOptions};
use scatterkit::stationary::momentum::{self, MomentumOptions};
use scatterkit::stationary::partial_wave::{CoordinateSolver, MomentumSolver};
use scatterkit::stationary::*;

use std::f64::consts::PI;

/// tan(kR + δ₀) = (k/q) tan(qR), q = √(k² − v₀).
fn square_well_delta0(v0: f64, radius: f64, k: f64) -> f64 {
    let q = (k * k - v0).sqrt();
    let d = ((k / q) * (q * radius).tan()).atan() - k * radius;
    d - PI * (d / PI).round()
}

fn wrap(d: f64) -> f64 {
    d - PI * (d / PI).round()
}

#[test]
fn square_well_matches_closed_form() {
    let (v0, radius) = (-3.0, 1.5);
    let v = Potential::with_natural_envelope(Shape::SquareWell { v0, radius }).unwrap();
    for i in 0..20 {
        let k = 0.1 + 0.15 * i as f64;
        let grid = default_radial_grid(&v, k).unwrap();
        let sol = solve_partial_wave(&v, k, 0, &grid).unwrap();
        let exact = square_well_delta0(v0, radius, k);
        assert!(wrap(sol.delta - exact).abs() < 1e-6, "k={k}: {} vs {exact}", sol.delta);
    }
}

#[test]
fn dual_solvers_agree_on_presets() {
    for name in scatterkit::numerics::potential::STATIONARY_PRESETS {
        let v = preset(name).unwrap();
        for lambda in [0.25f64, 1.0, 4.0] {
            let k: f64 = lambda.sqrt();
            for l in 0..3 {
                let c = CoordinateSolver::default().phase_shift(&v, k, l).unwrap();
                let m = MomentumSolver::default().phase_shift(&v, k, l).unwrap();
                assert!(wrap(c - m).abs() < 1e-6, "{name} λ={lambda} ℓ={l}: {c} vs {m}");
            }
        }
    }
}

#[test]
fn weak_coupling_slope_matches_first_born_term() {
    let base = preset("gaussian").unwrap();
    let k = 1.0;
    // first Born term: δ₀ ≈ −k ∫ r² j₀(kr)² V dr
    let g = RadialGrid::new(400, 12.0, GridScheme::Gauss).unwrap();
    let born = -k * g.integrate(|r| r * r * sph_j(0, k * r).powi(2) * base.eval(r));
    let kappas = [1e-3, 2e-3, 4e-3];
    let solver = CoordinateSolver::default();
    let ds: Vec<f64> = kappas.iter().map(|&c| solver.phase_shift(&base.scaled(c), k, 0).unwrap()).collect();
    // δ(κ) = aκ + bκ²: fit through the three points
    let x: Vec<f64> = kappas.to_vec();
    let y: Vec<f64> = ds.iter().zip(&x).map(|(d, c)| d / c).collect();
    let (b, a) = scatterkit::numerics::fit::linear_fit(&x, &y);
    assert!(b.is_finite());
    assert!(((a - born) / born).abs() < 0.01, "slope {a} vs Born {born}");
}

#[test]
fn amplitude_matches_volume_quadrature() {
    // a(θ,ω) = −(1/4π) ∫ e^{−ikθ·y} V(y) ψ(y) dy with ψ built from the radial solutions.
    let (v0, radius) = (-2.0, 1.0);
    let v = Potential::with_natural_envelope(Shape::SquareWell { v0, radius }).unwrap();
    let k = 1.0;
    let panels = 20;
    let grid = RadialGrid::new(16 * panels, 10.0, GridScheme::CompositeGauss { panels }).unwrap();
    let lmax = 12;
    let sols: Vec<_> = (0..=lmax).map(|l| solve_partial_wave(&v, k, l, &grid).unwrap()).collect();
    let ps = PhaseShifts { k, deltas: sols.iter().map(|s| s.delta).collect(), tail: 0.0, converged: true };
    let omega = [0.0, 0.0, 1.0];
    let theta = [0.6, 0.0, 0.8];
    let direct = amplitude(&ps, theta, omega).unwrap();

    let rule = amplitude::sphere_rule(2 * lmax + 8);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (&r, &w)) in grid.nodes.iter().zip(&grid.weights).enumerate() {
        if r >= radius {
            continue;
        }
        for (yhat, wy) in &rule {
            let cos_w = yhat[2];
            let cos_t = theta[0] * yhat[0] + theta[1] * yhat[1] + theta[2] * yhat[2];
            let p = scatterkit::numerics::special::legendre_array(lmax, cos_w);
            let mut psi = Complex64::new(0.0, 0.0);
            for (l, s) in sols.iter().enumerate() {
                let il = Complex64::new(0.0, 1.0).powu(l as u32);
                psi += (2 * l + 1) as f64 * il * Complex64::from_polar(1.0, s.delta) * s.u[i] / (k * r) * p[l];
            }
            let plane = Complex64::from_polar(1.0, -k * r * cos_t);
            acc += plane * v0 * psi * r * r * w * wy;
        }
    }
    let quad = -acc / (4.0 * PI);
    assert!((quad - direct).norm() < 1e-4, "{quad} vs {direct}");
}

#[test]
fn unitarity_optics_and_reciprocity() {
    for name in scatterkit::numerics::potential::STATIONARY_PRESETS {
        let v = preset(name).unwrap();
        for lambda in [0.25f64, 1.0, 4.0] {
            let res = scatter(&v, lambda, &CoordinateSolver::default(), 7).unwrap();
            assert!(res.unitarity_deviation < 1e-14);
            assert!(res.kernel_deviation < 1e-8, "{name} {lambda}: {}", res.kernel_deviation);
            let cs = &res.cross_sections;
            assert!(cs.optical_residual / cs.sigma_total < 1e-4);
            assert!((cs.sigma_total - cs.sigma_partial_waves).abs() < 1e-6 * cs.sigma_total.max(1.0));
            let ps = PhaseShifts {
                k: lambda.sqrt(),
                deltas: res.phase_shifts.iter().map(|p| p.1).collect(),
                tail: 0.0,
                converged: true,
            };
            let th = [0.48, 0.6, 0.64];
            let om = [0.0, -0.6, 0.8];
            let a = amplitude(&ps, th, om).unwrap();
            let b = amplitude(&ps, [-om[0], -om[1], -om[2]], [-th[0], -th[1], -th[2]]).unwrap();
            assert!((a - b).norm() < 1e-8);
        }
    }
}

#[test]
fn rotation_invariance() {
    let v = preset("yukawa").unwrap();
    let ps = phase_shifts(&v, 1.0, &CoordinateSolver::default(), 100).unwrap();
    let th = [0.48, 0.6, 0.64];
    let om = [0.0, -0.6, 0.8];
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    let rot = |p: [f64; 3]| [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]];
    let a = amplitude(&ps, th, om).unwrap();
    let b = amplitude(&ps, rot(th), rot(om)).unwrap();
    assert!((a - b).norm() < 1e-13 * a.norm());
}

#[test]
fn born_first_order_error_is_quadratic() {
    let base = preset("gaussian").unwrap();
    let lambda = 1.0;
    let exact_s0 = |c: f64| {
        let d = CoordinateSolver::default().phase_shift(&base.scaled(c), 1.0, 0).unwrap();
        Complex64::from_polar(1.0, 2.0 * d)
    };
    let kappas = [0.08, 0.04, 0.02, 0.01];
    let errs: Vec<f64> = kappas
        .iter()
        .map(|&c| {
            let b = born_series(&base.scaled(c), lambda, 0, &BornOptions::default()).unwrap();
            (b.s()[0] - exact_s0(c)).norm()
        })
        .collect();
    let order = -scatterkit::numerics::fit::loglog_slope(&kappas.map(|k| 1.0 / k), &errs);
    assert!((order - 2.0).abs() < 0.2, "order {order}");
}

#[test]
fn born_series_converges_for_weak_coupling() {
    let v = preset("gaussian").unwrap().scaled(0.2);
    let exact = CoordinateSolver::default().phase_shift(&v, 1.0, 0).unwrap();
    let s_exact = Complex64::from_polar(1.0, 2.0 * exact);
    let b = born_series(&v, 1.0, 8, &BornOptions::default()).unwrap();
    let errs: Vec<f64> = b.waves[0].partial_s.iter().map(|s| (s - s_exact).norm()).collect();
    for w in errs.windows(2) {
        if w[0] > 1e-10 {
            assert!(w[1] < w[0], "{errs:?}");
        }
    }
    assert!(b.convergent);
    assert!(*errs.last().unwrap() < 1e-9);
}

#[test]
fn free_kernel_far_field() {
    // f = Gaussian bump centred off the origin; compare ∫ G(x,y) f(y) dy with
    // e^{ik|x|}/(4π|x|) ∫ e^{−ik x̂·y} f(y) dy at growing |x|.
    let k = 1.0;
    let z = scatterkit::numerics::ComplexEnergy::real(k * k);
    let c = [0.3, -0.2, 0.1];
    let n = 14;
    let (x, w) = scatterkit::numerics::grid::gauss_legendre(n);
    let half = 2.5;
    let mut pts = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let y = [c[0] + half * x[i], c[1] + half * x[j], c[2] + half * x[l]];
                let r2 = (y[0] - c[0]).powi(2) + (y[1] - c[1]).powi(2) + (y[2] - c[2]).powi(2);
                pts.push((y, w[i] * w[j] * w[l] * half.powi(3) * (-2.0 * r2).exp()));
            }
        }
    }
    let mut errs = Vec::new();
    let dists = [50.0, 100.0, 200.0];
    for &d in &dists {
        let xh = [0.6, 0.0, 0.8];
        let xp = [d * xh[0], d * xh[1], d * xh[2]];
        let mut full = Complex64::new(0.0, 0.0);
        let mut lead = Complex64::new(0.0, 0.0);
        for (y, wt) in &pts {
            full += free_resolvent_kernel(xp, *y, z).unwrap() * wt;
            let dotp = xh[0] * y[0] + xh[1] * y[1] + xh[2] * y[2];
            lead += Complex64::from_polar(1.0, -k * dotp) * wt;
        }
        lead *= Complex64::from_polar(1.0, k * d) / (4.0 * PI * d);
        errs.push((full - lead).norm());
    }
    // O(|x|^{-2}) remainder
    let slope = scatterkit::numerics::fit::loglog_slope(&dists, &errs);
    assert!(slope < -1.8, "remainder slope {slope}");
}

#[test]
fn limiting_absorption_weights() {
    let v = Potential::zero();
    let eps: Vec<f64> = (0..10).map(|i| 0.02 * 0.5f64.powi(i)).collect();
    let stab = limiting_absorption_probe(&v, 1.0, 1.0, &eps, None).unwrap();
    assert!(stab.stabilizes(1e-3), "{:?}", stab.norms_plus);
    assert!(stab.hilbert_residual < 1e-10);
    // damping lengths 2k/ε stay inside the probe box for this sequence
    let grow = limiting_absorption_probe(&v, 1.0, 0.4, &[0.1, 0.05, 0.025, 0.0125], None).unwrap();
    assert!(grow.norms_plus.windows(2).all(|p| p[1] > p[0] * 1.1), "{:?}", grow.norms_plus);
    assert!(grow.last_relative_change > 1e-2);
}

#[test]
fn coordinate_wavefunction_tracks_matching_form() {
    let v = preset("gaussian").unwrap();
    let k = 1.2;
    let grid = default_radial_grid(&v, k).unwrap();
    let run = coordinate::integrate(&v, k, 1, &grid, &RadialOptions::default()).unwrap();
    let n = grid.len();
    for i in n - 20..n {
        let r = grid.nodes[i];
        let (jh, nh, ..) = coordinate::riccati(1, k * r).unwrap();
        let expect = jh * run.delta.cos() - nh * run.delta.sin();
        assert!((run.u[i] - expect).abs() < 1e-8);
    }
    let m = momentum::solve(&v, k, 1, &MomentumOptions::default()).unwrap();
    assert!((m.s.norm() - 1.0).abs() < 1e-6);
}
