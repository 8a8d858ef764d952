use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatterkit::numerics::{fit, preset, Potential};
use scatterkit::stationary::partial_wave::CoordinateSolver;
use scatterkit::stationary::PhaseShiftSolver;
use scatterkit::timedep::*;

use std::f64::consts::PI;

/// Free Gaussian ψ(x, t) for H₀ = −d²/dx² with initial width s.
fn gaussian_exact(x: f64, t: f64, x0: f64, k0: f64, s: f64) -> Complex64 {
    let a = Complex64::new(s * s, t);
    let n = (2.0 * PI * s * s).powf(-0.25);
    let d = x - x0 - 2.0 * k0 * t;
    n * (Complex64::new(s * s, 0.0) / a).sqrt()
        * (-d * d / (4.0 * a) + Complex64::new(0.0, k0 * x - k0 * k0 * t)).exp()
}

/// Plane-wave transmission through a 1D square well of depth v0 on |x| < r.
fn well_transmission(v0: f64, r: f64, e: f64) -> f64 {
    let q = (e - v0).sqrt();
    1.0 / (1.0 + v0 * v0 * (2.0 * q * r).sin().powi(2) / (4.0 * e * (e - v0)))
}

#[test]
fn free_gaussian_matches_closed_form() {
    let arena = Arena::new(2048, 100.0).unwrap();
    let (x0, k0, s) = (-10.0, 1.0, 2.0);
    let f = Wavepacket::gaussian(arena, x0, k0, s).unwrap();
    for t in [0.5, 2.0, 5.0] {
        let g = propagate_free(&f, t).unwrap();
        let err: f64 = arena
            .positions()
            .iter()
            .zip(&g.samples)
            .map(|(&x, z)| (z - gaussian_exact(x, t, x0, k0, s)).norm_sqr())
            .sum::<f64>()
            * arena.dx();
        assert!(err.sqrt() < 1e-10, "t={t}: {}", err.sqrt());
        assert!((g.norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn free_mass_leaves_slow_cone_quickly() {
    let a = 1.0;
    let arena = Arena::with_spacing(700.0, 0.25).unwrap();
    let f = Wavepacket::bump(arena, 0.0, a, 3.0).unwrap();
    let times: Vec<f64> = (0..8).map(|i| 4.0 * 1.25f64.powi(i)).collect();
    let mass: Vec<f64> = times.iter().map(|&t| propagate_free(&f, t).unwrap().mass_in(0.0, a * t / 2.0)).collect();
    assert!(mass.iter().all(|m| *m > 1e-28), "{mass:?}");
    let p = fit::decay_exponent(&times, &mass, 10.0);
    assert!(p >= 4.0, "exponent {p}, {mass:?}");
}

#[test]
fn box_rule_is_enforced() {
    let f = Wavepacket::gaussian(Arena::new(512, 50.0).unwrap(), 0.0, 2.0, 2.0).unwrap();
    assert!(matches!(
        propagate_free(&f, 20.0),
        Err(scatterkit::Error::BoxTooSmall { .. })
    ));
}

#[test]
fn full_evolution_without_potential_is_free() {
    let f = Wavepacket::gaussian(Arena::new(4096, 200.0).unwrap(), 5.0, -1.0, 3.0).unwrap();
    let cfg = EvolutionConfig { horizon: 10.0, ..Default::default() };
    let full = propagate_full(&f, &Potential::zero(), &cfg, 10.0).unwrap();
    let free = propagate_free(&f, 10.0).unwrap();
    assert!(full.distance(&free) < 1e-8);
}

#[test]
fn eigenvector_evolves_by_phase() {
    let arena = Arena::new(2048, 100.0).unwrap();
    let v = preset("gaussian").unwrap();
    let b = bound_states(arena, &v).unwrap();
    let (e, vec) = (b.energies[0], b.vectors[0].clone());
    let f = Wavepacket::new(arena, vec).unwrap();
    let cfg = EvolutionConfig { dt: 0.005, horizon: 5.0, scheme: "yoshida4".into(), ..Default::default() };
    let t = 5.0;
    let g = propagate_full(&f, &v, &cfg, t).unwrap();
    let phase = Complex64::from_polar(1.0, -e * t);
    let expect = Wavepacket::new(arena, f.samples.iter().map(|z| z * phase).collect()).unwrap();
    assert!(g.distance(&expect) < 1e-8, "{}", g.distance(&expect));
}

#[test]
fn strang_splitting_is_second_order() {
    let arena = Arena::new(1024, 60.0).unwrap();
    let v = preset("gaussian").unwrap();
    let f = Wavepacket::gaussian(arena, -6.0, 1.2, 1.5).unwrap();
    let t = 4.0;
    let run = |dt: f64, scheme: &str| {
        let cfg = EvolutionConfig { dt, horizon: t, scheme: scheme.into(), ..Default::default() };
        propagate_full(&f, &v, &cfg, t).unwrap()
    };
    let reference = run(0.002, "yoshida4");
    let errs: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&dt| run(dt, "strang-split").distance(&reference)).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}, {errs:?}");
    }
}

#[test]
fn random_packets_preserve_norm_and_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let arena = Arena::new(1024, 80.0).unwrap();
    let v = preset("gaussian").unwrap();
    let vs = arena.sample(&v);
    let t = 4.0;
    for _ in 0..20 {
        let mut samples = vec![Complex64::new(0.0, 0.0); arena.n];
        for _ in 0..3 {
            let x0 = rng.random_range(-10.0..10.0);
            let k0 = rng.random_range(-2.0..2.0);
            let s = rng.random_range(0.8..2.5);
            let c = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..2.0 * PI));
            let g = Wavepacket::gaussian(arena, x0, k0, s).unwrap();
            for (a, b) in samples.iter_mut().zip(&g.samples) {
                *a += c * b;
            }
        }
        let f = Wavepacket::new(arena, samples).unwrap().normalized().unwrap();
        let free = propagate_free(&f, t).unwrap();
        assert!((free.norm - 1.0).abs() < 1e-12);
        assert!((free.kinetic_energy() - f.kinetic_energy()).abs() < 1e-10);
        let cfg = EvolutionConfig { dt: 0.001, horizon: t, scheme: "yoshida4".into(), ..Default::default() };
        let full = propagate_full(&f, &v, &cfg, t).unwrap();
        assert!((full.norm - 1.0).abs() < 1e-10 * t);
        let drift = (full.energy(&vs) - f.energy(&vs)).abs();
        assert!(drift < 1e-8 * t, "energy drift {drift}");
    }
}

fn cook_packet() -> Wavepacket {
    Wavepacket::bump(Arena::with_spacing(5000.0, 0.25).unwrap(), 0.0, 1.0, 3.0).unwrap()
}

#[test]
fn cook_integrand_decays_like_the_tail() {
    let f = cook_packet();
    let opts = CookOptions::default();
    for (name, rho) in [("power-tail-2", 2.0), ("power-tail-1.5", 1.5)] {
        let tr = cook_integral(&preset(name).unwrap(), &f, &opts).unwrap();
        assert!((tr.exponent - rho).abs() < 0.15, "{name}: {}", tr.exponent);
        let inc = tr.dyadic_increments(3);
        assert!(inc[2] < inc[1] && inc[1] < inc[0], "{name}: {inc:?}");
    }
}

#[test]
fn coulomb_cook_integral_grows_logarithmically() {
    let tr = cook_integral(&preset("truncated-coulomb").unwrap(), &cook_packet(), &CookOptions::default()).unwrap();
    assert!((tr.exponent - 1.0).abs() < 0.15);
    // equal increments per doubling: log growth, no Cauchy limit
    let inc = tr.dyadic_increments(4);
    let first = inc[0];
    assert!(inc.iter().all(|d| (d / first - 1.0).abs() < 0.1), "{inc:?}");
}

fn moller_setup() -> (Wavepacket, EvolutionConfig, Vec<f64>) {
    let f = Wavepacket::bump(Arena::with_spacing(1100.0, 0.1).unwrap(), 0.0, 2.0, 4.0).unwrap();
    let cfg = EvolutionConfig { dt: 0.02, horizon: 64.0, ..Default::default() };
    (f, cfg, vec![8.0, 16.0, 32.0, 64.0])
}

#[test]
fn short_range_moller_sequence_stabilises() {
    let (f, cfg, times) = moller_setup();
    let v = preset("power-tail-2").unwrap();
    let tr = moller_estimate(&v, &f, &times, None, &cfg).unwrap();
    let last = *tr.residuals.last().unwrap();
    assert!(last < 1e-3, "{:?}", tr.residuals);
    assert!(tr.residuals.windows(2).all(|w| w[1] < w[0]));
    let n = *tr.norms.last().unwrap();
    assert!(n <= 1.0 + 1e-10 && n >= 1.0 - cfg.leak_tolerance);
    let h0 = f.kinetic_energy();
    assert!((tr.energies.last().unwrap() - h0).abs() < 1e-3, "{:?} vs {h0}", tr.energies);
}

#[test]
fn coulomb_moller_needs_modified_phase() {
    let (f, cfg, times) = moller_setup();
    let v = preset("truncated-coulomb").unwrap();
    let plain = moller_estimate(&v, &f, &times, None, &cfg).unwrap();
    let r = &plain.residuals;
    assert!(r.windows(2).all(|w| (w[1] / w[0] - 1.0).abs() < 0.05), "plateau {r:?}");
    let phase = modified_phase("coulomb-log", &v).unwrap();
    let modified = moller_estimate(&v, &f, &times, Some(phase.as_ref()), &cfg).unwrap();
    let m = &modified.residuals;
    assert!(m.windows(2).all(|w| w[1] < 0.7 * w[0]), "decrease {m:?}");
    assert!(m.last().unwrap() < r.last().unwrap());
}

#[test]
fn scattering_map_transmission_matches_plane_waves() {
    let v = preset("square-well").unwrap();
    let arena = Arena::with_spacing(300.0, 0.1).unwrap();
    let f = Wavepacket::gaussian(arena, 0.0, 1.5, 5.0).unwrap();
    let cfg = EvolutionConfig { dt: 0.005, horizon: 30.0, ..Default::default() };
    let s = scattering_map(&v, &f, &cfg).unwrap();
    let spec = f.spectrum();
    let expected: f64 = spec
        .iter()
        .enumerate()
        .filter(|(k, _)| arena.xi(*k) > 0.0)
        .map(|(k, z)| z.norm_sqr() * well_transmission(-1.0, 1.0, arena.xi(k).powi(2)))
        .sum::<f64>()
        * arena.dxi();
    assert!(((s.forward - expected) / expected).abs() < 0.02, "{} vs {expected}", s.forward);
    assert!((s.norm_out - s.norm_in).abs() < 1e-3);
    assert!(s.energy_l1 < 1e-3, "{}", s.energy_l1);
}

#[test]
fn odd_packets_scatter_with_the_s_wave_phase() {
    let v = preset("gaussian").unwrap();
    let arena = Arena::with_spacing(300.0, 0.1).unwrap();
    let f = Wavepacket::gaussian(arena, 0.0, 1.5, 5.0).unwrap().odd_part().normalized().unwrap();
    let cfg = EvolutionConfig { dt: 0.005, horizon: 30.0, ..Default::default() };
    let s = scattering_map(&v, &f, &cfg).unwrap();
    let (a, b) = (f.spectrum(), s.f_plus.spectrum());
    for k in [1.4, 1.5, 1.6] {
        let i = (k / arena.dxi()).round() as usize;
        let delta = CoordinateSolver::default().phase_shift(&v, arena.xi(i), 0).unwrap();
        let ratio = b[i] / a[i];
        assert!((ratio - Complex64::from_polar(1.0, 2.0 * delta)).norm() < 1e-4, "k={k}: {ratio}");
    }
}

#[test]
fn scattering_map_reports_capture() {
    let v = preset("square-well-deep").unwrap();
    let arena = Arena::with_spacing(200.0, 0.1).unwrap();
    // slow packet overlapping the bound states of the deep well
    let f = Wavepacket::gaussian(arena, 0.0, 0.2, 1.0).unwrap();
    let cfg = EvolutionConfig { dt: 0.01, horizon: 5.0, leak_tolerance: 1e-2, ..Default::default() };
    assert!(bound_states(arena, &v).unwrap().overlap(&f) > 1e-2);
    assert!(matches!(
        scattering_map(&v, &f, &cfg),
        Err(scatterkit::Error::BoundStateCapture { .. })
    ));
}

#[test]
fn scattering_states_move_in_the_light_cone() {
    let v = preset("gaussian").unwrap();
    let arena = Arena::with_spacing(640.0, 0.1).unwrap();
    let f = Wavepacket::bump(arena, 0.0, 2.0, 4.0).unwrap();
    let f = bound_states(arena, &v).unwrap().project_out(&f).normalized().unwrap();
    let cfg = EvolutionConfig { dt: 0.01, horizon: 40.0, ..Default::default() };
    let g = propagate_full(&f, &v, &cfg, 40.0).unwrap();
    assert!(g.mass_in(3.0 * 40.0, 9.0 * 40.0) >= 0.95);
}

#[test]
fn completeness_residual_decreases() {
    let v = preset("gaussian").unwrap();
    let arena = Arena::with_spacing(600.0, 0.1).unwrap();
    let cfg = EvolutionConfig { dt: 0.01, horizon: 30.0, ..Default::default() };
    let f_minus = Wavepacket::bump(arena, 0.0, 1.5, 3.0).unwrap();
    let f_plus = scattering_map(&v, &f_minus, &cfg).unwrap().f_plus;
    // interacting state that was free data f₋ in the far past
    let f = propagate_full(&propagate_free(&f_minus, -30.0).unwrap(), &v, &cfg, 30.0).unwrap();
    let mut residuals = Vec::new();
    for t in [10.0, 20.0, 30.0] {
        let run = EvolutionConfig { horizon: t, ..cfg.clone() };
        let u = propagate_full(&f, &v, &run, t).unwrap();
        residuals.push(u.distance(&propagate_free(&f_plus, t).unwrap()));
    }
    assert!(residuals.windows(2).all(|w| w[1] < w[0]), "{residuals:?}");
}

#[test]
fn eikonal_residuals_decay_faster_than_inverse_time() {
    let times: Vec<f64> = (0..10).map(|i| 10.0 * 2f64.powi(i)).collect();
    let region = Region { times, lo: 0.5, hi: 2.0, points: 31 };
    let coulomb = preset("truncated-coulomb").unwrap();
    let phase = modified_phase("coulomb-log", &coulomb).unwrap();
    let field = eikonal_residual(phase.as_ref(), &coulomb, &region, 100.0).unwrap();
    assert!(field.exponent > 1.0, "coulomb-log {}", field.exponent);
    let slow = preset("power-tail-0.8").unwrap();
    let phase = modified_phase("average-potential", &slow).unwrap();
    let field = eikonal_residual(phase.as_ref(), &slow, &region, 100.0).unwrap();
    assert!(field.exponent > 1.0, "average-potential {}", field.exponent);
    let free = eikonal_residual(&phase::ShortRange, &slow, &region, 100.0).unwrap();
    assert!(free.exponent < 1.0);
}

#[test]
fn free_smoothness_integral_saturates() {
    let arena = Arena::with_spacing(400.0, 0.2).unwrap();
    let f = Wavepacket::bump(arena, 0.0, 1.0, 2.0).unwrap();
    let cfg = EvolutionConfig { dt: 0.02, ..Default::default() };
    let tr = smoothness_integral(1.0, &Potential::zero(), &f, &[12.5, 25.0, 50.0], &cfg).unwrap();
    assert_eq!(tr.status, SmoothnessStatus::Saturated, "{:?}", tr.partial);
}

#[test]
fn bound_state_smoothness_integral_grows_linearly() {
    let arena = Arena::new(2400, 120.0).unwrap();
    let v = preset("gaussian").unwrap();
    let b = bound_states(arena, &v).unwrap();
    let f = Wavepacket::new(arena, b.vectors[0].clone()).unwrap();
    let cfg = EvolutionConfig { dt: 0.01, ..Default::default() };
    let tr = smoothness_integral(1.0, &v, &f, &[2.5, 5.0, 10.0], &cfg).unwrap();
    assert_eq!(tr.status, SmoothnessStatus::Inconclusive);
    for w in tr.partial.windows(2) {
        assert!((w[1] / w[0] - 2.0).abs() < 1e-6, "{:?}", tr.partial);
    }
}

#[test]
fn weak_weight_smoothness_integral_is_inconclusive() {
    let arena = Arena::with_spacing(400.0, 0.2).unwrap();
    let f = Wavepacket::bump(arena, 0.0, 1.0, 2.0).unwrap();
    let cfg = EvolutionConfig { dt: 0.02, ..Default::default() };
    let tr = smoothness_integral(0.3, &Potential::zero(), &f, &[12.5, 25.0, 50.0], &cfg).unwrap();
    assert_eq!(tr.status, SmoothnessStatus::Inconclusive);
    assert!(tr.last_growth > 0.01);
}
