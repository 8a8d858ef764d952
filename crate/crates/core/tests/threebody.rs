#[path = "oracles/cg.rs"]
mod cg;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatterkit::numerics::{GridScheme, MomentumGrid, Potential, Shape};
use scatterkit::threebody::channel::{channel_cook_probe, channel_residual, ChannelModel, ChannelProbeSpec, CHANNEL_PRESETS};
use scatterkit::threebody::discrete::{continuum_onset, resolvent_reconstruct, BasisSpec, DiscreteHamiltonian, Symmetry};
use scatterkit::threebody::efimov::{efimov_count, EfimovSetup};
use scatterkit::threebody::scan::{coupling_scan, RadialGridSpec, ScanTarget};
use scatterkit::threebody::separation::{separation_check, SeparationSpec};
use scatterkit::threebody::*;
use scatterkit::{Complex64, Error};

fn yamaguchi(beta: f64, energy: f64, mass: f64) -> SeparablePotential {
    let g = form_factor("yamaguchi", beta).unwrap();
    let s = tune_strength(g.as_ref(), mass, energy).unwrap();
    SeparablePotential::new(s, g)
}

fn boson_problem(n: usize) -> FaddeevProblem {
    let v = yamaguchi(3.0, -1.0, 0.5);
    let grid = MomentumGrid::new(n, 1200.0, GridScheme::GaussRational { scale: 3.0 }).unwrap();
    FaddeevProblem::new(JacobiSystem::equal(1.0).unwrap(), [v.clone(), v.clone(), v], grid).unwrap()
}

fn boson_basis() -> BasisSpec {
    BasisSpec { a: (0.005, 20.0, 10), b: (0.005, 2000.0, 16), symmetry: Symmetry::Boson, nodes: 96 }
}

#[test]
fn heavy_third_particle_reduced_masses() {
    let j = JacobiSystem::new([1.0, 1.0, f64::INFINITY]).unwrap();
    assert!((j.pair_mass(0) - 0.5).abs() < 1e-15);
    assert!((j.spectator_mass(0) - 2.0).abs() < 1e-15);
}

#[test]
fn random_jacobi_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let m = [rng.random_range(0.1..5.0), rng.random_range(0.1..5.0), rng.random_range(0.1..5.0)];
        let j = JacobiSystem::new(m).unwrap();
        let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        for a in 0..3 {
            let (xa, ya, cm) = j.to_jacobi(a, x);
            let back = j.from_jacobi(a, xa, ya, cm);
            for i in 0..3 {
                assert!((back[i] - x[i]).abs() < 1e-14 * (1.0 + x[i].abs()));
            }
        }
    }
}

#[test]
fn hvz_bottom_is_the_deepest_pair() {
    let spectra: Vec<PairSpectrum> = [-1.0, -2.0, -0.5]
        .iter()
        .map(|&e| pair_spectrum(&yamaguchi(2.0, e, 0.5), 0.5, None).unwrap())
        .collect();
    assert!((hvz_bottom(&spectra) + 2.0).abs() < 1e-10);
}

#[test]
fn faddeev_ground_state_matches_variational_oracle() {
    let p = boson_problem(48);
    let e = p.bound_states(-10.0, -1.0 - 1e-9, Reduction::Boson).unwrap();
    let oracle = cg::ground_state(3.0, cg::yamaguchi_strength(3.0, 1.0), (0.005, 20.0, 12), (0.005, 20.0, 12), 128);
    assert!(((e[0] - oracle) / oracle).abs() < 1e-2, "{} vs {oracle}", e[0]);
}

#[test]
fn boson_reduction_agrees_with_full_system() {
    let p = boson_problem(32);
    let full = p.bound_states(-10.0, -1.0 - 1e-9, Reduction::Full).unwrap();
    let reduced = p.bound_states(-10.0, -1.0 - 1e-9, Reduction::Boson).unwrap();
    assert_eq!(full.len(), reduced.len());
    for (a, b) in full.iter().zip(&reduced) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn energies_do_not_depend_on_particle_labels() {
    let masses = [1.0, 2.0, 3.0];
    let grid = MomentumGrid::new(32, 800.0, GridScheme::GaussRational { scale: 2.0 }).unwrap();
    let j = JacobiSystem::new(masses).unwrap();
    let v = [yamaguchi(2.0, -1.0, j.pair_mass(0)), yamaguchi(2.5, -0.7, j.pair_mass(1)), yamaguchi(1.5, -0.4, j.pair_mass(2))];
    let solve = |m: [f64; 3], pots: [SeparablePotential; 3]| {
        let p = FaddeevProblem::new(JacobiSystem::new(m).unwrap(), pots, grid.clone()).unwrap();
        let e = p.threshold().unwrap();
        p.bound_states(-30.0, e - 1e-9, Reduction::Full).unwrap()
    };
    let base = solve(masses, v.clone());
    // cyclic relabelling and the exchange 1 ↔ 2
    let cyclic = solve([2.0, 3.0, 1.0], [v[1].clone(), v[2].clone(), v[0].clone()]);
    let swapped = solve([2.0, 1.0, 3.0], [v[0].clone(), v[2].clone(), v[1].clone()]);
    assert!(!base.is_empty());
    for other in [&cyclic, &swapped] {
        assert_eq!(base.len(), other.len());
        for (a, b) in base.iter().zip(other.iter()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn leading_eigenvalue_rises_toward_threshold() {
    let p = boson_problem(24);
    let z: Vec<f64> = (0..20).map(|i| -12.0 + 10.9 * i as f64 / 19.0).collect();
    let mu: Vec<f64> = z.iter().map(|&z| p.assemble(z, Reduction::Full).unwrap().leading()).collect();
    assert!(mu.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn kernel_blocks_are_compact_and_vanish_far_below() {
    let p = boson_problem(64);
    let sv = p.assemble(-2.0, Reduction::Full).unwrap().block_singular_values(0, 1).unwrap();
    assert!(sv[49] / sv[0] < 1e-3, "{}", sv[49] / sv[0]);
    let norms: Vec<f64> = [-10.0, -20.0, -40.0].iter().map(|&z| p.assemble(z, Reduction::Full).unwrap().norm()).collect();
    assert!(norms[1] < norms[0] && norms[2] < norms[1]);
}

#[test]
fn resolvent_reconstruction_is_frame_independent() {
    let v = yamaguchi(3.0, -1.0, 0.5);
    let spec = BasisSpec { a: (0.02, 10.0, 5), b: (0.02, 10.0, 5), symmetry: Symmetry::Distinguishable, nodes: 64 };
    let h = DiscreteHamiltonian::build(&JacobiSystem::equal(1.0).unwrap(), &[v.clone(), v.clone(), v], &spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = nalgebra::DVector::from_fn(h.dim(), |_, _| rng.random_range(-1.0..1.0));
    let r = resolvent_reconstruct(&h, Complex64::new(-1.5, 0.0), &x).unwrap();
    assert!(r.discrepancy < 1e-6 && r.residual < 1e-6, "{} {}", r.discrepancy, r.residual);
    let c = resolvent_reconstruct(&h, Complex64::new(0.5, 0.3), &x).unwrap();
    assert!(c.discrepancy < 1e-6 && c.residual < 1e-6);
}

#[test]
fn continuum_starts_at_the_hvz_bottom() {
    let v = yamaguchi(3.0, -1.0, 0.5);
    let h = DiscreteHamiltonian::build(&JacobiSystem::equal(1.0).unwrap(), &[v.clone(), v.clone(), v], &boson_basis()).unwrap();
    let onset = continuum_onset(&h.eigenvalues(), -1.0, 0.02, 3).unwrap();
    assert!(onset.relative_error < 0.05, "{}", onset.onset);
}

#[test]
fn gaussian_scan_is_monotone_with_vanishing_margins() {
    let v = Potential::with_natural_envelope(Shape::Gaussian { v0: -1.0, width: 1.0 }).unwrap();
    let grid = RadialGridSpec { radius: 12.0, step: 2e-3, l_max: 8 };
    let k: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
    let s = coupling_scan(&ScanTarget::Local { potential: &v, grid }, &k).unwrap();
    assert!(s.counts.windows(2).all(|w| w[1] >= w[0]));
    let (lo, hi) = s.bracket.unwrap();
    assert!((hi - lo) / hi < 1e-6);
    let mags: Vec<f64> = s.margins.iter().map(|m| m.1.abs()).collect();
    assert!(s.margins.iter().all(|m| m.1 < 0.0));
    assert!(mags.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn efimov_counts_grow_for_resonant_bosons() {
    let setup = EfimovSetup { masses: [1.0; 3], couplings: [1.0; 3], ir_energy: -1e-5, nodes_per_decade: 10, reduction: Reduction::Boson };
    let c = efimov_count(&setup, &[1.0, 32.0, 1024.0]).unwrap();
    assert!(c.rows.windows(2).all(|w| w[1].count > w[0].count));
    let r = c.universal_ratios();
    assert!(r.len() >= 2, "{:?}", c.ratios);
    assert!(r.iter().all(|q| ((q - r[0]) / r[0]).abs() < 0.15), "{r:?}");
}

#[test]
fn efimov_counts_grow_with_two_resonant_pairs() {
    let setup = EfimovSetup { masses: [1.0; 3], couplings: [1.0, 0.0, 1.0], ir_energy: -1e-5, nodes_per_decade: 10, reduction: Reduction::Full };
    let c = efimov_count(&setup, &[1.0, 4096.0, 4096.0 * 4096.0]).unwrap();
    assert!(c.rows.windows(2).all(|w| w[1].count > w[0].count));
}

#[test]
fn efimov_count_saturates_with_one_resonant_pair() {
    let setup = EfimovSetup { masses: [1.0; 3], couplings: [1.0, 0.5, 0.5], ir_energy: -1e-5, nodes_per_decade: 10, reduction: Reduction::Full };
    let c = efimov_count(&setup, &[1.0, 32.0, 1024.0]).unwrap();
    assert_eq!(c.rows[1].count, c.rows[2].count);
    let off = EfimovSetup { couplings: [0.9, 0.0, 0.0], ..setup };
    assert!(matches!(efimov_count(&off, &[1.0]), Err(Error::Precondition(_))));
}

#[test]
fn random_wells_separate() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let j = JacobiSystem::new([1.0, 0.5, f64::INFINITY]).unwrap();
    let zero = Potential::zero();
    for _ in 0..3 {
        let mut well = || {
            Potential::with_natural_envelope(Shape::Gaussian { v0: -rng.random_range(0.5..3.0), width: rng.random_range(0.5..1.5) })
                .unwrap()
        };
        let (a, b) = (well(), well());
        let r = separation_check(&j, [&zero, &a, &b], &SeparationSpec { nodes: 22, ..Default::default() }).unwrap();
        assert!(r.evolution_deviation < 1e-8, "{}", r.evolution_deviation);
        assert!(r.completeness_deviation < 1e-12);
        assert_eq!(r.sector_ranks.iter().sum::<usize>(), 22 * 22);
    }
}

#[test]
fn channel_residual_decays_faster_than_inverse_distance() {
    let x1: Vec<f64> = (4..=10).map(|k| 2f64.powi(k)).collect();
    for &(rho, level) in CHANNEL_PRESETS {
        let m = ChannelModel::build("power-tail", rho, 1.0, level).unwrap();
        let r = channel_residual(&m, &x1).unwrap();
        assert!(r.exponent > 1.0, "rho {rho} level {level}: {}", r.exponent);
    }
}

#[test]
fn channel_cook_probe_exponents() {
    let m = ChannelModel::build("power-tail", 0.3, 1.0, 1).unwrap();
    let c = channel_cook_probe(&m, &ChannelProbeSpec::default()).unwrap();
    assert!((0.8..=1.2).contains(&c.plain_exponent), "{}", c.plain_exponent);
    assert!(c.dressed_exponent > 1.0, "{}", c.dressed_exponent);
    assert!(c.dressed_increments.windows(2).all(|w| w[1] < w[0]));
    let exact = ChannelModel::build("static", 0.3, 1.0, 1).unwrap();
    let e = channel_cook_probe(&exact, &ChannelProbeSpec::default()).unwrap();
    assert!(e.plain_exponent > 1.0 && e.dressed_exponent > 1.0);
}
