//! Wavepacket experiments on the 1D arena.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatterkit::timedep::{
    cook_integral, modified_phase, moller_estimate, propagate_free, propagate_full, scattering_map, Arena,
    EvolutionConfig, Wavepacket,
};
use scatterkit::{Complex64, Result};

use super::{fmt, max, range, Derived, Experiment};
use crate::bundle::{ResultBundle, Table};
use crate::config::{ExperimentConfig, PacketKind};

fn packet(cfg: &ExperimentConfig) -> Result<Wavepacket> {
    let t = &cfg.timedep;
    let p = &t.packet;
    let arena = Arena::with_spacing(t.half_width, t.dx)?;
    match p.kind {
        PacketKind::Gaussian => Wavepacket::gaussian(arena, p.x0, p.k0, p.width),
        PacketKind::Bump => Wavepacket::bump(arena, p.x0, p.k_lo, p.k_hi),
        PacketKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut samples = vec![Complex64::new(0.0, 0.0); arena.n];
            for _ in 0..p.components {
                let x0 = p.x0 + rng.random_range(-2.0..2.0) * p.width;
                let k0 = p.k0 * rng.random_range(0.5..1.5);
                let s = p.width * rng.random_range(0.5..1.5);
                let c = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..std::f64::consts::TAU));
                let g = Wavepacket::gaussian(arena, x0, k0, s)?;
                for (a, b) in samples.iter_mut().zip(&g.samples) {
                    *a += c * b;
                }
            }
            Wavepacket::new(arena, samples)?.normalized()
        }
    }
}

fn evolution(cfg: &ExperimentConfig, horizon: f64) -> EvolutionConfig {
    let t = &cfg.timedep;
    EvolutionConfig { dt: t.dt, horizon, scheme: t.scheme.clone(), leak_tolerance: t.leak_tolerance }
}

fn check(cfg: &ExperimentConfig, horizon: f64) -> Result<Derived> {
    let t = &cfg.timedep;
    let p = &t.packet;
    cfg.potential.build()?;
    evolution(cfg, horizon).validate()?;
    if !(p.width > 0.0) {
        return Err(range(format!("timedep.packet.width = {} must be positive", p.width)));
    }
    if p.kind == PacketKind::Bump && !(p.k_lo < p.k_hi) {
        return Err(range(format!("timedep.packet band [{}, {}] is empty", p.k_lo, p.k_hi)));
    }
    if p.kind == PacketKind::Random && p.components == 0 {
        return Err(range("timedep.packet.components must be at least 1".into()));
    }
    let arena = Arena::with_spacing(t.half_width, t.dx)?;
    Ok(vec![
        ("arena points".into(), arena.n.to_string()),
        ("momentum cutoff pi/dx".into(), fmt(std::f64::consts::PI / arena.dx())),
        ("steps to horizon".into(), ((horizon / t.dt).round() as usize).to_string()),
    ])
}

fn check_times(times: &[f64]) -> Result<f64> {
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(range("timedep.times must be positive and increasing".into()));
    }
    Ok(*times.last().unwrap())
}

pub struct Propagate;

impl Experiment for Propagate {
    fn name(&self) -> &'static str {
        "propagate"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        check(cfg, check_times(&cfg.timedep.times)?)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let times = &cfg.timedep.times;
        let horizon = check_times(times)?;
        let v = cfg.potential.build()?;
        let f = packet(cfg)?;
        let ec = evolution(cfg, horizon);
        out.grid("times", times);
        out.grid("arena", &f.arena.positions());
        let vs = f.arena.sample(&v);
        let (n0, e0) = (f.norm, f.energy(&vs));
        let mut table = Table::new(
            "evolution",
            &["t", "norm", "energy", "norm_drift", "energy_drift", "free_distance", "boundary_fraction"],
        );
        table.push(vec![0.0.into(), n0.into(), e0.into(), 0.0.into(), 0.0.into(), 0.0.into(), f.boundary_fraction().into()]);
        let (mut state, mut prev) = (f.clone(), 0.0);
        let (mut nd, mut ed) = (vec![0.0], vec![0.0]);
        let mut failure = None;
        for &t in times {
            match propagate_full(&state, &v, &ec, t - prev) {
                Ok(s) => state = s,
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
            prev = t;
            let e = state.energy(&vs);
            let free = propagate_free(&f, t)?;
            let (dn, de) = ((state.norm - n0).abs(), (e - e0).abs());
            table.push(vec![
                t.into(),
                state.norm.into(),
                e.into(),
                dn.into(),
                de.into(),
                state.distance(&free).into(),
                state.boundary_fraction().into(),
            ]);
            nd.push(dn);
            ed.push(de);
        }
        out.scalar("max_norm_drift", max(nd));
        out.scalar("max_energy_drift", max(ed));
        out.table(table);
        failure.map_or(Ok(()), Err)
    }
}

pub struct Cook;

impl Experiment for Cook {
    fn name(&self) -> &'static str {
        "cook"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let c = &cfg.timedep.cook;
        if !(c.t_min > 0.0 && c.t_max > c.t_min) {
            return Err(range(format!("cook window needs 0 < t_min < t_max, got [{}, {}]", c.t_min, c.t_max)));
        }
        let mut d = check(cfg, c.t_max)?;
        d.push(("fit start t_max/window".into(), fmt(c.t_max / c.window)));
        Ok(d)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let opts = &cfg.timedep.cook;
        let v = cfg.potential.build()?;
        let f = packet(cfg)?;
        out.grid("arena", &f.arena.positions());
        let tr = cook_integral(&v, &f, opts)?;
        out.grid("times", &tr.times);
        let mut table = Table::new("cook", &["t", "integrand", "partial"]);
        for ((t, g), p) in tr.times.iter().zip(&tr.integrand).zip(&tr.partial) {
            table.push(vec![(*t).into(), (*g).into(), (*p).into()]);
        }
        let octaves = ((opts.t_max / opts.t_min).log2().floor() as usize).max(1);
        let mut inc = Table::new("increments", &["t_end", "increment"]);
        for (i, d) in tr.dyadic_increments(octaves).iter().enumerate() {
            inc.push(vec![(opts.t_max / 2f64.powi((octaves - 1 - i) as i32)).into(), (*d).into()]);
        }
        let mut fit = Table::new("fit", &["exponent", "t_fit_min", "t_max", "partial_at_t_max"]);
        let last = *tr.partial.last().unwrap();
        fit.push(vec![tr.exponent.into(), (opts.t_max / opts.window).into(), opts.t_max.into(), last.into()]);
        out.scalar("exponent", tr.exponent);
        out.scalar("partial_at_t_max", last);
        out.table(table);
        out.table(inc);
        out.table(fit);
        Ok(())
    }
}

pub struct Moller;

impl Experiment for Moller {
    fn name(&self) -> &'static str {
        "moller"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let mut d = check(cfg, check_times(&cfg.timedep.times)?)?;
        if let Some(m) = &cfg.timedep.modifier {
            modified_phase(m, &cfg.potential.build()?)?;
            d.push(("modifier".into(), m.clone()));
        }
        Ok(d)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let times = &cfg.timedep.times;
        let horizon = check_times(times)?;
        let v = cfg.potential.build()?;
        let f = packet(cfg)?;
        out.grid("times", times);
        out.grid("arena", &f.arena.positions());
        let phase = cfg.timedep.modifier.as_deref().map(|m| modified_phase(m, &v)).transpose()?;
        let tr = moller_estimate(&v, &f, times, phase.as_deref(), &evolution(cfg, horizon))?;
        let mut table = Table::new("moller", &["t", "residual", "norm", "energy"]);
        for (i, &t) in tr.times.iter().enumerate() {
            let r = if i == 0 { f64::NAN } else { tr.residuals[i - 1] };
            table.push(vec![t.into(), r.into(), tr.norms[i].into(), tr.energies[i].into()]);
        }
        if let Some(&r) = tr.residuals.last() {
            out.scalar("last_residual", r);
        }
        out.scalar("min_norm", tr.norms.iter().copied().fold(f64::INFINITY, f64::min));
        out.table(table);
        Ok(())
    }
}

pub struct ScatteringMapRun;

impl Experiment for ScatteringMapRun {
    fn name(&self) -> &'static str {
        "scattering-map"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        check(cfg, cfg.timedep.horizon)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let v = cfg.potential.build()?;
        let f = packet(cfg)?;
        out.grid("arena", &f.arena.positions());
        let s = scattering_map(&v, &f, &evolution(cfg, cfg.timedep.horizon))?;
        let arena = f.arena;
        let (a, b) = (f.spectrum(), s.f_plus.spectrum());
        let mut spectrum = Table::new("spectrum", &["xi", "density_in", "density_out"]);
        let mut order: Vec<usize> = (0..arena.n).collect();
        order.sort_by(|&i, &j| arena.xi(i).total_cmp(&arena.xi(j)));
        for k in order {
            spectrum.push(vec![arena.xi(k).into(), a[k].norm_sqr().into(), b[k].norm_sqr().into()]);
        }
        let change = (s.norm_out - s.norm_in).abs();
        let mut totals =
            Table::new("scattering", &["norm_in", "norm_out", "norm_change", "captured", "forward", "energy_l1"]);
        totals.push(vec![
            s.norm_in.into(),
            s.norm_out.into(),
            change.into(),
            s.captured.into(),
            s.forward.into(),
            s.energy_l1.into(),
        ]);
        out.scalar("norm_change", change);
        out.scalar("energy_l1", s.energy_l1);
        out.scalar("forward", s.forward);
        out.table(spectrum);
        out.table(totals);
        Ok(())
    }
}
