//! Three-body experiments.

use scatterkit::numerics::{GridScheme, MomentumGrid};
use scatterkit::threebody::channel::{channel_cook_probe, channel_residual, ChannelModel};
use scatterkit::threebody::efimov::{efimov_count, EfimovSetup, UNIVERSAL_WINDOW};
use scatterkit::threebody::scan::{coupling_scan, RadialGridSpec, ScanTarget};
use scatterkit::threebody::{
    form_factor, tune_strength, FaddeevProblem, JacobiSystem, SeparablePotential, PAIR_LABELS,
};
use scatterkit::{Error, Result};

use super::{fmt, range, Derived, Experiment};
use crate::bundle::{ResultBundle, Table};
use crate::config::ExperimentConfig;

fn faddeev_problem(cfg: &ExperimentConfig) -> Result<FaddeevProblem> {
    let f = &cfg.threebody.faddeev;
    let jacobi = JacobiSystem::new(f.masses)?;
    let form = form_factor(&f.form_factor, f.range)?;
    let mut pots = Vec::with_capacity(3);
    for a in 0..3 {
        if !f.active[a] {
            pots.push(SeparablePotential::off(form.clone()));
            continue;
        }
        let e = f.pair_energies[a];
        if !(e < 0.0) {
            return Err(range(format!(
                "threebody.faddeev.pair_energies[{a}] = {e}: a pair bound state needs negative energy"
            )));
        }
        let s = tune_strength(form.as_ref(), jacobi.pair_mass(a), e)?;
        pots.push(SeparablePotential::new(s, form.clone()));
    }
    if f.nodes < 4 || !(f.p_max > 0.0 && f.grid_scale > 0.0) {
        return Err(range("threebody.faddeev needs nodes ≥ 4 and positive p_max, grid_scale".into()));
    }
    let grid = MomentumGrid::new(f.nodes, f.p_max, GridScheme::GaussRational { scale: f.grid_scale })?;
    let potentials: [SeparablePotential; 3] = pots.try_into().map_err(|_| range("three pairs".into()))?;
    FaddeevProblem::new(jacobi, potentials, grid)
}

pub struct FaddeevBound;

impl Experiment for FaddeevBound {
    fn name(&self) -> &'static str {
        "faddeev-bound"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let p = faddeev_problem(cfg)?;
        let mut d = Derived::new();
        for a in 0..3 {
            d.push((format!("pair {} reduced mass", PAIR_LABELS[a]), fmt(p.jacobi.pair_mass(a))));
            d.push((format!("pair {} strength", PAIR_LABELS[a]), fmt(p.potentials[a].strength)));
        }
        d.push(("continuum onset".into(), fmt(p.threshold()?)));
        Ok(d)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let reduction = cfg.threebody.faddeev.reduction;
        let p = faddeev_problem(cfg)?;
        out.grid_bytes("spectator_momenta", &p.grid.to_bytes());
        let threshold = p.threshold()?;
        let mut pairs = Table::new("pairs", &["pair", "reduced_mass", "strength", "lowest_energy"]);
        for (a, spec) in p.pair_spectra()?.iter().enumerate() {
            let e = spec.lowest().unwrap_or(f64::NAN);
            pairs.push(vec![
                PAIR_LABELS[a].into(),
                p.jacobi.pair_mass(a).into(),
                p.potentials[a].strength.into(),
                e.into(),
            ]);
        }
        out.table(pairs);
        let ceiling = threshold - 1e-6 * threshold.abs().max(1e-12);
        let top = p.assemble(ceiling, reduction)?;
        let mut eig = Table::new("eigenvalues", &["z", "index", "mu"]);
        for (i, m) in top.eigenvalues().iter().take(10).enumerate() {
            eig.push(vec![ceiling.into(), i.into(), (*m).into()]);
        }
        out.table(eig);
        let mut floor = 10.0 * threshold.min(-1.0);
        while p.assemble(floor, reduction)?.leading() > 1.0 {
            floor *= 10.0;
            if floor < -1e12 {
                return Err(Error::GridResolution("no energy floor below the deepest state".into()));
            }
        }
        let energies = p.bound_states(floor, ceiling, reduction)?;
        let mut states = Table::new("bound_states", &["index", "energy", "binding_below_onset"]);
        for (i, e) in energies.iter().enumerate() {
            states.push(vec![i.into(), (*e).into(), (threshold - e).into()]);
        }
        let mut totals = Table::new("spectrum", &["onset", "count", "ground_energy"]);
        let ground = energies.first().copied().unwrap_or(f64::NAN);
        totals.push(vec![threshold.into(), energies.len().into(), ground.into()]);
        out.scalar("onset", threshold);
        out.scalar("count", energies.len() as f64);
        if ground.is_finite() {
            out.scalar("ground_energy", ground);
        }
        out.table(states);
        out.table(totals);
        Ok(())
    }
}

fn radial_grid(cfg: &ExperimentConfig) -> Result<RadialGridSpec> {
    let s = &cfg.threebody.scan;
    if !(s.step > 0.0 && s.radius > 4.0 * s.step) {
        return Err(range(format!("threebody.scan needs 0 < step ≪ radius, got step {} radius {}", s.step, s.radius)));
    }
    if !(s.kappa_max > 0.0) || s.kappa_steps < 1 {
        return Err(range("threebody.scan needs kappa_max > 0 and kappa_steps ≥ 1".into()));
    }
    Ok(RadialGridSpec { radius: s.radius, step: s.step, l_max: s.l_max })
}

pub struct CouplingScanRun;

impl Experiment for CouplingScanRun {
    fn name(&self) -> &'static str {
        "coupling-scan"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let g = radial_grid(cfg)?;
        let v = cfg.potential.build()?;
        if !v.is_short_range() {
            return Err(Error::Precondition(format!("{} is long-range; bound-state counts diverge", v.kind())));
        }
        Ok(vec![
            ("radial nodes".into(), ((g.radius / g.step).round() as usize).to_string()),
            ("kappa step".into(), fmt(cfg.threebody.scan.kappa_max / cfg.threebody.scan.kappa_steps as f64)),
        ])
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let grid = radial_grid(cfg)?;
        let v = cfg.potential.build()?;
        let kappas = cfg.threebody.scan.kappas();
        out.grid("kappas", &kappas);
        let s = coupling_scan(&ScanTarget::Local { potential: &v, grid }, &kappas)?;
        let mut counts = Table::new("counts", &["kappa", "count"]);
        for (k, c) in s.kappas.iter().zip(&s.counts) {
            counts.push(vec![(*k).into(), (*c).into()]);
        }
        let mut margins = Table::new("margins", &["margin", "lowest_energy"]);
        for (m, e) in &s.margins {
            margins.push(vec![(*m).into(), (*e).into()]);
        }
        let monotone = s.counts.windows(2).all(|w| w[1] >= w[0]);
        let mut crit = Table::new("critical", &["kappa_lo", "kappa_hi", "kappa0", "relative_width", "monotone"]);
        if let (Some((lo, hi)), Some(k0)) = (s.bracket, s.kappa0) {
            let width = (hi - lo) / hi;
            crit.push(vec![lo.into(), hi.into(), k0.into(), width.into(), monotone.into()]);
            out.scalar("kappa0", k0);
            out.scalar("relative_width", width);
        } else {
            crit.push(vec![f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), monotone.into()]);
        }
        out.scalar("monotone", if monotone { 1.0 } else { 0.0 });
        out.scalar("final_count", *s.counts.last().unwrap() as f64);
        out.table(counts);
        out.table(margins);
        out.table(crit);
        Ok(())
    }
}

fn efimov_setup(cfg: &ExperimentConfig) -> Result<EfimovSetup> {
    let e = &cfg.threebody.efimov;
    let setup = EfimovSetup {
        masses: e.masses,
        couplings: e.couplings,
        ir_energy: e.ir_energy,
        nodes_per_decade: e.nodes_per_decade,
        reduction: e.reduction,
    };
    setup.validate()?;
    if e.cutoffs.is_empty() || e.cutoffs[0] <= 0.0 || e.cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(range("threebody.efimov.cutoffs must be positive and increasing".into()));
    }
    Ok(setup)
}

pub struct EfimovCountRun;

impl Experiment for EfimovCountRun {
    fn name(&self) -> &'static str {
        "efimov-count"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let setup = efimov_setup(cfg)?;
        let resonant = setup.validate()?;
        let mut d = vec![("resonant pairs".into(), resonant.to_string())];
        for &c in &cfg.threebody.efimov.cutoffs {
            let p = setup.problem(c)?;
            d.push((format!("grid nodes at cutoff {c}"), p.grid.len().to_string()));
        }
        Ok(d)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let setup = efimov_setup(cfg)?;
        let cutoffs = &cfg.threebody.efimov.cutoffs;
        out.grid("cutoffs", cutoffs);
        for &c in cutoffs {
            out.grid_bytes(&format!("spectator_momenta_{c}"), &setup.problem(c)?.grid.to_bytes());
        }
        let r = efimov_count(&setup, cutoffs)?;
        let mut counts = Table::new("counts", &["cutoff", "count", "grid_nodes", "resonant_pairs"]);
        let mut energies = Table::new("energies", &["cutoff", "n", "energy"]);
        let mut eig = Table::new("eigenvalues", &["cutoff", "index", "mu"]);
        for row in &r.rows {
            counts.push(vec![row.cutoff.into(), row.count.into(), row.grid_nodes.into(), r.resonant_pairs.into()]);
            for (n, e) in row.energies.iter().enumerate() {
                energies.push(vec![row.cutoff.into(), n.into(), (*e).into()]);
            }
            for (i, m) in row.top_eigenvalues.iter().enumerate() {
                eig.push(vec![row.cutoff.into(), i.into(), (*m).into()]);
            }
        }
        let row = r.rows.last().unwrap();
        let limit = UNIVERSAL_WINDOW * row.cutoff * row.cutoff;
        let universal = r.universal_ratios();
        let mut ratios = Table::new("ratios", &["n", "ratio", "universal", "relative_to_first_universal"]);
        for (n, q) in r.ratios.iter().enumerate() {
            let inside = row.energies[n].abs() <= limit;
            let rel = if inside { q / universal[0] - 1.0 } else { f64::NAN };
            ratios.push(vec![n.into(), (*q).into(), inside.into(), rel.into()]);
        }
        out.scalar("resonant_pairs", r.resonant_pairs as f64);
        out.scalar("final_count", row.count as f64);
        if let Some(spread) = universal.iter().map(|q| q / universal[0] - 1.0).max_by(|a, b| a.abs().total_cmp(&b.abs())) {
            out.scalar("universal_ratio_spread", spread);
        }
        out.table(ratios);
        out.table(counts);
        out.table(energies);
        out.table(eig);
        Ok(())
    }
}

fn channel_model(cfg: &ExperimentConfig) -> Result<(ChannelModel, Derived)> {
    let c = &cfg.threebody.channel;
    let m = ChannelModel::build(&c.profile, c.rho, c.v12, c.level)?;
    let d = vec![
        ("sigma".into(), fmt(m.sigma)),
        ("airy zero".into(), fmt(m.airy_zero.0)),
        ("airy slope (v12 rho)^(1/3)".into(), fmt(m.slope)),
        ("airy eigenvalue".into(), fmt(m.airy_eigenvalue)),
        ("eikonal terms".into(), m.phase.terms.len().to_string()),
    ];
    Ok((m, d))
}

pub struct ChannelAiry;

impl Experiment for ChannelAiry {
    fn name(&self) -> &'static str {
        "channel-airy"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let x1 = &cfg.threebody.channel.x1;
        if x1.len() < 2 || x1.iter().any(|x| !(*x > 0.0)) || x1.windows(2).any(|w| w[1] <= w[0]) {
            return Err(range("threebody.channel.x1 needs at least two positive increasing positions".into()));
        }
        channel_model(cfg).map(|m| m.1)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let (m, _) = channel_model(cfg)?;
        let x1 = &cfg.threebody.channel.x1;
        out.grid("x1", x1);
        let r = channel_residual(&m, x1)?;
        let mut res = Table::new("residual", &["x1", "residual", "width", "lambda", "norm"]);
        for (x, y) in r.x1.iter().zip(&r.residual) {
            res.push(vec![(*x).into(), (*y).into(), m.width(*x).into(), m.lambda(*x).into(), m.norm_at(*x).into()]);
        }
        let mut eik = Table::new("eikonal", &["c", "t_power", "x_power"]);
        for t in &m.phase.terms {
            eik.push(vec![t.c.into(), t.a.into(), t.b.into()]);
        }
        let mut model = Table::new(
            "model",
            &["sigma", "airy_zero", "airy_derivative", "slope", "airy_eigenvalue", "remainder_degree", "exponent"],
        );
        model.push(vec![
            m.sigma.into(),
            m.airy_zero.0.into(),
            m.airy_zero.1.into(),
            m.slope.into(),
            m.airy_eigenvalue.into(),
            m.phase.remainder_degree.into(),
            r.exponent.into(),
        ]);
        out.scalar("sigma", m.sigma);
        out.scalar("exponent", r.exponent);
        out.scalar("remainder_degree", m.phase.remainder_degree);
        out.table(res);
        out.table(eik);
        out.table(model);
        Ok(())
    }
}

pub struct ChannelCook;

impl Experiment for ChannelCook {
    fn name(&self) -> &'static str {
        "channel-cook"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let p = &cfg.threebody.channel.probe;
        if !(p.k0 > p.k_width && p.k_width > 0.0) {
            return Err(range(format!("channel probe band ({}, {}) must lie in k > 0", p.k0 - p.k_width, p.k0 + p.k_width)));
        }
        if p.last_octave <= p.first_octave || p.per_octave == 0 {
            return Err(range("channel probe needs last_octave > first_octave and per_octave ≥ 1".into()));
        }
        let (m, mut d) = channel_model(cfg)?;
        let t_max = 2f64.powi(p.last_octave);
        d.push(("t_max".into(), fmt(t_max)));
        d.push(("x2 width at the far edge".into(), fmt(m.width(2.0 * t_max * (p.k0 + p.k_width)))));
        Ok(d)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let (m, _) = channel_model(cfg)?;
        let p = &cfg.threebody.channel.probe;
        let tr = channel_cook_probe(&m, p)?;
        out.grid("times", &tr.times);
        let mut cook = Table::new("cook", &["t", "plain", "dressed"]);
        for ((t, a), b) in tr.times.iter().zip(&tr.plain).zip(&tr.dressed) {
            cook.push(vec![(*t).into(), (*a).into(), (*b).into()]);
        }
        let mut inc = Table::new("increments", &["octave_start", "dressed_increment"]);
        for (i, d) in tr.dressed_increments.iter().enumerate() {
            inc.push(vec![(p.first_octave + i as i32).into(), (*d).into()]);
        }
        let mut fit = Table::new("fit", &["plain_exponent", "dressed_exponent", "eikonal_remainder_degree"]);
        fit.push(vec![tr.plain_exponent.into(), tr.dressed_exponent.into(), tr.eikonal_remainder_degree.into()]);
        out.scalar("plain_exponent", tr.plain_exponent);
        out.scalar("dressed_exponent", tr.dressed_exponent);
        out.table(cook);
        out.table(inc);
        out.table(fit);
        Ok(())
    }
}
