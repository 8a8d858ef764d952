//! Fixed-energy two-body experiments.

use scatterkit::stationary::{
    born_series, phase_shift_solver, phase_shifts, s_from_kernel, s_matrix, scatter, BornOptions, PhaseShifts,
    DEFAULT_OMEGA,
};
use scatterkit::{Complex64, Error, Result};

use super::{fmt, max, max_by_abs, range, Derived, Experiment};
use crate::bundle::{ResultBundle, Table};
use crate::config::ExperimentConfig;

fn check(cfg: &ExperimentConfig) -> Result<Derived> {
    let s = &cfg.stationary;
    cfg.potential.build()?;
    phase_shift_solver(&s.solver)?;
    if s.energies.is_empty() {
        return Err(range("stationary.energies is empty".into()));
    }
    let mut derived = Derived::new();
    for (i, &lambda) in s.energies.iter().enumerate() {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(range(format!("stationary.energies[{i}] = {lambda}: energy λ must be positive")));
        }
        derived.push((format!("k[{i}] = sqrt(lambda)"), fmt(lambda.sqrt())));
    }
    if s.l_cap < 1 {
        return Err(range("stationary.l_cap must be at least 1".into()));
    }
    Ok(derived)
}

fn solve(cfg: &ExperimentConfig, lambda: f64) -> Result<PhaseShifts> {
    let v = cfg.potential.build()?;
    let solver = phase_shift_solver(&cfg.stationary.solver)?;
    phase_shifts(&v, lambda, solver.as_ref(), cfg.stationary.l_cap)
}

fn converged(ps: PhaseShifts) -> Result<PhaseShifts> {
    if ps.converged {
        Ok(ps)
    } else {
        Err(Error::TruncationNotReached { l_max: ps.l_max(), tail: ps.tail })
    }
}

pub struct PhaseShift;

impl Experiment for PhaseShift {
    fn name(&self) -> &'static str {
        "phaseshift"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        check(cfg)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let energies = &cfg.stationary.energies;
        out.grid("energies", energies);
        let mut deltas = Table::new("phase_shifts", &["lambda", "k", "l", "delta"]);
        let mut trunc = Table::new("truncation", &["lambda", "l_max", "tail", "converged"]);
        let mut all = Vec::new();
        let mut tails = Vec::new();
        let mut failure = None;
        for &lambda in energies {
            let ps = solve(cfg, lambda)?;
            for (l, &d) in ps.deltas.iter().enumerate() {
                deltas.push(vec![lambda.into(), ps.k.into(), l.into(), d.into()]);
                all.push(d);
            }
            trunc.push(vec![lambda.into(), ps.l_max().into(), ps.tail.into(), ps.converged.into()]);
            tails.push(ps.tail);
            if failure.is_none() {
                failure = converged(ps).err();
            }
        }
        out.scalar("largest_delta", max_by_abs(all));
        out.scalar("max_tail", max(tails));
        out.table(deltas);
        out.table(trunc);
        failure.map_or(Ok(()), Err)
    }
}

pub struct SMatrix;

impl Experiment for SMatrix {
    fn name(&self) -> &'static str {
        "smatrix"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        check(cfg)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let energies = &cfg.stationary.energies;
        out.grid("energies", energies);
        let mut waves = Table::new("s_matrix", &["lambda", "l", "re", "im", "kernel_re", "kernel_im"]);
        let mut checks = Table::new("unitarity", &["lambda", "l_max", "unitarity_deviation", "kernel_deviation"]);
        let (mut unit, mut kern) = (Vec::new(), Vec::new());
        for &lambda in energies {
            let ps = converged(solve(cfg, lambda)?)?;
            let s = s_matrix(&ps);
            let sk = s_from_kernel(&ps, DEFAULT_OMEGA)?;
            for (l, (a, b)) in s.iter().zip(&sk).enumerate() {
                waves.push(vec![lambda.into(), l.into(), a.re.into(), a.im.into(), b.re.into(), b.im.into()]);
            }
            let u = max(s.iter().map(|x| (1.0 - x.norm()).abs()));
            let k = max(s.iter().zip(&sk).map(|(a, b)| (a - b).norm()));
            checks.push(vec![lambda.into(), ps.l_max().into(), u.into(), k.into()]);
            unit.push(u);
            kern.push(k);
        }
        out.scalar("max_unitarity_deviation", max(unit));
        out.scalar("max_kernel_deviation", max(kern));
        out.table(waves);
        out.table(checks);
        Ok(())
    }
}

pub struct Born;

impl Experiment for Born {
    fn name(&self) -> &'static str {
        "born"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let mut d = check(cfg)?;
        d.push(("born terms".into(), (cfg.stationary.born_order + 1).to_string()));
        Ok(d)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let s = &cfg.stationary;
        out.grid("energies", &s.energies);
        let v = cfg.potential.build()?;
        let opts = BornOptions { l_cap: s.l_cap, ..BornOptions::default() };
        let mut terms = Table::new("born_terms", &["lambda", "l", "order", "partial_re", "partial_im", "term_norm", "error"]);
        let mut waves = Table::new("born_waves", &["lambda", "l", "spectral_radius", "final_error"]);
        let mut status = Table::new("born_status", &["lambda", "convergent"]);
        let (mut errors, mut radii) = (Vec::new(), Vec::new());
        let mut all_convergent = true;
        for &lambda in &s.energies {
            let exact = s_matrix(&converged(solve(cfg, lambda)?)?);
            let b = born_series(&v, lambda, s.born_order, &opts)?;
            for w in &b.waves {
                let target = exact.get(w.l).copied().unwrap_or(Complex64::new(1.0, 0.0));
                for (n, (p, t)) in w.partial_s.iter().zip(&w.term_norms).enumerate() {
                    let e = (p - target).norm();
                    terms.push(vec![lambda.into(), w.l.into(), n.into(), p.re.into(), p.im.into(), (*t).into(), e.into()]);
                }
                let e = (w.partial_s.last().unwrap() - target).norm();
                waves.push(vec![lambda.into(), w.l.into(), w.spectral_radius.into(), e.into()]);
                errors.push(e);
                radii.push(w.spectral_radius);
            }
            status.push(vec![lambda.into(), b.convergent.into()]);
            all_convergent &= b.convergent;
        }
        out.scalar("max_final_error", max(errors));
        out.scalar("max_spectral_radius", max(radii));
        out.scalar("convergent", if all_convergent { 1.0 } else { 0.0 });
        out.table(terms);
        out.table(waves);
        out.table(status);
        Ok(())
    }
}

pub struct CrossSection;

impl Experiment for CrossSection {
    fn name(&self) -> &'static str {
        "crosssection"
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived> {
        let d = check(cfg)?;
        if cfg.stationary.angles < 2 {
            return Err(range("stationary.angles must be at least 2".into()));
        }
        Ok(d)
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()> {
        let s = &cfg.stationary;
        out.grid("energies", &s.energies);
        let v = cfg.potential.build()?;
        let solver = phase_shift_solver(&s.solver)?;
        let mut dsigma = Table::new("dsigma", &["lambda", "gamma", "cos_gamma", "dsigma", "amplitude_re", "amplitude_im"]);
        let mut totals = Table::new(
            "totals",
            &[
                "lambda",
                "sigma_total",
                "sigma_partial_waves",
                "optical_residual",
                "relative_optical_residual",
                "unitarity_deviation",
                "kernel_deviation",
            ],
        );
        let (mut optical, mut kern) = (Vec::new(), Vec::new());
        for &lambda in &s.energies {
            let r = scatter(&v, lambda, solver.as_ref(), s.angles)?;
            let cs = &r.cross_sections;
            for ((g, d), (c, a)) in cs.dsigma.iter().zip(&r.amplitude) {
                dsigma.push(vec![lambda.into(), (*g).into(), (*c).into(), (*d).into(), a.re.into(), a.im.into()]);
            }
            let rel = cs.optical_residual / cs.sigma_total;
            totals.push(vec![
                lambda.into(),
                cs.sigma_total.into(),
                cs.sigma_partial_waves.into(),
                cs.optical_residual.into(),
                rel.into(),
                r.unitarity_deviation.into(),
                r.kernel_deviation.into(),
            ]);
            optical.push(rel);
            kern.push(r.kernel_deviation);
        }
        out.scalar("max_relative_optical_residual", max(optical));
        out.scalar("max_kernel_deviation", max(kern));
        out.table(dsigma);
        out.table(totals);
        Ok(())
    }
}
