//! Experiments registered by name; each one checks its config and fills a bundle.

mod stationary;
mod threebody;
mod timedep;

use scatterkit::Result;

use crate::bundle::ResultBundle;
use crate::config::ExperimentConfig;
use crate::CliError;

/// Derived quantity shown by `validate`: (name, value).
pub type Derived = Vec<(String, String)>;

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;

    /// Schema and range checks without running.
    fn validate(&self, cfg: &ExperimentConfig) -> Result<Derived>;

    /// Fills `out`; tables added before a failure stay in the bundle.
    fn run(&self, cfg: &ExperimentConfig, out: &mut ResultBundle) -> Result<()>;
}

pub const EXPERIMENTS: &[&str] = &[
    "phaseshift",
    "smatrix",
    "born",
    "crosssection",
    "propagate",
    "cook",
    "moller",
    "scattering-map",
    "faddeev-bound",
    "coupling-scan",
    "efimov-count",
    "channel-airy",
    "channel-cook",
];

pub fn experiment(name: &str) -> std::result::Result<Box<dyn Experiment>, CliError> {
    Ok(match name {
        "phaseshift" => Box::new(stationary::PhaseShift),
        "smatrix" => Box::new(stationary::SMatrix),
        "born" => Box::new(stationary::Born),
        "crosssection" => Box::new(stationary::CrossSection),
        "propagate" => Box::new(timedep::Propagate),
        "cook" => Box::new(timedep::Cook),
        "moller" => Box::new(timedep::Moller),
        "scattering-map" => Box::new(timedep::ScatteringMapRun),
        "faddeev-bound" => Box::new(threebody::FaddeevBound),
        "coupling-scan" => Box::new(threebody::CouplingScanRun),
        "efimov-count" => Box::new(threebody::EfimovCountRun),
        "channel-airy" => Box::new(threebody::ChannelAiry),
        "channel-cook" => Box::new(threebody::ChannelCook),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown experiment '{name}'; known: {}",
                EXPERIMENTS.join(", ")
            )))
        }
    })
}

fn range(msg: String) -> scatterkit::Error {
    scatterkit::Error::Domain(msg)
}

fn fmt(x: f64) -> String {
    format!("{x:.10e}")
}

fn max_by_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m })
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}
