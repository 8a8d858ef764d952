//! Experiment configuration files (TOML).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scatterkit::numerics::{preset, Potential};
use scatterkit::threebody::channel::ChannelProbeSpec;
use scatterkit::threebody::Reduction;
use scatterkit::timedep::propagate::DEFAULT_LEAK_TOLERANCE;
use scatterkit::timedep::CookOptions;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Phaseshift,
    Smatrix,
    Born,
    Crosssection,
    Propagate,
    Cook,
    Moller,
    ScatteringMap,
    FaddeevBound,
    CouplingScan,
    EfimovCount,
    ChannelAiry,
    ChannelCook,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Phaseshift => "phaseshift",
            Self::Smatrix => "smatrix",
            Self::Born => "born",
            Self::Crosssection => "crosssection",
            Self::Propagate => "propagate",
            Self::Cook => "cook",
            Self::Moller => "moller",
            Self::ScatteringMap => "scattering-map",
            Self::FaddeevBound => "faddeev-bound",
            Self::CouplingScan => "coupling-scan",
            Self::EfimovCount => "efimov-count",
            Self::ChannelAiry => "channel-airy",
            Self::ChannelCook => "channel-cook",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(default)]
    pub stationary: StationaryConfig,
    #[serde(default)]
    pub timedep: TimedepConfig,
    #[serde(default)]
    pub threebody: ThreebodyConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Read { path: path.to_path_buf(), source: e })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// A named preset with its strength scaled and individual shape parameters replaced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub preset: String,
    #[serde(default = "one")]
    pub scale: f64,
    /// Shape parameters by name, e.g. `v0`, `radius`, `width`, `rho`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, f64>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self { preset: "zero".into(), scale: 1.0, overrides: BTreeMap::new() }
    }
}

impl PotentialConfig {
    pub fn build(&self) -> scatterkit::Result<Potential> {
        let base = preset(&self.preset)?;
        let v = if self.overrides.is_empty() {
            base
        } else {
            let mut shape = serde_json::to_value(&base.shape).expect("shape serializes");
            let fields = shape.as_object_mut().expect("shape is a tagged map");
            for (key, value) in &self.overrides {
                if key == "kind" || !fields.contains_key(key) {
                    return Err(scatterkit::Error::InvalidArgument(format!(
                        "preset '{}' has no parameter '{key}'",
                        self.preset
                    )));
                }
                fields.insert(key.clone(), serde_json::json!(value));
            }
            let shape = serde_json::from_value(shape)
                .map_err(|e| scatterkit::Error::InvalidArgument(format!("override: {e}")))?;
            Potential::with_natural_envelope(shape)?
        };
        Ok(if self.scale == 1.0 { v } else { v.scaled(self.scale) })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryConfig {
    /// Energies λ = k².
    pub energies: Vec<f64>,
    pub solver: String,
    pub l_cap: usize,
    pub angles: usize,
    pub born_order: usize,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self { energies: vec![0.25, 1.0, 4.0], solver: "coordinate".into(), l_cap: 200, angles: 19, born_order: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PacketKind {
    Gaussian,
    Bump,
    /// Normalised sum of three Gaussians drawn from the run seed.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacketConfig {
    pub kind: PacketKind,
    pub x0: f64,
    /// Gaussian: mean momentum and width.
    pub k0: f64,
    pub width: f64,
    /// Bump: momentum support [k_lo, k_hi].
    pub k_lo: f64,
    pub k_hi: f64,
    /// Random: number of Gaussian components.
    pub components: usize,
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self { kind: PacketKind::Gaussian, x0: 0.0, k0: 1.5, width: 5.0, k_lo: 1.0, k_hi: 3.0, components: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimedepConfig {
    pub half_width: f64,
    pub dx: f64,
    pub packet: PacketConfig,
    pub dt: f64,
    pub scheme: String,
    pub leak_tolerance: f64,
    /// Output times (propagate) or Møller horizons (moller).
    pub times: Vec<f64>,
    /// Scattering-map horizon T.
    pub horizon: f64,
    /// Modified free dynamics for the Møller sequence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modifier: Option<String>,
    pub cook: CookOptions,
}

impl Default for TimedepConfig {
    fn default() -> Self {
        Self {
            half_width: 300.0,
            dx: 0.1,
            packet: PacketConfig::default(),
            dt: 0.01,
            scheme: "strang-split".into(),
            leak_tolerance: DEFAULT_LEAK_TOLERANCE,
            times: vec![5.0, 10.0, 20.0],
            horizon: 30.0,
            modifier: None,
            cook: CookOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThreebodyConfig {
    pub faddeev: FaddeevConfig,
    pub scan: ScanConfig,
    pub efimov: EfimovConfig,
    pub channel: ChannelConfig,
}

impl Default for ThreebodyConfig {
    fn default() -> Self {
        Self {
            faddeev: FaddeevConfig::default(),
            scan: ScanConfig::default(),
            efimov: EfimovConfig::default(),
            channel: ChannelConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaddeevConfig {
    pub masses: [f64; 3],
    pub form_factor: String,
    /// Form-factor range β (or cutoff for the contact form).
    pub range: f64,
    /// Two-body bound-state energy that fixes each pair strength.
    pub pair_energies: [f64; 3],
    /// Pairs (12), (23), (31) that interact.
    pub active: [bool; 3],
    pub nodes: usize,
    pub p_max: f64,
    /// Scale c of the rational map that clusters nodes below c.
    pub grid_scale: f64,
    pub reduction: Reduction,
}

impl Default for FaddeevConfig {
    fn default() -> Self {
        Self {
            masses: [1.0; 3],
            form_factor: "yamaguchi".into(),
            range: 3.0,
            pair_energies: [-1.0; 3],
            active: [true; 3],
            nodes: 48,
            p_max: 1200.0,
            grid_scale: 3.0,
            reduction: Reduction::Boson,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub kappa_max: f64,
    pub kappa_steps: usize,
    pub radius: f64,
    pub step: f64,
    pub l_max: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { kappa_max: 6.0, kappa_steps: 24, radius: 12.0, step: 2e-3, l_max: 20 }
    }
}

impl ScanConfig {
    pub fn kappas(&self) -> Vec<f64> {
        (0..=self.kappa_steps).map(|i| self.kappa_max * i as f64 / self.kappa_steps as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EfimovConfig {
    pub masses: [f64; 3],
    /// c_α = s_α / s₀; 1 puts the pair at zero-energy resonance.
    pub couplings: [f64; 3],
    pub ir_energy: f64,
    pub nodes_per_decade: usize,
    pub cutoffs: Vec<f64>,
    pub reduction: Reduction,
}

impl Default for EfimovConfig {
    fn default() -> Self {
        Self {
            masses: [1.0; 3],
            couplings: [1.0; 3],
            ir_energy: -1e-5,
            nodes_per_decade: 10,
            cutoffs: vec![1.0, 32.0, 1024.0],
            reduction: Reduction::Boson,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub profile: String,
    pub rho: f64,
    pub v12: f64,
    pub level: usize,
    /// Spectator positions for the residual ‖Y(x₁)‖.
    pub x1: Vec<f64>,
    pub probe: ChannelProbeSpec,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            profile: "power-tail".into(),
            rho: 0.3,
            v12: 1.0,
            level: 1,
            x1: (0..8).map(|i| 100.0 * 2f64.powi(i)).collect(),
            probe: ChannelProbeSpec::default(),
        }
    }
}

fn one() -> f64 {
    1.0
}
