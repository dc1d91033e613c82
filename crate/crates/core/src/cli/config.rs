//! JSON run configuration.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimate::{FreeParameter, ModelSelector};
use crate::qdcore::{linspace, Branch, DeviceModel, ParameterFile, ParameterTable, SystemParams};
use crate::spectro::{PumpProbeProtocol, DEFAULT_RF_RABI};

/// The configuration shipped with the crate.
pub const BUNDLED_CONFIG: &str = include_str!("../../data/paper-2017.config.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.n)
    }

    fn check(&self, name: &str) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config(format!("grid `{name}` is empty")));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || (self.n > 1 && self.start == self.stop) {
            return Err(Error::Config(format!("grid `{name}` has a degenerate range")));
        }
        Ok(())
    }
}

fn default_rabi() -> f64 {
    DEFAULT_RF_RABI
}

fn red() -> Branch {
    Branch::Red
}

fn blue() -> Branch {
    Branch::Blue
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateauMapConfig {
    /// Laser energies, eV.
    pub energy: Grid,
    /// Bias voltages, V.
    pub voltage: Grid,
    #[serde(default = "default_rabi")]
    pub rabi: f64,
    /// Overrides the field of the parameter file, T.
    #[serde(default)]
    pub b_field_z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoColorConfig {
    pub energy: Grid,
    pub voltage: Grid,
    #[serde(default = "default_rabi")]
    pub rabi: f64,
    /// Transition the fixed laser sits on at the plateau centre.
    #[serde(default = "red")]
    pub fixed_branch: Branch,
    #[serde(default = "default_rabi")]
    pub fixed_rabi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionConfig {
    /// Probe detuning from the transition, eV.
    pub detuning: Grid,
    #[serde(default = "blue")]
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpChoice {
    /// Pump at the probe energy.
    Blue,
    /// Pump one Zeeman splitting below the probe.
    Red,
    Off,
}

impl PumpChoice {
    pub fn protocol(self, base: PumpProbeProtocol, params: &SystemParams) -> PumpProbeProtocol {
        match self {
            PumpChoice::Blue => PumpProbeProtocol {
                pump_offset: 0.0,
                ..base
            },
            PumpChoice::Red => PumpProbeProtocol {
                pump_offset: -params.zeeman_splitting(),
                ..base
            },
            PumpChoice::Off => base.without_pump(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionMapConfig {
    /// Probe energies, eV.
    pub energy: Grid,
    pub voltage: Grid,
    pub pump: PumpChoice,
    #[serde(default)]
    pub protocol: PumpProbeProtocol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpProbeConfig {
    /// Bias, V. Defaults to the plateau centre.
    #[serde(default)]
    pub voltage: Option<f64>,
    #[serde(default)]
    pub protocol: PumpProbeProtocol,
    #[serde(default = "default_samples")]
    pub samples_per_step: usize,
}

fn default_samples() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T1RecoveryConfig {
    #[serde(default)]
    pub voltage: Option<f64>,
    #[serde(default = "blue")]
    pub pump_branch: Branch,
    pub pump_rabi: f64,
    /// Dark delays, s.
    pub delays: Grid,
    /// Fit the closed-form recovery to the simulated points.
    #[serde(default = "yes")]
    pub fit: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    /// Values of free or fixed parameters used to generate the data.
    #[serde(default)]
    pub truth: BTreeMap<String, f64>,
    pub x: Grid,
    /// Relative noise level.
    pub noise_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub model: ModelSelector,
    pub free: Vec<FreeParameter>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    /// Two- or three-column CSV. Exclusive with `synthetic`.
    #[serde(default)]
    pub dataset: Option<PathBuf>,
    #[serde(default)]
    pub synthetic: Option<SyntheticConfig>,
    #[serde(default)]
    pub bootstrap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchEnergyConfig {
    /// W.
    pub pump_power: f64,
    /// s.
    pub pump_duration: f64,
    /// Defaults to Γ/γ.
    #[serde(default)]
    pub photons_per_cycle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Parameter file; the bundled one when absent.
    #[serde(default)]
    pub params_file: Option<PathBuf>,
    #[serde(default)]
    pub device_file: Option<PathBuf>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub plateau_map: Option<PlateauMapConfig>,
    #[serde(default)]
    pub two_color_map: Option<TwoColorConfig>,
    #[serde(default)]
    pub transmission: Option<TransmissionConfig>,
    #[serde(default)]
    pub transmission_map: Option<TransmissionMapConfig>,
    #[serde(default)]
    pub pump_probe: Option<PumpProbeConfig>,
    #[serde(default)]
    pub t1_recovery: Option<T1RecoveryConfig>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    #[serde(default)]
    pub switch_energy: Option<SwitchEnergyConfig>,
}

/// Configuration with its files loaded.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub params: ParameterFile<SystemParams>,
    pub device: ParameterFile<DeviceModel>,
}

fn resolve_path(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

impl RunConfig {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_CONFIG).expect("bundled config parses")
    }

    /// Parses `text`; relative paths are taken against `base_dir`.
    pub fn from_json_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut c: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config schema: {e}")))?;
        c.params_file = c.params_file.map(|p| resolve_path(base_dir, &p));
        c.device_file = c.device_file.map(|p| resolve_path(base_dir, &p));
        c.out_dir = c.out_dir.map(|p| resolve_path(base_dir, &p));
        if let Some(f) = c.fit.as_mut() {
            f.dataset = f.dataset.take().map(|p| resolve_path(base_dir, &p));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, path.parent())
    }

    pub fn resolve(self) -> Result<Resolved> {
        let params = match &self.params_file {
            Some(p) => ParameterFile::load(p, SystemParams::paper_2017())?,
            None => SystemParams::bundled_file(),
        };
        let device = match &self.device_file {
            Some(p) => ParameterFile::load(p, DeviceModel::paper_2017())?,
            None => DeviceModel::bundled_file(),
        };
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        Ok(Resolved {
            config: self,
            params,
            device,
        })
    }
}

impl Resolved {
    pub fn params(&self) -> SystemParams {
        self.params.table
    }

    pub fn device(&self) -> DeviceModel {
        self.device.table
    }

    fn block<'a, T>(&self, block: &'a Option<T>, name: &str) -> Result<&'a T> {
        block
            .as_ref()
            .ok_or_else(|| Error::Config(format!("config has no `{name}` block")))
    }

    pub fn plateau_map(&self) -> Result<&PlateauMapConfig> {
        let b = self.block(&self.config.plateau_map, "plateau_map")?;
        b.energy.check("plateau_map.energy")?;
        b.voltage.check("plateau_map.voltage")?;
        Ok(b)
    }

    pub fn two_color_map(&self) -> Result<&TwoColorConfig> {
        let b = self.block(&self.config.two_color_map, "two_color_map")?;
        b.energy.check("two_color_map.energy")?;
        b.voltage.check("two_color_map.voltage")?;
        Ok(b)
    }

    pub fn transmission(&self) -> Result<&TransmissionConfig> {
        let b = self.block(&self.config.transmission, "transmission")?;
        b.detuning.check("transmission.detuning")?;
        Ok(b)
    }

    pub fn transmission_map(&self) -> Result<&TransmissionMapConfig> {
        let b = self.block(&self.config.transmission_map, "transmission_map")?;
        b.energy.check("transmission_map.energy")?;
        b.voltage.check("transmission_map.voltage")?;
        Ok(b)
    }

    pub fn pump_probe(&self) -> Result<&PumpProbeConfig> {
        self.block(&self.config.pump_probe, "pump_probe")
    }

    pub fn t1_recovery(&self) -> Result<&T1RecoveryConfig> {
        let b = self.block(&self.config.t1_recovery, "t1_recovery")?;
        b.delays.check("t1_recovery.delays")?;
        Ok(b)
    }

    pub fn fit(&self) -> Result<&FitConfig> {
        let b = self.block(&self.config.fit, "fit")?;
        match (&b.dataset, &b.synthetic) {
            (Some(p), None) => {
                if !p.exists() {
                    return Err(Error::Config(format!("dataset {} does not exist", p.display())));
                }
            }
            (None, Some(s)) => s.x.check("fit.synthetic.x")?,
            _ => {
                return Err(Error::Config(
                    "fit needs exactly one of `dataset` and `synthetic`".into(),
                ))
            }
        }
        Ok(b)
    }

    pub fn switch_energy(&self) -> Result<&SwitchEnergyConfig> {
        self.block(&self.config.switch_energy, "switch_energy")
    }

    /// Full resolved configuration for the manifest.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "params": self.params.to_json(),
            "device": self.device.to_json(),
        })
    }

    /// System parameters with the validated table check.
    pub fn checked_params(&self) -> Result<SystemParams> {
        let p = self.params();
        p.validate()?;
        Ok(p)
    }
}
