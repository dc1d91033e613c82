//! Model selectors and their evaluation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qdcore::{Branch, DeviceModel, LaserField, ParameterTable, SystemParams};
use crate::spectro::{
    centre_laser, effective_t1, observed_transmission, plateau_line_cut, recovery_curve, t1_recovery_experiment,
};

/// Pump Rabi frequency used by simulated recovery curves when none is given.
pub const DEFAULT_RECOVERY_PUMP_RABI: f64 = 6.5e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSelector {
    /// RF intensity along a resonance; `x` is bias in V.
    PlateauLineCut {
        laser: LaserField,
        branch: Branch,
        #[serde(default)]
        offset: f64,
    },
    /// Dark recovery after pumping; `x` is delay in s. Without a voltage
    /// the closed-form exponential is used, with one the full dynamics.
    RecoveryCurve {
        #[serde(default)]
        voltage: Option<f64>,
        #[serde(default)]
        pump: Option<LaserField>,
    },
    /// Observed transmission dip; `x` is probe detuning in eV.
    TransmissionSpectrum { branch: Branch },
}

impl ModelSelector {
    /// Model-specific parameters beyond the system and device tables,
    /// with their defaults.
    pub fn extras(&self, params: &SystemParams, device: &DeviceModel) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match self {
            ModelSelector::PlateauLineCut { .. } => {
                m.insert("amplitude".into(), 1.0);
            }
            ModelSelector::RecoveryCurve { voltage: None, .. } => {
                let kappa = device.cotunneling_rate(device.plateau_center()).unwrap_or(0.0);
                m.insert("t1_eff".into(), effective_t1(params, kappa));
                m.insert("s0".into(), 0.0);
                m.insert("s_inf".into(), 0.5);
            }
            ModelSelector::RecoveryCurve { voltage: Some(_), .. } => {
                m.insert("amplitude".into(), 1.0);
            }
            ModelSelector::TransmissionSpectrum { .. } => {}
        }
        m
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSelector::PlateauLineCut { .. } => "plateau_line_cut",
            ModelSelector::RecoveryCurve { .. } => "recovery_curve",
            ModelSelector::TransmissionSpectrum { .. } => "transmission_spectrum",
        }
    }
}

/// Whether a named parameter is a rate or time, fitted in log space.
pub fn is_log_scaled(name: &str) -> bool {
    if name == "t1_eff" {
        return true;
    }
    SystemParams::FIELDS
        .iter()
        .chain(DeviceModel::FIELDS)
        .any(|(n, unit)| *n == name && (*unit == "s" || *unit == "s^-1"))
}

/// Complete model state: both tables plus the extras.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub params: SystemParams,
    pub device: DeviceModel,
    pub extras: BTreeMap<String, f64>,
}

impl ModelState {
    pub fn new(model: &ModelSelector, params: SystemParams, device: DeviceModel) -> Self {
        let extras = model.extras(&params, &device);
        ModelState { params, device, extras }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.extras
            .get(name)
            .copied()
            .or_else(|| self.params.get(name))
            .or_else(|| self.device.get(name))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if let Some(slot) = self.extras.get_mut(name) {
            *slot = value;
            return Ok(());
        }
        if self.params.set(name, value) || self.device.set(name, value) {
            return Ok(());
        }
        Err(Error::InvalidFit(format!("unknown parameter `{name}`")))
    }

    fn extra(&self, name: &str) -> f64 {
        self.extras[name]
    }

    pub fn evaluate(&self, model: &ModelSelector, x: &[f64]) -> Result<Vec<f64>> {
        self.params.validate()?;
        self.device.validate()?;
        let (p, d) = (&self.params, &self.device);
        match model {
            ModelSelector::PlateauLineCut { laser, branch, offset } => {
                let amplitude = self.extra("amplitude");
                let cut = plateau_line_cut(p, d, laser, *branch, *offset, x)?;
                Ok(cut.into_iter().map(|y| amplitude * y).collect())
            }
            ModelSelector::RecoveryCurve { voltage: None, .. } => {
                let (t1, s0, s_inf) = (self.extra("t1_eff"), self.extra("s0"), self.extra("s_inf"));
                Ok(x.iter().map(|&t| recovery_curve(t, s0, s_inf, t1)).collect())
            }
            ModelSelector::RecoveryCurve {
                voltage: Some(v),
                pump,
            } => {
                let pump = pump.unwrap_or_else(|| centre_laser(p, d, Branch::Blue, DEFAULT_RECOVERY_PUMP_RABI));
                let amplitude = self.extra("amplitude");
                let points = t1_recovery_experiment(p, d, *v, &pump, x)?;
                Ok(points.into_iter().map(|(_, s)| amplitude * s).collect())
            }
            ModelSelector::TransmissionSpectrum { branch } => x
                .iter()
                .map(|&delta| observed_transmission(delta, p.beta(*branch), p))
                .collect(),
        }
    }
}
