use serde::{Deserialize, Serialize};

use super::params::{finite, Branch, SystemParams};
use super::table::{ParameterFile, ParameterTable};
use crate::error::{Error, Result};

const BUNDLED_DEVICE: &str = include_str!("../../data/paper-2017.device.json");

/// Electrostatic tuning of the dot: a linear Stark map from bias to
/// transition energy, the single-electron charge plateau and the
/// co-tunneling profile inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    /// Transition energy at `v0` and zero field, eV.
    pub e0: f64,
    /// Reference bias, V.
    pub v0: f64,
    /// Stark tuning slope, eV/V.
    pub lever_arm: f64,
    pub v_plateau_low: f64,
    pub v_plateau_high: f64,
    /// Spin-randomization rate at the plateau edge, s⁻¹.
    pub kappa_cot_max: f64,
    /// Decay length of co-tunneling into the plateau, V.
    pub w_cot: f64,
    /// Rigid resonance shift when a second laser is on, V.
    pub two_color_voltage_shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargeState {
    Empty,
    OneElectron,
    TwoElectron,
}

impl DeviceModel {
    pub fn paper_2017() -> Self {
        Self::bundled_file().table
    }

    pub fn bundled_file() -> ParameterFile<DeviceModel> {
        ParameterFile::from_json_str(BUNDLED_DEVICE, DeviceModel::zeroed())
            .expect("bundled device file is valid")
    }

    fn zeroed() -> Self {
        DeviceModel {
            e0: 0.0,
            v0: 0.0,
            lever_arm: 0.0,
            v_plateau_low: 0.0,
            v_plateau_high: 0.0,
            kappa_cot_max: 0.0,
            w_cot: 0.0,
            two_color_voltage_shift: 0.0,
        }
    }

    pub fn plateau_center(&self) -> f64 {
        0.5 * (self.v_plateau_low + self.v_plateau_high)
    }

    pub fn plateau_width(&self) -> f64 {
        self.v_plateau_high - self.v_plateau_low
    }

    /// Transition energy of `branch` at bias `v`, eV.
    ///
    /// `e0 + lever_arm·(v − v0) ± Δ_Z/2`, plus for blue and minus for red.
    pub fn transition_energy(&self, params: &SystemParams, v: f64, branch: Branch) -> f64 {
        let half_split = 0.5 * params.zeeman_splitting();
        let stark = self.e0 + self.lever_arm * (v - self.v0);
        match branch {
            Branch::Blue => stark + half_split,
            Branch::Red => stark - half_split,
        }
    }

    /// Bias at which `branch` is resonant with a photon of `energy`.
    pub fn resonance_voltage(&self, params: &SystemParams, energy: f64, branch: Branch) -> f64 {
        let at_v0 = self.transition_energy(params, self.v0, branch);
        self.v0 + (energy - at_v0) / self.lever_arm
    }

    pub fn charge_state(&self, v: f64) -> ChargeState {
        if v < self.v_plateau_low {
            ChargeState::Empty
        } else if v > self.v_plateau_high {
            ChargeState::TwoElectron
        } else {
            ChargeState::OneElectron
        }
    }

    /// Co-tunneling spin-randomization rate κ(v), s⁻¹.
    ///
    /// Double exponential decaying from both plateau edges with length
    /// `w_cot`, clamped to `kappa_cot_max`.
    pub fn cotunneling_rate(&self, v: f64) -> Result<f64> {
        if self.charge_state(v) != ChargeState::OneElectron {
            return Err(Error::OutsidePlateau {
                voltage: v,
                low: self.v_plateau_low,
                high: self.v_plateau_high,
            });
        }
        let from_low = (-(v - self.v_plateau_low) / self.w_cot).exp();
        let from_high = (-(self.v_plateau_high - v) / self.w_cot).exp();
        Ok((self.kappa_cot_max * (from_low + from_high)).min(self.kappa_cot_max))
    }
}

impl ParameterTable for DeviceModel {
    const FIELDS: &'static [(&'static str, &'static str)] = &[
        ("e0", "eV"),
        ("v0", "V"),
        ("lever_arm", "eV/V"),
        ("v_plateau_low", "V"),
        ("v_plateau_high", "V"),
        ("kappa_cot_max", "s^-1"),
        ("w_cot", "V"),
        ("two_color_voltage_shift", "V"),
    ];

    fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "e0" => self.e0,
            "v0" => self.v0,
            "lever_arm" => self.lever_arm,
            "v_plateau_low" => self.v_plateau_low,
            "v_plateau_high" => self.v_plateau_high,
            "kappa_cot_max" => self.kappa_cot_max,
            "w_cot" => self.w_cot,
            "two_color_voltage_shift" => self.two_color_voltage_shift,
            _ => return None,
        })
    }

    fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "e0" => &mut self.e0,
            "v0" => &mut self.v0,
            "lever_arm" => &mut self.lever_arm,
            "v_plateau_low" => &mut self.v_plateau_low,
            "v_plateau_high" => &mut self.v_plateau_high,
            "kappa_cot_max" => &mut self.kappa_cot_max,
            "w_cot" => &mut self.w_cot,
            "two_color_voltage_shift" => &mut self.two_color_voltage_shift,
            _ => return false,
        };
        *slot = value;
        true
    }

    fn validate(&self) -> Result<()> {
        for (name, _) in Self::FIELDS {
            finite(name, self.get(name).unwrap_or(f64::NAN))?;
        }
        if self.v_plateau_low >= self.v_plateau_high {
            return Err(Error::invalid(
                "v_plateau_low",
                "must be below v_plateau_high",
            ));
        }
        if self.lever_arm == 0.0 {
            return Err(Error::invalid("lever_arm", "must be non-zero"));
        }
        if self.kappa_cot_max < 0.0 {
            return Err(Error::invalid("kappa_cot_max", "must be >= 0"));
        }
        if self.w_cot <= 0.0 {
            return Err(Error::invalid("w_cot", "must be > 0"));
        }
        Ok(())
    }
}
