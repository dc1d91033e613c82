use serde::{Deserialize, Serialize};

use super::params::SystemParams;
use crate::error::{Error, Result};

/// Where a laser enters the device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    /// Free-space excitation from above the waveguide. Drives the dot.
    TopIllumination,
    /// Launched into the waveguide through the left grating. Weak probe.
    WaveguideLeft,
}

/// Default coherent-coupling cutoff in units of ħΓ.
pub const DEFAULT_CUTOFF_LINEWIDTHS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserField {
    /// Photon energy, eV.
    pub energy: f64,
    /// On-resonance Rabi frequency Ω, s⁻¹.
    pub rabi: f64,
    pub port: Port,
    /// Largest detuning (eV) at which this laser still drives a transition.
    pub coupling_cutoff: f64,
}

impl LaserField {
    pub fn new(energy: f64, rabi: f64, port: Port, coupling_cutoff: f64) -> Result<Self> {
        let laser = LaserField {
            energy,
            rabi,
            port,
            coupling_cutoff,
        };
        laser.validate()?;
        Ok(laser)
    }

    /// Top-illumination laser with the default cutoff of 20·ħΓ.
    pub fn top(energy: f64, rabi: f64, params: &SystemParams) -> Self {
        LaserField {
            energy,
            rabi,
            port: Port::TopIllumination,
            coupling_cutoff: default_cutoff(params),
        }
    }

    /// Waveguide probe with the default cutoff.
    pub fn probe(energy: f64, rabi: f64, params: &SystemParams) -> Self {
        LaserField {
            port: Port::WaveguideLeft,
            ..LaserField::top(energy, rabi, params)
        }
    }

    pub fn with_energy(self, energy: f64) -> Self {
        LaserField { energy, ..self }
    }

    pub fn with_rabi(self, rabi: f64) -> Self {
        LaserField { rabi, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.energy.is_finite() {
            return Err(Error::invalid("laser.energy", "must be finite"));
        }
        if !(self.rabi >= 0.0 && self.rabi.is_finite()) {
            return Err(Error::invalid("laser.rabi", format!("must be >= 0, got {}", self.rabi)));
        }
        if !(self.coupling_cutoff > 0.0) {
            return Err(Error::invalid(
                "laser.coupling_cutoff",
                format!("must be > 0, got {}", self.coupling_cutoff),
            ));
        }
        Ok(())
    }
}

pub fn default_cutoff(params: &SystemParams) -> f64 {
    DEFAULT_CUTOFF_LINEWIDTHS * params.natural_linewidth()
}
