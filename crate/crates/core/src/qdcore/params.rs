use serde::{Deserialize, Serialize};

use super::constants::{HBAR, MU_B};
use super::table::{ParameterFile, ParameterTable};
use crate::error::{Error, Result};

const BUNDLED_PARAMS: &str = include_str!("../../data/paper-2017.params.json");

/// One of the two vertical (spin-conserving) optical transitions.
///
/// `Blue` is |↑⟩↔|⇑⟩ (higher energy at positive field), `Red` is |↓⟩↔|⇓⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Blue,
    Red,
}

impl Branch {
    pub fn other(self) -> Self {
        match self {
            Branch::Blue => Branch::Red,
            Branch::Red => Branch::Blue,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Blue => "blue",
            Branch::Red => "red",
        }
    }
}

/// Emitter and waveguide rates of the four-level trion system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Vertical radiative decay rate Γ per vertical transition, s⁻¹.
    pub gamma_vertical: f64,
    /// Diagonal (spin-flip) radiative decay rate γ per diagonal transition, s⁻¹.
    pub gamma_diagonal: f64,
    /// Ground-state spin lifetime T1, s.
    pub t1_spin: f64,
    /// Pure dephasing of the optical coherences, s⁻¹.
    pub gamma_dephasing: f64,
    /// Standard deviation of the quasi-static transition-energy noise, eV.
    pub sigma_spectral_diffusion: f64,
    pub beta_blue: f64,
    pub beta_red: f64,
    pub eta_blue: f64,
    pub eta_red: f64,
    /// Field along the growth axis, T.
    pub b_field_z: f64,
    /// Effective g-factor of the optical transition splitting.
    pub g_transition: f64,
    /// Ground-state g-factor. Only enters frame bookkeeping.
    pub g_electron: f64,
    /// Off-resonant waveguide transmission T0.
    pub t0_background: f64,
}

impl SystemParams {
    /// The bundled calibrated profile.
    pub fn paper_2017() -> Self {
        Self::bundled_file().table
    }

    pub fn bundled_file() -> ParameterFile<SystemParams> {
        ParameterFile::from_json_str(BUNDLED_PARAMS, SystemParams::zeroed())
            .expect("bundled parameter file is valid")
    }

    fn zeroed() -> Self {
        SystemParams {
            gamma_vertical: 0.0,
            gamma_diagonal: 0.0,
            t1_spin: 0.0,
            gamma_dephasing: 0.0,
            sigma_spectral_diffusion: 0.0,
            beta_blue: 0.0,
            beta_red: 0.0,
            eta_blue: 0.0,
            eta_red: 0.0,
            b_field_z: 0.0,
            g_transition: 0.0,
            g_electron: 0.0,
            t0_background: 1.0,
        }
    }

    /// Transition Zeeman splitting Δ_Z = g·µ_B·B_z, eV.
    pub fn zeeman_splitting(&self) -> f64 {
        self.g_transition * MU_B * self.b_field_z
    }

    /// Ground-state splitting from `g_electron`, eV.
    pub fn ground_splitting(&self) -> f64 {
        self.g_electron * MU_B * self.b_field_z
    }

    /// Total decay rate out of one trion state, Γ + γ.
    pub fn total_decay(&self) -> f64 {
        self.gamma_vertical + self.gamma_diagonal
    }

    /// Full width of the optical coherence decay, Γ' = Γ + γ + 2·γ_dephasing.
    pub fn coherence_width(&self) -> f64 {
        self.total_decay() + 2.0 * self.gamma_dephasing
    }

    /// ħΓ in eV.
    pub fn natural_linewidth(&self) -> f64 {
        HBAR * self.gamma_vertical
    }

    /// Ground-state spin-flip rate in each direction for a co-tunneling rate κ.
    pub fn spin_flip_rate(&self, kappa: f64) -> f64 {
        0.5 / self.t1_spin + 0.5 * kappa
    }

    pub fn beta(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Blue => self.beta_blue,
            Branch::Red => self.beta_red,
        }
    }

    pub fn eta(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Blue => self.eta_blue,
            Branch::Red => self.eta_red,
        }
    }

    /// Photons scattered per spin-pumping cycle, Γ/γ.
    pub fn photons_per_cycle(&self) -> f64 {
        self.gamma_vertical / self.gamma_diagonal
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")))
    }
}

pub(crate) fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}

impl ParameterTable for SystemParams {
    const FIELDS: &'static [(&'static str, &'static str)] = &[
        ("gamma_vertical", "s^-1"),
        ("gamma_diagonal", "s^-1"),
        ("t1_spin", "s"),
        ("gamma_dephasing", "s^-1"),
        ("sigma_spectral_diffusion", "eV"),
        ("beta_blue", "1"),
        ("beta_red", "1"),
        ("eta_blue", "1"),
        ("eta_red", "1"),
        ("b_field_z", "T"),
        ("g_transition", "1"),
        ("g_electron", "1"),
        ("t0_background", "1"),
    ];

    fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "gamma_vertical" => self.gamma_vertical,
            "gamma_diagonal" => self.gamma_diagonal,
            "t1_spin" => self.t1_spin,
            "gamma_dephasing" => self.gamma_dephasing,
            "sigma_spectral_diffusion" => self.sigma_spectral_diffusion,
            "beta_blue" => self.beta_blue,
            "beta_red" => self.beta_red,
            "eta_blue" => self.eta_blue,
            "eta_red" => self.eta_red,
            "b_field_z" => self.b_field_z,
            "g_transition" => self.g_transition,
            "g_electron" => self.g_electron,
            "t0_background" => self.t0_background,
            _ => return None,
        })
    }

    fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "gamma_vertical" => &mut self.gamma_vertical,
            "gamma_diagonal" => &mut self.gamma_diagonal,
            "t1_spin" => &mut self.t1_spin,
            "gamma_dephasing" => &mut self.gamma_dephasing,
            "sigma_spectral_diffusion" => &mut self.sigma_spectral_diffusion,
            "beta_blue" => &mut self.beta_blue,
            "beta_red" => &mut self.beta_red,
            "eta_blue" => &mut self.eta_blue,
            "eta_red" => &mut self.eta_red,
            "b_field_z" => &mut self.b_field_z,
            "g_transition" => &mut self.g_transition,
            "g_electron" => &mut self.g_electron,
            "t0_background" => &mut self.t0_background,
            _ => return false,
        };
        *slot = value;
        true
    }

    fn validate(&self) -> Result<()> {
        positive("gamma_vertical", self.gamma_vertical)?;
        positive("gamma_diagonal", self.gamma_diagonal)?;
        // T1 = +inf is allowed: it switches off intrinsic spin relaxation.
        positive("t1_spin", self.t1_spin)?;
        non_negative("gamma_dephasing", self.gamma_dephasing)?;
        non_negative("sigma_spectral_diffusion", self.sigma_spectral_diffusion)?;
        for (name, b) in [("beta_blue", self.beta_blue), ("beta_red", self.beta_red)] {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::invalid(name, format!("must lie in [0, 1], got {b}")));
            }
        }
        non_negative("eta_blue", self.eta_blue)?;
        non_negative("eta_red", self.eta_red)?;
        finite("b_field_z", self.b_field_z)?;
        finite("g_transition", self.g_transition)?;
        finite("g_electron", self.g_electron)?;
        if !(self.t0_background > 0.0 && self.t0_background <= 1.0) {
            return Err(Error::invalid(
                "t0_background",
                format!("must lie in (0, 1], got {}", self.t0_background),
            ));
        }
        Ok(())
    }
}
