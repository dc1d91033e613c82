//! Waveguide transmission past the dot in the weak-probe limit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::quadrature::gaussian_average;
use crate::error::{Error, Result};
use crate::qdcore::constants::HBAR;
use crate::qdcore::{check_axis, Branch, SystemParams, ARTIFACT_VERSION};

/// Amplitude transmission of a single emitter with coupling `beta` at
/// probe detuning `delta` (eV):
/// `1 − β·(Γ_tot/2) / (Γ_tot/2 + γ_dp + iΔ/ħ)`.
pub fn transmission_amplitude(delta: f64, beta: f64, params: &SystemParams) -> Complex64 {
    let half = 0.5 * params.total_decay();
    let denom = Complex64::new(half + params.gamma_dephasing, delta / HBAR);
    Complex64::new(1.0, 0.0) - beta * half / denom
}

/// `|t|²` at one quasi-static offset.
fn bare_power(delta: f64, beta: f64, params: &SystemParams) -> f64 {
    transmission_amplitude(delta, beta, params).norm_sqr()
}

/// Observed transmission `t0·⟨|t(Δ−δ)|²⟩` with δ Gaussian of width σ_SD.
pub fn observed_transmission(delta: f64, beta: f64, params: &SystemParams) -> Result<f64> {
    let sigma = params.sigma_spectral_diffusion;
    let mean = gaussian_average(sigma, |d| bare_power(delta - d, beta, params))?;
    Ok(params.t0_background * mean)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid("beta", format!("must lie in [0, 1], got {beta}")));
    }
    Ok(())
}

/// Full width at half depth of the observed dip, eV.
pub fn dip_fwhm(beta: f64, params: &SystemParams) -> Result<f64> {
    check_beta(beta)?;
    let t0 = params.t0_background;
    let depth = |d: f64| observed_transmission(d, beta, params).map(|t| t0 - t);
    let peak = depth(0.0)?;
    if peak <= 0.0 {
        return Err(Error::invalid("beta", "no dip to measure"));
    }
    let target = 0.5 * peak;
    let mut hi = HBAR * params.total_decay();
    while depth(hi)? > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if depth(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    Ok(lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionSpectrum {
    /// Probe detuning from the transition, eV.
    pub detunings: Vec<f64>,
    /// Observed transmission including the background `t0`.
    pub transmission: Vec<f64>,
    /// `1 − min(T)/t0` over the grid.
    pub contrast: f64,
    /// Full width at half depth, eV.
    pub fwhm: f64,
}

/// Observed dip on `delta_grid`.
pub fn transmission_observed(delta_grid: &[f64], beta: f64, params: &SystemParams) -> Result<TransmissionSpectrum> {
    check_axis("delta_grid", delta_grid)?;
    check_beta(beta)?;
    if !(params.sigma_spectral_diffusion >= 0.0) {
        return Err(Error::invalid("sigma_spectral_diffusion", "must be >= 0"));
    }
    let transmission = delta_grid
        .iter()
        .map(|&d| observed_transmission(d, beta, params))
        .collect::<Result<Vec<_>>>()?;
    let min = transmission.iter().copied().fold(f64::INFINITY, f64::min);
    let fwhm = if beta > 0.0 { dip_fwhm(beta, params)? } else { 0.0 };
    Ok(TransmissionSpectrum {
        detunings: delta_grid.to_vec(),
        contrast: 1.0 - min / params.t0_background,
        transmission,
        fwhm,
    })
}

impl TransmissionSpectrum {
    /// Same layout as [`crate::qdcore::Map2D`]: detunings in the header row,
    /// one data row labelled `transmission`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for d in &self.detunings {
            out.push(',');
            out.push_str(&d.to_string());
        }
        out.push_str("\ntransmission");
        for t in &self.transmission {
            out.push(',');
            out.push_str(&t.to_string());
        }
        out.push('\n');
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn metadata_json(&self, inputs: serde_json::Value) -> serde_json::Value {
        serde_json::json!({
            "observable": "transmission",
            "x_axis": { "quantity": "detuning", "unit": "eV", "len": self.detunings.len() },
            "contrast": self.contrast,
            "fwhm_ev": self.fwhm,
            "inputs": inputs,
            "artifact_version": ARTIFACT_VERSION,
        })
    }
}

/// Probe transmission for a ground-state mixture. The probe sits
/// `probe_delta_blue` eV from the blue transition; the red transition is
/// `Δ_Z` lower. Trion population is treated as transparent background.
pub fn spin_dependent_transmission(
    ground_populations: (f64, f64),
    probe_delta_blue: f64,
    params: &SystemParams,
) -> Result<f64> {
    let (p_up, p_down) = ground_populations;
    if p_up < -1e-9 || p_down < -1e-9 || p_up + p_down > 1.0 + 1e-9 {
        return Err(Error::invalid(
            "ground_populations",
            format!("need p_up, p_down >= 0 and p_up + p_down <= 1, got ({p_up}, {p_down})"),
        ));
    }
    let blue = observed_transmission(probe_delta_blue, params.beta(Branch::Blue), params)?;
    let red = observed_transmission(
        probe_delta_blue + params.zeeman_splitting(),
        params.beta(Branch::Red),
        params,
    )?;
    Ok(p_up * blue + p_down * red + (1.0 - p_up - p_down) * params.t0_background)
}
