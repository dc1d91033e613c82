//! Resonance-fluorescence intensities and plateau maps.

use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::DiffusionGrid;
use crate::error::Result;
use crate::liouville::{dissipator, steady_state_at, LocalConditions};
use crate::qdcore::constants::HBAR;
use crate::qdcore::{
    check_axis, parameter_hash, Branch, ChargeState, DeviceModel, DensityMatrix4, LaserField, Level, Map2D,
    MapMetadata, ParameterTable, SystemParams,
};

/// Rabi frequency used for the standard plateau maps, s⁻¹.
pub const DEFAULT_RF_RABI: f64 = 1.2e9;

/// Detected photon rate `eta_blue·Γ·p⇑ + eta_red·Γ·p⇓`.
pub fn rf_intensity(rho: &DensityMatrix4, params: &SystemParams) -> f64 {
    params.gamma_vertical
        * (params.eta_blue * rho.population(Level::TrionUp) + params.eta_red * rho.population(Level::TrionDown))
}

/// Spectral-diffusion grid resolving the natural coherence width.
pub fn diffusion_grid(params: &SystemParams) -> DiffusionGrid {
    DiffusionGrid::new(
        params.sigma_spectral_diffusion,
        0.5 * HBAR * params.coherence_width(),
    )
}

/// Steady-state observable averaged over quasi-static spectral diffusion.
pub(crate) fn diffusion_average(
    params: &SystemParams,
    grid: &DiffusionGrid,
    cond: &LocalConditions,
    lasers: &[LaserField],
    observable: impl Fn(&DensityMatrix4) -> f64,
) -> Result<f64> {
    let base = dissipator(params, cond.kappa);
    let mut acc = 0.0;
    for (delta, w) in grid.offsets.iter().zip(&grid.weights) {
        let (rho, _) = steady_state_at(params, &base, &cond.shifted(*delta), lasers)?;
        acc += w * observable(&rho);
    }
    Ok(acc)
}

/// Diffusion-averaged RF intensity at bias `v`; zero outside the plateau.
pub fn rf_intensity_at(
    params: &SystemParams,
    device: &DeviceModel,
    v: f64,
    lasers: &[LaserField],
    grid: &DiffusionGrid,
) -> Result<f64> {
    if device.charge_state(v) != ChargeState::OneElectron {
        return Ok(0.0);
    }
    let cond = LocalConditions::at(params, device, v)?;
    diffusion_average(params, grid, &cond, lasers, |rho| rf_intensity(rho, params))
}

#[derive(Serialize)]
struct MapInputs<'a> {
    params: &'a SystemParams,
    device: &'a DeviceModel,
    lasers: Vec<LaserField>,
    voltage_shift: f64,
}

fn evaluate_map(
    params: &SystemParams,
    device: &DeviceModel,
    fixed: Option<&LaserField>,
    template: &LaserField,
    energies: &[f64],
    voltages: &[f64],
    voltage_shift: f64,
) -> Result<Map2D> {
    check_axis("energy_grid", energies)?;
    check_axis("voltage_grid", voltages)?;
    params.validate()?;
    template.validate()?;
    if let Some(l) = fixed {
        l.validate()?;
    }
    let grid = diffusion_grid(params);
    let rows: Vec<Result<Vec<f64>>> = voltages
        .par_iter()
        .map(|&v| {
            let v_eff = v - voltage_shift;
            energies
                .iter()
                .map(|&e| {
                    let scanned = template.with_energy(e);
                    let mut lasers = vec![scanned];
                    lasers.extend(fixed.copied());
                    rf_intensity_at(params, device, v_eff, &lasers, &grid)
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(energies.len() * voltages.len());
    for row in rows {
        values.extend(row?);
    }
    let mut lasers = vec![*template];
    lasers.extend(fixed.copied());
    let hash = parameter_hash(&MapInputs {
        params,
        device,
        lasers,
        voltage_shift,
    });
    Ok(Map2D::new(energies.to_vec(), voltages.to_vec(), values, "rf_intensity")?.with_metadata(MapMetadata {
        params_hash: hash,
        seed: None,
    }))
}

/// RF intensity over (laser energy × bias). Rows are voltages.
pub fn plateau_map(
    params: &SystemParams,
    device: &DeviceModel,
    laser_template: &LaserField,
    energy_grid: &[f64],
    voltage_grid: &[f64],
) -> Result<Map2D> {
    evaluate_map(params, device, None, laser_template, energy_grid, voltage_grid, 0.0)
}

/// Plateau map with a second laser always on. The dot responds at
/// `v − two_color_voltage_shift` to account for screening by the extra
/// photo-created charge.
pub fn two_color_map(
    params: &SystemParams,
    device: &DeviceModel,
    fixed_laser: &LaserField,
    scanned_template: &LaserField,
    energy_grid: &[f64],
    voltage_grid: &[f64],
) -> Result<Map2D> {
    evaluate_map(
        params,
        device,
        Some(fixed_laser),
        scanned_template,
        energy_grid,
        voltage_grid,
        device.two_color_voltage_shift,
    )
}

/// Intensity along the resonance of `branch`: at each bias the laser sits
/// `offset` eV from the transition.
pub fn plateau_line_cut(
    params: &SystemParams,
    device: &DeviceModel,
    laser_template: &LaserField,
    branch: Branch,
    offset: f64,
    voltages: &[f64],
) -> Result<Vec<f64>> {
    params.validate()?;
    laser_template.validate()?;
    let grid = diffusion_grid(params);
    voltages
        .par_iter()
        .map(|&v| {
            let laser = laser_template.with_energy(device.transition_energy(params, v, branch) + offset);
            rf_intensity_at(params, device, v, &[laser], &grid)
        })
        .collect()
}

/// Laser resonant with `branch` at the plateau centre.
pub fn centre_laser(params: &SystemParams, device: &DeviceModel, branch: Branch, rabi: f64) -> LaserField {
    LaserField::top(device.transition_energy(params, device.plateau_center(), branch), rabi, params)
}
