//! Spin-preparation fidelity and its recovery in the dark.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouville::{propagate, steady_state, Liouvillian};
use crate::qdcore::{DensityMatrix4, DeviceModel, LaserField, Level, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinTarget {
    Up,
    Down,
}

impl SpinTarget {
    pub fn level(self) -> Level {
        match self {
            SpinTarget::Up => Level::Up,
            SpinTarget::Down => Level::Down,
        }
    }
}

/// Population of the target ground state.
pub fn preparation_fidelity(rho: &DensityMatrix4, target: SpinTarget) -> f64 {
    rho.population(target.level()).clamp(0.0, 1.0)
}

/// Fidelity inferred from RF intensities, assuming the edge state is an
/// equal spin mixture: `1 − i_center / (2·i_edge)`.
pub fn fidelity_from_intensity_ratio(i_center: f64, i_edge: f64) -> Result<f64> {
    if !(i_edge > 0.0) || !(i_center >= 0.0) {
        return Err(Error::InvalidRatio {
            center: i_center,
            edge: i_edge,
        });
    }
    if i_center > 2.0 * i_edge {
        return Err(Error::InvalidRatio {
            center: i_center,
            edge: i_edge,
        });
    }
    Ok((1.0 - i_center / (2.0 * i_edge)).clamp(0.0, 1.0))
}

/// Spin state the pump shelves the electron in.
pub fn pumped_target(l: &Liouvillian) -> Result<SpinTarget> {
    let f = l.frame();
    match (f.drives_branch(crate::qdcore::Branch::Blue), f.drives_branch(crate::qdcore::Branch::Red)) {
        (true, false) => Ok(SpinTarget::Down),
        (false, true) => Ok(SpinTarget::Up),
        _ => Err(Error::invalid("pump", "pump must drive exactly one transition")),
    }
}

/// Recovery after optical pumping: pump to steady state, wait `τ` in the
/// dark, report `1 − p_target(τ)`, the population that has returned to
/// the pumped-out spin state (plus any residual trion population at τ = 0).
pub fn t1_recovery_experiment(
    params: &SystemParams,
    device: &DeviceModel,
    v: f64,
    pump: &LaserField,
    delays: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if let Some(bad) = delays.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
        return Err(Error::invalid("delays", format!("delay {bad} must be >= 0")));
    }
    let l_pump = Liouvillian::build(params, device, v, std::slice::from_ref(pump))?;
    let target = pumped_target(&l_pump)?;
    let prepared = steady_state(&l_pump)?;
    let dark = Liouvillian::build(params, device, v, &[])?;
    delays
        .iter()
        .map(|&tau| {
            let rho = propagate(&dark, &prepared, tau)?;
            Ok((tau, 1.0 - rho.population(target.level())))
        })
        .collect()
}

/// Effective dark spin lifetime `1 / (1/T1 + κ)`.
pub fn effective_t1(params: &SystemParams, kappa: f64) -> f64 {
    1.0 / (1.0 / params.t1_spin + kappa)
}

/// `s∞ − (s∞ − s0)·exp(−τ/T1_eff)`.
pub fn recovery_curve(tau: f64, s0: f64, s_inf: f64, t1_eff: f64) -> f64 {
    s_inf - (s_inf - s0) * (-tau / t1_eff).exp()
}
