//! Switching contrast and energy cost.

use crate::error::{Error, Result};
use crate::qdcore::SystemParams;

/// Ratio of dip contrasts `C_off / C_on`, `C_x = (t0 − t_x)/t0`.
///
/// "On" is the transparent preparation. Returns `f64::INFINITY` when the
/// on-state shows no dip at all.
pub fn switching_contrast(t_on: f64, t_off: f64, t0: f64) -> Result<f64> {
    for (name, t) in [("t_on", t_on), ("t_off", t_off)] {
        if !(t > 0.0 && t <= t0) {
            return Err(Error::invalid(name, format!("must lie in (0, t0 = {t0}], got {t}")));
        }
    }
    let c_on = (t0 - t_on) / t0;
    let c_off = (t0 - t_off) / t0;
    if c_on == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(c_off / c_on)
}

/// Pump energy spent per switched photon, J.
pub fn switching_energy(pump_power: f64, pump_duration: f64, photons_per_cycle: f64) -> Result<f64> {
    if !(pump_power >= 0.0) || !(pump_duration > 0.0) || !(photons_per_cycle > 0.0) {
        return Err(Error::invalid(
            "switching_energy",
            "power must be >= 0, duration and photon count > 0",
        ));
    }
    Ok(pump_power * pump_duration / photons_per_cycle)
}

/// Pump energy per cycle, J.
pub fn pump_cycle_energy(pump_power: f64, pump_duration: f64) -> f64 {
    pump_power * pump_duration
}

/// Photons scattered before a diagonal decay flips the spin, `Γ/γ`.
pub fn photons_per_cycle(params: &SystemParams) -> f64 {
    params.photons_per_cycle()
}
