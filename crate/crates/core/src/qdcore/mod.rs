//! Domain types, units and the static device model.

pub mod constants;
mod density;
mod device;
mod laser;
mod map;
mod params;
mod table;

pub use density::{DensityMatrix4, Level, HERMITIAN_TOL, POSITIVITY_TOL, TRACE_TOL};
pub use device::{ChargeState, DeviceModel};
pub use laser::{default_cutoff, LaserField, Port, DEFAULT_CUTOFF_LINEWIDTHS};
pub use map::{check_axis, linspace, parameter_hash, Map2D, MapMetadata, ARTIFACT_VERSION};
pub use params::{Branch, SystemParams};
pub use table::{Entry, ParameterFile, ParameterTable};

/// Free-function form of [`DeviceModel::transition_energy`].
pub fn transition_energy(device: &DeviceModel, params: &SystemParams, v: f64, branch: Branch) -> f64 {
    device.transition_energy(params, v, branch)
}

/// Free-function form of [`DeviceModel::cotunneling_rate`].
pub fn cotunneling_rate(device: &DeviceModel, v: f64) -> crate::Result<f64> {
    device.cotunneling_rate(v)
}

/// Free-function form of [`DeviceModel::charge_state`].
pub fn charge_state(device: &DeviceModel, v: f64) -> ChargeState {
    device.charge_state(v)
}
