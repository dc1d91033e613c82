//! Physical constants in the unit system used throughout the crate:
//! energies in eV, rates in s⁻¹, times in s, fields in T.

/// Reduced Planck constant, eV·s.
pub const HBAR: f64 = 6.582119569e-16;

/// Bohr magneton, eV/T.
pub const MU_B: f64 = 5.7883818060e-5;

pub const MICRO_EV: f64 = 1e-6;
pub const MILLIVOLT: f64 = 1e-3;
pub const NANOSECOND: f64 = 1e-9;
pub const MICROSECOND: f64 = 1e-6;
pub const FEMTOJOULE: f64 = 1e-15;

/// Converts an energy in eV into an angular rate in s⁻¹.
#[inline]
pub fn energy_to_rate(energy: f64) -> f64 {
    energy / HBAR
}

/// Converts an angular rate in s⁻¹ into an energy in eV.
#[inline]
pub fn rate_to_energy(rate: f64) -> f64 {
    rate * HBAR
}
