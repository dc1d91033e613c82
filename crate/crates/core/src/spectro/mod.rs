//! Observables: RF intensities and plateau maps, transmission spectra,
//! pump-probe switching, fidelities and energy bookkeeping.

mod fidelity;
mod fluorescence;
mod pulse;
pub mod quadrature;
mod switching;
mod transmission;

pub use fidelity::{
    effective_t1, fidelity_from_intensity_ratio, preparation_fidelity, pumped_target, recovery_curve,
    t1_recovery_experiment, SpinTarget,
};
pub use fluorescence::{
    centre_laser, diffusion_grid, plateau_line_cut, plateau_map, rf_intensity, rf_intensity_at, two_color_map,
    DEFAULT_RF_RABI,
};
pub use pulse::{
    check_weak_probe, pump_probe_cycle, pump_probe_cycle_with, switching_point, transmission_plateau_map,
    CycleOptions, PopulationSample, PulseSequence, PulseStep, PumpProbeProtocol, PumpProbeResult, RecordedWindow,
    CYCLE_TOLERANCE, WEAK_PROBE_LIMIT,
};
pub use switching::{photons_per_cycle, pump_cycle_energy, switching_contrast, switching_energy};
pub use transmission::{
    dip_fwhm, observed_transmission, spin_dependent_transmission, transmission_amplitude, transmission_observed,
    TransmissionSpectrum,
};
