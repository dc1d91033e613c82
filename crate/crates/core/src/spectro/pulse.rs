//! Pulsed pump-probe sequences.

use nalgebra::SVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fluorescence::diffusion_grid;
use crate::error::{Error, Result};
use crate::liouville::{dissipator, propagator, propagator_with_average, Liouvillian, LocalConditions, SuperOp};
use crate::qdcore::{
    check_axis, parameter_hash, Branch, ChargeState, DensityMatrix4, DeviceModel, LaserField, Map2D, MapMetadata,
    ParameterTable, Port, SystemParams,
};

/// Cycle-to-cycle population change that counts as periodic.
pub const CYCLE_TOLERANCE: f64 = 1e-8;
/// Weak-probe bound on Ω²/Γ' in units of Γ.
pub const WEAK_PROBE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseStep {
    /// Seconds. May be zero for a step that is not recorded.
    pub duration: f64,
    pub lasers: Vec<LaserField>,
    pub record: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub steps: Vec<PulseStep>,
    /// Upper bound on cycles spent reaching the periodic state.
    pub repetitions: usize,
}

impl PulseSequence {
    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::invalid("steps", "sequence is empty"));
        }
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions", "must be >= 1"));
        }
        if !self.steps.iter().any(|s| s.record) {
            return Err(Error::invalid("steps", "no step is recorded"));
        }
        for (i, s) in self.steps.iter().enumerate() {
            if !(s.duration >= 0.0 && s.duration.is_finite()) || (s.record && s.duration == 0.0) {
                return Err(Error::invalid(
                    "duration",
                    format!("step {i}: {} s is not a valid duration", s.duration),
                ));
            }
            for l in &s.lasers {
                l.validate()?;
            }
            if s.lasers.iter().filter(|l| l.port == Port::WaveguideLeft).count() > 1 {
                return Err(Error::invalid("lasers", format!("step {i} has more than one probe")));
            }
        }
        Ok(())
    }
}

/// Reject probes that would saturate the transition.
pub fn check_weak_probe(probe: &LaserField, params: &SystemParams) -> Result<()> {
    let ratio = probe.rabi * probe.rabi / params.coherence_width() / params.gamma_vertical;
    if ratio >= WEAK_PROBE_LIMIT {
        return Err(Error::ProbeNotWeak { ratio });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSample {
    /// Seconds since the start of the cycle.
    pub time: f64,
    /// p↑, p↓, p⇑, p⇓.
    pub populations: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedWindow {
    pub step: usize,
    pub start: f64,
    pub duration: f64,
    pub mean_populations: [f64; 4],
    /// Probe transmission averaged over the window, if a probe is on.
    pub transmission: Option<f64>,
    /// `transmission / t0_background`.
    pub normalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpProbeResult {
    /// Cycles needed to reach the periodic state (worst spectral offset).
    pub cycles: usize,
    pub trace: Vec<PopulationSample>,
    pub windows: Vec<RecordedWindow>,
}

impl PumpProbeResult {
    /// Normalized transmission of the first window carrying a probe.
    pub fn normalized_transmission(&self) -> Option<f64> {
        self.windows.iter().find_map(|w| w.normalized)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleOptions {
    /// Trace points per step in addition to the cycle start.
    pub samples_per_step: usize,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions { samples_per_step: 8 }
    }
}

type Vec16 = SVector<Complex64, 16>;

struct CompiledStep {
    prop: SuperOp,
    average: Option<SuperOp>,
    sample: Option<SuperOp>,
}

fn compile(l: &Liouvillian, step: &PulseStep, samples: usize) -> Result<CompiledStep> {
    let (prop, average) = if step.record {
        let (p, a) = propagator_with_average(l, step.duration)?;
        (p, Some(a))
    } else {
        (propagator(l, step.duration)?, None)
    };
    let sample = if samples > 0 && step.duration > 0.0 {
        Some(propagator(l, step.duration / samples as f64)?)
    } else {
        None
    };
    Ok(CompiledStep { prop, average, sample })
}

fn populations(v: &Vec16) -> [f64; 4] {
    [v[0].re, v[5].re, v[10].re, v[15].re]
}

/// Probe transmission at one spectral offset for the given populations.
fn probe_transmission(p: &[f64; 4], probe_delta_blue: f64, offset: f64, params: &SystemParams) -> f64 {
    let blue = super::transmission::transmission_amplitude(probe_delta_blue - offset, params.beta_blue, params);
    let red = super::transmission::transmission_amplitude(
        probe_delta_blue + params.zeeman_splitting() - offset,
        params.beta_red,
        params,
    );
    params.t0_background * (p[0] * blue.norm_sqr() + p[1] * red.norm_sqr() + (1.0 - p[0] - p[1]))
}

/// Runs `seq` to its periodic state at bias `v` and records the probe.
///
/// Top-port lasers enter the generator; waveguide lasers are weak probes
/// and only read out the state. Spectral diffusion is quasi-static over a
/// whole cycle, so pump and probe see the same offset of the transitions.
pub fn pump_probe_cycle(
    seq: &PulseSequence,
    params: &SystemParams,
    device: &DeviceModel,
    v: f64,
) -> Result<PumpProbeResult> {
    pump_probe_cycle_with(seq, params, device, v, CycleOptions::default())
}

pub fn pump_probe_cycle_with(
    seq: &PulseSequence,
    params: &SystemParams,
    device: &DeviceModel,
    v: f64,
    options: CycleOptions,
) -> Result<PumpProbeResult> {
    seq.validate()?;
    params.validate()?;
    let cond = LocalConditions::at(params, device, v)?;
    let base = dissipator(params, cond.kappa);
    let grid = diffusion_grid(params);
    let samples = options.samples_per_step;

    let mut tops = Vec::with_capacity(seq.steps.len());
    let mut probes = Vec::with_capacity(seq.steps.len());
    for step in &seq.steps {
        let probe = step.lasers.iter().find(|l| l.port == Port::WaveguideLeft).copied();
        if let Some(p) = &probe {
            check_weak_probe(p, params)?;
        }
        probes.push(probe);
        tops.push(
            step.lasers
                .iter()
                .filter(|l| l.port == Port::TopIllumination)
                .copied()
                .collect::<Vec<_>>(),
        );
    }

    // Steps without a coherent drive do not depend on the spectral offset.
    let mut undriven: Vec<Option<CompiledStep>> = (0..seq.steps.len()).map(|_| None).collect();
    let dark = Liouvillian::from_parts(base, Default::default());

    let records: Vec<usize> = (0..seq.steps.len()).filter(|&i| seq.steps[i].record).collect();
    let n_trace = 1 + seq.steps.iter().filter(|s| s.duration > 0.0).count() * samples;

    let mut cycles = 0;
    let mut trace = vec![[0.0; 4]; if samples > 0 { n_trace } else { 0 }];
    let mut window_pops = vec![[0.0; 4]; records.len()];
    let mut window_trans = vec![0.0; records.len()];

    for (delta, w) in grid.offsets.iter().zip(&grid.weights) {
        let local = cond.shifted(*delta);
        let mut driven: Vec<Option<CompiledStep>> = Vec::with_capacity(seq.steps.len());
        for (i, step) in seq.steps.iter().enumerate() {
            let l = Liouvillian::with_dissipator(params, &base, &local, &tops[i])?;
            if l.frame().drives.is_empty() {
                if undriven[i].is_none() {
                    undriven[i] = Some(compile(&dark, step, samples)?);
                }
                driven.push(None);
            } else {
                driven.push(Some(compile(&l, step, samples)?));
            }
        }
        let compiled: Vec<&CompiledStep> = (0..seq.steps.len())
            .map(|i| driven[i].as_ref().or(undriven[i].as_ref()).expect("compiled"))
            .collect();

        let mut rho = DensityMatrix4::thermal_ground().to_vector();
        let mut converged = false;
        let mut change = f64::INFINITY;
        let mut used = 0;
        for rep in 1..=seq.repetitions {
            let before = populations(&rho);
            for c in &compiled {
                rho = c.prop * rho;
            }
            let after = populations(&rho);
            change = before
                .iter()
                .zip(&after)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            used = rep;
            if change < CYCLE_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::CycleNotConverged {
                repetitions: seq.repetitions,
                change,
            });
        }
        cycles = cycles.max(used);

        // Recording pass over one periodic cycle.
        let mut k = 0;
        let mut t_idx = 0;
        if samples > 0 {
            add(&mut trace[0], &populations(&rho), *w);
            t_idx = 1;
        }
        for (i, c) in compiled.iter().enumerate() {
            if let Some(avg) = &c.average {
                let mean = populations(&(avg * rho));
                add(&mut window_pops[k], &mean, *w);
                if let Some(probe) = &probes[i] {
                    let probe_delta = probe.energy - cond.blue;
                    window_trans[k] += w * probe_transmission(&mean, probe_delta, *delta, params);
                }
                k += 1;
            }
            if let Some(sp) = &c.sample {
                let mut r = rho;
                for _ in 0..samples {
                    r = sp * r;
                    add(&mut trace[t_idx], &populations(&r), *w);
                    t_idx += 1;
                }
            }
            rho = c.prop * rho;
        }
    }

    let mut times = Vec::with_capacity(n_trace);
    if samples > 0 {
        times.push(0.0);
        let mut t = 0.0;
        for s in &seq.steps {
            if s.duration > 0.0 {
                for j in 1..=samples {
                    times.push(t + s.duration * j as f64 / samples as f64);
                }
            }
            t += s.duration;
        }
    }
    let trace = times
        .into_iter()
        .zip(trace)
        .map(|(time, populations)| PopulationSample { time, populations })
        .collect();

    let mut starts = Vec::with_capacity(seq.steps.len());
    let mut t = 0.0;
    for s in &seq.steps {
        starts.push(t);
        t += s.duration;
    }
    let windows = records
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let has_probe = probes[i].is_some();
            RecordedWindow {
                step: i,
                start: starts[i],
                duration: seq.steps[i].duration,
                mean_populations: window_pops[k],
                transmission: has_probe.then_some(window_trans[k]),
                normalized: has_probe.then_some(window_trans[k] / params.t0_background),
            }
        })
        .collect();
    Ok(PumpProbeResult { cycles, trace, windows })
}

fn add(acc: &mut [f64; 4], p: &[f64; 4], w: f64) {
    for (a, b) in acc.iter_mut().zip(p) {
        *a += w * b;
    }
}

/// Pump from the top, then a weak waveguide probe in the dark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpProbeProtocol {
    pub pump_duration: f64,
    pub pump_rabi: f64,
    /// Pump energy minus probe energy, eV.
    pub pump_offset: f64,
    pub probe_duration: f64,
    pub probe_rabi: f64,
    pub repetitions: usize,
}

impl Default for PumpProbeProtocol {
    fn default() -> Self {
        PumpProbeProtocol {
            pump_duration: 1e-6,
            pump_rabi: 6.5e8,
            pump_offset: 0.0,
            probe_duration: 200e-9,
            probe_rabi: 1e8,
            repetitions: 10_000,
        }
    }
}

impl PumpProbeProtocol {
    /// Pump on the red transition while the probe sits on blue.
    pub fn red_pump(params: &SystemParams) -> Self {
        PumpProbeProtocol {
            pump_offset: -params.zeeman_splitting(),
            ..Default::default()
        }
    }

    pub fn without_pump(self) -> Self {
        PumpProbeProtocol { pump_rabi: 0.0, ..self }
    }

    pub fn sequence(&self, probe_energy: f64, params: &SystemParams) -> PulseSequence {
        let pump = LaserField::top(probe_energy + self.pump_offset, self.pump_rabi, params);
        let probe = LaserField::probe(probe_energy, self.probe_rabi, params);
        PulseSequence {
            steps: vec![
                PulseStep {
                    duration: self.pump_duration,
                    lasers: vec![pump],
                    record: false,
                },
                PulseStep {
                    duration: self.probe_duration,
                    lasers: vec![probe],
                    record: true,
                },
            ],
            repetitions: self.repetitions,
        }
    }
}

/// Probe transmission at the blue resonance of bias `v`.
pub fn switching_point(
    protocol: &PumpProbeProtocol,
    params: &SystemParams,
    device: &DeviceModel,
    v: f64,
) -> Result<PumpProbeResult> {
    let probe_energy = device.transition_energy(params, v, Branch::Blue);
    pump_probe_cycle(&protocol.sequence(probe_energy, params), params, device, v)
}

/// Recorded probe transmission over (probe energy × bias). Outside the
/// plateau the waveguide shows its background `t0`.
pub fn transmission_plateau_map(
    params: &SystemParams,
    device: &DeviceModel,
    protocol: &PumpProbeProtocol,
    energy_grid: &[f64],
    voltage_grid: &[f64],
) -> Result<Map2D> {
    check_axis("energy_grid", energy_grid)?;
    check_axis("voltage_grid", voltage_grid)?;
    let options = CycleOptions { samples_per_step: 0 };
    let rows: Vec<Result<Vec<f64>>> = voltage_grid
        .par_iter()
        .map(|&v| {
            energy_grid
                .iter()
                .map(|&e| {
                    if device.charge_state(v) != ChargeState::OneElectron {
                        return Ok(params.t0_background);
                    }
                    let r = pump_probe_cycle_with(&protocol.sequence(e, params), params, device, v, options)?;
                    Ok(r.windows.iter().find_map(|w| w.transmission).unwrap_or(params.t0_background))
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(energy_grid.len() * voltage_grid.len());
    for row in rows {
        values.extend(row?);
    }
    let hash = parameter_hash(&(params, device, protocol));
    Ok(Map2D::new(energy_grid.to_vec(), voltage_grid.to_vec(), values, "transmission")?.with_metadata(MapMetadata {
        params_hash: hash,
        seed: None,
    }))
}
