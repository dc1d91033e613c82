//! `qdspin` command line: one subcommand per experiment, JSON config in,
//! CSV + JSON + plot script + manifest out.
//!
//! Exit status is 0 on success, 1 for invalid input and 2 when a solver
//! fails.

pub mod config;
mod plot;

use clap::{Parser, Subcommand};
use serde_json::json;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use crate::error::{Error, Result};
use crate::estimate::{
    bootstrap_uncertainty, fit, synth_dataset, with_uncertainty, Dataset, FitProblem, FreeParameter, ModelSelector,
    ModelState, NoiseModel,
};
use crate::qdcore::constants::{FEMTOJOULE, MICRO_EV};
use crate::qdcore::{Branch, LaserField, ParameterTable, ARTIFACT_VERSION};
use crate::spectro::{
    centre_laser, effective_t1, plateau_map, pump_cycle_energy, pump_probe_cycle_with, switching_contrast,
    switching_energy, t1_recovery_experiment, transmission_observed, transmission_plateau_map, two_color_map,
    CycleOptions, PumpProbeProtocol, PumpProbeResult,
};
use config::{Resolved, RunConfig};

pub use config::BUNDLED_CONFIG;

#[derive(Debug, Parser)]
#[command(name = "qdspin", version, about = "Charged quantum-dot spin pumping and photon switching")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration. Defaults to the bundled profile.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "QDSPIN_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true, env = "QDSPIN_THREADS")]
    pub threads: Option<usize>,
    /// Validate the configuration and exit without running.
    #[arg(long, global = true)]
    pub check: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Resonance-fluorescence map over laser energy and bias.
    PlateauMap,
    /// Plateau map with a second, fixed repump laser.
    TwoColorMap,
    /// Transmission dip of one transition.
    Transmission,
    /// Pump-probe transmission over probe energy and bias.
    TransmissionMap,
    /// Pump-probe cycle at one bias with both pump colours.
    PumpProbe,
    /// Dark recovery of the pumped spin and its lifetime fit.
    T1Recovery,
    /// Fit a model to a dataset.
    Fit,
    /// Pump energy per cycle and per switched photon.
    SwitchEnergy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PlateauMap => "plateau-map",
            Command::TwoColorMap => "two-color-map",
            Command::Transmission => "transmission",
            Command::TransmissionMap => "transmission-map",
            Command::PumpProbe => "pump-probe",
            Command::T1Recovery => "t1-recovery",
            Command::Fit => "fit",
            Command::SwitchEnergy => "switch-energy",
        }
    }
}

/// Files written by one run.
struct Outputs {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl Outputs {
    fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Outputs {
            dir,
            artifacts: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &serde_json::Value) -> Result<()> {
        self.write(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }

    fn finish(mut self, command: Command, resolved: &serde_json::Value) -> Result<Vec<String>> {
        let mut artifacts = self.artifacts.clone();
        artifacts.push("manifest.json".into());
        let manifest = json!({
            "tool": "qdspin",
            "version": ARTIFACT_VERSION,
            "subcommand": command.name(),
            "artifacts": artifacts,
            "resolved_config": resolved,
        });
        self.write_json("manifest.json", &manifest)?;
        Ok(self.artifacts)
    }
}

/// What a successful run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub lines: Vec<String>,
    pub out_dir: Option<PathBuf>,
    pub artifacts: Vec<String>,
}

/// Rounds to 12 significant digits for display.
fn tidy(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::bundled(),
    };
    if let Some(out) = &cli.out {
        config.out_dir = Some(out.clone());
    }
    if let Some(t) = cli.threads {
        config.threads = Some(t);
    }
    if let Some(s) = cli.seed {
        config.seed = Some(s);
    }
    Ok(config)
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Report> {
    let resolved = load_config(cli)?.resolve()?;
    validate_block(cli.command, &resolved)?;
    if cli.check {
        return Ok(Report {
            lines: vec![format!("{}: configuration ok", cli.command.name())],
            out_dir: None,
            artifacts: Vec::new(),
        });
    }
    let dir = resolved
        .config
        .out_dir
        .clone()
        .unwrap_or_else(|| Path::new("qdspin-out").join(cli.command.name()));
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = resolved.config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut out = Outputs::new(dir.clone())?;
    let lines = pool.install(|| dispatch(cli.command, &resolved, &mut out))?;
    let artifacts = out.finish(cli.command, &resolved.to_json())?;
    Ok(Report {
        lines,
        out_dir: Some(dir),
        artifacts,
    })
}

fn validate_block(command: Command, r: &Resolved) -> Result<()> {
    r.checked_params()?;
    r.device().validate()?;
    match command {
        Command::PlateauMap => r.plateau_map().map(|_| ()),
        Command::TwoColorMap => r.two_color_map().map(|_| ()),
        Command::Transmission => r.transmission().map(|_| ()),
        Command::TransmissionMap => r.transmission_map().map(|_| ()),
        Command::PumpProbe => r.pump_probe().map(|_| ()),
        Command::T1Recovery => r.t1_recovery().map(|_| ()),
        Command::Fit => {
            let c = r.fit()?;
            fit_problem(r, c, None)?.validate()
        }
        Command::SwitchEnergy => r.switch_energy().map(|_| ()),
    }
}

fn dispatch(command: Command, r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    match command {
        Command::PlateauMap => run_plateau_map(r, out),
        Command::TwoColorMap => run_two_color_map(r, out),
        Command::Transmission => run_transmission(r, out),
        Command::TransmissionMap => run_transmission_map(r, out),
        Command::PumpProbe => run_pump_probe(r, out),
        Command::T1Recovery => run_t1_recovery(r, out),
        Command::Fit => run_fit(r, out),
        Command::SwitchEnergy => run_switch_energy(r, out),
    }
}

fn run_plateau_map(r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    let c = r.plateau_map()?;
    let mut params = r.params();
    if let Some(b) = c.b_field_z {
        params.b_field_z = b;
    }
    let device = r.device();
    let template = LaserField::top(0.0, c.rabi, &params);
    let map = plateau_map(&params, &device, &template, &c.energy.values(), &c.voltage.values())?;
    out.write("plateau_map.csv", &map.to_csv_string())?;
    out.write_json("plateau_map.json", &map.metadata_json(json!({ "block": c, "b_field_z": params.b_field_z })))?;
    out.write("plateau_map.py", &plot::map_script("plateau_map.csv", "resonance fluorescence", "counts (arb.)"))?;
    Ok(vec![format!(
        "plateau-map: {} x {} points, max intensity {:.4e}",
        map.nx(),
        map.ny(),
        map.max()
    )])
}

fn run_two_color_map(r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    let c = r.two_color_map()?;
    let (params, device) = (r.params(), r.device());
    let fixed = centre_laser(&params, &device, c.fixed_branch, c.fixed_rabi);
    let scanned = LaserField::top(0.0, c.rabi, &params);
    let map = two_color_map(&params, &device, &fixed, &scanned, &c.energy.values(), &c.voltage.values())?;
    let (ix, iy, peak) = map.argmax();
    out.write("two_color_map.csv", &map.to_csv_string())?;
    out.write_json(
        "two_color_map.json",
        &map.metadata_json(json!({
            "block": c,
            "fixed_laser": fixed,
            "voltage_shift": device.two_color_voltage_shift,
            "brightest": { "energy": map.x_axis[ix], "voltage": map.y_axis[iy], "value": peak },
        })),
    )?;
    out.write("two_color_map.py", &plot::map_script("two_color_map.csv", "two-colour fluorescence", "counts (arb.)"))?;
    Ok(vec![format!(
        "two-color-map: brightest point at {:.6} eV, {:.4} V (voltage shift {} mV)",
        map.x_axis[ix],
        map.y_axis[iy],
        tidy(device.two_color_voltage_shift * 1e3)
    )])
}

fn run_transmission(r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    let c = r.transmission()?;
    let params = r.params();
    let spectrum = transmission_observed(&c.detuning.values(), params.beta(c.branch), &params)?;
    out.write("transmission.csv", &spectrum.to_csv_string())?;
    out.write_json(
        "transmission.json",
        &spectrum.metadata_json(json!({ "block": c, "beta": params.beta(c.branch) })),
    )?;
    out.write("transmission.py", &plot::transmission_script("transmission.csv"))?;
    Ok(vec![format!(
        "transmission: contrast {:.4}, FWHM {:.3} ueV",
        spectrum.contrast,
        spectrum.fwhm / MICRO_EV
    )])
}

fn run_transmission_map(r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    let c = r.transmission_map()?;
    let (params, device) = (r.params(), r.device());
    let protocol = c.pump.protocol(c.protocol, &params);
    let map = transmission_plateau_map(&params, &device, &protocol, &c.energy.values(), &c.voltage.values())?;
    out.write("transmission_map.csv", &map.to_csv_string())?;
    out.write_json("transmission_map.json", &map.metadata_json(json!({ "block": c, "protocol": protocol })))?;
    out.write("transmission_map.py", &plot::map_script("transmission_map.csv", "probe transmission", "T"))?;
    Ok(vec![format!(
        "transmission-map: {} x {} points, minimum transmission {:.4}",
        map.nx(),
        map.ny(),
        map.min()
    )])
}

fn run_pump_probe(r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    let c = r.pump_probe()?;
    let (params, device) = (r.params(), r.device());
    let v = c.voltage.unwrap_or_else(|| device.plateau_center());
    let probe_energy = device.transition_energy(&params, v, Branch::Blue);
    let options = CycleOptions {
        samples_per_step: c.samples_per_step,
    };
    let on_protocol = PumpProbeProtocol {
        pump_offset: 0.0,
        ..c.protocol
    };
    let off_protocol = PumpProbeProtocol {
        pump_offset: -params.zeeman_splitting(),
        ..c.protocol
    };
    let on = pump_probe_cycle_with(&on_protocol.sequence(probe_energy, &params), &params, &device, v, options)?;
    let off = pump_probe_cycle_with(&off_protocol.sequence(probe_energy, &params), &params, &device, v, options)?;
    let t0 = params.t0_background;
    let transmission = |res: &PumpProbeResult| {
        res.windows
            .iter()
            .find_map(|w| w.transmission)
            .ok_or_else(|| Error::Config("sequence records no probe".into()))
    };
    let (t_on, t_off) = (transmission(&on)?, transmission(&off)?);
    let ratio = switching_contrast(t_on, t_off, t0)?;

    let mut csv = String::from("time");
    for tag in ["blue_pump", "red_pump"] {
        for level in ["up", "down", "trion_up", "trion_down"] {
            csv.push_str(&format!(",{tag}_{level}"));
        }
    }
    csv.push('\n');
    for (a, b) in on.trace.iter().zip(&off.trace) {
        csv.push_str(&a.time.to_string());
        for p in a.populations.iter().chain(&b.populations) {
            csv.push(',');
            csv.push_str(&p.to_string());
        }
        csv.push('\n');
    }
    out.write("pump_probe_trace.csv", &csv)?;
    out.write_json(
        "pump_probe.json",
        &json!({
            "voltage": v,
            "probe_energy": probe_energy,
            "t0_background": t0,
            "blue_pump": { "protocol": on_protocol, "transmission": t_on, "normalized": t_on / t0,
                           "cycles": on.cycles, "windows": on.windows },
            "red_pump": { "protocol": off_protocol, "transmission": t_off, "normalized": t_off / t0,
                          "cycles": off.cycles, "windows": off.windows },
            "switching_contrast": if ratio.is_finite() { json!(ratio) } else { json!("infinite") },
            "artifact_version": ARTIFACT_VERSION,
        }),
    )?;
    out.write("pump_probe_trace.py", &plot::trace_script("pump_probe_trace.csv"))?;
    Ok(vec![
        format!("pump-probe: T/T0 with blue pump {:.4}", t_on / t0),
        format!("pump-probe: T/T0 with red pump  {:.4}", t_off / t0),
        format!("pump-probe: switching contrast ratio {ratio:.3}"),
    ])
}

fn recovery_fit_problem(data: Dataset, r: &Resolved) -> FitProblem {
    FitProblem {
        dataset: data,
        model: ModelSelector::RecoveryCurve {
            voltage: None,
            pump: None,
        },
        free: vec![
            FreeParameter::new("t1_eff", 1e-8, 1e-3, 1e-6),
            FreeParameter::new("s0", 0.0, 1.0, 0.1),
            FreeParameter::new("s_inf", 0.0, 1.0, 0.4),
        ],
        params: r.params(),
        device: r.device(),
        fixed: Default::default(),
    }
}

fn run_t1_recovery(r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    let c = r.t1_recovery()?;
    let (params, device) = (r.params(), r.device());
    let v = c.voltage.unwrap_or_else(|| device.plateau_center());
    let pump = LaserField::top(device.transition_energy(&params, v, c.pump_branch), c.pump_rabi, &params);
    let points = t1_recovery_experiment(&params, &device, v, &pump, &c.delays.values())?;
    let kappa = device.cotunneling_rate(v)?;
    let expected = effective_t1(&params, kappa);
    let data = Dataset::new(
        points.iter().map(|p| p.0).collect(),
        points.iter().map(|p| p.1).collect(),
    );
    let mut lines = Vec::new();
    let mut summary = json!({
        "voltage": v,
        "pump": pump,
        "kappa": kappa,
        "expected_t1_eff": expected,
        "artifact_version": ARTIFACT_VERSION,
    });
    let mut csv = String::from("x,y");
    let fitted = if c.fit {
        let problem = recovery_fit_problem(data.clone(), r);
        let result = fit(&problem)?;
        let curve = problem.predict(&result.raw_values())?;
        summary["fit"] = serde_json::to_value(&result)?;
        lines.push(format!(
            "t1-recovery: fitted T1_eff {:.4} us (expected {:.4} us)",
            result.value("t1_eff").unwrap_or(f64::NAN) * 1e6,
            expected * 1e6
        ));
        csv.push_str(",model");
        Some(curve)
    } else {
        None
    };
    csv.push('\n');
    for i in 0..data.len() {
        csv.push_str(&format!("{},{}", data.x[i], data.y[i]));
        if let Some(m) = &fitted {
            csv.push_str(&format!(",{}", m[i]));
        }
        csv.push('\n');
    }
    out.write("t1_recovery.csv", &csv)?;
    out.write_json("t1_recovery.json", &summary)?;
    out.write(
        "t1_recovery.py",
        &plot::xy_fit_script("t1_recovery.csv", "delay (us)", 1e6, "repumped population"),
    )?;
    if lines.is_empty() {
        lines.push(format!("t1-recovery: {} delays simulated", data.len()));
    }
    Ok(lines)
}

fn fit_problem(r: &Resolved, c: &config::FitConfig, seed: Option<u64>) -> Result<FitProblem> {
    let (params, device) = (r.params(), r.device());
    let dataset = match (&c.dataset, &c.synthetic) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Dataset::from_csv_str(&text)?
        }
        (None, Some(s)) => {
            let x = s.x.values();
            match seed {
                Some(seed) => {
                    let mut state = ModelState::new(&c.model, params, device);
                    for (k, v) in c.fixed.iter().chain(&s.truth) {
                        state.set(k, *v)?;
                    }
                    synth_dataset(&c.model, &state, &x, NoiseModel { sigma: s.noise_sigma, seed })?
                }
                // Validation only needs the shape of the data.
                None => Dataset::new(x.clone(), vec![1.0; x.len()]),
            }
        }
        (None, None) => return Err(Error::Config("fit needs a dataset".into())),
    };
    Ok(FitProblem {
        dataset,
        model: c.model.clone(),
        free: c.free.clone(),
        params,
        device,
        fixed: c.fixed.clone(),
    })
}

fn run_fit(r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    let c = r.fit()?;
    let seed = r.config.seed.unwrap_or(0);
    let problem = fit_problem(r, c, Some(seed))?;
    let mut result = fit(&problem)?;
    let mut lines = Vec::new();
    if let Some(n) = c.bootstrap {
        let report = bootstrap_uncertainty(&problem, &result, n, seed)?;
        if report.failed > 0 {
            lines.push(format!("fit: {} of {} bootstrap fits did not converge", report.failed, n));
        }
        result = with_uncertainty(result, &report);
    }
    let model = problem.predict(&result.raw_values())?;
    let mut csv = String::from("x,y,model\n");
    for i in 0..problem.dataset.len() {
        csv.push_str(&format!("{},{},{}\n", problem.dataset.x[i], problem.dataset.y[i], model[i]));
    }
    out.write("fit_data.csv", &csv)?;
    out.write_json("fit_problem.json", &serde_json::to_value(&problem)?)?;
    out.write_json("fit_result.json", &serde_json::to_value(&result)?)?;
    let (xlabel, scale) = match problem.model {
        ModelSelector::PlateauLineCut { .. } => ("bias (mV)", 1e3),
        ModelSelector::RecoveryCurve { .. } => ("delay (us)", 1e6),
        ModelSelector::TransmissionSpectrum { .. } => ("detuning (ueV)", 1e6),
    };
    out.write("fit.py", &plot::xy_fit_script("fit_data.csv", xlabel, scale, "signal"))?;
    for (name, v) in &result.values {
        let err = result
            .uncertainty
            .as_ref()
            .and_then(|u| u.iter().find(|(n, _)| n == name).map(|(_, s)| *s));
        lines.push(match err {
            Some(s) => format!("fit: {name} = {v:.6e} +/- {s:.2e}"),
            None => format!("fit: {name} = {v:.6e}"),
        });
    }
    lines.push(format!(
        "fit: rss {:.4e}, {} evaluations, converged {}",
        result.rss, result.evaluations, result.converged
    ));
    Ok(lines)
}

fn run_switch_energy(r: &Resolved, out: &mut Outputs) -> Result<Vec<String>> {
    let c = r.switch_energy()?;
    let params = r.params();
    let photons = c.photons_per_cycle.unwrap_or_else(|| tidy(params.photons_per_cycle()));
    let per_cycle = pump_cycle_energy(c.pump_power, c.pump_duration);
    let per_photon = switching_energy(c.pump_power, c.pump_duration, photons)?;
    out.write(
        "switch_energy.csv",
        &format!(
            "pump_power_w,pump_duration_s,photons_per_cycle,energy_per_cycle_j,energy_per_photon_j\n{},{},{},{},{}\n",
            c.pump_power, c.pump_duration, photons, per_cycle, per_photon
        ),
    )?;
    out.write_json(
        "switch_energy.json",
        &json!({
            "block": c,
            "photons_per_cycle": photons,
            "energy_per_cycle_fj": tidy(per_cycle / FEMTOJOULE),
            "energy_per_photon_fj": tidy(per_photon / FEMTOJOULE),
            "artifact_version": ARTIFACT_VERSION,
        }),
    )?;
    out.write("switch_energy.py", &plot::energy_script("switch_energy.csv"))?;
    Ok(vec![
        format!("pump energy: {} fJ/cycle", tidy(per_cycle / FEMTOJOULE)),
        format!("photons per cycle: {}", tidy(photons)),
        format!("switching energy: {} fJ/photon", tidy(per_photon / FEMTOJOULE)),
    ])
}

/// Exit status for an error.
pub fn exit_code(error: &Error) -> u8 {
    if error.is_solver_failure() {
        2
    } else {
        1
    }
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            if let Some(dir) = &report.out_dir {
                println!("wrote {} files to {}", report.artifacts.len(), dir.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
