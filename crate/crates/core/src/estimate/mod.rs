//! Least-squares fitting of line cuts, recovery curves and transmission
//! spectra, synthetic data and bootstrap uncertainties.

mod model;
mod simplex;

pub use model::{is_log_scaled, ModelSelector, ModelState, DEFAULT_RECOVERY_PUMP_RABI};
pub use simplex::{minimize_unit_box, SimplexOptions, SimplexOutcome};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::qdcore::{DeviceModel, SystemParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default)]
    pub sigma: Option<Vec<f64>>,
    /// Seed of the noise realization, for synthetic data.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Dataset {
            x,
            y,
            sigma: None,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.len() != self.x.len() {
            return Err(Error::InvalidFit(format!(
                "x has {} points but y has {}",
                self.x.len(),
                self.y.len()
            )));
        }
        if let Some(s) = &self.sigma {
            if s.len() != self.x.len() {
                return Err(Error::InvalidFit("sigma length differs from x".into()));
            }
            if s.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::InvalidFit("sigma entries must be > 0".into()));
            }
        }
        if self.x.iter().chain(&self.y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidFit("dataset has non-finite values".into()));
        }
        Ok(())
    }

    /// Two- or three-column CSV with a header row.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(if self.sigma.is_some() { "x,y,sigma\n" } else { "x,y\n" });
        for i in 0..self.len() {
            out.push_str(&format!("{},{}", self.x[i], self.y[i]));
            if let Some(s) = &self.sigma {
                out.push_str(&format!(",{}", s[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let columns = reader.headers()?.len();
        if !(2..=3).contains(&columns) {
            return Err(Error::Config(format!("dataset CSV needs 2 or 3 columns, found {columns}")));
        }
        let (mut x, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
        for record in reader.records() {
            let record = record?;
            let cell = |i: usize| -> Result<f64> {
                let raw = record.get(i).unwrap_or("");
                raw.trim()
                    .parse()
                    .map_err(|e| Error::Config(format!("bad number `{raw}`: {e}")))
            };
            x.push(cell(0)?);
            y.push(cell(1)?);
            if columns == 3 {
                s.push(cell(2)?);
            }
        }
        let ds = Dataset {
            x,
            y,
            sigma: (columns == 3).then_some(s),
            seed: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeParameter {
    pub name: String,
    pub low: f64,
    pub high: f64,
    pub initial: f64,
    /// Defaults to log space for rates and times.
    #[serde(default)]
    pub log: Option<bool>,
}

impl FreeParameter {
    pub fn new(name: &str, low: f64, high: f64, initial: f64) -> Self {
        FreeParameter {
            name: name.into(),
            low,
            high,
            initial,
            log: None,
        }
    }

    pub fn log_scaled(&self) -> bool {
        self.log.unwrap_or_else(|| is_log_scaled(&self.name))
    }

    fn to_unit(&self, value: f64) -> f64 {
        if self.log_scaled() {
            (value / self.low).ln() / (self.high / self.low).ln()
        } else {
            (value - self.low) / (self.high - self.low)
        }
    }

    fn from_unit(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = if self.log_scaled() {
            self.low * (self.high / self.low).powf(u)
        } else {
            self.low + u * (self.high - self.low)
        };
        v.clamp(self.low, self.high)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitProblem {
    pub dataset: Dataset,
    pub model: ModelSelector,
    pub free: Vec<FreeParameter>,
    pub params: SystemParams,
    pub device: DeviceModel,
    /// Overrides for model extras or table fields held fixed.
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
}

impl FitProblem {
    pub fn validate(&self) -> Result<()> {
        self.dataset.validate()?;
        if self.dataset.len() < self.free.len() + 1 {
            return Err(Error::InvalidFit(format!(
                "{} points cannot constrain {} free parameters",
                self.dataset.len(),
                self.free.len()
            )));
        }
        let state = self.base_state()?;
        for p in &self.free {
            if state.get(&p.name).is_none() {
                return Err(Error::InvalidFit(format!("unknown parameter `{}`", p.name)));
            }
            if !(p.low < p.high) || !p.low.is_finite() || !p.high.is_finite() {
                return Err(Error::InvalidFit(format!("`{}`: need low < high", p.name)));
            }
            if !(p.low <= p.initial && p.initial <= p.high) {
                return Err(Error::InvalidFit(format!("`{}`: initial value outside bounds", p.name)));
            }
            if p.log_scaled() && p.low <= 0.0 {
                return Err(Error::InvalidFit(format!("`{}`: log-space bounds must be > 0", p.name)));
            }
        }
        Ok(())
    }

    /// Model state with the fixed overrides applied.
    pub fn base_state(&self) -> Result<ModelState> {
        let mut s = ModelState::new(&self.model, self.params, self.device);
        for (k, v) in &self.fixed {
            s.set(k, *v)?;
        }
        Ok(s)
    }

    fn state_at(&self, base: &ModelState, values: &[f64]) -> Result<ModelState> {
        let mut s = base.clone();
        for (p, v) in self.free.iter().zip(values) {
            s.set(&p.name, *v)?;
        }
        Ok(s)
    }

    /// Model prediction on the dataset grid at the given free values.
    pub fn predict(&self, values: &[f64]) -> Result<Vec<f64>> {
        let base = self.base_state()?;
        self.state_at(&base, values)?.evaluate(&self.model, &self.dataset.x)
    }

    pub fn rss(&self, prediction: &[f64]) -> f64 {
        let d = &self.dataset;
        (0..d.len())
            .map(|i| {
                let r = d.y[i] - prediction[i];
                match &d.sigma {
                    Some(s) => (r / s[i]).powi(2),
                    None => r * r,
                }
            })
            .sum()
    }

    pub fn initial_values(&self) -> Vec<f64> {
        self.free.iter().map(|p| p.initial).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Best-fit values in the order of `FitProblem::free`.
    pub values: Vec<(String, f64)>,
    pub rss: f64,
    /// Bootstrap standard deviations, if computed.
    #[serde(default)]
    pub uncertainty: Option<Vec<(String, f64)>>,
    #[serde(default)]
    pub uncertainty_method: Option<String>,
    pub converged: bool,
    pub evaluations: usize,
    pub iterations: usize,
}

impl FitResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn raw_values(&self) -> Vec<f64> {
        self.values.iter().map(|(_, v)| *v).collect()
    }
}

/// Bounded simplex fit from the problem's initial values.
pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    fit_with(problem, &SimplexOptions::default())
}

pub fn fit_with(problem: &FitProblem, opts: &SimplexOptions) -> Result<FitResult> {
    problem.validate()?;
    let base = problem.base_state()?;
    let initial = problem.initial_values();
    let initial_rss = problem.rss(&problem.state_at(&base, &initial)?.evaluate(&problem.model, &problem.dataset.x)?);
    let start: Vec<f64> = problem
        .free
        .iter()
        .zip(&initial)
        .map(|(p, v)| p.to_unit(*v))
        .collect();
    let to_values = |u: &[f64]| -> Vec<f64> { problem.free.iter().zip(u).map(|(p, x)| p.from_unit(*x)).collect() };
    let mut objective = |u: &[f64]| -> Result<f64> {
        let s = problem.state_at(&base, &to_values(u))?;
        Ok(problem.rss(&s.evaluate(&problem.model, &problem.dataset.x)?))
    };
    let out = minimize_unit_box(&mut objective, &start, opts)?;
    let (values, rss) = if out.value <= initial_rss {
        (to_values(&out.point), out.value)
    } else {
        (initial, initial_rss)
    };
    Ok(FitResult {
        values: problem.free.iter().map(|p| p.name.clone()).zip(values).collect(),
        rss,
        uncertainty: None,
        uncertainty_method: None,
        converged: out.converged,
        evaluations: out.evaluations + 1,
        iterations: out.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Relative standard deviation of multiplicative Gaussian noise.
    pub sigma: f64,
    pub seed: u64,
}

/// Model values on `x`, each multiplied by `1 + σ·N(0, 1)`.
pub fn synth_dataset(
    model: &ModelSelector,
    state: &ModelState,
    x: &[f64],
    noise: NoiseModel,
) -> Result<Dataset> {
    if !(noise.sigma >= 0.0) {
        return Err(Error::invalid("noise.sigma", "must be >= 0"));
    }
    let clean = state.evaluate(model, x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let y = clean
        .into_iter()
        .map(|m| {
            let z: f64 = StandardNormal.sample(&mut rng);
            m * (1.0 + noise.sigma * z)
        })
        .collect();
    Ok(Dataset {
        x: x.to_vec(),
        y,
        sigma: None,
        seed: Some(noise.seed),
    })
}

/// Convenience wrapper building the state from the two tables.
pub fn synth_from_tables(
    model: &ModelSelector,
    params: &SystemParams,
    device: &DeviceModel,
    extras: &BTreeMap<String, f64>,
    x: &[f64],
    noise: NoiseModel,
) -> Result<Dataset> {
    let mut state = ModelState::new(model, *params, *device);
    for (k, v) in extras {
        state.set(k, *v)?;
    }
    synth_dataset(model, &state, x, noise)
}

pub const BOOTSTRAP_METHOD: &str = "bootstrap, resampled relative residuals";
pub const MIN_RESAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub std: Vec<(String, f64)>,
    pub n_resamples: usize,
    /// Resamples whose fit did not converge; excluded from `std`.
    pub failed: usize,
    pub seed: u64,
    pub method: String,
}

/// Residual bootstrap: relative residuals of the best fit are resampled
/// with replacement onto the fitted curve and the fit is repeated.
pub fn bootstrap_uncertainty(
    problem: &FitProblem,
    result: &FitResult,
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapReport> {
    if n_resamples < MIN_RESAMPLES {
        return Err(Error::invalid(
            "n_resamples",
            format!("need at least {MIN_RESAMPLES}, got {n_resamples}"),
        ));
    }
    let best = result.raw_values();
    let fitted = problem.predict(&best)?;
    let residuals: Vec<f64> = problem
        .dataset
        .y
        .iter()
        .zip(&fitted)
        .map(|(y, m)| if *m != 0.0 { y / m - 1.0 } else { 0.0 })
        .collect();
    let n = residuals.len();
    let mut restart = problem.clone();
    for (p, v) in restart.free.iter_mut().zip(&best) {
        p.initial = *v;
    }
    let runs: Vec<Result<Option<Vec<f64>>>> = (0..n_resamples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let y = fitted
                .iter()
                .map(|m| {
                    let j = rand::Rng::random_range(&mut rng, 0..n);
                    m * (1.0 + residuals[j])
                })
                .collect();
            let mut p = restart.clone();
            p.dataset.y = y;
            let r = fit(&p)?;
            Ok(r.converged.then(|| r.raw_values()))
        })
        .collect();
    let mut samples = Vec::with_capacity(n_resamples);
    let mut failed = 0;
    for r in runs {
        match r? {
            Some(v) => samples.push(v),
            None => failed += 1,
        }
    }
    let std = problem
        .free
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let m = samples.len() as f64;
            let mean = samples.iter().map(|s| s[i]).sum::<f64>() / m;
            let var = samples.iter().map(|s| (s[i] - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
            (p.name.clone(), var.sqrt())
        })
        .collect();
    Ok(BootstrapReport {
        std,
        n_resamples,
        failed,
        seed,
        method: BOOTSTRAP_METHOD.into(),
    })
}

/// Attaches a bootstrap report to a fit result.
pub fn with_uncertainty(mut result: FitResult, report: &BootstrapReport) -> FitResult {
    result.uncertainty = Some(report.std.clone());
    result.uncertainty_method = Some(report.method.clone());
    result
}
