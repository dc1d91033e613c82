use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::error::{Error, Result};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MapMetadata {
    /// SHA-256 of the canonical JSON of every model input.
    pub params_hash: String,
    pub seed: Option<u64>,
}

/// Real observable sampled on (energy × voltage).
///
/// `values[iy * x_axis.len() + ix]` belongs to `(x_axis[ix], y_axis[iy])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Map2D {
    /// Laser or probe energies, eV.
    pub x_axis: Vec<f64>,
    /// Bias voltages, V.
    pub y_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub observable: String,
    pub metadata: MapMetadata,
}

pub fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::invalid(name, "grid is empty"));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(name, "grid has non-finite entries"));
    }
    let increasing = axis.windows(2).all(|w| w[1] > w[0]);
    let decreasing = axis.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::invalid(name, "grid must be strictly monotone"));
    }
    Ok(())
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn parameter_hash<T: Serialize + ?Sized>(inputs: &T) -> String {
    let json = serde_json::to_string(inputs).expect("model inputs serialize");
    Sha256::digest(json.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Map2D {
    pub fn new(x_axis: Vec<f64>, y_axis: Vec<f64>, values: Vec<f64>, observable: impl Into<String>) -> Result<Self> {
        check_axis("x_axis", &x_axis)?;
        check_axis("y_axis", &y_axis)?;
        if values.len() != x_axis.len() * y_axis.len() {
            return Err(Error::invalid(
                "values",
                format!(
                    "expected {}×{} entries, got {}",
                    y_axis.len(),
                    x_axis.len(),
                    values.len()
                ),
            ));
        }
        Ok(Map2D {
            x_axis,
            y_axis,
            values,
            observable: observable.into(),
            metadata: MapMetadata::default(),
        })
    }

    pub fn with_metadata(mut self, metadata: MapMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn nx(&self) -> usize {
        self.x_axis.len()
    }

    pub fn ny(&self) -> usize {
        self.y_axis.len()
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx() + ix]
    }

    /// Row at fixed voltage index.
    pub fn row(&self, iy: usize) -> &[f64] {
        &self.values[iy * self.nx()..(iy + 1) * self.nx()]
    }

    /// Column at fixed energy index.
    pub fn column(&self, ix: usize) -> Vec<f64> {
        (0..self.ny()).map(|iy| self.get(ix, iy)).collect()
    }

    /// `(ix, iy, value)` of the largest entry; ties go to the first in row-major order.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let (k, v) = self
            .values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best });
        (k % self.nx(), k / self.nx(), v)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV layout: the first row holds the x axis after an empty corner
    /// cell, every further row starts with its y value.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for x in &self.x_axis {
            out.push(',');
            out.push_str(&x.to_string());
        }
        out.push('\n');
        for (iy, y) in self.y_axis.iter().enumerate() {
            out.push_str(&y.to_string());
            for v in self.row(iy) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv_str(text: &str, observable: impl Into<String>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(text.as_bytes());
        let mut rows = reader.records();
        let header = rows
            .next()
            .ok_or_else(|| Error::Config("empty map CSV".into()))??;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad number `{s}`: {e}")))
        };
        let x_axis = header.iter().skip(1).map(parse).collect::<Result<Vec<_>>>()?;
        let mut y_axis = Vec::new();
        let mut values = Vec::new();
        for record in rows {
            let record = record?;
            let mut cells = record.iter();
            y_axis.push(parse(cells.next().unwrap_or(""))?);
            for cell in cells {
                values.push(parse(cell)?);
            }
        }
        Map2D::new(x_axis, y_axis, values, observable)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    /// Sibling metadata document for a written CSV.
    pub fn metadata_json(&self, inputs: serde_json::Value) -> serde_json::Value {
        serde_json::json!({
            "observable": self.observable,
            "x_axis": { "quantity": "energy", "unit": "eV", "len": self.nx(),
                        "first": self.x_axis[0], "last": self.x_axis[self.nx() - 1] },
            "y_axis": { "quantity": "bias", "unit": "V", "len": self.ny(),
                        "first": self.y_axis[0], "last": self.y_axis[self.ny() - 1] },
            "params_hash": self.metadata.params_hash,
            "seed": self.metadata.seed,
            "inputs": inputs,
            "artifact_version": ARTIFACT_VERSION,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_mismatched_dimensions_and_bad_axes() {
        assert!(Map2D::new(vec![0.0, 1.0], vec![0.0], vec![1.0], "x").is_err());
        assert!(Map2D::new(vec![0.0, 0.0], vec![0.0], vec![1.0, 2.0], "x").is_err());
        assert!(Map2D::new(vec![], vec![0.0], vec![], "x").is_err());
        assert!(Map2D::new(vec![1.0, 0.0], vec![0.0], vec![1.0, 2.0], "x").is_ok());
    }

    #[test]
    fn csv_layout_has_empty_corner() {
        let m = Map2D::new(vec![1.5, 2.5], vec![0.1, 0.2], vec![1.0, 2.0, 3.0, 4.0], "rf").unwrap();
        assert_eq!(m.to_csv_string(), ",1.5,2.5\n0.1,1,2\n0.2,3,4\n");
        assert_eq!(m.argmax(), (1, 1, 4.0));
    }

    proptest! {
        #[test]
        fn csv_round_trip(nx in 1usize..6, ny in 1usize..6, seed in any::<u64>()) {
            let x = linspace(1.3357, 1.3358, nx);
            let y: Vec<f64> = (0..ny).map(|i| 0.25 + 0.0013 * i as f64).collect();
            let vals: Vec<f64> = (0..nx * ny)
                .map(|k| ((seed ^ k as u64) % 1_000_003) as f64 * 1.234567e-7)
                .collect();
            let m = Map2D::new(x, y, vals, "rf").unwrap();
            let back = Map2D::from_csv_str(&m.to_csv_string(), "rf").unwrap();
            prop_assert_eq!(back.values, m.values);
            prop_assert_eq!(back.x_axis, m.x_axis);
            prop_assert_eq!(back.y_axis, m.y_axis);
        }
    }
}
