//! Named-field access and the JSON parameter-file format.
//!
//! A parameter file is a flat JSON object with one key per field. Each entry
//! carries its SI value, its unit and a free-form provenance string:
//!
//! ```text
//! {
//!   "profile": "paper-2017",
//!   "gamma_vertical": { "value": 1.3e9, "unit": "s^-1", "provenance": "..." },
//!   ...
//! }
//! ```

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::Path;

use crate::error::{Error, Result};

/// A struct whose numeric fields can be read and written by name.
pub trait ParameterTable: Sized + Clone {
    /// `(field name, SI unit)` for every field, in file order.
    const FIELDS: &'static [(&'static str, &'static str)];

    fn get(&self, name: &str) -> Option<f64>;
    fn set(&mut self, name: &str, value: f64) -> bool;
    fn validate(&self) -> Result<()>;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    pub unit: String,
    #[serde(default)]
    pub provenance: String,
}

/// A parsed parameter file: the numeric table plus per-entry provenance.
#[derive(Debug, Clone)]
pub struct ParameterFile<T> {
    pub profile: String,
    pub table: T,
    pub provenance: Vec<(String, String)>,
}

impl<T: ParameterTable> ParameterFile<T> {
    /// Parses a parameter file, starting from `base` so that a file must still
    /// name every field.
    pub fn from_json_str(text: &str, base: T) -> Result<Self> {
        let root: Map<String, Value> = serde_json::from_str(text)?;
        let profile = root
            .get("profile")
            .and_then(Value::as_str)
            .unwrap_or("custom")
            .to_string();
        let mut table = base;
        let mut provenance = Vec::with_capacity(T::FIELDS.len());
        for (name, unit) in T::FIELDS {
            let raw = root
                .get(*name)
                .ok_or_else(|| Error::Config(format!("parameter file is missing `{name}`")))?;
            let entry: Entry = serde_json::from_value(raw.clone())
                .map_err(|e| Error::Config(format!("entry `{name}`: {e}")))?;
            if entry.unit != *unit {
                return Err(Error::Config(format!(
                    "entry `{name}` has unit `{}`, expected `{unit}`",
                    entry.unit
                )));
            }
            table.set(name, entry.value);
            provenance.push((name.to_string(), entry.provenance));
        }
        for key in root.keys() {
            if key != "profile" && !T::FIELDS.iter().any(|(n, _)| n == key) {
                return Err(Error::Config(format!("unknown parameter `{key}`")));
            }
        }
        table.validate()?;
        Ok(ParameterFile {
            profile,
            table,
            provenance,
        })
    }

    pub fn load(path: &Path, base: T) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, base)
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("profile".into(), Value::String(self.profile.clone()));
        for (name, unit) in T::FIELDS {
            let provenance = self
                .provenance
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, p)| p.clone())
                .unwrap_or_default();
            let entry = Entry {
                value: self.table.get(name).unwrap_or(f64::NAN),
                unit: unit.to_string(),
                provenance,
            };
            root.insert(name.to_string(), serde_json::to_value(entry).expect("entry"));
        }
        Value::Object(root)
    }
}
