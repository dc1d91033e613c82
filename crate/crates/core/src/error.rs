use std::path::PathBuf;

/// Errors produced anywhere in the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("bias {voltage} V is outside the single-electron plateau [{low}, {high}] V")]
    OutsidePlateau { voltage: f64, low: f64, high: f64 },

    #[error("incompatible rotating frames: transition {transition} is driven by lasers {first} and {second}")]
    IncompatibleFrames {
        transition: &'static str,
        first: usize,
        second: usize,
    },

    #[error("steady state is not unique (pivot ratio {pivot_ratio:.3e})")]
    DegenerateKernel { pivot_ratio: f64 },

    #[error("density matrix violates {what} (deviation {deviation:.3e})")]
    InvalidState { what: &'static str, deviation: f64 },

    #[error("propagation failed: {0}")]
    Propagation(String),

    #[error("spectral-diffusion quadrature did not converge: change {change:.3e} at {nodes} nodes")]
    QuadratureNotConverged { nodes: usize, change: f64 },

    #[error("intensity ratio invalid: centre {center} exceeds twice the edge {edge}")]
    InvalidRatio { center: f64, edge: f64 },

    #[error("pulse cycle did not reach a periodic state after {repetitions} repetitions (last change {change:.3e})")]
    CycleNotConverged { repetitions: usize, change: f64 },

    #[error("probe laser is not weak: Ω²/Γ' = {ratio:.3e} Γ exceeds 0.1 Γ")]
    ProbeNotWeak { ratio: f64 },

    #[error("fit problem invalid: {0}")]
    InvalidFit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of a numerical solver, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::IncompatibleFrames { .. }
                | Error::DegenerateKernel { .. }
                | Error::InvalidState { .. }
                | Error::Propagation(_)
                | Error::QuadratureNotConverged { .. }
                | Error::CycleNotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
