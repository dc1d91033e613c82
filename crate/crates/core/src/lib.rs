//! Simulation and parameter estimation for a singly charged quantum dot
//! (four-level trion) coupled to a nanophotonic waveguide.
//!
//! * [`qdcore`]: parameters, device tuning model, lasers, states and maps.
//! * [`liouville`]: Lindblad generator, steady state, propagation, rate equations.
//! * [`spectro`]: fluorescence and transmission observables, pump-probe switching.
//! * [`estimate`]: bounded simplex fitting, synthetic data and bootstrap errors.
//! * [`cli`]: the `qdspin` command-line front end.

pub mod cli;
pub mod error;
pub mod estimate;
pub mod liouville;
pub mod qdcore;
pub mod spectro;

pub use error::{Error, Result};
