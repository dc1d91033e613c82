//! Open-system dynamics of the trion under up to two lasers: the Lindblad
//! generator, its steady state, time propagation and the rate-equation
//! reduction used when no common rotating frame exists.

mod propagate;
mod rates;
mod steady;
mod superop;

pub use propagate::{propagate, propagator, propagator_with_average};
pub use rates::{rate_matrix, rates_at_conditions, scattering_rate, RateMatrix4};
pub use steady::{steady_state, KERNEL_PIVOT_RATIO, STEADY_POSITIVITY_TOL};
pub use superop::{
    assign_drives, build_liouvillian, dissipator, hamiltonian_part, DriveAssignment, Frame, Liouvillian,
    LocalConditions, SuperOp,
};

use crate::error::{Error, Result};
use crate::qdcore::{DensityMatrix4, LaserField, SystemParams};

/// Which model produced a steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Lindblad,
    RateEquations,
}

/// Steady state at fixed conditions: the Lindblad solve when a single
/// rotating frame exists, otherwise the rate-equation reduction.
pub fn steady_state_at(
    params: &SystemParams,
    base: &SuperOp,
    cond: &LocalConditions,
    lasers: &[LaserField],
) -> Result<(DensityMatrix4, Solver)> {
    match Liouvillian::with_dissipator(params, base, cond, lasers) {
        Ok(l) => Ok((steady_state(&l)?, Solver::Lindblad)),
        Err(Error::IncompatibleFrames { .. }) => Ok((
            rates_at_conditions(params, cond, lasers)?.steady_state()?,
            Solver::RateEquations,
        )),
        Err(e) => Err(e),
    }
}
