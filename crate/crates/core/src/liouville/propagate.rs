use nalgebra::{DMatrix, SVector};
use num_complex::Complex64;

use super::steady::STEADY_POSITIVITY_TOL;
use super::superop::{Liouvillian, SuperOp};
use crate::error::{Error, Result};
use crate::qdcore::DensityMatrix4;

/// `exp(L·t)` as a superoperator.
pub fn propagator(l: &Liouvillian, t: f64) -> Result<SuperOp> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("propagation time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(SuperOp::identity());
    }
    let p = (l.matrix() * Complex64::new(t, 0.0)).exp();
    if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Propagation(format!("matrix exponential overflowed at t = {t} s")));
    }
    Ok(p)
}

/// Propagator and its time average over `[0, t]`:
/// `(exp(L·t), (1/t)∫₀ᵗ exp(L·s) ds)`.
///
/// Both come from one exponential of the block matrix `[[L·t, t·I], [0, 0]]`.
pub fn propagator_with_average(l: &Liouvillian, t: f64) -> Result<(SuperOp, SuperOp)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("averaging window must be > 0, got {t}")));
    }
    let mut block = DMatrix::<Complex64>::zeros(32, 32);
    let lt = l.matrix() * Complex64::new(t, 0.0);
    block.view_mut((0, 0), (16, 16)).copy_from(&lt);
    for i in 0..16 {
        block[(i, 16 + i)] = Complex64::new(t, 0.0);
    }
    let e = block.exp();
    if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Propagation(format!("matrix exponential overflowed at t = {t} s")));
    }
    let prop = SuperOp::from_fn(|i, j| e[(i, j)]);
    let avg = SuperOp::from_fn(|i, j| e[(i, 16 + j)] / t);
    Ok((prop, avg))
}

pub(crate) fn apply(op: &SuperOp, rho: &DensityMatrix4) -> DensityMatrix4 {
    let v: SVector<Complex64, 16> = op * rho.to_vector();
    DensityMatrix4::from_vector(&v)
}

/// ρ(t) = exp(L·t)·ρ0.
pub fn propagate(l: &Liouvillian, rho0: &DensityMatrix4, t: f64) -> Result<DensityMatrix4> {
    if t == 0.0 {
        return Ok(*rho0);
    }
    let rho = apply(&propagator(l, t)?, rho0);
    rho.check(STEADY_POSITIVITY_TOL)
        .map_err(|e| Error::Propagation(format!("state invalid after {t} s: {e}")))?;
    Ok(rho)
}
