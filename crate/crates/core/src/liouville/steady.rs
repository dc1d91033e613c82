use nalgebra::SVector;
use num_complex::Complex64;

use super::superop::Liouvillian;
use crate::error::{Error, Result};
use crate::qdcore::DensityMatrix4;

/// Smallest accepted ratio of LU pivots before the kernel is declared degenerate.
pub const KERNEL_PIVOT_RATIO: f64 = 1e-13;

/// Steady states may dip below zero by at most this much before it is an error.
pub const STEADY_POSITIVITY_TOL: f64 = 1e-8;

/// Null vector of the generator normalized to unit trace.
///
/// Solves `L·vec(ρ) = 0` by a dense LU solve in which the first population
/// equation is replaced by the trace condition.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix4> {
    let mut a = *l.matrix();
    let one = Complex64::new(1.0, 0.0);
    for j in 0..16 {
        a[(0, j)] = Complex64::new(0.0, 0.0);
    }
    let scale = l.norm().max(1.0);
    for i in 0..4 {
        a[(0, i + 4 * i)] = Complex64::new(scale, 0.0);
    }
    let lu = a.lu();
    let u = lu.u();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..16 {
        let p = u[(i, i)].norm();
        lo = lo.min(p);
        hi = hi.max(p);
    }
    let pivot_ratio = lo / hi;
    if !(pivot_ratio > KERNEL_PIVOT_RATIO) {
        return Err(Error::DegenerateKernel { pivot_ratio });
    }
    let mut b = SVector::<Complex64, 16>::zeros();
    b[0] = one * scale;
    let x = lu
        .solve(&b)
        .ok_or(Error::DegenerateKernel { pivot_ratio: 0.0 })?;
    let rho = DensityMatrix4::from_vector(&x);
    rho.check(STEADY_POSITIVITY_TOL)?;
    Ok(rho)
}
