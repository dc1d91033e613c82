use nalgebra::{Matrix4, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Basis states of the trion system, in matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// |↑⟩, electron spin up.
    Up = 0,
    /// |↓⟩, electron spin down.
    Down = 1,
    /// |⇑⟩, trion reached from |↑⟩ by the blue transition.
    TrionUp = 2,
    /// |⇓⟩, trion reached from |↓⟩ by the red transition.
    TrionDown = 3,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Up, Level::Down, Level::TrionUp, Level::TrionDown];

    pub fn index(self) -> usize {
        self as usize
    }
}

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// A 4×4 density matrix over (|↑⟩, |↓⟩, |⇑⟩, |⇓⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Matrix4<Complex64>);

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity at the default tolerances.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let rho = DensityMatrix4(m);
        rho.check(POSITIVITY_TOL)?;
        Ok(rho)
    }

    /// Wraps without checking. Callers must run [`DensityMatrix4::check`].
    pub(crate) fn from_raw(m: Matrix4<Complex64>) -> Self {
        DensityMatrix4(m)
    }

    pub fn from_populations(p: [f64; 4]) -> Result<Self> {
        let mut m = Matrix4::zeros();
        for (i, pi) in p.iter().enumerate() {
            m[(i, i)] = Complex64::new(*pi, 0.0);
        }
        Self::new(m)
    }

    pub fn pure(level: Level) -> Self {
        let mut m = Matrix4::zeros();
        m[(level.index(), level.index())] = Complex64::new(1.0, 0.0);
        DensityMatrix4(m)
    }

    /// Equal mixture of the two spin ground states.
    pub fn thermal_ground() -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        DensityMatrix4(m)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn element(&self, row: Level, col: Level) -> Complex64 {
        self.0[(row.index(), col.index())]
    }

    pub fn population(&self, level: Level) -> f64 {
        self.0[(level.index(), level.index())].re
    }

    pub fn populations(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.0[(i, i)].re)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Column-stacked vectorization: `vec[i + 4j] = ρ[i, j]`.
    pub fn to_vector(&self) -> SVector<Complex64, 16> {
        SVector::from_iterator(self.0.iter().copied())
    }

    pub(crate) fn from_vector(v: &SVector<Complex64, 16>) -> Self {
        DensityMatrix4(Matrix4::from_iterator(v.iter().copied()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the state invariants; positivity is tested at `positivity_tol`.
    pub fn check(&self, positivity_tol: f64) -> Result<()> {
        let herm = (self.0 - self.0.adjoint()).camax();
        if !(herm <= HERMITIAN_TOL) {
            return Err(Error::InvalidState {
                what: "hermiticity",
                deviation: herm,
            });
        }
        let tr = (self.trace() - Complex64::new(1.0, 0.0)).norm();
        if !(tr <= TRACE_TOL) {
            return Err(Error::InvalidState {
                what: "unit trace",
                deviation: tr,
            });
        }
        let lowest = self.min_eigenvalue();
        if !(lowest >= -positivity_tol) {
            return Err(Error::InvalidState {
                what: "positivity",
                deviation: lowest,
            });
        }
        Ok(())
    }

    /// Exchanges the roles of the two spin manifolds (↑↔↓, ⇑↔⇓).
    pub fn relabeled(&self) -> Self {
        let perm = [1usize, 0, 3, 2];
        DensityMatrix4(Matrix4::from_fn(|i, j| self.0[(perm[i], perm[j])]))
    }
}
