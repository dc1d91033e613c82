use nalgebra::{Matrix4, Vector4};

use super::superop::LocalConditions;
use crate::error::{Error, Result};
use crate::qdcore::constants::HBAR;
use crate::qdcore::{Branch, DensityMatrix4, DeviceModel, LaserField, Level, SystemParams};

/// Lorentzian excitation rate of a transition driven at Rabi frequency
/// `omega_rabi` and detuning `delta` (eV):
/// `W = (Ω²/2)·(Γ'/2) / ((Δ/ħ)² + (Γ'/2)²)`, Γ' = Γ + γ + 2γ_dephasing.
pub fn scattering_rate(omega_rabi: f64, delta: f64, params: &SystemParams) -> f64 {
    let half_width = 0.5 * params.coherence_width();
    let detuning = delta / HBAR;
    0.5 * omega_rabi * omega_rabi * half_width / (detuning * detuning + half_width * half_width)
}

/// Population transfer matrix, `dp/dt = R·p`, with `R[(to, from)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMatrix4(Matrix4<f64>);

impl RateMatrix4 {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn rate(&self, to: Level, from: Level) -> f64 {
        self.0[(to.index(), from.index())]
    }

    /// Builds from a matrix of off-diagonal rates; diagonals are filled in so
    /// that columns sum to zero.
    pub fn from_transfer_rates(mut m: Matrix4<f64>) -> Result<Self> {
        for j in 0..4 {
            m[(j, j)] = 0.0;
            let mut out = 0.0;
            for i in 0..4 {
                if i != j {
                    if !(m[(i, j)] >= 0.0) {
                        return Err(Error::invalid("rate", format!("negative transfer rate {}", m[(i, j)])));
                    }
                    out += m[(i, j)];
                }
            }
            m[(j, j)] = -out;
        }
        Ok(RateMatrix4(m))
    }

    /// Stationary populations, unit sum.
    pub fn steady_populations(&self) -> Result<[f64; 4]> {
        let mut a = self.0;
        let scale = self.0.amax().max(1.0);
        for j in 0..4 {
            a[(0, j)] = scale;
        }
        let mut b = Vector4::zeros();
        b[0] = scale;
        let lu = a.lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..4).map(|i| u[(i, i)].abs()).collect();
        let ratio = diag.iter().copied().fold(f64::INFINITY, f64::min)
            / diag.iter().copied().fold(0.0, f64::max);
        if !(ratio > super::steady::KERNEL_PIVOT_RATIO) {
            return Err(Error::DegenerateKernel { pivot_ratio: ratio });
        }
        let p = lu.solve(&b).ok_or(Error::DegenerateKernel { pivot_ratio: 0.0 })?;
        Ok([p[0], p[1], p[2], p[3]])
    }

    /// Stationary state as a diagonal density matrix.
    pub fn steady_state(&self) -> Result<DensityMatrix4> {
        let p = self.steady_populations()?;
        let mut m = nalgebra::Matrix4::zeros();
        for (i, pi) in p.iter().enumerate() {
            m[(i, i)] = num_complex::Complex64::new(*pi, 0.0);
        }
        let rho = DensityMatrix4::from_raw(m);
        rho.check(super::steady::STEADY_POSITIVITY_TOL)?;
        Ok(rho)
    }
}

/// Rate-equation reduction at given transition energies and κ. Every laser
/// within its cutoff of a transition adds its own [`scattering_rate`].
pub fn rates_at_conditions(params: &SystemParams, cond: &LocalConditions, lasers: &[LaserField]) -> Result<RateMatrix4> {
    let mut m = Matrix4::<f64>::zeros();
    let mut set = |to: Level, from: Level, r: f64| m[(to.index(), from.index())] += r;
    for (branch, g, e) in [
        (Branch::Blue, Level::Up, Level::TrionUp),
        (Branch::Red, Level::Down, Level::TrionDown),
    ] {
        let pump: f64 = lasers
            .iter()
            .filter(|l| l.rabi > 0.0)
            .map(|l| (l, l.energy - cond.energy(branch)))
            .filter(|(l, d)| d.abs() <= l.coupling_cutoff)
            .map(|(l, d)| scattering_rate(l.rabi, d, params))
            .sum();
        set(e, g, pump);
        set(g, e, pump + params.gamma_vertical);
    }
    set(Level::Down, Level::TrionUp, params.gamma_diagonal);
    set(Level::Up, Level::TrionDown, params.gamma_diagonal);
    let flip = params.spin_flip_rate(cond.kappa);
    set(Level::Down, Level::Up, flip);
    set(Level::Up, Level::Down, flip);
    RateMatrix4::from_transfer_rates(m)
}

pub fn rate_matrix(
    params: &SystemParams,
    device: &DeviceModel,
    v: f64,
    lasers: &[LaserField],
) -> Result<RateMatrix4> {
    let cond = LocalConditions::at(params, device, v)?;
    rates_at_conditions(params, &cond, lasers)
}
