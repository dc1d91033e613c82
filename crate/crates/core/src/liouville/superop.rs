use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qdcore::constants::HBAR;
use crate::qdcore::{Branch, DeviceModel, LaserField, Level, SystemParams};

/// Superoperator acting on column-stacked 4×4 density matrices.
pub type SuperOp = SMatrix<Complex64, 16, 16>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Transition energies and spin randomization at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalConditions {
    /// Blue transition energy |↑⟩↔|⇑⟩, eV.
    pub blue: f64,
    /// Red transition energy |↓⟩↔|⇓⟩, eV.
    pub red: f64,
    /// Co-tunneling rate κ, s⁻¹.
    pub kappa: f64,
}

impl LocalConditions {
    pub fn at(params: &SystemParams, device: &DeviceModel, v: f64) -> Result<Self> {
        let kappa = device.cotunneling_rate(v)?;
        Ok(LocalConditions {
            blue: device.transition_energy(params, v, Branch::Blue),
            red: device.transition_energy(params, v, Branch::Red),
            kappa,
        })
    }

    pub fn energy(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Blue => self.blue,
            Branch::Red => self.red,
        }
    }

    /// Both transitions displaced by `delta` eV (quasi-static spectral diffusion).
    pub fn shifted(&self, delta: f64) -> Self {
        LocalConditions {
            blue: self.blue + delta,
            red: self.red + delta,
            kappa: self.kappa,
        }
    }
}

/// One coherent drive term of the rotating-wave Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveAssignment {
    /// Index into the laser list the Liouvillian was built from.
    pub laser: usize,
    pub branch: Branch,
    /// Laser energy minus transition energy, eV.
    pub detuning: f64,
    pub rabi: f64,
}

/// Which laser sets the rotating frame of which trion level.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Frame {
    pub drives: Vec<DriveAssignment>,
    /// Ground-state splitting from `g_electron`, eV. Removed by the frame.
    pub ground_splitting: f64,
}

impl Frame {
    pub fn drives_branch(&self, branch: Branch) -> bool {
        self.drives.iter().any(|d| d.branch == branch)
    }
}

/// Time-independent Lindblad generator of the four-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    matrix: SuperOp,
    frame: Frame,
}

fn lower(branch: Branch) -> (Level, Level) {
    match branch {
        Branch::Blue => (Level::Up, Level::TrionUp),
        Branch::Red => (Level::Down, Level::TrionDown),
    }
}

/// Superoperator of ρ ↦ a·ρ·b, i.e. `bᵀ ⊗ a` for column stacking.
fn sandwich(a: &Matrix4<Complex64>, b: &Matrix4<Complex64>) -> SuperOp {
    let mut out = SuperOp::zeros();
    for j in 0..4 {
        for jp in 0..4 {
            let bj = b[(j, jp)];
            if bj == ZERO {
                continue;
            }
            for i in 0..4 {
                for ip in 0..4 {
                    let ai = a[(ip, i)];
                    if ai != ZERO {
                        out[(ip + 4 * jp, i + 4 * j)] += ai * bj;
                    }
                }
            }
        }
    }
    out
}

fn ket_bra(to: Level, from: Level, amplitude: f64) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(to.index(), from.index())] = Complex64::new(amplitude, 0.0);
    m
}

/// D[C]: ρ ↦ CρC† − ½{C†C, ρ}.
fn dissipator_of(c: &Matrix4<Complex64>) -> SuperOp {
    let cd = c.adjoint();
    let cdc = cd * c;
    let id = Matrix4::identity();
    let half = Complex64::new(0.5, 0.0);
    sandwich(c, &cd) - (sandwich(&cdc, &id) + sandwich(&id, &cdc)) * half
}

/// The laser-independent part of the generator: radiative decay, spin
/// relaxation and pure dephasing.
pub fn dissipator(params: &SystemParams, kappa: f64) -> SuperOp {
    let flip = params.spin_flip_rate(kappa);
    let channels = [
        (Level::Up, Level::TrionUp, params.gamma_vertical),
        (Level::Down, Level::TrionDown, params.gamma_vertical),
        (Level::Down, Level::TrionUp, params.gamma_diagonal),
        (Level::Up, Level::TrionDown, params.gamma_diagonal),
        (Level::Down, Level::Up, flip),
        (Level::Up, Level::Down, flip),
        (Level::TrionUp, Level::TrionUp, 2.0 * params.gamma_dephasing),
        (Level::TrionDown, Level::TrionDown, 2.0 * params.gamma_dephasing),
    ];
    let mut out = SuperOp::zeros();
    for (to, from, rate) in channels {
        if rate > 0.0 {
            out += dissipator_of(&ket_bra(to, from, rate.sqrt()));
        }
    }
    out
}

/// Assigns lasers to transitions. A laser drives a vertical transition when
/// it has non-zero Rabi frequency and lies within its own coupling cutoff.
pub fn assign_drives(params: &SystemParams, cond: &LocalConditions, lasers: &[LaserField]) -> Result<Frame> {
    let mut drives: Vec<DriveAssignment> = Vec::new();
    for (index, laser) in lasers.iter().enumerate() {
        if laser.rabi == 0.0 {
            continue;
        }
        for branch in [Branch::Blue, Branch::Red] {
            let detuning = laser.energy - cond.energy(branch);
            if detuning.abs() > laser.coupling_cutoff {
                continue;
            }
            if let Some(prev) = drives.iter().find(|d| d.branch == branch) {
                return Err(Error::IncompatibleFrames {
                    transition: branch.name(),
                    first: prev.laser,
                    second: index,
                });
            }
            drives.push(DriveAssignment {
                laser: index,
                branch,
                detuning,
                rabi: laser.rabi,
            });
        }
    }
    Ok(Frame {
        drives,
        ground_splitting: params.ground_splitting(),
    })
}

/// Coherent part −i[H, ·] for the drives of `frame`, H in s⁻¹.
pub fn hamiltonian_part(frame: &Frame) -> SuperOp {
    let mut h = Matrix4::<Complex64>::zeros();
    for d in &frame.drives {
        let (g, e) = lower(d.branch);
        h[(e.index(), e.index())] -= Complex64::new(d.detuning / HBAR, 0.0);
        let half = Complex64::new(0.5 * d.rabi, 0.0);
        h[(g.index(), e.index())] += half;
        h[(e.index(), g.index())] += half;
    }
    let id = Matrix4::identity();
    let minus_i = Complex64::new(0.0, -1.0);
    (sandwich(&h, &id) - sandwich(&id, &h)) * minus_i
}

impl Liouvillian {
    /// Generator at bias `v` under `lasers`.
    pub fn build(params: &SystemParams, device: &DeviceModel, v: f64, lasers: &[LaserField]) -> Result<Self> {
        let cond = LocalConditions::at(params, device, v)?;
        Self::at_conditions(params, &cond, lasers)
    }

    pub fn at_conditions(params: &SystemParams, cond: &LocalConditions, lasers: &[LaserField]) -> Result<Self> {
        let base = dissipator(params, cond.kappa);
        Self::with_dissipator(params, &base, cond, lasers)
    }

    /// Reuses a precomputed [`dissipator`] for the same κ.
    pub fn with_dissipator(
        params: &SystemParams,
        base: &SuperOp,
        cond: &LocalConditions,
        lasers: &[LaserField],
    ) -> Result<Self> {
        let frame = assign_drives(params, cond, lasers)?;
        let matrix = base + hamiltonian_part(&frame);
        Ok(Liouvillian { matrix, frame })
    }

    pub fn from_parts(matrix: SuperOp, frame: Frame) -> Self {
        Liouvillian { matrix, frame }
    }

    pub fn matrix(&self) -> &SuperOp {
        &self.matrix
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// dρ/dt for a state given as a matrix.
    pub fn apply(&self, rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
        let v = nalgebra::SVector::<Complex64, 16>::from_iterator(rho.iter().copied());
        Matrix4::from_iterator((self.matrix * v).iter().copied())
    }

    /// Largest absolute entry, used as the scale for relative tolerances.
    pub fn norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Free-function form of [`Liouvillian::build`].
pub fn build_liouvillian(
    params: &SystemParams,
    device: &DeviceModel,
    v: f64,
    lasers: &[LaserField],
) -> Result<Liouvillian> {
    Liouvillian::build(params, device, v, lasers)
}
