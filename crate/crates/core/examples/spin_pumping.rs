//! Optical spin pumping: steady state under a resonant blue laser, and the
//! approach to it from the thermal state.

use qdspin::liouville::*;
use qdspin::qdcore::*;
use qdspin::spectro::{centre_laser, preparation_fidelity, SpinTarget, DEFAULT_RF_RABI};

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let d = DeviceModel::paper_2017();
    let v = d.plateau_center();
    let pump = centre_laser(&p, &d, Branch::Blue, DEFAULT_RF_RABI);
    let l = build_liouvillian(&p, &d, v, &[pump])?;

    let ss = steady_state(&l)?;
    println!("steady populations {:?}", ss.populations());
    println!("fidelity into down {:.4}", preparation_fidelity(&ss, SpinTarget::Down));

    let d0 = DeviceModel { kappa_cot_max: 0.0, ..d };
    let l0 = build_liouvillian(&p, &d0, v, &[pump])?;
    let f0 = preparation_fidelity(&steady_state(&l0)?, SpinTarget::Down);
    println!("without co-tunneling {f0:.4}");

    println!("\n{:>10} {:>10}", "t (ns)", "p_down");
    let rho0 = DensityMatrix4::thermal_ground();
    for t in [0.0, 2e-9, 5e-9, 1e-8, 3e-8, 1e-7, 1e-6] {
        let rho = propagate(&l, &rho0, t)?;
        println!("{:>10.1} {:>10.4}", t * 1e9, rho.population(Level::Down));
    }
    Ok(())
}
