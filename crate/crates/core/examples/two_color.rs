//! Repumping with a second laser held on the red transition at the plateau
//! centre.

use qdspin::qdcore::*;
use qdspin::spectro::*;

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let d = DeviceModel::paper_2017();
    let centre = d.plateau_center();
    let fixed = centre_laser(&p, &d, Branch::Red, DEFAULT_RF_RABI);
    let blue = centre_laser(&p, &d, Branch::Blue, DEFAULT_RF_RABI);

    let grid = diffusion_grid(&p);
    let single = rf_intensity_at(&p, &d, centre, &[blue], &grid)?;
    let double = rf_intensity_at(&p, &d, centre, &[fixed, blue], &grid)?;
    println!("single colour {single:.3e}, two colours {double:.3e}, gain {:.2}", double / single);

    let template = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let eb = d.transition_energy(&p, centre, Branch::Blue);
    let energies = linspace(eb - 3e-6, eb + 3e-6, 7);
    let voltages = linspace(0.35, 0.41, 61);
    let map = two_color_map(&p, &d, &fixed, &template, &energies, &voltages)?;
    let (_, iy, _) = map.argmax();
    println!(
        "bright spot at {:.3} V, {:.1} mV above the plateau centre",
        voltages[iy],
        (voltages[iy] - centre) * 1e3
    );
    Ok(())
}
