//! Transition energies, splittings and co-tunneling across the plateau.

use qdspin::qdcore::constants::MICRO_EV;
use qdspin::qdcore::*;

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let d = DeviceModel::paper_2017();
    println!("natural linewidth      {:.3} ueV", p.natural_linewidth() / MICRO_EV);
    println!("ground splitting       {:.2} ueV", p.ground_splitting() / MICRO_EV);
    println!("trion splitting        {:.2} ueV", p.zeeman_splitting() / MICRO_EV);
    println!("plateau                {:.3} .. {:.3} V", d.v_plateau_low, d.v_plateau_high);
    println!();
    println!("{:>8} {:>14} {:>14} {:>12}", "V", "blue (eV)", "red (eV)", "kappa (1/s)");
    for v in linspace(d.v_plateau_low, d.v_plateau_high, 7) {
        println!(
            "{v:>8.4} {:>14.7} {:>14.7} {:>12.3e}",
            d.transition_energy(&p, v, Branch::Blue),
            d.transition_energy(&p, v, Branch::Red),
            d.cotunneling_rate(v)?
        );
    }
    Ok(())
}
