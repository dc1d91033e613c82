use qdspin::qdcore::SystemParams;
use qdspin::spectro::{photons_per_cycle, pump_cycle_energy, switching_energy};

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let (power, duration) = (40e-9, 1e-6);
    let photons = photons_per_cycle(&p);
    println!("pump energy per cycle {:.3} fJ", pump_cycle_energy(power, duration) * 1e15);
    println!("photons per cycle     {photons:.1}");
    println!("energy per photon     {:.3} fJ", switching_energy(power, duration, photons)? * 1e15);
    Ok(())
}
