//! Resonance-fluorescence map over laser energy and gate bias, written as CSV.

use qdspin::qdcore::*;
use qdspin::spectro::*;

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let d = DeviceModel::paper_2017();
    let laser = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let energies = linspace(1.335648, 1.335808, 41);
    let voltages = linspace(0.23, 0.43, 41);
    let map = plateau_map(&p, &d, &laser, &energies, &voltages)?;

    let cut = plateau_line_cut(&p, &d, &laser, Branch::Blue, 0.0, &[d.v_plateau_low, d.plateau_center()])?;
    println!("edge / centre along the blue line: {:.2}", cut[0] / cut[1]);
    let (ix, iy, max) = map.argmax();
    println!("brightest pixel {max:.3e} at E = {:.6} eV, V = {:.4} V", energies[ix], voltages[iy]);

    let path = std::env::temp_dir().join("plateau_map.csv");
    map.write_csv(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
