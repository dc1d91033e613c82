//! Pump-probe switching: the pump colour decides whether the probe sees
//! a transparent or an absorbing dot.

use qdspin::qdcore::*;
use qdspin::spectro::*;

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let d = DeviceModel::paper_2017();
    let v = d.plateau_center();

    let blue = switching_point(&PumpProbeProtocol::default(), &p, &d, v)?;
    let red = switching_point(&PumpProbeProtocol::red_pump(&p), &p, &d, v)?;
    let on = blue.windows[0].transmission.unwrap_or(f64::NAN);
    let off = red.windows[0].transmission.unwrap_or(f64::NAN);
    println!("blue pump: T/T0 {:.4} after {} cycles", on / p.t0_background, blue.cycles);
    println!("red pump:  T/T0 {:.4} after {} cycles", off / p.t0_background, red.cycles);
    println!("switching contrast {:.2}", switching_contrast(on, off, p.t0_background)?);

    println!("\n{:>8} {:>8} {:>8}", "t (us)", "p_up", "p_down");
    for s in blue.trace.iter().step_by(2) {
        println!("{:>8.3} {:>8.4} {:>8.4}", s.time * 1e6, s.populations[0], s.populations[1]);
    }
    Ok(())
}
