//! Waveguide transmission across one transition, with and without spectral
//! diffusion.

use qdspin::qdcore::constants::MICRO_EV;
use qdspin::qdcore::*;
use qdspin::spectro::*;

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let grid = linspace(-3e-5, 3e-5, 121);
    let s = transmission_observed(&grid, p.beta_blue, &p)?;
    println!("contrast {:.4}, FWHM {:.2} ueV", s.contrast, s.fwhm / MICRO_EV);

    let bare = SystemParams { sigma_spectral_diffusion: 0.0, ..p };
    let b = transmission_observed(&grid, bare.beta_blue, &bare)?;
    println!("no diffusion: contrast {:.4}, FWHM {:.2} ueV", b.contrast, b.fwhm / MICRO_EV);

    for beta in [0.2, 0.5, 0.704, 0.9] {
        let c = transmission_observed(&[0.0], beta, &p)?.contrast;
        println!("beta {beta:.3}: contrast {c:.4}");
    }
    Ok(())
}
