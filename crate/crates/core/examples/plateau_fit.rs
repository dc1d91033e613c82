//! Round trip: synthesize a noisy line cut along the blue resonance, then
//! fit the spin lifetime back.

use std::collections::BTreeMap;

use qdspin::estimate::*;
use qdspin::qdcore::*;
use qdspin::spectro::DEFAULT_RF_RABI;

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let d = DeviceModel::paper_2017();
    let model = ModelSelector::PlateauLineCut {
        laser: LaserField::top(d.e0, DEFAULT_RF_RABI, &p),
        branch: Branch::Blue,
        offset: 0.0,
    };
    let truth = SystemParams { t1_spin: 3.8e-6, ..p };
    let x = linspace(d.v_plateau_low, d.v_plateau_high, 25);
    let dataset = synth_from_tables(&model, &truth, &d, &BTreeMap::new(), &x, NoiseModel { sigma: 0.01, seed: 1 })?;

    let problem = FitProblem {
        dataset,
        model,
        free: vec![
            FreeParameter::new("t1_spin", 3e-7, 3e-5, 1.5e-6),
            FreeParameter::new("amplitude", 0.5, 2.0, 1.0),
        ],
        params: p,
        device: d,
        fixed: BTreeMap::new(),
    };
    let r = fit(&problem)?;
    println!(
        "T1 = {:.3} us, amplitude {:.4}, rss {:.3e}, {} evaluations, converged {}",
        r.value("t1_spin").unwrap_or(f64::NAN) * 1e6,
        r.value("amplitude").unwrap_or(f64::NAN),
        r.rss,
        r.evaluations,
        r.converged
    );
    Ok(())
}
