//! Dark recovery of a pumped spin and a fit of its lifetime.

use std::collections::BTreeMap;

use qdspin::estimate::*;
use qdspin::qdcore::*;
use qdspin::spectro::{centre_laser, t1_recovery_experiment};

fn main() -> qdspin::Result<()> {
    let p = SystemParams::paper_2017();
    let d = DeviceModel::paper_2017();
    let v = d.plateau_center();
    let pump = centre_laser(&p, &d, Branch::Blue, DEFAULT_RECOVERY_PUMP_RABI);
    let delays = linspace(0.0, 2e-5, 41);
    let points = t1_recovery_experiment(&p, &d, v, &pump, &delays)?;
    for (t, s) in points.iter().step_by(8) {
        println!("tau {:>5.1} us  signal {s:.4}", t * 1e6);
    }

    let problem = FitProblem {
        dataset: Dataset::new(delays, points.iter().map(|x| x.1).collect()),
        model: ModelSelector::RecoveryCurve { voltage: None, pump: None },
        free: vec![
            FreeParameter::new("t1_eff", 3e-7, 3e-5, 1.5e-6),
            FreeParameter::new("s0", 0.0, 0.5, 0.1),
            FreeParameter::new("s_inf", 0.2, 0.8, 0.4),
        ],
        params: p,
        device: d,
        fixed: BTreeMap::new(),
    };
    let r = fit(&problem)?;
    let report = bootstrap_uncertainty(&problem, &r, MIN_RESAMPLES, 1)?;
    println!(
        "fitted T1_eff {:.3} us (bootstrap std {:.1e} us), expected {:.3} us",
        r.value("t1_eff").unwrap_or(f64::NAN) * 1e6,
        report.std[0].1 * 1e6,
        qdspin::spectro::effective_t1(&p, d.cotunneling_rate(v)?) * 1e6
    );
    Ok(())
}
