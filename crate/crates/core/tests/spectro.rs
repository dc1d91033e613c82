use proptest::prelude::*;

use qdspin::liouville::*;
use qdspin::qdcore::constants::{HBAR, MICRO_EV, MILLIVOLT};
use qdspin::qdcore::*;
use qdspin::spectro::*;
use qdspin::Error;

fn defaults() -> (SystemParams, DeviceModel) {
    (SystemParams::paper_2017(), DeviceModel::paper_2017())
}

/// Normalized Gaussian weights on a uniform grid of spacing `h`, ±`span` σ.
fn gauss_grid(sigma: f64, h: f64, span: f64) -> Vec<(f64, f64)> {
    let n = (span * sigma / h).ceil() as i64;
    let raw: Vec<(f64, f64)> = (-n..=n)
        .map(|i| {
            let d = i as f64 * h;
            (d, (-0.5 * (d / sigma).powi(2)).exp())
        })
        .collect();
    let total: f64 = raw.iter().map(|x| x.1).sum();
    raw.into_iter().map(|(d, w)| (d, w / total)).collect()
}

/// Closed-form dip of a single emitter: (2βab − β²a²)/(b² + Δ²) with Δ in s⁻¹.
fn lorentz_dip(delta_rate: f64, beta: f64, p: &SystemParams) -> f64 {
    let a = 0.5 * (p.gamma_vertical + p.gamma_diagonal);
    let b = a + p.gamma_dephasing;
    (2.0 * beta * a * b - beta * beta * a * a) / (b * b + delta_rate * delta_rate)
}

fn half_max_crossing(xs: &[f64], ys: &[f64]) -> f64 {
    let (imax, &ymax) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let half = 0.5 * ymax;
    let mut right = f64::NAN;
    for i in imax..ys.len() - 1 {
        if ys[i] >= half && ys[i + 1] < half {
            right = xs[i] + (half - ys[i]) / (ys[i + 1] - ys[i]) * (xs[i + 1] - xs[i]);
            break;
        }
    }
    let mut left = f64::NAN;
    for i in (1..=imax).rev() {
        if ys[i] >= half && ys[i - 1] < half {
            left = xs[i] - (half - ys[i]) / (ys[i - 1] - ys[i]) * (xs[i - 1] - xs[i]);
            break;
        }
    }
    right - left
}

// ---- rf_intensity -------------------------------------------------------

#[test]
fn rf_intensity_examples() {
    let (p, _) = defaults();
    let ground = DensityMatrix4::thermal_ground();
    assert_eq!(rf_intensity(&ground, &p), 0.0);

    let mixed = DensityMatrix4::from_populations([0.3, 0.3, 0.2, 0.2]).unwrap();
    let q = SystemParams {
        eta_blue: 1.0,
        eta_red: 0.25,
        ..p
    };
    let blue = q.gamma_vertical * q.eta_blue * 0.2;
    assert!((rf_intensity(&mixed, &q) - 1.25 * blue).abs() < 1e-6 * blue);
    assert!((blue / (rf_intensity(&mixed, &q) - blue) - 4.0).abs() < 1e-12);

    let excited = DensityMatrix4::pure(Level::TrionUp);
    let r = SystemParams { eta_blue: 1.0, ..p };
    assert_eq!(rf_intensity(&excited, &r), r.gamma_vertical);
}

// ---- plateau maps -------------------------------------------------------

#[test]
fn zero_field_weak_drive_line_has_18_mv_width() {
    let (p, d) = defaults();
    let p0 = SystemParams { b_field_z: 0.0, ..p };
    let e = d.transition_energy(&p0, d.plateau_center(), Branch::Blue);
    let laser = LaserField::top(e, 1e8, &p0);
    let vs = linspace(d.plateau_center() - 0.03, d.plateau_center() + 0.03, 241);
    let map = plateau_map(&p0, &d, &laser, &[e], &vs).unwrap();
    let fwhm = half_max_crossing(&vs, &map.column(0));

    // Oracle: Gaussian ⊗ Lorentzian of the natural coherence width on a
    // fine grid, mapped to voltage through the lever arm.
    let hw = 0.5 * HBAR * p0.coherence_width();
    let sd = gauss_grid(p0.sigma_spectral_diffusion, hw / 20.0, 8.0);
    let es: Vec<f64> = linspace(-15e-6, 15e-6, 3001);
    let voigt: Vec<f64> = es
        .iter()
        .map(|x| sd.iter().map(|(dd, w)| w * hw * hw / ((x - dd).powi(2) + hw * hw)).sum())
        .collect();
    let oracle = half_max_crossing(&es, &voigt) / d.lever_arm;

    assert!((fwhm - oracle).abs() < 0.02 * oracle, "map {fwhm} vs oracle {oracle}");
    assert!((fwhm / MILLIVOLT - 18.0).abs() < 1.0, "fwhm {} mV", fwhm / MILLIVOLT);
}

#[test]
fn plateau_map_is_zero_outside_plateau_and_non_negative() {
    let (p, d) = defaults();
    let laser = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let es = linspace(d.e0 - 60e-6, d.e0 + 60e-6, 9);
    let vs = linspace(0.2, 0.45, 11);
    let map = plateau_map(&p, &d, &laser, &es, &vs).unwrap();
    assert!(map.values.iter().all(|v| *v >= 0.0));
    for (iy, v) in vs.iter().enumerate() {
        if d.charge_state(*v) != ChargeState::OneElectron {
            assert!(map.row(iy).iter().all(|x| *x == 0.0));
        }
    }
}

#[test]
fn edges_are_brighter_than_centre_at_field() {
    let (p, d) = defaults();
    let laser = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let vs = [d.v_plateau_low, d.plateau_center(), d.v_plateau_high];
    let cut = plateau_line_cut(&p, &d, &laser, Branch::Blue, 0.0, &vs).unwrap();
    let ratio = cut[0] / cut[1];
    assert!((6.0..=7.0).contains(&ratio), "edge/centre {ratio}");
    assert!((cut[0] - cut[2]).abs() < 1e-9 * cut[0]);
}

#[test]
fn swapping_eta_exchanges_branch_brightness() {
    let (p, d) = defaults();
    let swapped = SystemParams {
        eta_blue: p.eta_red,
        eta_red: p.eta_blue,
        ..p
    };
    let grid = diffusion_grid(&p);
    for v in [0.26, d.plateau_center(), 0.39] {
        for offset in [-2e-6, 0.0, 3e-6] {
            let blue = LaserField::top(d.transition_energy(&p, v, Branch::Blue) + offset, 1e9, &p);
            let red = LaserField::top(d.transition_energy(&p, v, Branch::Red) + offset, 1e9, &p);
            let a = rf_intensity_at(&p, &d, v, &[blue], &grid).unwrap();
            let b = rf_intensity_at(&swapped, &d, v, &[red], &grid).unwrap();
            assert!((a - b).abs() < 1e-9 * a.max(b), "{v} {offset}: {a} vs {b}");
        }
    }
}

#[test]
fn doubling_eta_doubles_maps_exactly_and_keeps_ratios() {
    let (p, d) = defaults();
    let q = SystemParams {
        eta_blue: 2.0 * p.eta_blue,
        eta_red: 2.0 * p.eta_red,
        ..p
    };
    let laser = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let es = linspace(d.e0 - 40e-6, d.e0 + 40e-6, 7);
    let vs = linspace(0.26, 0.40, 5);
    let a = plateau_map(&p, &d, &laser, &es, &vs).unwrap();
    let b = plateau_map(&q, &d, &laser, &es, &vs).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert_eq!(2.0 * x, *y);
    }
    let v = d.plateau_center();
    let pump = centre_laser(&p, &d, Branch::Blue, DEFAULT_RF_RABI);
    let fp = preparation_fidelity(&steady_state(&build_liouvillian(&p, &d, v, &[pump]).unwrap()).unwrap(), SpinTarget::Down);
    let fq = preparation_fidelity(&steady_state(&build_liouvillian(&q, &d, v, &[pump]).unwrap()).unwrap(), SpinTarget::Down);
    assert_eq!(fp, fq);
}

#[test]
fn zero_field_map_is_the_limit_of_small_field_maps() {
    let (p, d) = defaults();
    let p0 = SystemParams { b_field_z: 0.0, ..p };
    let pe = SystemParams { b_field_z: 1e-9, ..p };
    let laser = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let es = linspace(d.e0 - 20e-6, d.e0 + 20e-6, 9);
    let vs = linspace(0.27, 0.39, 7);
    let a = plateau_map(&p0, &d, &laser, &es, &vs).unwrap();
    let b = plateau_map(&pe, &d, &laser, &es, &vs).unwrap();
    let scale = a.max();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() <= 1e-6 * scale, "{x} vs {y}");
    }
}

#[test]
fn maps_do_not_depend_on_thread_count() {
    let (p, d) = defaults();
    let laser = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let es = linspace(d.e0 - 40e-6, d.e0 + 40e-6, 6);
    let vs = linspace(0.24, 0.42, 8);
    let run = |n: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| plateau_map(&p, &d, &laser, &es, &vs).unwrap())
    };
    let one = run(1);
    let three = run(3);
    assert_eq!(one.to_csv_string(), three.to_csv_string());
}

#[test]
fn two_color_without_fixed_laser_is_shifted_plateau_map() {
    let (p, d) = defaults();
    let scan = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let fixed = centre_laser(&p, &d, Branch::Red, 0.0);
    let es = linspace(d.e0 - 40e-6, d.e0 + 40e-6, 7);
    let vs = linspace(0.28, 0.46, 7);
    let shifted: Vec<f64> = vs.iter().map(|v| v - d.two_color_voltage_shift).collect();
    let two = two_color_map(&p, &d, &fixed, &scan, &es, &vs).unwrap();
    let one = plateau_map(&p, &d, &scan, &es, &shifted).unwrap();
    assert_eq!(two.values, one.values);
    assert!((d.two_color_voltage_shift - 0.050).abs() < 1e-15);
}

#[test]
fn double_resonance_matches_two_drive_rate_oracle() {
    let (p, d) = defaults();
    let v = d.plateau_center();
    let rabi = DEFAULT_RF_RABI;
    let fixed = centre_laser(&p, &d, Branch::Red, rabi);
    let scan = centre_laser(&p, &d, Branch::Blue, rabi);
    let double = rf_intensity_at(&p, &d, v, &[fixed, scan], &diffusion_grid(&p)).unwrap();

    // Equal drives on both vertical transitions cancel pumping; each pair
    // then saturates as a two-level system: p_e = W/2 / (2W + Γ + γ), with
    // W the Lorentzian excitation rate at the diffusion offset.
    let gp = p.coherence_width();
    let gt = p.gamma_vertical + p.gamma_diagonal;
    let sd = gauss_grid(p.sigma_spectral_diffusion, 0.05 * HBAR * gp, 8.0);
    let oracle: f64 = sd
        .iter()
        .map(|(dd, w)| {
            let delta = dd / HBAR;
            let rate = 0.5 * rabi * rabi * 0.5 * gp / (delta * delta + 0.25 * gp * gp);
            let pe = 0.5 * rate / (2.0 * rate + gt);
            w * p.gamma_vertical * (p.eta_blue + p.eta_red) * pe
        })
        .sum();
    assert!((double - oracle).abs() < 1e-3 * oracle, "{double} vs {oracle}");

    let single = plateau_line_cut(&p, &d, &scan, Branch::Blue, 0.0, &[v]).unwrap()[0];
    assert!(double >= 4.0 * single, "double {double} single {single}");
}

#[test]
fn bright_spot_sits_at_the_screening_shift() {
    let (p, d) = defaults();
    let fixed = centre_laser(&p, &d, Branch::Red, DEFAULT_RF_RABI);
    let scan = LaserField::top(0.0, DEFAULT_RF_RABI, &p);
    let eb = d.transition_energy(&p, d.plateau_center(), Branch::Blue);
    let es = linspace(eb - 4e-6, eb + 4e-6, 5);
    let vs = linspace(d.plateau_center() + 0.03, d.plateau_center() + 0.07, 9);
    let map = two_color_map(&p, &d, &fixed, &scan, &es, &vs).unwrap();
    let (ix, iy, _) = map.argmax();
    assert_eq!(ix, 2);
    assert!((vs[iy] - d.plateau_center() - 0.05).abs() < 1e-12);
}

// ---- transmission -------------------------------------------------------

#[test]
fn amplitude_examples() {
    let (p, _) = defaults();
    for delta in [-1e-5, 0.0, 3e-6] {
        assert_eq!(transmission_amplitude(delta, 0.0, &p), num_complex::Complex64::new(1.0, 0.0));
    }
    let q = SystemParams {
        gamma_dephasing: 0.0,
        ..p
    };
    assert!(transmission_amplitude(0.0, 1.0, &q).norm() < 1e-15);
    assert!((transmission_amplitude(0.0, 0.5, &q).norm_sqr() - 0.25).abs() < 1e-15);
}

#[test]
fn no_diffusion_gives_bare_power_transmission() {
    let (p, _) = defaults();
    let q = SystemParams {
        sigma_spectral_diffusion: 0.0,
        t0_background: 0.8,
        ..p
    };
    let grid = linspace(-5e-6, 5e-6, 11);
    let s = transmission_observed(&grid, q.beta_blue, &q).unwrap();
    for (d, t) in grid.iter().zip(&s.transmission) {
        let exact = q.t0_background * transmission_amplitude(*d, q.beta_blue, &q).norm_sqr();
        assert_eq!(*t, exact);
        let closed = q.t0_background * (1.0 - lorentz_dip(d / HBAR, q.beta_blue, &q));
        assert!((t - closed).abs() < 1e-14);
    }
    // Homogeneous FWHM is ħ(Γ+γ) + 2ħγ_dp.
    let fwhm = HBAR * (q.gamma_vertical + q.gamma_diagonal + 2.0 * q.gamma_dephasing);
    assert!((s.fwhm - fwhm).abs() < 1e-6 * fwhm, "{} vs {fwhm}", s.fwhm);
}

#[test]
fn observed_dip_matches_brute_force_convolution() {
    let (p, _) = defaults();
    let hw = 0.5 * HBAR * (p.gamma_vertical + p.gamma_diagonal);
    let sd = gauss_grid(p.sigma_spectral_diffusion, hw / 40.0, 9.0);
    for delta in [0.0, 2e-6, 5e-6, 1.2e-5] {
        let got = observed_transmission(delta, p.beta_blue, &p).unwrap();
        let want: f64 = p.t0_background
            * sd.iter()
                .map(|(dd, w)| w * (1.0 - lorentz_dip((delta - dd) / HBAR, p.beta_blue, &p)))
                .sum::<f64>();
        assert!((got - want).abs() < 2e-6, "{delta}: {got} vs {want}");
    }
}

#[test]
fn default_profile_dip_has_paper_contrast_and_width() {
    let (p, _) = defaults();
    let s = transmission_observed(&linspace(-3e-5, 3e-5, 61), p.beta_blue, &p).unwrap();
    assert!((s.contrast - 0.15).abs() <= 0.02, "contrast {}", s.contrast);
    assert!((s.fwhm / MICRO_EV - 7.4).abs() <= 0.5, "fwhm {}", s.fwhm / MICRO_EV);
    assert!((s.transmission[0] - p.t0_background).abs() < 1e-3);
}

#[test]
fn contrast_falls_with_diffusion_and_dephasing_and_rises_with_beta() {
    let (p, _) = defaults();
    let at = |q: &SystemParams, beta: f64| transmission_observed(&[0.0], beta, q).unwrap().contrast;
    let gamma_nat = HBAR * p.gamma_vertical;
    let mut last = f64::INFINITY;
    for k in 0..=10 {
        let q = SystemParams {
            sigma_spectral_diffusion: k as f64 * gamma_nat,
            ..p
        };
        let c = at(&q, p.beta_blue);
        assert!(c <= last + 1e-9, "sigma step {k}: {c} > {last}");
        last = c;
    }
    // Without diffusion the depth (2βab − β²a²)/b² falls with b = a + γ_dp.
    let mut last = f64::INFINITY;
    for k in 0..=8 {
        let q = SystemParams {
            gamma_dephasing: k as f64 * 0.25 * p.gamma_vertical,
            sigma_spectral_diffusion: 0.0,
            ..p
        };
        let c = at(&q, p.beta_blue);
        assert!(c <= last + 1e-9);
        last = c;
    }
    let mut last = -1.0;
    for k in 0..=10 {
        let c = at(&p, k as f64 / 10.0);
        assert!(c >= last - 1e-9);
        last = c;
    }
}

#[test]
fn spin_dependent_transmission_examples() {
    let (p, _) = defaults();
    let t0 = p.t0_background;
    let dark = spin_dependent_transmission((0.0, 1.0), 0.0, &p).unwrap();
    assert!((dark - t0).abs() < 1e-3 * t0);
    let bright = spin_dependent_transmission((1.0, 0.0), 0.0, &p).unwrap() / t0;
    assert!((bright - 0.85).abs() <= 0.02, "{bright}");
    let mixed = spin_dependent_transmission((0.14, 0.86), 0.0, &p).unwrap() / t0;
    assert!(mixed >= 0.97, "{mixed}");
    let lin = 0.14 * bright + 0.86 * dark / t0;
    assert!((mixed - lin).abs() < 1e-12);
    assert!(spin_dependent_transmission((0.7, 0.5), 0.0, &p).is_err());
}

#[test]
fn spectrum_csv_layout() {
    let (p, _) = defaults();
    let s = transmission_observed(&[-1e-6, 0.0, 1e-6], p.beta_blue, &p).unwrap();
    let text = s.to_csv_string();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with(','));
    assert!(lines[1].starts_with("transmission,"));
    assert_eq!(lines[1].split(',').count(), 4);
}

// ---- pump-probe ---------------------------------------------------------

fn centre_result(protocol: &PumpProbeProtocol) -> PumpProbeResult {
    let (p, d) = defaults();
    switching_point(protocol, &p, &d, d.plateau_center()).unwrap()
}

#[test]
fn blue_pump_restores_transmission_and_red_pump_suppresses_it() {
    let (p, _) = defaults();
    let on = centre_result(&PumpProbeProtocol::default()).normalized_transmission().unwrap();
    let off = centre_result(&PumpProbeProtocol::red_pump(&p))
        .normalized_transmission()
        .unwrap();
    assert!(on >= 0.97, "on {on}");
    assert!((off - 0.87).abs() <= 0.02, "off {off}");
}

#[test]
fn zero_duration_pump_equals_no_pump() {
    let zero = PumpProbeProtocol {
        pump_duration: 0.0,
        ..Default::default()
    };
    let a = centre_result(&zero).normalized_transmission().unwrap();
    let b = centre_result(&PumpProbeProtocol::default().without_pump())
        .normalized_transmission()
        .unwrap();
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

#[test]
fn recorded_transmission_is_independent_of_repetition_budget() {
    let base = PumpProbeProtocol::default();
    let a = centre_result(&base).normalized_transmission().unwrap();
    let b = centre_result(&PumpProbeProtocol {
        repetitions: 500,
        ..base
    })
    .normalized_transmission()
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn unconverged_cycle_is_reported() {
    let (p, d) = defaults();
    let protocol = PumpProbeProtocol {
        repetitions: 2,
        ..Default::default()
    };
    let err = switching_point(&protocol, &p, &d, d.plateau_center()).unwrap_err();
    assert!(matches!(err, Error::CycleNotConverged { .. }), "{err}");
    assert!(err.is_solver_failure());
}

#[test]
fn strong_probe_is_rejected() {
    let protocol = PumpProbeProtocol {
        probe_rabi: 1e9,
        ..Default::default()
    };
    let (p, d) = defaults();
    let err = switching_point(&protocol, &p, &d, d.plateau_center()).unwrap_err();
    assert!(matches!(err, Error::ProbeNotWeak { .. }), "{err}");
}

#[test]
fn window_average_matches_sampled_propagation_without_diffusion() {
    let (p, d) = defaults();
    let q = SystemParams {
        sigma_spectral_diffusion: 0.0,
        ..p
    };
    let v = d.plateau_center();
    let protocol = PumpProbeProtocol::default();
    let r = switching_point(&protocol, &q, &d, v).unwrap();

    // Oracle: iterate the cycle with `propagate`, then Simpson-average the
    // probe window over sub-steps much shorter than the trion lifetime.
    let pump = LaserField::top(d.transition_energy(&q, v, Branch::Blue), protocol.pump_rabi, &q);
    let lp = build_liouvillian(&q, &d, v, &[pump]).unwrap();
    let ld = build_liouvillian(&q, &d, v, &[]).unwrap();
    let mut rho = DensityMatrix4::thermal_ground();
    for _ in 0..50 {
        rho = propagate(&lp, &rho, protocol.pump_duration).unwrap();
        rho = propagate(&ld, &rho, protocol.probe_duration).unwrap();
    }
    rho = propagate(&lp, &rho, protocol.pump_duration).unwrap();
    let n = 20_000;
    let dt = protocol.probe_duration / n as f64;
    let step = propagator(&ld, dt).unwrap();
    let mut mean = [0.0; 4];
    let mut cur = rho.to_vector();
    for k in 0..=n {
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 } / (3.0 * n as f64);
        for (i, m) in mean.iter_mut().enumerate() {
            *m += w * cur[5 * i].re;
        }
        cur = step * cur;
    }
    for (a, b) in r.windows[0].mean_populations.iter().zip(&mean) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    let t = spin_dependent_transmission((mean[0], mean[1]), 0.0, &q).unwrap();
    assert!((r.windows[0].transmission.unwrap() - t).abs() < 1e-9);
}

#[test]
fn without_cotunneling_edges_recover_like_the_centre() {
    let (p, d) = defaults();
    let d0 = DeviceModel {
        kappa_cot_max: 0.0,
        ..d
    };
    let protocol = PumpProbeProtocol::default();
    let centre = switching_point(&protocol, &p, &d0, d0.plateau_center()).unwrap();
    let edge = switching_point(&protocol, &p, &d0, d0.v_plateau_low + 1e-3).unwrap();
    let (a, b) = (
        centre.normalized_transmission().unwrap(),
        edge.normalized_transmission().unwrap(),
    );
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");

    let with = switching_point(&protocol, &p, &d, d.v_plateau_low + 1e-3).unwrap();
    assert!(with.normalized_transmission().unwrap() < a - 0.02);
}

#[test]
fn transmission_map_values_are_bounded() {
    let (p, d) = defaults();
    let es = linspace(d.e0 - 30e-6, d.e0 + 30e-6, 5);
    let vs = linspace(0.24, 0.42, 4);
    let map = transmission_plateau_map(&p, &d, &PumpProbeProtocol::default(), &es, &vs).unwrap();
    for v in &map.values {
        assert!(*v >= 0.0 && *v <= p.t0_background * (1.0 + 1e-6), "{v}");
    }
}

#[test]
fn time_trace_is_physical() {
    let r = centre_result(&PumpProbeProtocol::default());
    assert!(r.trace.len() > 2);
    for s in &r.trace {
        let total: f64 = s.populations.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(s.populations.iter().all(|x| *x > -1e-10));
    }
    assert!(r.trace.windows(2).all(|w| w[1].time > w[0].time));
}

// ---- fidelity, recovery, switching -------------------------------------

#[test]
fn fidelity_examples() {
    let (p, d) = defaults();
    assert_eq!(preparation_fidelity(&DensityMatrix4::thermal_ground(), SpinTarget::Down), 0.5);
    let v = d.plateau_center();
    let d0 = DeviceModel {
        kappa_cot_max: 0.0,
        ..d
    };
    let pump = centre_laser(&p, &d0, Branch::Blue, DEFAULT_RF_RABI);
    let l = build_liouvillian(&p, &d0, v, &[pump]).unwrap();
    let f = preparation_fidelity(&steady_state(&l).unwrap(), SpinTarget::Down);
    assert!(f >= 0.95, "{f}");
    let by_time = propagate(&l, &DensityMatrix4::thermal_ground(), 100.0 * p.t1_spin).unwrap();
    assert!((preparation_fidelity(&by_time, SpinTarget::Down) - f).abs() < 1e-6);

    let q = SystemParams {
        t1_spin: f64::INFINITY,
        ..p
    };
    let l = build_liouvillian(&q, &d0, v, &[pump]).unwrap();
    assert!(preparation_fidelity(&steady_state(&l).unwrap(), SpinTarget::Down) > 1.0 - 1e-9);
}

#[test]
fn intensity_ratio_fidelity_examples() {
    assert_eq!(fidelity_from_intensity_ratio(1.0, 1.0).unwrap(), 0.5);
    let f = fidelity_from_intensity_ratio(1.0, 6.5).unwrap();
    assert!((f - (1.0 - 1.0 / 13.0)).abs() < 1e-15 && (f - 0.923).abs() < 5e-4);
    assert_eq!(fidelity_from_intensity_ratio(0.0, 3.0).unwrap(), 1.0);
    assert!(matches!(
        fidelity_from_intensity_ratio(2.5, 1.0),
        Err(Error::InvalidRatio { .. })
    ));
    assert!(fidelity_from_intensity_ratio(0.5, 0.0).is_err());
}

#[test]
fn recovery_starts_at_residual_and_saturates_at_half() {
    let (p, d) = defaults();
    let v = d.plateau_center();
    let pump = centre_laser(&p, &d, Branch::Blue, 6.5e8);
    let l = build_liouvillian(&p, &d, v, &[pump]).unwrap();
    let f = preparation_fidelity(&steady_state(&l).unwrap(), SpinTarget::Down);
    let pts = t1_recovery_experiment(&p, &d, v, &pump, &[0.0, 1e-6, 100.0 * p.t1_spin]).unwrap();
    assert!((pts[0].1 - (1.0 - f)).abs() < 1e-12);
    assert!((pts[2].1 - 0.5).abs() < 1e-9);
    assert!(pts[1].1 > pts[0].1 && pts[1].1 < 0.5);

    // Late-time approach to 1/2 has rate 1/T1 + κ.
    let t1e = effective_t1(&p, d.cotunneling_rate(v).unwrap());
    let late = t1_recovery_experiment(&p, &d, v, &pump, &[2e-6, 2e-6 + t1e]).unwrap();
    let ratio = (0.5 - late[1].1) / (0.5 - late[0].1);
    assert!((ratio - (-1.0f64).exp()).abs() < 1e-6, "{ratio}");
}

#[test]
fn recovery_rejects_pumps_on_both_or_no_branch() {
    let (p, d) = defaults();
    let off = LaserField::top(d.e0 + 1e-3, 1e9, &p);
    assert!(t1_recovery_experiment(&p, &d, d.plateau_center(), &off, &[0.0]).is_err());
    let pump = centre_laser(&p, &d, Branch::Blue, 1e9);
    assert!(t1_recovery_experiment(&p, &d, d.plateau_center(), &pump, &[-1.0]).is_err());
}

#[test]
fn switching_contrast_examples() {
    assert_eq!(switching_contrast(0.9, 0.9, 1.0).unwrap(), 1.0);
    let r = switching_contrast(0.97, 0.87, 1.0).unwrap();
    assert!((r - 13.0 / 3.0).abs() < 1e-9 && (r - 4.3).abs() < 0.05);
    assert_eq!(switching_contrast(1.0, 0.87, 1.0).unwrap(), f64::INFINITY);
    assert!(switching_contrast(0.0, 0.87, 1.0).is_err());
    assert!(switching_contrast(0.9, 1.2, 1.0).is_err());
}

#[test]
fn switching_energy_examples() {
    let e = |w: f64| switching_energy(w, 1e-6, 100.0).unwrap();
    assert!((e(40e-9) - 0.4e-15).abs() < 1e-30);
    assert_eq!(e(0.0), 0.0);
    assert!((e(80e-9) - 0.8e-15).abs() < 1e-30);
    let (p, _) = defaults();
    assert!((photons_per_cycle(&p) - 100.0).abs() < 1e-9);
    assert!((pump_cycle_energy(40e-9, 1e-6) - 40e-15).abs() < 1e-28);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn observed_transmission_stays_in_range(
        delta in -4e-5f64..4e-5,
        beta in 0.0f64..1.0,
        sigma in 0.0f64..5e-6,
        t0 in 0.2f64..1.0,
    ) {
        let (p, _) = defaults();
        let q = SystemParams { sigma_spectral_diffusion: sigma, t0_background: t0, ..p };
        let t = observed_transmission(delta, beta, &q).unwrap();
        prop_assert!(t >= 0.0 && t <= t0 * (1.0 + 1e-6));
    }

    #[test]
    fn rf_intensity_is_non_negative(
        e in -5e-5f64..5e-5,
        v in 0.25f64..0.406,
        rabi in 0.0f64..3e9,
    ) {
        let (p, d) = defaults();
        let laser = LaserField::top(d.e0 + e, rabi, &p);
        let i = rf_intensity_at(&p, &d, v, &[laser], &quadrature::DiffusionGrid::new(0.0, 1.0)).unwrap();
        prop_assert!(i >= 0.0);
    }
}
