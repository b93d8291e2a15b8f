use proptest::prelude::*;
use twpa::gain::*;
use twpa::io::DeviceConfig;
use twpa::units::linear_to_db;

const FP: f64 = 7.71e9;

/// Uniform dispersive line, `k ∝ ω` with a weak cubic term so the linear
/// mismatch is nonzero.
fn uniform(fs: f64, cells: usize, tan_d: f64) -> CmeLine {
    let t = ModeTriplet::new(FP, fs).unwrap();
    let k = |f: f64| 0.04 * f / 7e9 * (1.0 + 0.02 * (f / 7e9).powi(2));
    CmeLine::uniform(t, cells, [k(t.pump), k(t.signal), k(t.idler)], 50.0, 5e-6, tan_d)
}

fn gain_of(line: &CmeLine, pump_flux: f64) -> CmeRun {
    let input = input_state(&line.triplet, pump_flux, -150.0);
    solve(line, input, &CmeOptions::default(), true).unwrap()
}

#[test]
fn phase_matched_gain_follows_cosh_squared() {
    let base = uniform(6.59e9, 3000, 0.0);
    let g = base.cells[0].g;
    let mut worst: f64 = 0.0;
    for target_db in [0.5, 3.0, 6.0, 10.0, 15.0, 20.0, 25.0] {
        let glin: f64 = 10f64.powf(target_db / 10.0);
        let flux = glin.sqrt().acosh() / (g * 3000.0);
        let line = base.clone().phase_matched(flux);
        let run = gain_of(&line, flux);
        let oracle = linear_to_db((g * flux * 3000.0).cosh().powi(2));
        worst = worst.max((run.gain_db - oracle).abs());
    }
    assert!(worst < 0.1, "worst deviation {worst} dB");
}

#[test]
fn unpumped_line_shows_insertion_loss() {
    let netlist = DeviceConfig::default().build().unwrap();
    let t = ModeTriplet::new(FP, 6.0e9).unwrap();
    let line = CmeLine::from_netlist(&netlist, t).unwrap().unwrap();
    let run = gain_of(&line, 0.0);
    let expected = -10.0 / std::f64::consts::LN_10 * line.cells.iter().map(|c| c.k[1] * netlist.loss_tangent).sum::<f64>();
    assert!(expected < -0.1);
    assert!((run.gain_db - expected).abs() < 1e-9, "{} vs {expected}", run.gain_db);
}

#[test]
fn lossless_device_conserves_manley_rowe() {
    let netlist = DeviceConfig::default().build().unwrap().with_loss_tangent(0.0).unwrap();
    let pump = PumpConfig::current_fraction(FP, 0.392).unwrap();
    let run = run_point(&netlist, &pump, 6.59e9, -150.0, &CmeOptions::default(), true).unwrap();
    assert!(run.gain_db > 15.0);
    let drift = photon_flux_conservation(run.trajectory.as_ref().unwrap());
    assert!(drift < 1e-9, "drift {drift}");
}

#[test]
fn signal_idler_exchange_is_symmetric() {
    for (flux_scale, fs) in [(0.5, 6.0e9), (1.0, 6.8e9)] {
        let a = uniform(fs, 2000, 0.0);
        let b = uniform(2.0 * FP - fs, 2000, 0.0);
        let flux = flux_scale * 1.0 / (a.cells[0].g * 2000.0);
        let (ga, gb) = (gain_of(&a, flux).gain_db, gain_of(&b, flux).gain_db);
        assert!((ga - gb).abs() < 1e-6, "{ga} vs {gb}");
    }
}

#[test]
fn halving_the_step_changes_gain_by_less_than_tolerance() {
    let netlist = DeviceConfig::default().build().unwrap();
    let pump = PumpConfig::current_fraction(FP, 0.392).unwrap();
    let opts = CmeOptions::default();
    let run = run_point(&netlist, &pump, 6.59e9, -150.0, &opts, false).unwrap();
    assert!(run.refinement_change_db < opts.tolerance_db);
    let t = ModeTriplet::new(FP, 6.59e9).unwrap();
    let line = CmeLine::from_netlist(&netlist, t).unwrap().unwrap();
    let input = input_state(&t, pump.photon_flux(netlist.min_critical_current()), -150.0);
    let (o1, _) = integrate(&line, input, 2 * run.substeps, false).unwrap();
    let g2 = linear_to_db(o1.signal.norm_sqr() / input.signal.norm_sqr());
    assert!((g2 - run.gain_db).abs() < 0.01);
}

#[test]
fn stop_band_and_guard_points_are_excluded() {
    let netlist = DeviceConfig::default().build().unwrap();
    let pump = PumpConfig::current_fraction(FP, 0.3).unwrap();
    let freqs = [7.70e9, 8.004e9, 6.0e9];
    let g = cme_gain(&netlist, &pump, &freqs, &CmeOptions::default()).unwrap();
    assert_eq!(g.frequencies, vec![6.0e9]);
    assert_eq!(g.excluded.len(), 2);
    assert!(g.excluded[0].reason.contains("guard"));
    assert!(g.excluded[1].reason.contains("stop band"));
}

#[test]
fn pump_in_stop_band_is_a_configuration_error() {
    let netlist = DeviceConfig::default().build().unwrap();
    let pump = PumpConfig::current_fraction(8.004e9, 0.3).unwrap();
    let err = cme_gain(&netlist, &pump, &[6e9], &CmeOptions::default()).unwrap_err();
    assert!(err.is_input_error());
}

#[test]
fn p1db_interpolates_first_crossing() {
    let p = [-130.0, -120.0, -110.0, -100.0];
    let g = [20.0, 19.9, 19.4, 18.0];
    match find_p1db(&p, &g, 20.0) {
        P1dbResult::Found { power_dbm } => assert!((power_dbm - (-110.0 + 10.0 * 0.4 / 1.4)).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    assert!(matches!(find_p1db(&p, &[20.0; 4], 20.0), P1dbResult::NotFound { max_power_dbm } if max_power_dbm == -100.0));
}

#[test]
fn lossless_profile_has_unit_efficiency() {
    let netlist = DeviceConfig::default().build().unwrap();
    let pump = PumpConfig::current_fraction(FP, 0.392).unwrap();
    let lossy = qe_profile(&netlist, &pump, 6.0e9, 64, &CmeOptions::default()).unwrap();
    let eta = lossy.efficiency(20.0).unwrap();
    assert!(eta > 0.95 && eta < 1.0, "{eta}");
    let clean = qe_profile(&netlist.with_loss_tangent(0.0).unwrap(), &pump, 6.0e9, 64, &CmeOptions::default()).unwrap();
    assert_eq!(clean.efficiency(20.0).unwrap(), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gain_grows_with_pump(a in 0.05f64..1.5, b in 0.05f64..1.5) {
        let line = uniform(6.3e9, 800, 0.0);
        let unit = 1.0 / (line.cells[0].g * 800.0);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let g_lo = gain_of(&line.clone().phase_matched(lo * unit), lo * unit).gain_db;
        let g_hi = gain_of(&line.clone().phase_matched(hi * unit), hi * unit).gain_db;
        prop_assert!(g_hi >= g_lo - 1e-9);
    }

    #[test]
    fn loss_never_adds_gain(flux in 0.1f64..1.2, tan_d in 1e-5f64..1e-3) {
        let clean = uniform(6.1e9, 600, 0.0);
        let lossy = uniform(6.1e9, 600, tan_d);
        let unit = 1.0 / (clean.cells[0].g * 600.0);
        let g0 = gain_of(&clean, flux * unit).gain_db;
        let g1 = gain_of(&lossy, flux * unit).gain_db;
        prop_assert!(g1 < g0);
    }
}
