use proptest::prelude::*;
use twpa::checks::synthetic_budget;
use twpa::noise::*;

#[test]
fn measured_budget_gives_published_efficiency() {
    let (budget, report) = budget_pipeline(&synthetic_budget(0.378, 3.99, 104.2, 6.59e9, 1e4), 1e4).unwrap();
    assert!((report.eta_intrinsic_normalized - 0.921).abs() < 0.005, "{report:?}");
    assert!((report.eta_sys_on - 0.836).abs() < 0.003);
    assert!((report.gain_db - 20.18).abs() < 0.01);
    assert!(!report.nonphysical);
    assert!(budget.added_photons > 0.0);
}

#[test]
fn missing_record_is_reported() {
    let mut b = synthetic_budget(0.4, 4.0, 100.0, 6e9, 1e4);
    b.remove(1);
    assert!(budget_pipeline(&b, 1e4).is_err());
}

#[test]
fn low_on_temperature_is_flagged_not_clamped() {
    // Too little added noise for the gain pushes the efficiency over one.
    let (_, r) = budget_pipeline(&synthetic_budget(0.16, 4.0, 100.0, 6e9, 1e4), 1e4).unwrap();
    assert!(r.eta_intrinsic_normalized > 1.0);
    assert!(r.nonphysical);
}

proptest! {
    #[test]
    fn pipeline_matches_closed_form(
        t_on in 0.1f64..2.0,
        t_off in 0.5f64..10.0,
        g_db in 5.0f64..30.0,
        f in 4e9f64..8e9,
    ) {
        let g = 10f64.powf(g_db / 10.0);
        let (_, r) = budget_pipeline(&synthetic_budget(t_on, t_off, g, f, 1e4), 1e4).unwrap();
        let closed = eta_intrinsic(r.eta_sys_on, r.eta_sys_off, g);
        prop_assume!(closed.is_ok());
        prop_assert!((r.eta_intrinsic_normalized / closed.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn snr_improvement_is_antisymmetric(a in 0.05f64..10.0, b in 0.05f64..10.0) {
        let fwd = snri_from_temps(a, b).unwrap();
        prop_assert!((fwd + snri_from_temps(b, a).unwrap()).abs() < 1e-12);
    }
}
