use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::TAU;
use twpa::device::{build_device, make_taper, TaperShape};
use twpa::io::DeviceConfig;
use twpa::network::*;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn default_device() -> twpa::device::DeviceNetlist {
    DeviceConfig::default().build().unwrap()
}

#[test]
fn lossless_default_device_is_unitary() {
    let n = default_device().with_loss_tangent(0.0).unwrap();
    let s = cascade_sparams(&n, &grid(4e9, 12e9, 4001)).unwrap();
    let worst = s
        .s11
        .values
        .iter()
        .zip(&s.s21.values)
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn loss_lowers_transmission_everywhere() {
    let n = default_device();
    let f = grid(4e9, 7.9e9, 101);
    let lossy = cascade_sparams(&n, &f).unwrap();
    let clean = cascade_sparams(&n.with_loss_tangent(0.0).unwrap(), &f).unwrap();
    for (a, b) in lossy.s21.values.iter().zip(&clean.s21.values) {
        assert!(a.norm() < b.norm());
    }
}

#[test]
fn stop_band_sits_at_resonator_frequency() {
    let d = dispersion(&default_device(), &grid(7.5e9, 8.5e9, 2001)).unwrap();
    let c = d.gap_center().unwrap();
    assert!((c - 8e9).abs() < 100e6, "{c}");
}

fn gap(n: &twpa::device::DeviceNetlist, lo: f64, hi: f64) -> (f64, f64) {
    let d = dispersion(n, &grid(lo, hi, 1201)).unwrap();
    let inside: Vec<f64> = d.frequencies.iter().zip(&d.in_gap).filter(|x| *x.1).map(|x| *x.0).collect();
    (d.gap_center().unwrap(), inside[inside.len() - 1] - inside[0])
}

#[test]
fn moving_the_resonator_moves_the_stop_band() {
    let mut cfg = DeviceConfig::default();
    let (c0, width) = gap(&cfg.build().unwrap(), 7.8e9, 8.4e9);
    cfg.resonator.as_mut().unwrap().frequency_ghz += 0.2;
    let (c1, _) = gap(&cfg.build().unwrap(), 7.8e9, 8.6e9);
    assert!(((c1 - c0) - 200e6).abs() <= width, "shift {} width {width}", c1 - c0);
}

#[test]
fn low_frequency_wavenumber_is_lumped_ladder() {
    let n = default_device();
    let cc = n.resonators[0].1.coupling_capacitance;
    let per = n.resonators[0].1.insertion_period as f64;
    let f = grid(0.25e9, 2e9, 8);
    let d = dispersion(&n, &f).unwrap();
    for (i, fi) in f.iter().enumerate() {
        let w = TAU * fi;
        let oracle: f64 = n
            .cells
            .iter()
            .map(|c| w * (c.junction.chain_inductance() * (c.stub.capacitance() + cc / per)).sqrt())
            .sum::<f64>()
            / n.len() as f64;
        let rel = (d.wavenumber[i] - oracle).abs() / oracle;
        assert!(rel < 0.01, "{fi}: {} vs {oracle} ({rel})", d.wavenumber[i]);
    }
}

#[test]
fn uniform_line_matches_bloch_wavenumber() {
    let cfg = DeviceConfig::default();
    let taper = make_taper(400, 6e-6, 6e-6, TaperShape::Linear { ramp_fraction: 1.0 }).unwrap();
    let n = build_device(&taper, &cfg.cell_rule(), None, 0.0).unwrap();
    let f = grid(1e9, 11e9, 201);
    let d = dispersion(&n, &f).unwrap();
    for (i, fi) in f.iter().enumerate() {
        let m = unit_cell_abcd(&n.cells[0], TAU * fi, 0.0).unwrap();
        let bloch = m.half_trace().re.acos();
        // Only the end-mismatch standing wave separates the two.
        assert!((d.wavenumber[i] - bloch).abs() < 1e-4 * bloch, "{fi}");
    }
}

#[test]
fn dielectric_attenuation_is_linear_in_loss_tangent() {
    let d = dispersion(&default_device(), &grid(4e9, 7e9, 301)).unwrap();
    assert!(dielectric_attenuation_db(&d, 0.0).iter().all(|v| *v == 0.0));
    let a = dielectric_attenuation_db(&d, 6e-5);
    let b = dielectric_attenuation_db(&d, 12e-5);
    assert!(a.iter().zip(&b).all(|(x, y)| (2.0 * x - y).abs() <= 1e-15 * y.abs()));
}

#[test]
fn attenuation_is_proportional_to_frequency_where_dispersionless() {
    let f = grid(0.5e9, 2e9, 101);
    let d = dispersion(&default_device(), &f).unwrap();
    let a = dielectric_attenuation_db(&d, 6e-5);
    let (mx, my) = (f.iter().sum::<f64>() / 101.0, a.iter().sum::<f64>() / 101.0);
    let sxy: f64 = f.iter().zip(&a).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = f.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = a.iter().map(|y| (y - my).powi(2)).sum();
    assert!(sxy * sxy / (sxx * syy) > 0.999);
}

fn lossy_data(d: &DispersionSpectrum, tan_d: f64, offset: f64, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).unwrap();
    dielectric_attenuation_db(d, tan_d)
        .iter()
        .zip(&d.in_gap)
        .map(|(a, g)| if *g { 40.0 } else { a + offset + noise.sample(&mut rng) })
        .collect()
}

#[test]
fn loss_fit_round_trip_and_limits() {
    let d = dispersion(&default_device(), &grid(4e9, 12e9, 4001)).unwrap();
    let opts = LossFitOptions::default();

    let r = fit_loss_tangent(&lossy_data(&d, 6e-5, 0.11, 0.01, 1), &d, &opts).unwrap();
    assert!((r.loss_tangent_eff / 6e-5 - 1.0).abs() < 0.05, "{r:?}");
    assert!((r.offset_db - 0.11).abs() < 0.02);

    let zero = fit_loss_tangent(&lossy_data(&d, 0.0, 0.0, 0.01, 2), &d, &opts).unwrap();
    assert!(zero.loss_tangent_eff < 3.0 * zero.slope_uncertainty + 1e-12);
    assert!(zero.offset_db.abs() < 3.0 * zero.offset_uncertainty);

    let flat = fit_loss_tangent(&lossy_data(&d, 0.0, 0.11, 0.0, 3), &d, &opts).unwrap();
    assert!(flat.loss_tangent_eff.abs() < 1e-12);
    assert!((flat.offset_db - 0.11).abs() < 1e-12);
}

#[test]
fn loss_fit_scales_with_data() {
    let d = dispersion(&default_device(), &grid(4e9, 12e9, 1001)).unwrap();
    let opts = LossFitOptions { smoothing: None, ..Default::default() };
    let base = lossy_data(&d, 6e-5, 0.11, 0.01, 4);
    let r1 = fit_loss_tangent(&base, &d, &opts).unwrap();
    let scaled: Vec<f64> = base.iter().zip(&d.in_gap).map(|(v, g)| if *g { *v } else { 3.0 * v }).collect();
    let r3 = fit_loss_tangent(&scaled, &d, &opts).unwrap();
    assert!((r3.raw_slope / r1.raw_slope - 3.0).abs() < 1e-9);
    assert!((r3.offset_db / r1.offset_db - 3.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_short_lines_are_unitary_and_reciprocal(
        cells in 8usize..120,
        edge in 6e-6f64..14e-6,
        mid in 3e-6f64..6e-6,
        f in 1e9f64..11e9,
    ) {
        let cfg = DeviceConfig::default();
        let taper = make_taper(cells, edge, mid, TaperShape::RaisedCosine { ramp_fraction: 0.5 }).unwrap();
        let n = build_device(&taper, &cfg.cell_rule(), cfg.resonator().unwrap().as_ref(), 0.0).unwrap();
        let m = netlist_abcd(&n, TAU * f, 0.0);
        prop_assume!(m.is_ok());
        let m = m.unwrap();
        prop_assert!((m.det() - 1.0).norm() < 1e-10);
        let s = netlist_sparams(&n, TAU * f, 50.0).unwrap();
        prop_assert!((s.s11.norm_sqr() + s.s21.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
