use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twpa::fit::{fit_resonator, knee_spanning_powers, synthesize_resonator, synthesize_wqed, wqed_global_fit, ResonatorParams};
use twpa::gain::{run_point, CmeOptions, PumpConfig};
use twpa::io::DeviceConfig;
use twpa::network::{cascade_sparams, netlist_sparams};

fn cascade(c: &mut Criterion) {
    let netlist = DeviceConfig::default().build().unwrap();
    c.bench_function("cascade/single frequency", |b| {
        b.iter(|| netlist_sparams(&netlist, black_box(TAU * 6.5e9), 50.0).unwrap())
    });
    let freqs: Vec<f64> = (0..401).map(|i| 4e9 + 2e7 * i as f64).collect();
    c.bench_function("cascade/401 frequencies", |b| b.iter(|| cascade_sparams(&netlist, black_box(&freqs)).unwrap()));
}

fn gain(c: &mut Criterion) {
    let netlist = DeviceConfig::default().build().unwrap();
    let pump = PumpConfig::current_fraction(7.71e9, 0.392).unwrap();
    let opts = CmeOptions::default();
    let mut g = c.benchmark_group("gain");
    g.sample_size(20);
    g.bench_function("small signal at 6.59 GHz", |b| {
        b.iter(|| run_point(&netlist, &pump, black_box(6.59e9), -150.0, &opts, false).unwrap())
    });
    g.bench_function("saturated at 6.59 GHz", |b| {
        b.iter(|| run_point(&netlist, &pump, black_box(6.59e9), -95.0, &opts, false).unwrap())
    });
    g.finish();
}

fn fits(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let truth = ResonatorParams {
        resonance_hz: 6.5e9,
        loaded_q: 11000.0,
        coupling_q: 14000.0,
        amplitude: 0.5,
        phase: 0.3,
        delay_s: 40e-9,
    };
    let trace = synthesize_resonator(&truth, 10.0, 401, 40.0, &mut rng);
    let (g1, g2, att, wq) = (TAU * 1.2e6, TAU * 0.75e6, 90.0, TAU * 5.5e9);
    let det: Vec<f64> = (0..161).map(|i| g2 * (-12.0 + 0.15 * i as f64)).collect();
    let wqed = synthesize_wqed(g1, g2, att, wq, &knee_spanning_powers(g2, att, wq, 21), &det, 0.01, &mut rng);
    let mut g = c.benchmark_group("fit");
    g.sample_size(20);
    g.bench_function("resonator, 401 points", |b| b.iter(|| fit_resonator(black_box(&trace)).unwrap()));
    g.bench_function("wqed global, 3381 points", |b| b.iter(|| wqed_global_fit(black_box(&wqed), wq).unwrap()));
    g.finish();
}

criterion_group!(benches, cascade, gain, fits);
criterion_main!(benches);
