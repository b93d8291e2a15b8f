//! Synthetic datasets with known truth, in the same formats the fit
//! commands read.

use std::f64::consts::TAU;

use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::json;
use twpa::checks::synthetic_budget;
use twpa::fit::{knee_spanning_powers, synthesize_mid, synthesize_resonator, synthesize_wqed, CqedParams, ResonatorParams};
use twpa::io::{write_budget, write_mid, write_resonator, write_spectrum, write_wqed, DeviceConfig, SpectrumFormat};
use twpa::network::{cascade_sparams, dielectric_attenuation_db, dispersion, ComplexSpectrum};

use crate::bundle::Bundle;
use crate::error::CliResult;

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    /// Resonance fluorescence at 21 powers across the saturation knee.
    Wqed,
    /// Stark shift and dephasing over 49 drive detunings.
    Mid,
    /// Ground- and excited-state reflection traces.
    Resonator,
    /// On/off power records for the efficiency budget.
    Budget,
    /// Lossy S21 of the default device.
    Loss,
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn run(kind: Kind, seed: u64) -> CliResult<Bundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Bundle::new("synth", seed);
    let mut buf = Vec::new();
    match kind {
        Kind::Wqed => {
            let (g1, g2, att, fq) = (TAU * 1.2e6, TAU * 0.75e6, 90.0, 5.5e9);
            let powers = knee_spanning_powers(g2, att, TAU * fq, 21);
            let data = synthesize_wqed(g1, g2, att, TAU * fq, &powers, &grid(-12.0 * g2, 12.0 * g2, 161), 0.01, &mut rng);
            write_wqed(&mut buf, &data)?;
            b.file("wqed.csv", buf);
            b.results(&json!({
                "kind": "wqed",
                "gamma1_hz": g1 / TAU,
                "gamma2_hz": g2 / TAU,
                "attenuation_db": att,
                "qubit_freq_hz": fq,
                "noise_sigma": 0.01,
            }));
            b.line(format!("wqed.csv: {} points, Γ1/2π 1.2 MHz, Γ2/2π 0.75 MHz, 90 dB, qubit {fq:e} Hz", data.len()));
        }
        Kind::Mid => {
            let p = CqedParams::reference();
            let c = TAU * 2e5;
            let ops: Vec<(f64, f64)> = grid(-TAU * 4e6, TAU * 4e6, 49).into_iter().map(|d| (d, 1.0)).collect();
            let data = synthesize_mid(&p, c, &ops, 0.02, &mut rng);
            write_mid(&mut buf, &data)?;
            b.file("mid.csv", buf);
            b.results(&json!({ "kind": "mid", "dac_scale_hz": c / TAU, "relative_sigma": 0.02 }));
            b.line("mid.csv: 49 detunings, ε/2π per √DAC 200 kHz, reference circuit");
        }
        Kind::Resonator => {
            let p = CqedParams::reference();
            let ground = ResonatorParams {
                resonance_hz: p.bare_resonator_freq / TAU - p.chi / TAU,
                loaded_q: (p.bare_resonator_freq / p.kappa).round(),
                coupling_q: (p.bare_resonator_freq / p.kappa_ext).round(),
                amplitude: 0.5,
                phase: 0.3,
                delay_s: 40e-9,
            };
            let excited = ResonatorParams { resonance_hz: ground.resonance_hz + 2.0 * p.chi / TAU, ..ground };
            write_resonator(&mut buf, &synthesize_resonator(&ground, 10.0, 401, 40.0, &mut rng))?;
            b.file("resonator_ground.csv", std::mem::take(&mut buf));
            write_resonator(&mut buf, &synthesize_resonator(&excited, 10.0, 401, 40.0, &mut rng))?;
            b.file("resonator_excited.csv", buf);
            b.results(&json!({ "kind": "resonator", "ground": ground, "excited": excited, "snr_db": 40.0 }));
            b.line("resonator_ground.csv, resonator_excited.csv: 401 points over 10 linewidths at 40 dB SNR");
        }
        Kind::Budget => {
            let (t_on, t_off, gain, f, bw) = (0.378, 3.99, 104.2, 6.59e9, 10e3);
            write_budget(&mut buf, &synthetic_budget(t_on, t_off, gain, f, bw))?;
            b.file("budget.csv", buf);
            b.results(&json!({
                "kind": "budget",
                "t_sys_on_k": t_on,
                "t_sys_off_k": t_off,
                "amplifier_gain": gain,
                "freq_hz": f,
                "bandwidth_hz": bw,
            }));
            b.line("budget.csv: T_sys 0.378 K on, 3.99 K off, gain 104.2, 6.59 GHz, 10 kHz bandwidth");
        }
        Kind::Loss => {
            let config = DeviceConfig::default();
            let netlist = config.build()?;
            let (tan_d, offset, sigma) = (netlist.loss_tangent, 0.11, 0.05);
            let freqs = grid(4e9, 12e9, 4001);
            let d = dispersion(&netlist, &freqs)?;
            let s = cascade_sparams(&netlist, &freqs)?;
            let noise = Normal::new(0.0, sigma).expect("sigma");
            let atten = dielectric_attenuation_db(&d, tan_d);
            // Passband: model loss plus offset and noise on the line's own
            // phase; stop band: the cascade response as is.
            let values = (0..freqs.len())
                .map(|i| {
                    if d.in_gap[i] {
                        s.s21.values[i]
                    } else {
                        let db = -(atten[i] + offset + noise.sample(&mut rng));
                        num_complex::Complex64::from_polar(10f64.powf(db / 20.0), -d.total_phase[i])
                    }
                })
                .collect();
            let spectrum = ComplexSpectrum::new(freqs, values, netlist.target_impedance)?;
            write_spectrum(&mut buf, &spectrum, SpectrumFormat::Polar)?;
            b.device(&config);
            b.file("s21.csv", buf);
            b.results(&json!({ "kind": "loss", "loss_tangent": tan_d, "offset_db": offset, "noise_sigma_db": sigma }));
            b.line(format!("s21.csv: 4001 points, loss tangent {tan_d:e}, offset 0.11 dB, noise 0.05 dB"));
        }
    }
    Ok(b)
}
