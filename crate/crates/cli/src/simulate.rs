//! Device simulation commands and the loss-tangent fit.

use std::path::Path;

use serde::Serialize;
use twpa::gain::{
    cme_gain, compression_curve, pump_for_gain, CmeOptions, ExcludedPoint, P1dbResult, PumpAmplitude, PumpConfig,
};
use twpa::io::{read_spectrum, DeviceConfig, COMPRESSION_HEADER, GAIN_HEADER, LINEAR_HEADER};
use twpa::network::{
    cascade_sparams, dielectric_attenuation_db, dispersion, fit_loss_tangent, LossFitOptions, LossFitResult, Smoothing,
};
use twpa::units::linear_to_db;

use crate::bundle::Bundle;
use crate::error::CliResult;
use crate::PumpArgs;

impl PumpArgs {
    fn config(&self) -> CliResult<PumpConfig> {
        Ok(match self.pump_dbm {
            Some(dbm) => PumpConfig::power_dbm(self.pump_freq, dbm)?,
            None => PumpConfig::current_fraction(self.pump_freq, self.pump_fraction)?,
        })
    }

    fn options(&self) -> CmeOptions {
        let mut o = CmeOptions::default();
        if let Some(t) = self.tolerance_db {
            o.tolerance_db = t;
        }
        o
    }
}

#[derive(Serialize)]
struct LinearResults {
    points: usize,
    cells: usize,
    stop_band_center_hz: Option<f64>,
    min_s21_db: f64,
    max_unitarity_error: Option<f64>,
}

pub fn linear(config: &DeviceConfig, freqs: &[f64], seed: u64) -> CliResult<Bundle> {
    let netlist = config.build()?;
    let s = cascade_sparams(&netlist, freqs)?;
    let d = dispersion(&netlist, freqs)?;
    let s21_db = s.s21.magnitude_db();
    let phase: Vec<f64> = s.s21.values.iter().map(|v| v.arg()).collect();
    let s11_db = s.s11.magnitude_db();
    let lossless = netlist.loss_tangent == 0.0;
    let results = LinearResults {
        points: freqs.len(),
        cells: netlist.len(),
        stop_band_center_hz: d.gap_center(),
        min_s21_db: s21_db.iter().copied().fold(f64::INFINITY, f64::min),
        max_unitarity_error: lossless.then(|| {
            s.s11
                .values
                .iter()
                .zip(&s.s21.values)
                .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max)
        }),
    };

    let mut b = Bundle::new("simulate-linear", seed);
    b.device(config);
    b.csv("linear.csv", &LINEAR_HEADER, &[freqs, &s21_db, &phase, &s11_db])?;
    let gap: Vec<f64> = d.in_gap.iter().map(|g| f64::from(u8::from(*g))).collect();
    b.csv("dispersion.csv", &["freq_hz", "wavenumber_rad_per_cell", "in_stop_band"], &[freqs, &d.wavenumber, &gap])?;
    b.line(format!("linear response of {} cells at {} points: linear.csv, dispersion.csv", results.cells, results.points));
    match results.stop_band_center_hz {
        Some(c) => b.line(format!("stop band centre: {:.4} GHz", c / 1e9)),
        None => b.line("no stop band in the sweep"),
    }
    if results.min_s21_db.is_finite() {
        b.line(format!("minimum |S21|: {:.2} dB", results.min_s21_db));
    } else {
        b.line("|S21| vanishes at a resonator pole on the grid");
    }
    if let Some(u) = results.max_unitarity_error {
        b.line(format!("lossless unitarity error: {u:.3e}"));
    }
    b.results(&results);
    Ok(b)
}

#[derive(Serialize)]
struct GainResults {
    pump: PumpConfig,
    pump_photon_flux: f64,
    peak_gain_db: Option<f64>,
    peak_frequency_hz: Option<f64>,
    band_threshold_db: f64,
    band_hz: Option<(f64, f64)>,
    excluded: Vec<ExcludedPoint>,
}

pub fn gain(config: &DeviceConfig, pump: &PumpArgs, freqs: &[f64], threshold_db: f64, seed: u64) -> CliResult<Bundle> {
    let netlist = config.build()?;
    let g = cme_gain(&netlist, &pump.config()?, freqs, &pump.options())?;
    let peak = g
        .frequencies
        .iter()
        .zip(&g.gain_db)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(f, v)| (*f, *v));
    let band = peak.and_then(|(f, _)| g.band_containing(f, threshold_db, freqs));
    let results = GainResults {
        pump: g.pump,
        pump_photon_flux: g.pump_flux,
        peak_gain_db: peak.map(|p| p.1),
        peak_frequency_hz: peak.map(|p| p.0),
        band_threshold_db: threshold_db,
        band_hz: band,
        excluded: g.excluded.clone(),
    };

    let mut b = Bundle::new("simulate-gain", seed);
    b.device(config);
    b.csv("gain.csv", &GAIN_HEADER, &[&g.frequencies, &g.gain_db])?;
    b.line(format!("gain at {} frequencies: gain.csv ({} excluded)", g.frequencies.len(), g.excluded.len()));
    if let Some((f, v)) = peak {
        b.line(format!("peak gain: {v:.2} dB at {:.4} GHz", f / 1e9));
    }
    match band {
        Some((lo, hi)) => b.line(format!(
            "band >= {threshold_db} dB around the peak: {:.4}-{:.4} GHz ({:.3} GHz wide)",
            lo / 1e9,
            hi / 1e9,
            (hi - lo) / 1e9
        )),
        None => b.line(format!("gain never reaches {threshold_db} dB")),
    }
    b.results(&results);
    Ok(b)
}

#[derive(Serialize)]
struct CompressionResults {
    pump: PumpConfig,
    signal_frequency_hz: f64,
    small_signal_gain_db: f64,
    p1db: P1dbResult,
}

pub fn compression(
    config: &DeviceConfig,
    pump: &PumpArgs,
    signal_freq: f64,
    target: Option<(f64, (f64, f64))>,
    powers: &[f64],
    seed: u64,
) -> CliResult<Bundle> {
    let netlist = config.build()?;
    let opts = pump.options();
    let mut p = pump.config()?;
    if let Some((gain_db, bracket)) = target {
        let fraction = pump_for_gain(&netlist, &p, signal_freq, gain_db, bracket, &opts)?;
        p = p.with_amplitude(PumpAmplitude::CurrentFraction { fraction });
    }
    let c = compression_curve(&netlist, &p, signal_freq, powers, &opts)?;
    let results = CompressionResults {
        pump: p,
        signal_frequency_hz: signal_freq,
        small_signal_gain_db: c.small_signal_gain_db,
        p1db: c.p1db,
    };

    let mut b = Bundle::new("compression", seed);
    b.device(config);
    b.csv("compression.csv", &COMPRESSION_HEADER, &[&c.powers_dbm, &c.gain_db])?;
    b.line(format!("compression at {:.4} GHz over {} powers: compression.csv", signal_freq / 1e9, powers.len()));
    if let PumpAmplitude::CurrentFraction { fraction } = p.amplitude {
        b.line(format!("pump current fraction: {fraction:.6}"));
    }
    b.line(format!("small-signal gain: {:.3} dB", c.small_signal_gain_db));
    match c.p1db {
        P1dbResult::Found { power_dbm } => b.line(format!("P1dB: {power_dbm:.2} dBm")),
        P1dbResult::NotFound { max_power_dbm } => b.line(format!("no 1 dB compression up to {max_power_dbm} dBm")),
    }
    b.results(&results);
    Ok(b)
}

#[derive(Serialize)]
struct LossResults {
    #[serde(flatten)]
    fit: LossFitResult,
    smoothing: Option<Smoothing>,
}

/// Fits `-|S21|` in dB against the simulated dielectric attenuation of the
/// configured device at the file's frequencies.
pub fn fit_loss(
    config: &DeviceConfig,
    data: &Path,
    smoothing: Option<(usize, usize)>,
    max_loss_db: f64,
    seed: u64,
) -> CliResult<Bundle> {
    let mut b = Bundle::new("fit-loss", seed);
    let bytes = crate::read_input(data, &mut b)?;
    let netlist = config.build()?;
    let (s21, _) = read_spectrum(bytes.as_slice(), netlist.target_impedance)?;
    let il: Vec<f64> = s21.values.iter().map(|v| -linear_to_db(v.norm_sqr())).collect();
    let d = dispersion(&netlist, &s21.frequencies)?;
    let smoothing = smoothing.map(|(window, order)| Smoothing { window, order });
    let opts = LossFitOptions { smoothing, weights: None, max_loss_db };
    let fit = fit_loss_tangent(&il, &d, &opts)?;
    let model: Vec<f64> = dielectric_attenuation_db(&d, fit.loss_tangent_eff).iter().map(|a| a + fit.offset_db).collect();

    b.device(config);
    b.csv("insertion_loss.csv", &["freq_hz", "insertion_loss_db", "model_db"], &[&s21.frequencies, &il, &model])?;
    b.line(format!("loss fit over {} of {} points: insertion_loss.csv", fit.points_used, il.len()));
    b.line(format!("effective loss tangent: {:.4e} ± {:.2e}", fit.loss_tangent_eff, fit.slope_uncertainty));
    b.line(format!("frequency-independent offset: {:.4} ± {:.4} dB", fit.offset_db, fit.offset_uncertainty));
    b.results(&LossResults { fit, smoothing });
    Ok(b)
}
