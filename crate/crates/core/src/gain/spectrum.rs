//! Gain spectra and compression curves built on the coupled-mode solver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cme::{input_state, solve, CmeLine, CmeOptions, CmeRun, ModeTriplet, PumpConfig};
use crate::device::DeviceNetlist;
use crate::error::{Result, TwpaError};
use crate::network::local_wavenumbers;
use crate::units::hz_to_angular;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedPoint {
    pub frequency: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainSpectrum {
    /// Hz.
    pub frequencies: Vec<f64>,
    /// Signal photon-flux gain in dB, relative to a lossless through.
    pub gain_db: Vec<f64>,
    /// Substeps per cell used at each point.
    pub substeps: Vec<usize>,
    pub pump: PumpConfig,
    /// Pump photon flux at the input (photons/s).
    pub pump_flux: f64,
    pub excluded: Vec<ExcludedPoint>,
}

impl GainSpectrum {
    pub fn gain_at(&self, frequency: f64) -> Option<f64> {
        self.frequencies
            .iter()
            .position(|f| *f == frequency)
            .map(|i| self.gain_db[i])
    }

    /// Widest contiguous run (Hz) with gain at or above `threshold_db` that
    /// contains `frequency`; neighbouring points must also be adjacent in
    /// the request grid, so an excluded point breaks the run.
    pub fn band_containing(&self, frequency: f64, threshold_db: f64, grid: &[f64]) -> Option<(f64, f64)> {
        let mut above = vec![false; grid.len()];
        for (f, g) in self.frequencies.iter().zip(&self.gain_db) {
            if let Ok(i) = grid.binary_search_by(|x| x.total_cmp(f)) {
                above[i] = *g >= threshold_db;
            }
        }
        let centre = grid.iter().position(|f| *f >= frequency)?;
        if !above[centre] {
            return None;
        }
        let mut lo = centre;
        while lo > 0 && above[lo - 1] {
            lo -= 1;
        }
        let mut hi = centre;
        while hi + 1 < grid.len() && above[hi + 1] {
            hi += 1;
        }
        Some((grid[lo], grid[hi]))
    }
}

/// Reason a signal frequency cannot be amplified, if any.
fn exclusion(netlist: &DeviceNetlist, pump: &PumpConfig, f: f64, options: &CmeOptions) -> Result<Option<String>> {
    if (f - pump.frequency).abs() < options.pump_guard_hz {
        return Ok(Some("within the pump guard band".into()));
    }
    let triplet = match ModeTriplet::new(pump.frequency, f) {
        Ok(t) => t,
        Err(_) => return Ok(Some("idler frequency not positive".into())),
    };
    for (name, freq) in [("signal", triplet.signal), ("idler", triplet.idler)] {
        if local_wavenumbers(netlist, hz_to_angular(freq))?.is_none() {
            return Ok(Some(format!("{name} inside a stop band")));
        }
    }
    Ok(None)
}

fn check_pump(netlist: &DeviceNetlist, pump: &PumpConfig) -> Result<f64> {
    pump.validate()?;
    if local_wavenumbers(netlist, hz_to_angular(pump.frequency))?.is_none() {
        return Err(TwpaError::Configuration(format!(
            "pump at {:.6e} Hz sits in a stop band",
            pump.frequency
        )));
    }
    Ok(pump.photon_flux(netlist.min_critical_current()))
}

/// Runs the solver for one signal frequency and input power.
pub fn run_point(
    netlist: &DeviceNetlist,
    pump: &PumpConfig,
    signal_freq: f64,
    signal_dbm: f64,
    options: &CmeOptions,
    record: bool,
) -> Result<CmeRun> {
    let pump_flux = check_pump(netlist, pump)?;
    let triplet = ModeTriplet::new(pump.frequency, signal_freq)?;
    let line = CmeLine::from_netlist(netlist, triplet)?.ok_or_else(|| {
        TwpaError::Domain(format!("signal or idler of {signal_freq:.6e} Hz falls in a stop band"))
    })?;
    solve(&line, input_state(&triplet, pump_flux, signal_dbm), options, record)
}

/// Small-signal gain spectrum. Frequencies that cannot be amplified are
/// listed in `excluded` instead of carrying a value.
pub fn cme_gain(
    netlist: &DeviceNetlist,
    pump: &PumpConfig,
    signal_freqs: &[f64],
    options: &CmeOptions,
) -> Result<GainSpectrum> {
    let pump_flux = check_pump(netlist, pump)?;
    let results = signal_freqs
        .par_iter()
        .map(|&f| match exclusion(netlist, pump, f, options)? {
            Some(reason) => Ok(Err(ExcludedPoint { frequency: f, reason })),
            None => run_point(netlist, pump, f, options.signal_power_dbm, options, false).map(Ok),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = GainSpectrum {
        frequencies: Vec::new(),
        gain_db: Vec::new(),
        substeps: Vec::new(),
        pump: *pump,
        pump_flux,
        excluded: Vec::new(),
    };
    for (f, r) in signal_freqs.iter().zip(results) {
        match r {
            Ok(run) => {
                out.frequencies.push(*f);
                out.gain_db.push(run.gain_db);
                out.substeps.push(run.substeps);
            }
            Err(x) => out.excluded.push(x),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum P1dbResult {
    Found { power_dbm: f64 },
    NotFound { max_power_dbm: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionCurve {
    pub signal_frequency: f64,
    pub powers_dbm: Vec<f64>,
    pub gain_db: Vec<f64>,
    pub small_signal_gain_db: f64,
    pub p1db: P1dbResult,
}

/// Gain versus input signal power with full pump depletion.
pub fn compression_curve(
    netlist: &DeviceNetlist,
    pump: &PumpConfig,
    signal_freq: f64,
    signal_powers_dbm: &[f64],
    options: &CmeOptions,
) -> Result<CompressionCurve> {
    if signal_powers_dbm.is_empty() || signal_powers_dbm.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(TwpaError::Configuration("signal powers must be nonempty and increasing".into()));
    }
    let small = run_point(netlist, pump, signal_freq, options.signal_power_dbm, options, false)?.gain_db;
    let gain_db = signal_powers_dbm
        .par_iter()
        .map(|&p| run_point(netlist, pump, signal_freq, p, options, false).map(|r| r.gain_db))
        .collect::<Result<Vec<_>>>()?;
    let p1db = find_p1db(signal_powers_dbm, &gain_db, small);
    Ok(CompressionCurve {
        signal_frequency: signal_freq,
        powers_dbm: signal_powers_dbm.to_vec(),
        gain_db,
        small_signal_gain_db: small,
        p1db,
    })
}

/// First crossing of `small_signal - 1 dB`, linearly interpolated in dBm.
pub fn find_p1db(powers_dbm: &[f64], gain_db: &[f64], small_signal_db: f64) -> P1dbResult {
    let target = small_signal_db - 1.0;
    for i in 0..gain_db.len() {
        if gain_db[i] <= target {
            if i == 0 {
                return P1dbResult::Found { power_dbm: powers_dbm[0] };
            }
            let (p0, p1) = (powers_dbm[i - 1], powers_dbm[i]);
            let (g0, g1) = (gain_db[i - 1], gain_db[i]);
            let t = (g0 - target) / (g0 - g1);
            return P1dbResult::Found { power_dbm: p0 + t * (p1 - p0) };
        }
    }
    P1dbResult::NotFound { max_power_dbm: *powers_dbm.last().unwrap_or(&f64::NAN) }
}

/// Pump current fraction giving `target_db` small-signal gain at
/// `signal_freq`, by bisection on `[lo, hi]`.
pub fn pump_for_gain(
    netlist: &DeviceNetlist,
    pump: &PumpConfig,
    signal_freq: f64,
    target_db: f64,
    bracket: (f64, f64),
    options: &CmeOptions,
) -> Result<f64> {
    use super::cme::PumpAmplitude::CurrentFraction;
    let gain = |fraction: f64| {
        let p = pump.with_amplitude(CurrentFraction { fraction });
        run_point(netlist, &p, signal_freq, options.signal_power_dbm, options, false).map(|r| r.gain_db)
    };
    let (mut lo, mut hi) = bracket;
    let (glo, ghi) = (gain(lo)?, gain(hi)?);
    if !(glo <= target_db && ghi >= target_db) {
        return Err(TwpaError::Domain(format!(
            "target gain {target_db} dB not bracketed: {glo:.2} dB at {lo}, {ghi:.2} dB at {hi}"
        )));
    }
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if gain(mid)? < target_db {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
