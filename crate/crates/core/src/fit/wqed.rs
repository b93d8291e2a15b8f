//! Absolute power calibration from a qubit strongly coupled to a waveguide.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::lm::{best_of_starts, FitResult, LmOptions};
use crate::constants::HBAR;
use crate::error::{Result, TwpaError};
use crate::units::{dbm_to_watts, watts_to_dbm};

/// Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WqedParams {
    /// Emission rate into the line.
    pub gamma1: f64,
    /// Transverse decoherence rate.
    pub gamma2: f64,
    /// Rabi drive amplitude.
    pub drive_amplitude: f64,
    pub qubit_freq: f64,
}

impl WqedParams {
    pub fn new(gamma1: f64, gamma2: f64, drive_amplitude: f64, qubit_freq: f64) -> Result<Self> {
        if !(gamma1 > 0.0) || !(gamma2 >= 0.5 * gamma1) {
            return Err(TwpaError::Domain(format!(
                "need Γ2 >= Γ1/2 > 0, got Γ1 = {gamma1}, Γ2 = {gamma2}"
            )));
        }
        if !(drive_amplitude >= 0.0) || !(qubit_freq > 0.0) {
            return Err(TwpaError::Domain("drive amplitude and qubit frequency must be non-negative".into()));
        }
        Ok(Self { gamma1, gamma2, drive_amplitude, qubit_freq })
    }
}

/// `t = 1 - (Γ1/2Γ2)(1 - iΔ/Γ2) / (1 + (Δ/Γ2)² + Ω²/(Γ1Γ2))`.
pub fn wqed_transmission(detuning: f64, p: &WqedParams) -> Complex64 {
    transmission_raw(detuning, p.gamma1, p.gamma2, p.drive_amplitude * p.drive_amplitude)
}

fn transmission_raw(detuning: f64, g1: f64, g2: f64, omega_sq: f64) -> Complex64 {
    let x = detuning / g2;
    let denom = 1.0 + x * x + omega_sq / (g1 * g2);
    Complex64::new(1.0, 0.0) - (g1 / (2.0 * g2)) * Complex64::new(1.0, -x) / denom
}

/// Drive power at the qubit, `π ħ ω_i Ω² / (2 Γ1)`.
pub fn wqed_power(p: &WqedParams) -> f64 {
    PI * HBAR * p.qubit_freq * p.drive_amplitude * p.drive_amplitude / (2.0 * p.gamma1)
}

/// `Ω²` produced by power `watts` at the qubit.
pub fn rabi_squared(watts: f64, gamma1: f64, qubit_freq: f64) -> f64 {
    2.0 * gamma1 * watts / (PI * HBAR * qubit_freq)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WqedPoint {
    pub nominal_dbm: f64,
    /// rad/s.
    pub detuning: f64,
    /// Transmission normalized to the far-detuned level.
    pub transmission: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WqedFit {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Line attenuation (dB) from the nominal source power to the qubit.
    pub attenuation_db: f64,
    /// 1σ of `[Γ1, Γ2, attenuation_db]`.
    pub uncertainties: [f64; 3],
    /// `(nominal_dbm, calibrated_dbm)` for every swept power.
    pub calibrated_power: Vec<(f64, f64)>,
    /// Set when the sweep never reaches or always exceeds the saturation knee.
    pub ill_conditioned: bool,
    pub fit: FitResult,
}

impl WqedFit {
    pub fn calibrate(&self, nominal_dbm: f64) -> f64 {
        nominal_dbm - self.attenuation_db
    }
}

fn powers_of(points: &[WqedPoint]) -> Vec<f64> {
    let mut p: Vec<f64> = points.iter().map(|q| q.nominal_dbm).collect();
    p.sort_by(f64::total_cmp);
    p.dedup();
    p
}

/// Initial `(Γ1, Γ2, attenuation)` from the depth and width of the dips.
fn initial_guess(points: &[WqedPoint], qubit_freq: f64, powers: &[f64]) -> Result<(f64, f64, f64)> {
    let trace = |p: f64| -> Vec<&WqedPoint> {
        let mut v: Vec<&WqedPoint> = points.iter().filter(|q| q.nominal_dbm == p).collect();
        v.sort_by(|a, b| a.detuning.total_cmp(&b.detuning));
        v
    };
    let depth = |tr: &[&WqedPoint]| {
        tr.iter().map(|q| 1.0 - q.transmission.re).fold(f64::NEG_INFINITY, f64::max)
    };
    let low = trace(powers[0]);
    let d0 = depth(&low);
    if !(d0 > 0.0) {
        return Err(TwpaError::Fit("no extinction dip in the lowest-power trace".into()));
    }
    // Half-depth width of 1 - Re t.
    let above: Vec<f64> = low
        .iter()
        .filter(|q| 1.0 - q.transmission.re >= 0.5 * d0)
        .map(|q| q.detuning)
        .collect();
    let (lo, hi) = (
        above.iter().copied().fold(f64::INFINITY, f64::min),
        above.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let step = low.windows(2).map(|w| w[1].detuning - w[0].detuning).fold(f64::INFINITY, f64::min);
    let g2 = (0.5 * (hi - lo)).max(step);
    let g1 = (2.0 * g2 * d0).min(2.0 * g2);
    let ratio = g1 / (2.0 * g2);
    let mut atts: Vec<f64> = powers
        .iter()
        .filter_map(|&p| {
            let s = ratio / depth(&trace(p)) - 1.0;
            (0.1..=10.0).contains(&s).then(|| {
                let watts = PI * HBAR * qubit_freq * s * g1 * g2 / (2.0 * g1);
                p - watts_to_dbm(watts)
            })
        })
        .collect();
    atts.sort_by(f64::total_cmp);
    let att = if atts.is_empty() {
        // Knee outside the sweep: start from the middle power at s = 1.
        let mid = powers[powers.len() / 2];
        mid - watts_to_dbm(PI * HBAR * qubit_freq * g2 / 2.0)
    } else {
        atts[atts.len() / 2]
    };
    Ok((g1, g2, att))
}

/// Global fit of `(Γ1, Γ2, attenuation)` to transmission traces taken at
/// several nominal powers.
pub fn wqed_global_fit(points: &[WqedPoint], qubit_freq: f64) -> Result<WqedFit> {
    let powers = powers_of(points);
    if powers.len() < 2 {
        return Err(TwpaError::Fit("need traces at two or more powers".into()));
    }
    if points.len() < 8 {
        return Err(TwpaError::Fit("too few transmission points".into()));
    }
    let (g1_0, g2_0, att_0) = initial_guess(points, qubit_freq, &powers)?;
    let watts: Vec<f64> = points.iter().map(|q| dbm_to_watts(q.nominal_dbm)).collect();
    let residuals = |p: &[f64]| -> Vec<f64> {
        let (g1, g2, att) = (p[0] * g1_0, p[1] * g2_0, p[2]);
        let scale = 10f64.powf(-att / 10.0);
        let mut r = Vec::with_capacity(2 * points.len());
        for (q, w) in points.iter().zip(&watts) {
            let om2 = rabi_squared(w * scale, g1, qubit_freq);
            let d = transmission_raw(q.detuning, g1, g2, om2) - q.transmission;
            r.push(d.re);
            r.push(d.im);
        }
        r
    };
    let starts = vec![
        vec![1.0, 1.0, att_0],
        vec![1.0, 1.0, att_0 - 3.0],
        vec![1.0, 1.0, att_0 + 3.0],
    ];
    let fit = best_of_starts(residuals, &starts, &LmOptions::default())?;
    let gamma1 = fit.parameters[0] * g1_0;
    let gamma2 = fit.parameters[1] * g2_0;
    let attenuation_db = fit.parameters[2];
    let uncertainties = [fit.uncertainties[0] * g1_0, fit.uncertainties[1] * g2_0, fit.uncertainties[2]];
    let saturation = |p: f64| rabi_squared(dbm_to_watts(p - attenuation_db), gamma1, qubit_freq) / (gamma1 * gamma2);
    let ill_conditioned = saturation(powers[powers.len() - 1]) < 0.3 || saturation(powers[0]) > 3.0;
    Ok(WqedFit {
        gamma1,
        gamma2,
        attenuation_db,
        uncertainties,
        calibrated_power: powers.iter().map(|p| (*p, p - attenuation_db)).collect(),
        ill_conditioned,
        fit,
    })
}

/// Synthetic traces for `(Γ1, Γ2, attenuation)` with complex Gaussian noise
/// of standard deviation `sigma` on each quadrature.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_wqed<R: Rng>(
    gamma1: f64,
    gamma2: f64,
    attenuation_db: f64,
    qubit_freq: f64,
    nominal_dbm: &[f64],
    detunings: &[f64],
    sigma: f64,
    rng: &mut R,
) -> Vec<WqedPoint> {
    let noise = Normal::new(0.0, sigma.max(0.0)).expect("valid sigma");
    let mut out = Vec::with_capacity(nominal_dbm.len() * detunings.len());
    for &p in nominal_dbm {
        let om2 = rabi_squared(dbm_to_watts(p - attenuation_db), gamma1, qubit_freq);
        for &d in detunings {
            let t = transmission_raw(d, gamma1, gamma2, om2);
            let n = Complex64::new(noise.sample(rng), noise.sample(rng));
            out.push(WqedPoint { nominal_dbm: p, detuning: d, transmission: t + n });
        }
    }
    out
}

/// Nominal powers spanning the knee: from 15 dB below to 15 dB above the
/// power that gives `Ω² = Γ1 Γ2` at the qubit.
pub fn knee_spanning_powers(gamma2: f64, attenuation_db: f64, qubit_freq: f64, count: usize) -> Vec<f64> {
    let knee = watts_to_dbm(PI * HBAR * qubit_freq * gamma2 / 2.0) + attenuation_db;
    (0..count)
        .map(|i| knee - 15.0 + 30.0 * i as f64 / (count.max(2) - 1) as f64)
        .collect()
}
