//! Wavenumber extraction from the transmission phase, and the dielectric
//! attenuation it implies.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cascade::{bloch_phase_estimate, netlist_sparams};
use super::twoport::check_increasing;
use crate::device::DeviceNetlist;
use crate::error::{Result, TwpaError};
use crate::units::hz_to_angular;

/// Points with transmission below this level count as stop band.
pub const GAP_THRESHOLD_DB: f64 = -20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSpectrum {
    pub frequencies: Vec<f64>,
    /// rad/cell, averaged over the line; NaN inside the stop band.
    pub wavenumber: Vec<f64>,
    pub in_gap: Vec<bool>,
    /// Accumulated transmission phase `-arg S21` (rad); NaN inside the stop band.
    pub total_phase: Vec<f64>,
    pub cell_count: usize,
}

impl DispersionSpectrum {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Center of the widest contiguous stop-band run, if any.
    pub fn gap_center(&self) -> Option<f64> {
        let mut best: Option<(usize, usize)> = None;
        let mut i = 0;
        while i < self.in_gap.len() {
            if self.in_gap[i] {
                let start = i;
                while i < self.in_gap.len() && self.in_gap[i] {
                    i += 1;
                }
                if best.is_none_or(|(s, e)| e - s < i - start) {
                    best = Some((start, i));
                }
            } else {
                i += 1;
            }
        }
        best.map(|(s, e)| 0.5 * (self.frequencies[s] + self.frequencies[e - 1]))
    }
}

fn s21_at(netlist: &DeviceNetlist, f: f64) -> Result<Complex64> {
    Ok(netlist_sparams(netlist, hz_to_angular(f), netlist.target_impedance)?.s21)
}

/// Per-cell wavenumber `k = -unwrap(arg S21) / N`.
///
/// Phase is unwrapped greedily inside each passband run, with extra sample
/// points inserted wherever the expected phase step exceeds π/2. Each run
/// is then put on the 2π branch closest to the sum of local Bloch phases,
/// which also fixes the absolute offset at the lowest frequency.
pub fn dispersion(netlist: &DeviceNetlist, frequencies: &[f64]) -> Result<DispersionSpectrum> {
    check_increasing(frequencies)?;
    if frequencies.is_empty() {
        return Err(TwpaError::Domain("no frequencies given".into()));
    }
    let n = netlist.len() as f64;
    let samples = frequencies
        .par_iter()
        .map(|&f| Ok((s21_at(netlist, f)?, bloch_phase_estimate(netlist, hz_to_angular(f))?)))
        .collect::<Result<Vec<_>>>()?;
    let in_gap: Vec<bool> = samples
        .iter()
        .map(|(s, _)| 20.0 * s.norm().log10() < GAP_THRESHOLD_DB)
        .collect();

    let mut total_phase = vec![f64::NAN; frequencies.len()];
    let mut i = 0;
    while i < frequencies.len() {
        if in_gap[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < frequencies.len() && !in_gap[i] {
            i += 1;
        }
        unwrap_run(netlist, frequencies, &samples, start..i, &mut total_phase)?;
    }
    let wavenumber = total_phase.iter().map(|p| p / n).collect();
    Ok(DispersionSpectrum {
        frequencies: frequencies.to_vec(),
        wavenumber,
        in_gap,
        total_phase,
        cell_count: netlist.len(),
    })
}

fn unwrap_run(
    netlist: &DeviceNetlist,
    freqs: &[f64],
    samples: &[(Complex64, f64)],
    run: std::ops::Range<usize>,
    out: &mut [f64],
) -> Result<()> {
    let mut phase = -samples[run.start].0.arg();
    out[run.start] = phase;
    for j in run.start + 1..run.end {
        let (f0, f1) = (freqs[j - 1], freqs[j]);
        let expected_step = samples[j].1 - samples[j - 1].1;
        let pieces = ((expected_step.abs() / (0.5 * PI)).ceil() as usize).max(1);
        let mut prev_wrapped = -samples[j - 1].0.arg();
        for p in 1..=pieces {
            let wrapped = if p == pieces {
                -samples[j].0.arg()
            } else {
                let f = f0 + (f1 - f0) * p as f64 / pieces as f64;
                -s21_at(netlist, f)?.arg()
            };
            let mut d = wrapped - prev_wrapped;
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            phase += d;
            prev_wrapped = wrapped;
        }
        out[j] = phase;
    }
    let offsets: Vec<f64> = (run.clone()).map(|j| samples[j].1 - out[j]).collect();
    let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
    let shift = 2.0 * PI * (mean / (2.0 * PI)).round();
    out[run].iter_mut().for_each(|v| *v += shift);
    Ok(())
}

/// Dielectric attenuation in dB, `(10/ln10) · N · k(ω) · tanδ`, with `k`
/// the line-averaged wavenumber. NaN wavenumbers stay NaN.
pub fn dielectric_attenuation_db(k: &DispersionSpectrum, loss_tangent: f64) -> Vec<f64> {
    let n = k.cell_count as f64;
    k.wavenumber
        .iter()
        .map(|kw| 10.0 / LN_10 * n * kw * loss_tangent)
        .collect()
}
