//! Effective loss tangent from an insertion-loss spectrum.

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use super::dispersion::DispersionSpectrum;
use super::smoothing::savgol;
use crate::error::{Result, TwpaError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smoothing {
    pub window: usize,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossFitOptions {
    pub smoothing: Option<Smoothing>,
    /// Per-point weights; uniform when absent.
    pub weights: Option<Vec<f64>>,
    /// Points with more insertion loss than this are treated as stop band.
    pub max_loss_db: f64,
}

impl Default for LossFitOptions {
    fn default() -> Self {
        Self {
            smoothing: Some(Smoothing { window: 501, order: 2 }),
            weights: None,
            max_loss_db: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossFitResult {
    pub loss_tangent_eff: f64,
    pub offset_db: f64,
    pub slope_uncertainty: f64,
    pub offset_uncertainty: f64,
    /// Unclipped regression slope; differs from `loss_tangent_eff` only when negative.
    pub raw_slope: f64,
    pub points_used: usize,
    /// Residuals (dB) of the unsmoothed data at the points used, in frequency order.
    pub residuals: Vec<f64>,
}

/// Regresses insertion loss (positive dB) onto `b(ω) = (10/ln10)·N·k(ω)`
/// plus a constant: `IL = tanδ · b + offset`.
///
/// Smoothing is applied separately to each contiguous passband run so the
/// stop band does not bleed into its neighbours.
pub fn fit_loss_tangent(
    insertion_loss_db: &[f64],
    k: &DispersionSpectrum,
    options: &LossFitOptions,
) -> Result<LossFitResult> {
    let n = insertion_loss_db.len();
    if n != k.len() {
        return Err(TwpaError::Mismatch(format!(
            "{n} loss points but {} wavenumber points",
            k.len()
        )));
    }
    if let Some(w) = &options.weights {
        if w.len() != n || w.iter().any(|x| !(*x >= 0.0)) {
            return Err(TwpaError::Mismatch("weights must be non-negative, one per point".into()));
        }
    }
    let usable: Vec<bool> = (0..n)
        .map(|i| {
            k.wavenumber[i].is_finite()
                && !k.in_gap[i]
                && insertion_loss_db[i].is_finite()
                && insertion_loss_db[i] <= options.max_loss_db
        })
        .collect();

    let mut y = insertion_loss_db.to_vec();
    if let Some(s) = options.smoothing {
        let mut i = 0;
        while i < n {
            if !usable[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < n && usable[i] {
                i += 1;
            }
            let smoothed = savgol(&insertion_loss_db[start..i], s.window, s.order)?;
            y[start..i].copy_from_slice(&smoothed);
        }
    }

    let scale = 10.0 / LN_10 * k.cell_count as f64;
    let idx: Vec<usize> = (0..n).filter(|&i| usable[i]).collect();
    if idx.len() < 10 {
        return Err(TwpaError::Fit(format!(
            "only {} usable points outside the stop band, need 10",
            idx.len()
        )));
    }
    let weight = |i: usize| options.weights.as_ref().map_or(1.0, |w| w[i]);
    // Weighted normal equations for [slope, offset].
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &i in &idx {
        let w = weight(i);
        let x = scale * k.wavenumber[i];
        sw += w;
        sx += w * x;
        sy += w * y[i];
        sxx += w * x * x;
        sxy += w * x * y[i];
    }
    let det = sw * sxx - sx * sx;
    if !(det.abs() > 1e-12 * sw * sxx) {
        return Err(TwpaError::Fit("rank-deficient basis: wavenumber does not vary".into()));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let offset = (sxx * sy - sx * sxy) / det;
    // Residuals against the unsmoothed data: the smoothed residuals are
    // correlated and would understate the noise.
    let residuals: Vec<f64> = idx
        .iter()
        .map(|&i| insertion_loss_db[i] - slope * scale * k.wavenumber[i] - offset)
        .collect();
    let rss: f64 = idx.iter().zip(&residuals).map(|(&i, r)| weight(i) * r * r).sum();
    let dof = (idx.len() - 2) as f64;
    let s2 = rss / dof;
    Ok(LossFitResult {
        loss_tangent_eff: slope.max(0.0),
        offset_db: offset,
        slope_uncertainty: (s2 * sw / det).sqrt(),
        offset_uncertainty: (s2 * sxx / det).sqrt(),
        raw_slope: slope,
        points_used: idx.len(),
        residuals,
    })
}
