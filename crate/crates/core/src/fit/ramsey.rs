//! Damped-cosine fits of Ramsey fringes and the dephasing and frequency
//! shift they imply.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::lm::{best_of_starts, FitResult, LmOptions};
use crate::error::{Result, TwpaError};

/// Minimum number of samples in a trace.
pub const MIN_POINTS: usize = 10;

/// `s(t) = A e^{-Γt} cos(2π δf t + φ) + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamseyParams {
    pub amplitude: f64,
    /// 1/s.
    pub decay_rate: f64,
    /// Hz.
    pub detuning_hz: f64,
    pub phase: f64,
    pub offset: f64,
}

impl RamseyParams {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (-self.decay_rate * t).exp() * (TAU * self.detuning_hz * t + self.phase).cos() + self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyTrace {
    /// Seconds, increasing.
    pub times: Vec<f64>,
    pub signal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyFit {
    pub params: RamseyParams,
    /// 1σ in the order of the [`RamseyParams`] fields.
    pub uncertainties: [f64; 5],
    pub fit: FitResult,
}

/// Drive-induced change relative to a zero-drive baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamseyShift {
    /// Extra dephasing, 1/s.
    pub dephasing: f64,
    pub dephasing_uncertainty: f64,
    /// Qubit frequency shift, Hz.
    pub shift_hz: f64,
    pub shift_uncertainty: f64,
}

/// Frequency of the largest periodogram peak.
fn dominant_frequency(t: &[f64], y: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let span = t[t.len() - 1] - t[0];
    let dt = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let f_max = 0.5 / dt;
    let df = 0.25 / span;
    let count = (f_max / df).ceil() as usize;
    (0..=count)
        .map(|k| {
            let f = k as f64 * df;
            let (mut c, mut s) = (0.0, 0.0);
            for (t, y) in t.iter().zip(y) {
                let ph = TAU * f * t;
                c += (y - mean) * ph.cos();
                s += (y - mean) * ph.sin();
            }
            (f, c * c + s * s)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(0.0, |p| p.0)
}

pub fn fit_ramsey(trace: &RamseyTrace) -> Result<RamseyFit> {
    let (t, y) = (&trace.times, &trace.signal);
    if t.len() != y.len() {
        return Err(TwpaError::Mismatch("time and signal lengths differ".into()));
    }
    if t.len() < MIN_POINTS {
        return Err(TwpaError::Fit(format!("need at least {MIN_POINTS} points, got {}", t.len())));
    }
    if !t.windows(2).all(|w| w[1] > w[0]) {
        return Err(TwpaError::Domain("times must increase".into()));
    }
    let span = t[t.len() - 1] - t[0];
    let dt_min = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let a0 = (0.5 * (hi - lo)).max(f64::MIN_POSITIVE);
    let b0 = y.iter().sum::<f64>() / y.len() as f64;
    let f0 = dominant_frequency(t, y);

    let unscale = |p: &[f64]| RamseyParams {
        amplitude: p[0] * a0,
        decay_rate: p[1] / span,
        detuning_hz: p[2] / span,
        phase: p[3],
        offset: b0 + p[4] * a0,
    };
    let residuals = |p: &[f64]| -> Vec<f64> {
        let m = unscale(p);
        t.iter().zip(y).map(|(t, y)| m.eval(*t) - y).collect()
    };
    let mut starts = Vec::new();
    for g in [0.5, 1.5, 4.0] {
        for k in 0..4 {
            starts.push(vec![1.0, g, f0 * span, k as f64 * 0.5 * PI, 0.0]);
        }
    }
    let fit = best_of_starts(residuals, &starts, &LmOptions::default())?;
    let mut params = unscale(&fit.parameters);
    // Canonical form: A > 0, δf >= 0, φ in [0, 2π).
    if params.amplitude < 0.0 {
        params.amplitude = -params.amplitude;
        params.phase += PI;
    }
    let dt_max = t.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if dt_max - dt_min <= 1e-9 * dt_max {
        // Uniform sampling cannot tell δf from δf + k/Δt; fold into baseband
        // with the phase adjusted so the samples are unchanged.
        let fs = 1.0 / dt_min;
        let k = (params.detuning_hz / fs).round();
        params.detuning_hz -= k * fs;
        params.phase += TAU * k * fs * t[0];
    }
    if params.detuning_hz < 0.0 {
        params.detuning_hz = -params.detuning_hz;
        params.phase = -params.phase;
    }
    params.phase = params.phase.rem_euclid(TAU);
    if params.decay_rate * dt_min > 2.0 {
        return Err(TwpaError::Fit(format!(
            "decay rate {:.3e}/s is unresolved by the {:.3e} s sampling",
            params.decay_rate, dt_min
        )));
    }
    if params.decay_rate * span < 1.0 {
        return Err(TwpaError::Fit("trace spans less than one decay time".into()));
    }
    let u = &fit.uncertainties;
    let uncertainties = [u[0] * a0, u[1] / span, u[2] / span, u[3], u[4] * a0];
    Ok(RamseyFit { params, uncertainties, fit })
}

/// Excess dephasing and frequency shift of `driven` over `baseline`.
pub fn ramsey_shift(baseline: &RamseyFit, driven: &RamseyFit) -> RamseyShift {
    let q = |a: f64, b: f64| (a * a + b * b).sqrt();
    RamseyShift {
        dephasing: driven.params.decay_rate - baseline.params.decay_rate,
        dephasing_uncertainty: q(driven.uncertainties[1], baseline.uncertainties[1]),
        shift_hz: driven.params.detuning_hz - baseline.params.detuning_hz,
        shift_uncertainty: q(driven.uncertainties[2], baseline.uncertainties[2]),
    }
}

/// Uniformly sampled trace with additive Gaussian noise of `sigma`.
pub fn synthesize_ramsey<R: Rng>(params: &RamseyParams, span_s: f64, points: usize, sigma: f64, rng: &mut R) -> RamseyTrace {
    let noise = Normal::new(0.0, sigma.max(0.0)).expect("sigma");
    let times: Vec<f64> = (0..points).map(|i| span_s * i as f64 / (points - 1) as f64).collect();
    let signal = times.iter().map(|t| params.eval(*t) + noise.sample(rng)).collect();
    RamseyTrace { times, signal }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(gamma: f64, df: f64) -> RamseyParams {
        RamseyParams { amplitude: 0.45, decay_rate: gamma, detuning_hz: df, phase: 0.4, offset: 0.5 }
    }

    #[test]
    fn noiseless_recovery() {
        let p = params(2.0e5, 1.5e6);
        let tr = synthesize_ramsey(&p, 15e-6, 151, 0.0, &mut ChaCha8Rng::seed_from_u64(0));
        let fit = fit_ramsey(&tr).unwrap();
        assert!((fit.params.decay_rate / p.decay_rate - 1.0).abs() < 1e-8);
        assert!((fit.params.detuning_hz / p.detuning_hz - 1.0).abs() < 1e-9);
        assert!((fit.params.phase - p.phase).abs() < 1e-8);
    }

    #[test]
    fn noisy_shift_extraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = fit_ramsey(&synthesize_ramsey(&params(1.0e5, 1.0e6), 20e-6, 201, 0.009, &mut rng)).unwrap();
        let drv = fit_ramsey(&synthesize_ramsey(&params(6.0e5, 1.8e6), 8e-6, 201, 0.009, &mut rng)).unwrap();
        let s = ramsey_shift(&base, &drv);
        assert!((s.dephasing / 5.0e5 - 1.0).abs() < 0.05, "{s:?}");
        assert!((s.shift_hz / 0.8e6 - 1.0).abs() < 0.03, "{s:?}");
    }

    #[test]
    fn too_few_points() {
        let tr = synthesize_ramsey(&params(1e5, 1e6), 10e-6, 9, 0.0, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(fit_ramsey(&tr), Err(TwpaError::Fit(_))));
    }

    #[test]
    fn unresolved_decay_is_rejected() {
        // Decay within one sample: Γ Δt = 5.
        let p = params(5.0e7, 1e5);
        let tr = synthesize_ramsey(&p, 19e-6, 20, 0.0, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(fit_ramsey(&tr).is_err());
    }
}
