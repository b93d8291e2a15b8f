//! Reflection fits of a readout resonator and the dispersive shift from a
//! ground/excited pair.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::lm::{best_of_starts, levenberg_marquardt, FitResult, LmOptions};
use crate::error::{Result, TwpaError};

/// Reflection-model parameters; frequencies in Hz, delay in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorParams {
    pub resonance_hz: f64,
    pub loaded_q: f64,
    pub coupling_q: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub delay_s: f64,
}

impl ResonatorParams {
    pub fn s11(&self, f: f64) -> Complex64 {
        let x = f / self.resonance_hz - 1.0;
        let q = self.loaded_q;
        let env = Complex64::from_polar(self.amplitude, self.phase - TAU * f * self.delay_s);
        env * Complex64::new(2.0 * q / self.coupling_q, 2.0 * q * x) / Complex64::new(1.0, -2.0 * q * x)
    }

    /// Internal quality factor, infinite for an overcoupled-limit fit.
    pub fn internal_q(&self) -> f64 {
        let inv = 1.0 / self.loaded_q - 1.0 / self.coupling_q;
        if inv > 0.0 { 1.0 / inv } else { f64::INFINITY }
    }

    /// Total linewidth `κ` in rad/s.
    pub fn kappa(&self) -> f64 {
        TAU * self.resonance_hz / self.loaded_q
    }

    /// External linewidth `κ_ext` in rad/s.
    pub fn kappa_ext(&self) -> f64 {
        TAU * self.resonance_hz / self.coupling_q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonatorTrace {
    pub frequencies: Vec<f64>,
    pub s11: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonatorFit {
    pub params: ResonatorParams,
    /// 1σ in the order of the [`ResonatorParams`] fields.
    pub uncertainties: [f64; 6],
    pub fit: FitResult,
}

/// Algebraic (Kasa) circle fit: `(center, radius, rms distance from circle)`.
pub fn circle_fit(z: &[Complex64]) -> Option<(Complex64, f64, f64)> {
    let mut a = Matrix3::zeros();
    let mut b = Vector3::zeros();
    for p in z {
        let row = Vector3::new(p.re, p.im, 1.0);
        let rhs = -p.norm_sqr();
        a += row * row.transpose();
        b += row * rhs;
    }
    let sol = a.lu().solve(&b)?;
    let c = Complex64::new(-0.5 * sol[0], -0.5 * sol[1]);
    let r2 = c.norm_sqr() - sol[2];
    if !(r2 > 0.0) {
        return None;
    }
    let r = r2.sqrt();
    let rms = (z.iter().map(|p| ((p - c).norm() - r).powi(2)).sum::<f64>() / z.len() as f64).sqrt();
    Some((c, r, rms))
}

fn unwrap(phases: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for p in phases {
        let v = match out.last() {
            Some(&prev) => p + TAU * ((prev - p) / TAU).round(),
            None => p,
        };
        out.push(v);
    }
    out
}

fn remove_delay(trace: &ResonatorTrace, tau: f64) -> Vec<Complex64> {
    trace
        .frequencies
        .iter()
        .zip(&trace.s11)
        .map(|(f, s)| s * Complex64::from_polar(1.0, TAU * f * tau))
        .collect()
}

fn circle_rms(trace: &ResonatorTrace, tau: f64) -> f64 {
    circle_fit(&remove_delay(trace, tau)).map_or(f64::INFINITY, |c| c.2 / c.1)
}

/// Electrical delay from the net phase winding, refined by the circle
/// residual.
fn estimate_delay(trace: &ResonatorTrace) -> f64 {
    let f = &trace.frequencies;
    let span = f[f.len() - 1] - f[0];
    let phase = unwrap(trace.s11.iter().map(|s| s.arg()));
    let coarse = (TAU - (phase[phase.len() - 1] - phase[0])) / (TAU * span);
    let half = 0.3 / span;
    let grid = 240;
    let (mut best, mut best_rms) = (coarse, circle_rms(trace, coarse));
    for i in 0..=grid {
        let t = coarse - half + 2.0 * half * i as f64 / grid as f64;
        let r = circle_rms(trace, t);
        if r < best_rms {
            best = t;
            best_rms = r;
        }
    }
    // Golden-section polish inside the winning grid cell.
    let (mut lo, mut hi) = (best - 2.0 * half / grid as f64, best + 2.0 * half / grid as f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if circle_rms(trace, a) < circle_rms(trace, b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

fn initial_params(trace: &ResonatorTrace) -> Result<ResonatorParams> {
    let tau = estimate_delay(trace);
    let z = remove_delay(trace, tau);
    let (c, r, _) = circle_fit(&z).ok_or_else(|| TwpaError::Fit("data do not form a circle".into()))?;
    // Off-resonant point: circle point nearest the trace ends.
    let ends = 0.5 * (z[0] + z[z.len() - 1]);
    let dir = (ends - c) / (ends - c).norm();
    let off = c + r * dir;
    let env = -off;
    let amplitude = env.norm();
    let kprime = (2.0 * r / amplitude - 1.0).max(0.05);
    // Angle about the centre is 2 atan(2 Q_l x) in normalised coordinates.
    let theta = unwrap(z.iter().map(|p| ((p - c) / (-dir)).arg()));
    let shift = TAU * (theta.iter().sum::<f64>() / theta.len() as f64 / TAU).round();
    let theta: Vec<f64> = theta.iter().map(|t| t - shift).collect();
    let f = &trace.frequencies;
    let i0 = (0..theta.len())
        .min_by(|&a, &b| theta[a].abs().total_cmp(&theta[b].abs()))
        .unwrap_or(0);
    let inside: Vec<f64> = f.iter().zip(&theta).filter(|(_, t)| t.abs() <= 0.5 * PI).map(|(f, _)| *f).collect();
    let fr0 = f[i0];
    let step = (f[f.len() - 1] - f[0]) / (f.len() - 1) as f64;
    let fwhm = match (inside.first(), inside.last()) {
        (Some(a), Some(b)) => (b - a).max(step),
        _ => step,
    };
    let ql0 = fr0 / fwhm;
    // Polish f_r and Q_l on the angle alone.
    let ang = |p: &[f64]| -> Vec<f64> {
        let (fr, ql) = (fr0 + p[0] * fwhm, ql0 * p[1]);
        f.iter().zip(&theta).map(|(f, t)| 2.0 * (2.0 * ql * (f / fr - 1.0)).atan() - t).collect()
    };
    let (fr, ql) = match levenberg_marquardt(ang, &[0.0, 1.0], &LmOptions::default()) {
        Ok(r) if r.parameters[1] > 0.0 => (fr0 + r.parameters[0] * fwhm, ql0 * r.parameters[1]),
        _ => (fr0, ql0),
    };
    Ok(ResonatorParams {
        resonance_hz: fr,
        loaded_q: ql,
        coupling_q: 2.0 * ql / kprime,
        amplitude,
        phase: env.arg() + TAU * 0.0,
        delay_s: tau,
    })
}

/// Six-parameter complex fit of a reflection trace.
pub fn fit_resonator(trace: &ResonatorTrace) -> Result<ResonatorFit> {
    let n = trace.frequencies.len();
    if n != trace.s11.len() {
        return Err(TwpaError::Mismatch("frequency and S11 lengths differ".into()));
    }
    if n < 12 {
        return Err(TwpaError::Fit("need at least 12 points".into()));
    }
    if !trace.frequencies.windows(2).all(|w| w[1] > w[0]) {
        return Err(TwpaError::Domain("frequencies must increase".into()));
    }
    let p0 = initial_params(trace)?;
    let lw = p0.resonance_hz / p0.loaded_q;
    let span = trace.frequencies[n - 1] - trace.frequencies[0];
    let unscale = |p: &[f64]| ResonatorParams {
        resonance_hz: p0.resonance_hz + p[0] * lw,
        loaded_q: p0.loaded_q * p[1],
        coupling_q: p0.coupling_q * p[2],
        amplitude: p0.amplitude * p[3],
        phase: p0.phase + p[4],
        delay_s: p0.delay_s + p[5] / span,
    };
    let residuals = |p: &[f64]| -> Vec<f64> {
        let m = unscale(p);
        let mut r = Vec::with_capacity(2 * n);
        for (f, s) in trace.frequencies.iter().zip(&trace.s11) {
            let d = m.s11(*f) - s;
            r.push(d.re);
            r.push(d.im);
        }
        r
    };
    let starts: Vec<Vec<f64>> = [(0.0, 1.0), (0.3, 1.0), (-0.3, 1.0), (0.0, 0.7), (0.0, 1.4)]
        .iter()
        .map(|&(df, q)| vec![df, q, 1.0, 1.0, 0.0, 0.0])
        .collect();
    let fit = best_of_starts(residuals, &starts, &LmOptions::default())?;
    let mut params = unscale(&fit.parameters);
    params.phase = params.phase.rem_euclid(TAU);
    if !(params.loaded_q > 0.0 && params.coupling_q > 0.0 && params.amplitude > 0.0) {
        return Err(TwpaError::Fit("fit left the physical region".into()));
    }
    let u = &fit.uncertainties;
    let uncertainties = [
        u[0] * lw,
        u[1] * p0.loaded_q,
        u[2] * p0.coupling_q,
        u[3] * p0.amplitude,
        u[4],
        u[5] / span,
    ];
    Ok(ResonatorFit { params, uncertainties, fit })
}

/// Dispersive shift `χ/2π = (f_e - f_g)/2` in Hz with its 1σ.
pub fn chi_from_pair(ground: &ResonatorFit, excited: &ResonatorFit) -> (f64, f64) {
    let chi = 0.5 * (excited.params.resonance_hz - ground.params.resonance_hz);
    let sigma = 0.5 * (excited.uncertainties[0].powi(2) + ground.uncertainties[0].powi(2)).sqrt();
    (chi, sigma)
}

/// Trace over `span_linewidths` linewidths with noise at `snr_db` below the
/// off-resonant level (total complex noise power).
pub fn synthesize_resonator<R: Rng>(
    params: &ResonatorParams,
    span_linewidths: f64,
    points: usize,
    snr_db: f64,
    rng: &mut R,
) -> ResonatorTrace {
    let lw = params.resonance_hz / params.loaded_q;
    let sigma = params.amplitude * 10f64.powf(-snr_db / 20.0) / 2f64.sqrt();
    let noise = Normal::new(0.0, sigma).expect("sigma");
    let frequencies: Vec<f64> = (0..points)
        .map(|i| params.resonance_hz + lw * span_linewidths * (i as f64 / (points - 1) as f64 - 0.5))
        .collect();
    let s11 = frequencies
        .iter()
        .map(|f| params.s11(*f) + Complex64::new(noise.sample(rng), noise.sample(rng)))
        .collect();
    ResonatorTrace { frequencies, s11 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reference(fr: f64) -> ResonatorParams {
        ResonatorParams {
            resonance_hz: fr,
            loaded_q: 6.505e9 / 0.572e6,
            coupling_q: 6.505e9 / 0.458e6,
            amplitude: 0.03,
            phase: 1.1,
            delay_s: 42e-9,
        }
    }

    #[test]
    fn model_limits() {
        let p = reference(6.505e9);
        let on = p.s11(p.resonance_hz);
        let env = Complex64::from_polar(p.amplitude, p.phase - TAU * p.resonance_hz * p.delay_s);
        assert!((on / env - 2.0 * p.loaded_q / p.coupling_q).norm() < 1e-12);
        let far = p.s11(p.resonance_hz * 1.5);
        assert!((far.norm() - p.amplitude).abs() < 1e-3 * p.amplitude);
        assert!(p.internal_q() > p.loaded_q);
        assert!((p.kappa() / TAU - 0.572e6).abs() < 1.0);
    }

    #[test]
    fn circle_fit_exact() {
        let c = Complex64::new(0.3, -0.2);
        let z: Vec<Complex64> = (0..30).map(|i| c + Complex64::from_polar(0.7, i as f64 * 0.2)).collect();
        let (cc, r, rms) = circle_fit(&z).unwrap();
        assert!((cc - c).norm() < 1e-12 && (r - 0.7).abs() < 1e-12 && rms < 1e-12);
    }

    #[test]
    fn noiseless_fit_is_exact() {
        let p = reference(6.505e9 + 1.296e6);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tr = synthesize_resonator(&p, 10.0, 401, 300.0, &mut rng);
        let fit = fit_resonator(&tr).unwrap();
        assert!(fit.fit.converged);
        assert!((fit.params.resonance_hz - p.resonance_hz).abs() < 1e-3);
        assert!((fit.params.loaded_q / p.loaded_q - 1.0).abs() < 1e-7);
        assert!((fit.params.coupling_q / p.coupling_q - 1.0).abs() < 1e-7);
        assert!((fit.params.delay_s - p.delay_s).abs() < 1e-14);
    }

    #[test]
    fn pair_gives_dispersive_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = fit_resonator(&synthesize_resonator(&reference(6.505e9 - 1.296e6), 10.0, 401, 40.0, &mut rng)).unwrap();
        let e = fit_resonator(&synthesize_resonator(&reference(6.505e9 + 1.296e6), 10.0, 401, 40.0, &mut rng)).unwrap();
        let (chi, sigma) = chi_from_pair(&g, &e);
        assert!((chi - 1.296e6).abs() < 0.01 * 1.296e6, "{chi}");
        assert!(sigma > 0.0 && sigma < 0.01 * chi);
    }
}
