//! Resonator photon calibration from the measurement-induced Stark shift and
//! dephasing of a dispersively coupled qubit.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, FitResult, LmOptions};
use crate::constants::HBAR;
use crate::error::{Result, TwpaError};

/// Circuit-QED parameters. Frequencies and rates are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CqedParams {
    pub qubit_freq: f64,
    pub bare_resonator_freq: f64,
    /// Dispersive shift; the resonator sits at `ω_r0 ± χ` for the excited
    /// and ground state.
    pub chi: f64,
    pub kappa: f64,
    pub kappa_ext: f64,
}

impl CqedParams {
    /// Reference device, entered in hertz.
    pub fn reference() -> Self {
        let tau = std::f64::consts::TAU;
        Self {
            qubit_freq: tau * 5.769e9,
            bare_resonator_freq: tau * 6.505e9,
            chi: tau * 1.296e6,
            kappa: tau * 0.572e6,
            kappa_ext: tau * 0.458e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.kappa > 0.0
            && self.kappa_ext > 0.0
            && self.kappa_ext <= self.kappa
            && self.chi.is_finite()
            && self.qubit_freq > 0.0
            && self.bare_resonator_freq > 0.0;
        if ok {
            Ok(())
        } else {
            Err(TwpaError::Domain("need 0 < κ_ext <= κ and positive frequencies".into()))
        }
    }

    /// Steady-state amplitudes `(α_g, α_e)` for drive `ε` (rad/s) at
    /// detuning `Δ = ω_r0 - ω_d`.
    pub fn amplitudes(&self, detuning: f64, drive: f64) -> (Complex64, Complex64) {
        let half = 0.5 * self.kappa;
        let alpha = |d: f64| Complex64::new(0.0, -drive) / Complex64::new(half, d);
        (alpha(detuning - self.chi), alpha(detuning + self.chi))
    }

    /// `(ω_AC, Γ_m)` from `α_e* α_g`.
    pub fn mid_rates(&self, detuning: f64, drive: f64) -> (f64, f64) {
        let prod = rates_per_drive_sq(self, detuning) * (drive * drive);
        (2.0 * self.chi * prod.re, 2.0 * self.chi * prod.im)
    }

    /// Power at the resonator input for drive `ε`.
    pub fn input_power(&self, detuning: f64, drive: f64) -> f64 {
        HBAR * (self.bare_resonator_freq - detuning) * drive * drive / self.kappa_ext
    }
}

/// `α_e* α_g / ε² = 1 / ((κ/2)² + Δ² - χ² - iκχ)`.
fn rates_per_drive_sq(p: &CqedParams, detuning: f64) -> Complex64 {
    let re = 0.25 * p.kappa * p.kappa + detuning * detuning - p.chi * p.chi;
    Complex64::new(1.0, 0.0) / Complex64::new(re, -p.kappa * p.chi)
}

/// One operating point with its measured Stark shift and dephasing (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidPoint {
    /// `ω_r0 - ω_d` in rad/s.
    pub detuning: f64,
    /// Drive power in DAC units; `ε = c √P_dac`.
    pub dac_power: f64,
    pub stark_shift: f64,
    pub dephasing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidFit {
    /// Drive amplitude per square-root DAC unit, rad/s.
    pub dac_scale: f64,
    pub dac_scale_uncertainty: f64,
    /// Ground-state photon number at each input point.
    pub photon_numbers: Vec<f64>,
    /// Resonator input power at each input point, W.
    pub input_power_w: Vec<f64>,
    /// Root-sum-square residuals of the joint fit and of the two
    /// single-observable fits, each normalised by its dataset peak.
    pub joint_rms: f64,
    pub stark_only_rms: f64,
    pub dephasing_only_rms: f64,
    /// Stark shift and dephasing disagree on the drive scale.
    pub inconsistent: bool,
    pub fit: FitResult,
}

fn peak(v: impl Iterator<Item = f64>) -> f64 {
    v.map(f64::abs).fold(0.0, f64::max)
}

fn closed_form_scale_sq(u: &[f64], y: &[f64]) -> f64 {
    let num: f64 = u.iter().zip(y).map(|(u, y)| u * y).sum();
    let den: f64 = u.iter().map(|u| u * u).sum();
    num / den
}

fn rss_at(u: &[f64], y: &[f64], c2: f64) -> f64 {
    u.iter().zip(y).map(|(u, y)| (c2 * u - y).powi(2)).sum()
}

/// Joint fit of the DAC drive scale to Stark and dephasing data.
pub fn fit_mid(params: &CqedParams, points: &[MidPoint]) -> Result<MidFit> {
    params.validate()?;
    if points.len() < 2 {
        return Err(TwpaError::Fit("need at least two operating points".into()));
    }
    if points.iter().any(|p| !(p.dac_power >= 0.0) || !p.detuning.is_finite()) {
        return Err(TwpaError::Domain("DAC power must be non-negative".into()));
    }
    let s_ac = peak(points.iter().map(|p| p.stark_shift));
    let s_m = peak(points.iter().map(|p| p.dephasing));
    if !(s_ac > 0.0) || !(s_m > 0.0) {
        return Err(TwpaError::Fit("Stark or dephasing data are all zero".into()));
    }
    // Both observables are linear in c²: y = c² u.
    let (mut u_ac, mut y_ac, mut u_m, mut y_m) = (vec![], vec![], vec![], vec![]);
    for p in points {
        let k = rates_per_drive_sq(params, p.detuning) * (2.0 * params.chi * p.dac_power);
        u_ac.push(k.re / s_ac);
        y_ac.push(p.stark_shift / s_ac);
        u_m.push(k.im / s_m);
        y_m.push(p.dephasing / s_m);
    }
    let u_all: Vec<f64> = u_ac.iter().chain(&u_m).copied().collect();
    let y_all: Vec<f64> = y_ac.iter().chain(&y_m).copied().collect();
    let c2_joint = closed_form_scale_sq(&u_all, &y_all);
    if !(c2_joint > 0.0) {
        return Err(TwpaError::Fit("data imply a non-positive drive scale".into()));
    }
    let c0 = c2_joint.sqrt();
    let residuals = |x: &[f64]| -> Vec<f64> {
        let c2 = (x[0] * c0).powi(2);
        u_all.iter().zip(&y_all).map(|(u, y)| c2 * u - y).collect()
    };
    let fit = levenberg_marquardt(residuals, &[1.0], &LmOptions::default())?;
    let dac_scale = fit.parameters[0] * c0;
    let dac_scale_uncertainty = fit.uncertainties[0] * c0;

    let c2_ac = closed_form_scale_sq(&u_ac, &y_ac).max(0.0);
    let c2_m = closed_form_scale_sq(&u_m, &y_m).max(0.0);
    let stark_only_rms = rss_at(&u_ac, &y_ac, c2_ac).sqrt();
    let dephasing_only_rms = rss_at(&u_m, &y_m, c2_m).sqrt();
    let joint_rms = fit.residual_norm;
    let individual = (stark_only_rms.powi(2) + dephasing_only_rms.powi(2)).sqrt();
    let scale = (y_all.len() as f64).sqrt();
    let inconsistent = joint_rms > 5.0 * individual + 1e-9 * scale;

    let mut photon_numbers = Vec::with_capacity(points.len());
    let mut input_power_w = Vec::with_capacity(points.len());
    for p in points {
        let eps = dac_scale * p.dac_power.sqrt();
        photon_numbers.push(params.amplitudes(p.detuning, eps).0.norm_sqr());
        input_power_w.push(params.input_power(p.detuning, eps));
    }
    Ok(MidFit {
        dac_scale,
        dac_scale_uncertainty,
        photon_numbers,
        input_power_w,
        joint_rms,
        stark_only_rms,
        dephasing_only_rms,
        inconsistent,
        fit,
    })
}

/// Noisy Stark and dephasing values for drive scale `dac_scale`. The noise
/// standard deviation is `relative_sigma` times each dataset's peak.
pub fn synthesize_mid<R: Rng>(
    params: &CqedParams,
    dac_scale: f64,
    operating_points: &[(f64, f64)],
    relative_sigma: f64,
    rng: &mut R,
) -> Vec<MidPoint> {
    let clean: Vec<(f64, f64)> = operating_points
        .iter()
        .map(|&(d, p)| params.mid_rates(d, dac_scale * p.sqrt()))
        .collect();
    let n_ac = Normal::new(0.0, relative_sigma.max(0.0) * peak(clean.iter().map(|c| c.0))).expect("sigma");
    let n_m = Normal::new(0.0, relative_sigma.max(0.0) * peak(clean.iter().map(|c| c.1))).expect("sigma");
    operating_points
        .iter()
        .zip(clean)
        .map(|(&(detuning, dac_power), (ac, m))| MidPoint {
            detuning,
            dac_power,
            stark_shift: ac + n_ac.sample(rng),
            dephasing: m + n_m.sample(rng),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    #[test]
    fn product_matches_amplitudes() {
        let p = CqedParams::reference();
        for d in [-3e7, -1e6, 0.0, 4e6, 2e7] {
            let eps = 3e6;
            let (ag, ae) = p.amplitudes(d, eps);
            let (ac, m) = p.mid_rates(d, eps);
            let prod = ae.conj() * ag;
            assert!((ac - 2.0 * p.chi * prod.re).abs() < 1e-9 * ac.abs().max(1.0));
            assert!((m - 2.0 * p.chi * prod.im).abs() < 1e-9 * m.abs().max(1.0));
        }
    }

    #[test]
    fn dephasing_peaks_at_split_detuning() {
        let p = CqedParams::reference();
        let d_star = (p.chi * p.chi - 0.25 * p.kappa * p.kappa).sqrt();
        let g = |d: f64| p.mid_rates(d, 1e6).1;
        assert!(g(d_star) > g(0.99 * d_star) && g(d_star) > g(1.01 * d_star));
        assert!(g(d_star) > g(0.0));
    }

    #[test]
    fn round_trip_recovers_scale() {
        let p = CqedParams::reference();
        let c = TAU * 2.0e5;
        let ops: Vec<(f64, f64)> = (0..41)
            .map(|i| (TAU * (-4e6 + 2e5 * i as f64), 100.0))
            .chain((1..=20).map(|i| (TAU * 1.2e6, 10.0 * i as f64)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data = synthesize_mid(&p, c, &ops, 0.02, &mut rng);
        let fit = fit_mid(&p, &data).unwrap();
        assert!(((fit.dac_scale - c) / c).abs() < 0.03, "{} vs {c}", fit.dac_scale);
        assert!(!fit.inconsistent);
        let n0 = p.amplitudes(ops[0].0, c * 10.0).0.norm_sqr();
        assert!((fit.photon_numbers[0] / n0 - 1.0).abs() < 0.07);
    }

    #[test]
    fn disagreeing_observables_are_flagged() {
        let p = CqedParams::reference();
        let ops: Vec<(f64, f64)> = (0..41).map(|i| (TAU * (-4e6 + 2e5 * i as f64), 100.0)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut data = synthesize_mid(&p, TAU * 2e5, &ops, 0.01, &mut rng);
        for d in &mut data {
            d.dephasing *= 4.0;
        }
        assert!(fit_mid(&p, &data).unwrap().inconsistent);
    }

    proptest! {
        #[test]
        fn dephasing_never_negative(d in -5e7f64..5e7, eps in 0.0f64..1e8) {
            let p = CqedParams::reference();
            prop_assert!(p.mid_rates(d, eps).1 >= 0.0);
        }

        #[test]
        fn photons_scale_with_power(d in -3e7f64..3e7, eps in 1e3f64..1e7) {
            let p = CqedParams::reference();
            let n1 = p.amplitudes(d, eps).0.norm_sqr();
            let n2 = p.amplitudes(d, 2.0 * eps).0.norm_sqr();
            prop_assert!((n2 / n1 - 4.0).abs() < 1e-9);
        }
    }
}
