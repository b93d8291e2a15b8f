//! Quantum-efficiency and noise-budget algebra.
//!
//! Photon numbers include the half photon of vacuum noise, so a system
//! noise temperature `T` corresponds to `n = k_B T / (ħω)` and `η = 1/n`.

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{Result, TwpaError};
use crate::units::{dbm_to_watts, hz_to_angular, linear_to_db};

/// Efficiency of an ideal phase-preserving amplifier of gain `g`: `1/(2 - 1/G)`.
pub fn eta_ideal(gain_linear: f64) -> Result<f64> {
    if !(gain_linear >= 1.0) {
        return Err(TwpaError::Domain(format!("gain must be at least 1, got {gain_linear}")));
    }
    Ok(1.0 / (2.0 - 1.0 / gain_linear))
}

/// System measurement efficiency `ħω / (k_B T_sys)`.
pub fn eta_sys(t_sys: f64, freq: f64) -> Result<f64> {
    if !(t_sys > 0.0) {
        return Err(TwpaError::Domain(format!("system temperature must be positive, got {t_sys}")));
    }
    Ok(HBAR * hz_to_angular(freq) / (BOLTZMANN * t_sys))
}

/// Intrinsic amplifier efficiency normalized to the ideal amplifier:
/// `[2/η_on - 2/(G η_off) + 1/G]⁻¹ / η_ideal(G)`.
///
/// Values above one are returned as they are.
pub fn eta_intrinsic(eta_on: f64, eta_off: f64, gain_linear: f64) -> Result<f64> {
    if !(eta_on > 0.0) || !(eta_off > 0.0) {
        return Err(TwpaError::Domain("efficiencies must be positive".into()));
    }
    let ideal = eta_ideal(gain_linear)?;
    let bracket = 2.0 / eta_on - 2.0 / (gain_linear * eta_off) + 1.0 / gain_linear;
    if !(bracket > 0.0) {
        return Err(TwpaError::Domain(format!(
            "inconsistent inputs: noise bracket {bracket} is not positive"
        )));
    }
    Ok(1.0 / bracket / ideal)
}

/// Signal-to-noise improvement `10 log10(T_off / T_on)` in dB.
pub fn snri_from_temps(t_on: f64, t_off: f64) -> Result<f64> {
    if !(t_on > 0.0) || !(t_off > 0.0) {
        return Err(TwpaError::Domain("temperatures must be positive".into()));
    }
    Ok(10.0 * (t_off / t_on).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Plane {
    /// Device input.
    A,
    /// Spectrum-analyzer input.
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmpState {
    On,
    Off,
}

/// One measured line of a budget: signal and noise power at a plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetRecord {
    pub plane: Plane,
    pub state: AmpState,
    pub signal_dbm: f64,
    /// Noise power in the resolution bandwidth; only read at plane D.
    pub noise_dbm: f64,
    pub freq_hz: f64,
}

/// System quantities for one amplifier state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateBudget {
    /// Watts.
    pub signal_a: f64,
    pub signal_d: f64,
    pub noise_a: f64,
    pub noise_d: f64,
    pub system_gain: f64,
    /// Kelvin.
    pub system_temperature: f64,
    /// Noise photons referred to plane A, vacuum half photon included.
    pub system_photons: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub on: StateBudget,
    pub off: StateBudget,
    /// Hz.
    pub resolution_bandwidth: f64,
    pub frequency: f64,
    pub amplifier_gain: f64,
    /// Input-referred photons added by the amplifier.
    pub added_photons: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub eta_sys_on: f64,
    pub eta_sys_off: f64,
    pub eta_ideal: f64,
    pub eta_intrinsic_normalized: f64,
    pub frequency: f64,
    pub gain_db: f64,
    /// Set when the intrinsic efficiency exceeds one.
    pub nonphysical: bool,
}

fn state_budget(a: &BudgetRecord, d: &BudgetRecord, bandwidth: f64) -> Result<StateBudget> {
    let signal_a = dbm_to_watts(a.signal_dbm);
    let signal_d = dbm_to_watts(d.signal_dbm);
    let noise_d = dbm_to_watts(d.noise_dbm);
    if !(signal_a > 0.0 && signal_d > 0.0 && noise_d > 0.0) {
        return Err(TwpaError::Domain("budget powers must be positive and finite".into()));
    }
    let system_gain = signal_d / signal_a;
    let noise_a = noise_d / system_gain;
    let system_temperature = noise_a / (BOLTZMANN * bandwidth);
    let system_photons = BOLTZMANN * system_temperature / (HBAR * hz_to_angular(d.freq_hz));
    Ok(StateBudget {
        signal_a,
        signal_d,
        noise_a,
        noise_d,
        system_gain,
        system_temperature,
        system_photons,
    })
}

/// Reference-plane pipeline: system gains and temperatures for both
/// amplifier states, amplifier gain `S_D,on / S_D,off`, added photons
/// `A = (n_on - 1/2) - (n_off - 1/2)/G` and the normalized intrinsic
/// efficiency `(2 - 1/G) / (1 + 2A)`.
pub fn budget_pipeline(records: &[BudgetRecord], bandwidth: f64) -> Result<(NoiseBudget, EfficiencyReport)> {
    if !(bandwidth > 0.0) {
        return Err(TwpaError::Domain(format!("resolution bandwidth must be positive, got {bandwidth}")));
    }
    let find = |plane: Plane, state: AmpState| -> Result<&BudgetRecord> {
        let mut it = records.iter().filter(|r| r.plane == plane && r.state == state);
        let r = it.next().ok_or_else(|| {
            TwpaError::Mismatch(format!("budget has no record for plane {plane:?}, state {state:?}"))
        })?;
        if it.next().is_some() {
            return Err(TwpaError::Mismatch(format!("duplicate record for plane {plane:?}, state {state:?}")));
        }
        Ok(r)
    };
    let (a_on, d_on) = (find(Plane::A, AmpState::On)?, find(Plane::D, AmpState::On)?);
    let (a_off, d_off) = (find(Plane::A, AmpState::Off)?, find(Plane::D, AmpState::Off)?);
    let freq = d_on.freq_hz;
    if [a_on, a_off, d_off].iter().any(|r| r.freq_hz != freq) {
        return Err(TwpaError::Mismatch("on/off records are at different frequencies".into()));
    }
    if !(freq > 0.0) {
        return Err(TwpaError::Domain("budget frequency must be positive".into()));
    }
    let on = state_budget(a_on, d_on, bandwidth)?;
    let off = state_budget(a_off, d_off, bandwidth)?;
    let gain = on.signal_d / off.signal_d;
    let added = (on.system_photons - 0.5) - (off.system_photons - 0.5) / gain;
    let ideal = eta_ideal(gain)?;
    let normalized = (2.0 - 1.0 / gain) / (1.0 + 2.0 * added);
    let budget = NoiseBudget {
        on,
        off,
        resolution_bandwidth: bandwidth,
        frequency: freq,
        amplifier_gain: gain,
        added_photons: added,
    };
    let report = EfficiencyReport {
        eta_sys_on: 1.0 / on.system_photons,
        eta_sys_off: 1.0 / off.system_photons,
        eta_ideal: ideal,
        eta_intrinsic_normalized: normalized,
        frequency: freq,
        gain_db: linear_to_db(gain),
        nonphysical: normalized > 1.0,
    };
    Ok((budget, report))
}

/// Input-referred efficiency of a chain of (gain, loss) segments,
/// normalized to the ideal amplifier of the same net gain.
///
/// Segment `j` amplifies by `target_gain^(w_j / Σw)` and then transmits a
/// fraction `t_j` of the power, the rest replaced by vacuum. Writing the
/// input-referred added noise as the quantum-limited part plus an excess
/// `E = Σ (1 - t_j) / (t_j G_before_j)` keeps the lossless case exact.
pub fn distributed_loss_qe(gain_weights: &[f64], transmissions: &[f64], target_gain: f64) -> Result<f64> {
    if gain_weights.is_empty() {
        return Err(TwpaError::Domain("empty segment profile".into()));
    }
    if gain_weights.len() != transmissions.len() {
        return Err(TwpaError::Mismatch(format!(
            "{} gain weights but {} transmissions",
            gain_weights.len(),
            transmissions.len()
        )));
    }
    if gain_weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(TwpaError::Domain("gain weights must be non-negative".into()));
    }
    if transmissions.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(TwpaError::Domain("transmissions must lie in (0, 1]".into()));
    }
    if !(target_gain >= 1.0) {
        return Err(TwpaError::Domain(format!("target gain must be at least 1, got {target_gain}")));
    }
    let total_weight: f64 = gain_weights.iter().sum();
    let mut g_acc = 1.0;
    let mut excess = 0.0;
    for (w, t) in gain_weights.iter().zip(transmissions) {
        if total_weight > 0.0 {
            g_acc *= target_gain.powf(w / total_weight);
        }
        if *t < 1.0 {
            excess += (1.0 - t) / (t * g_acc);
            g_acc *= t;
        }
    }
    let quantum = 2.0 - 1.0 / g_acc;
    Ok(quantum / (quantum + 2.0 * excess))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_efficiency_values() {
        assert_eq!(eta_ideal(1.0).unwrap(), 1.0);
        assert!((eta_ideal(1e12).unwrap() - 0.5).abs() < 1e-12);
        assert!((eta_ideal(100.0).unwrap() - 0.502_512_562_8).abs() < 1e-9);
        assert!(eta_ideal(0.5).is_err());
    }

    #[test]
    fn system_efficiency_definitional() {
        let f = 6.59e9;
        let t = HBAR * hz_to_angular(f) / BOLTZMANN;
        assert!((eta_sys(t, f).unwrap() - 1.0).abs() < 1e-15);
        assert!(eta_sys(0.0, f).is_err());
    }

    #[test]
    fn intrinsic_ideal_identity() {
        for g in [1.0, 2.0, 104.2, 1e4] {
            let on = 1.0 / (1.0 - 1.0 / (2.0 * g));
            let v = eta_intrinsic(on, 2.0, g).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{g}: {v}");
        }
    }

    #[test]
    fn intrinsic_large_gain_limit() {
        let v = eta_intrinsic(0.7, 0.08, 1e12).unwrap();
        assert!((v - 0.7).abs() < 1e-9);
    }

    #[test]
    fn intrinsic_rejects_negative_bracket() {
        assert!(eta_intrinsic(10.0, 0.01, 2.0).is_err());
    }

    #[test]
    fn snri_values() {
        assert_eq!(snri_from_temps(1.0, 1.0).unwrap(), 0.0);
        assert!((snri_from_temps(0.1, 1.0).unwrap() - 10.0).abs() < 1e-12);
    }

    fn rec(plane: Plane, state: AmpState, s: f64, n: f64) -> BudgetRecord {
        BudgetRecord { plane, state, signal_dbm: s, noise_dbm: n, freq_hz: 6.59e9 }
    }

    #[test]
    fn pipeline_gain_and_temperature() {
        let records = [
            rec(Plane::A, AmpState::On, -120.0, f64::NAN),
            rec(Plane::D, AmpState::On, -30.0, -90.0),
            rec(Plane::A, AmpState::Off, -120.0, f64::NAN),
            rec(Plane::D, AmpState::Off, -50.0, -100.0),
        ];
        let (b, _) = budget_pipeline(&records, 1e4).unwrap();
        assert!((linear_to_db(b.on.system_gain) - 90.0).abs() < 1e-9);
        // 1e-21 W over k_B · 10 kHz
        assert!((b.on.system_temperature - 1e-21 / (1.380_649e-23 * 1e4)).abs() < 1e-15);
        assert!((b.on.system_temperature - 7.243e-3).abs() < 1e-6);
    }

    #[test]
    fn pipeline_rejects_mismatched_frequency() {
        let mut records = vec![
            rec(Plane::A, AmpState::On, -120.0, 0.0),
            rec(Plane::D, AmpState::On, -30.0, -90.0),
            rec(Plane::A, AmpState::Off, -120.0, 0.0),
            rec(Plane::D, AmpState::Off, -50.0, -100.0),
        ];
        records[3].freq_hz = 6.6e9;
        assert!(matches!(budget_pipeline(&records, 1e4), Err(TwpaError::Mismatch(_))));
        records.pop();
        assert!(matches!(budget_pipeline(&records, 1e4), Err(TwpaError::Mismatch(_))));
    }

    #[test]
    fn distributed_qe_limits() {
        assert_eq!(distributed_loss_qe(&[1.0; 64], &[1.0; 64], 100.0).unwrap(), 1.0);
        let t = 0.9;
        let before = distributed_loss_qe(&[0.0, 1.0], &[t, 1.0], 1e12).unwrap();
        assert!((before - t).abs() < 1e-9);
        let after = distributed_loss_qe(&[1.0], &[t], 1e12).unwrap();
        assert!((after - 1.0).abs() < 1e-9);
        assert!(distributed_loss_qe(&[], &[], 100.0).is_err());
        assert!(distributed_loss_qe(&[1.0], &[0.0], 100.0).is_err());
    }
}
