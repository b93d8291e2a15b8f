//! Calibration fits and the noise-budget efficiency report.

use std::f64::consts::TAU;
use std::path::Path;

use clap::Args;
use serde::Serialize;
use twpa::fit::{chi_from_pair, fit_mid, fit_resonator, wqed_global_fit, CqedParams, ResonatorParams};
use twpa::io::{read_budget, read_mid, read_resonator, read_wqed};
use twpa::noise::{budget_pipeline, snri_from_temps, EfficiencyReport, NoiseBudget};
use twpa::units::watts_to_dbm;

use crate::bundle::Bundle;
use crate::error::{CliError, CliResult};

/// Circuit parameters in Hz; defaults are the reference readout circuit.
#[derive(Args, Clone)]
pub struct CqedArgs {
    /// Qubit frequency, Hz.
    #[arg(long)]
    qubit_freq: Option<f64>,
    /// Bare resonator frequency, Hz.
    #[arg(long)]
    resonator_freq: Option<f64>,
    /// Dispersive shift χ/2π, Hz.
    #[arg(long)]
    chi: Option<f64>,
    /// Total linewidth κ/2π, Hz.
    #[arg(long)]
    kappa: Option<f64>,
    /// External linewidth κ_ext/2π, Hz.
    #[arg(long)]
    kappa_ext: Option<f64>,
}

impl CqedArgs {
    fn params(&self) -> CliResult<CqedParams> {
        let r = CqedParams::reference();
        let pick = |v: Option<f64>, default: f64| v.map_or(default, |hz| TAU * hz);
        let p = CqedParams {
            qubit_freq: pick(self.qubit_freq, r.qubit_freq),
            bare_resonator_freq: pick(self.resonator_freq, r.bare_resonator_freq),
            chi: pick(self.chi, r.chi),
            kappa: pick(self.kappa, r.kappa),
            kappa_ext: pick(self.kappa_ext, r.kappa_ext),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Serialize)]
struct WqedResults {
    qubit_freq_hz: f64,
    gamma1_hz: f64,
    gamma2_hz: f64,
    attenuation_db: f64,
    /// 1σ of Γ1/2π, Γ2/2π (Hz) and the attenuation (dB).
    uncertainties: [f64; 3],
    ill_conditioned: bool,
    converged: bool,
    residual_norm: f64,
}

pub fn wqed(data: &Path, qubit_freq: f64, seed: u64) -> CliResult<Bundle> {
    let mut b = Bundle::new("fit-wqed", seed);
    let bytes = crate::read_input(data, &mut b)?;
    let points = read_wqed(bytes.as_slice())?;
    let f = wqed_global_fit(&points, TAU * qubit_freq)?;
    let u = f.uncertainties;
    let results = WqedResults {
        qubit_freq_hz: qubit_freq,
        gamma1_hz: f.gamma1 / TAU,
        gamma2_hz: f.gamma2 / TAU,
        attenuation_db: f.attenuation_db,
        uncertainties: [u[0] / TAU, u[1] / TAU, u[2]],
        ill_conditioned: f.ill_conditioned,
        converged: f.fit.converged,
        residual_norm: f.fit.residual_norm,
    };
    let (nominal, cal): (Vec<f64>, Vec<f64>) = f.calibrated_power.iter().copied().unzip();
    b.csv("calibrated_power.csv", &["power_nominal_dbm", "power_calibrated_dbm"], &[&nominal, &cal])?;
    b.line(format!("wQED fit over {} points at {} powers: calibrated_power.csv", points.len(), nominal.len()));
    b.line(format!("Γ1/2π = {:.5} ± {:.5} MHz", results.gamma1_hz / 1e6, results.uncertainties[0] / 1e6));
    b.line(format!("Γ2/2π = {:.5} ± {:.5} MHz", results.gamma2_hz / 1e6, results.uncertainties[1] / 1e6));
    b.line(format!("line attenuation: {:.3} ± {:.3} dB", f.attenuation_db, results.uncertainties[2]));
    if f.ill_conditioned {
        b.line("warning: the power sweep does not span the saturation knee; attenuation is poorly constrained");
    }
    b.results(&results);
    Ok(b)
}

#[derive(Serialize)]
struct MidResults {
    chi_hz: f64,
    kappa_hz: f64,
    kappa_ext_hz: f64,
    /// Drive amplitude per square-root DAC unit, ε/2π in Hz.
    dac_scale_hz: f64,
    dac_scale_uncertainty_hz: f64,
    joint_rms: f64,
    stark_only_rms: f64,
    dephasing_only_rms: f64,
    inconsistent: bool,
}

pub fn mid(data: &Path, cqed: &CqedArgs, seed: u64) -> CliResult<Bundle> {
    let mut b = Bundle::new("fit-mid", seed);
    let bytes = crate::read_input(data, &mut b)?;
    let params = cqed.params()?;
    let points = read_mid(bytes.as_slice())?;
    let f = fit_mid(&params, &points)?;
    let results = MidResults {
        chi_hz: params.chi / TAU,
        kappa_hz: params.kappa / TAU,
        kappa_ext_hz: params.kappa_ext / TAU,
        dac_scale_hz: f.dac_scale / TAU,
        dac_scale_uncertainty_hz: f.dac_scale_uncertainty / TAU,
        joint_rms: f.joint_rms,
        stark_only_rms: f.stark_only_rms,
        dephasing_only_rms: f.dephasing_only_rms,
        inconsistent: f.inconsistent,
    };
    let det: Vec<f64> = points.iter().map(|p| p.detuning / TAU).collect();
    let dac: Vec<f64> = points.iter().map(|p| p.dac_power).collect();
    let dbm: Vec<f64> = f.input_power_w.iter().map(|w| watts_to_dbm(*w)).collect();
    b.csv(
        "photons.csv",
        &["detuning_hz", "dac_power", "photon_number", "input_power_dbm"],
        &[&det, &dac, &f.photon_numbers, &dbm],
    )?;
    b.line(format!("MID fit over {} operating points: photons.csv", points.len()));
    b.line(format!(
        "drive scale ε/2π per √DAC: {:.4} ± {:.4} kHz",
        results.dac_scale_hz / 1e3,
        results.dac_scale_uncertainty_hz / 1e3
    ));
    if f.inconsistent {
        b.line("warning: Stark shift and dephasing disagree on the drive scale");
    }
    b.results(&results);
    Ok(b)
}

#[derive(Serialize)]
struct ResonatorResults {
    ground: ResonatorParams,
    /// 1σ in the order f_r, Q_l, Q_c, a, α, τ.
    ground_uncertainties: [f64; 6],
    internal_q: f64,
    kappa_hz: f64,
    kappa_ext_hz: f64,
    excited: Option<ResonatorParams>,
    chi_hz: Option<f64>,
    chi_uncertainty_hz: Option<f64>,
}

pub fn resonator(data: &Path, excited: Option<&Path>, seed: u64) -> CliResult<Bundle> {
    let mut b = Bundle::new("fit-resonator", seed);
    let bytes = crate::read_input(data, &mut b)?;
    let g = fit_resonator(&read_resonator(bytes.as_slice())?)?;
    let e = match excited {
        Some(path) => {
            let bytes = crate::read_input(path, &mut b)?;
            Some(fit_resonator(&read_resonator(bytes.as_slice())?)?)
        }
        None => None,
    };
    let chi = e.as_ref().map(|e| chi_from_pair(&g, e));
    let p = g.params;
    let results = ResonatorResults {
        ground: p,
        ground_uncertainties: g.uncertainties,
        internal_q: p.internal_q(),
        kappa_hz: p.kappa() / TAU,
        kappa_ext_hz: p.kappa_ext() / TAU,
        excited: e.as_ref().map(|e| e.params),
        chi_hz: chi.map(|c| c.0),
        chi_uncertainty_hz: chi.map(|c| c.1),
    };
    b.line(format!("resonance: {:.6} GHz ± {:.1} Hz", p.resonance_hz / 1e9, g.uncertainties[0]));
    b.line(format!("Q_l = {:.1}, Q_c = {:.1}, Q_i = {:.1}", p.loaded_q, p.coupling_q, results.internal_q));
    b.line(format!("κ/2π = {:.4} MHz, κ_ext/2π = {:.4} MHz", results.kappa_hz / 1e6, results.kappa_ext_hz / 1e6));
    if let Some((c, s)) = chi {
        b.line(format!("χ/2π = {:.4} ± {:.4} MHz", c / 1e6, s / 1e6));
    }
    b.results(&results);
    Ok(b)
}

#[derive(Serialize)]
struct EfficiencyResults {
    report: EfficiencyReport,
    budget: NoiseBudget,
    snr_improvement_db: f64,
    input_plane: &'static str,
    output_plane: &'static str,
}

pub fn efficiency(path: &Path, bandwidth: f64, seed: u64) -> CliResult<Bundle> {
    let mut b = Bundle::new("efficiency", seed);
    let bytes = crate::read_input(path, &mut b)?;
    let records = read_budget(bytes.as_slice())?;
    let (budget, report) = budget_pipeline(&records, bandwidth)?;
    let snri = snri_from_temps(budget.on.system_temperature, budget.off.system_temperature)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    b.line(format!("frequency: {:.4} GHz, amplifier gain: {:.3} dB", report.frequency / 1e9, report.gain_db));
    b.line(format!(
        "system temperature on/off: {:.4} K / {:.4} K",
        budget.on.system_temperature, budget.off.system_temperature
    ));
    b.line(format!("system efficiency on/off: {:.4} / {:.4}", report.eta_sys_on, report.eta_sys_off));
    b.line(format!("ideal phase-preserving efficiency: {:.4}", report.eta_ideal));
    b.line(format!("intrinsic efficiency (normalized): {:.4}", report.eta_intrinsic_normalized));
    b.line(format!("SNR improvement: {snri:.3} dB"));
    if report.nonphysical {
        b.line("warning: intrinsic efficiency above 1; check the budget calibration");
    }
    b.results(&EfficiencyResults {
        report,
        budget,
        snr_improvement_db: snri,
        input_plane: "A (device input)",
        output_plane: "D (spectrum-analyzer input)",
    });
    Ok(b)
}
