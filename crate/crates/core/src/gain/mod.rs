//! Parametric gain from the four-wave-mixing coupled-mode equations.

mod cme;
mod qe;
mod spectrum;

pub use cme::{
    input_state, integrate, photon_flux_conservation, solve, CellCoefficients, CmeLine, CmeOptions, CmeRun,
    ModeState, ModeTriplet, PumpAmplitude, PumpConfig, PUMP_REFERENCE_IMPEDANCE,
};
pub use qe::{qe_profile, QeProfile};
pub use spectrum::{
    cme_gain, compression_curve, find_p1db, pump_for_gain, run_point, CompressionCurve, ExcludedPoint,
    GainSpectrum, P1dbResult,
};
