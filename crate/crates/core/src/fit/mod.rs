//! Calibration fitters and their synthetic-data generators.

mod lm;
pub mod mid;
pub mod ramsey;
pub mod resonator;
pub mod wqed;

pub use lm::{best_of_starts, levenberg_marquardt, FitResult, LmOptions};
pub use mid::{fit_mid, synthesize_mid, CqedParams, MidFit, MidPoint};
pub use ramsey::{fit_ramsey, ramsey_shift, synthesize_ramsey, RamseyFit, RamseyParams, RamseyShift, RamseyTrace};
pub use resonator::{
    chi_from_pair, circle_fit, fit_resonator, synthesize_resonator, ResonatorFit, ResonatorParams, ResonatorTrace,
};
pub use wqed::{
    knee_spanning_powers, rabi_squared, synthesize_wqed, wqed_global_fit, wqed_power, wqed_transmission, WqedFit,
    WqedParams, WqedPoint,
};
