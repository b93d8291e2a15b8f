//! Small-signal analysis of the line: transfer matrices, S-parameters,
//! dispersion and dielectric loss.

mod cascade;
mod dispersion;
mod loss_fit;
mod smoothing;
mod twoport;

pub use cascade::{
    cascade_matrices, cascade_sparams, cascade_sparams_with, local_wavenumbers, netlist_abcd,
    netlist_sparams, resonator_shunt_abcd, unit_cell_abcd, CascadeResult,
};
pub use dispersion::{dielectric_attenuation_db, dispersion, DispersionSpectrum, GAP_THRESHOLD_DB};
pub use loss_fit::{fit_loss_tangent, LossFitOptions, LossFitResult, Smoothing};
pub use smoothing::savgol;
pub use twoport::{ComplexSpectrum, SParams, TwoPortMatrix};

