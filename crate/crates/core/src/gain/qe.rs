//! Segment profile of gain and loss along the line, for the
//! distributed-loss efficiency estimate.

use serde::{Deserialize, Serialize};

use super::cme::{input_state, solve, CmeLine, CmeOptions, ModeTriplet, PumpConfig};
use crate::device::DeviceNetlist;
use crate::error::{Result, TwpaError};
use crate::noise::distributed_loss_qe;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QeProfile {
    /// Clipped growth of `ln n_s` over each segment of the lossless run.
    pub weights: Vec<f64>,
    /// Power transmission of each segment from the dielectric loss.
    pub transmissions: Vec<f64>,
    pub lossless_gain_db: f64,
}

impl QeProfile {
    /// Efficiency at the larger of the lossless gain and `floor_db`.
    pub fn efficiency(&self, floor_db: f64) -> Result<f64> {
        let target = 10f64.powf(self.lossless_gain_db.max(floor_db) / 10.0);
        distributed_loss_qe(&self.weights, &self.transmissions, target)
    }
}

/// Splits the line into `segments` pieces and records where the signal
/// grows (from a lossless coupled-mode run) and how much each piece
/// attenuates (`exp(-Σ k_s tanδ)` over its cells).
pub fn qe_profile(
    netlist: &DeviceNetlist,
    pump: &PumpConfig,
    signal_freq: f64,
    segments: usize,
    options: &CmeOptions,
) -> Result<QeProfile> {
    if segments == 0 || segments > netlist.len() {
        return Err(TwpaError::Domain(format!(
            "segment count must lie in 1..={}, got {segments}",
            netlist.len()
        )));
    }
    pump.validate()?;
    let triplet = ModeTriplet::new(pump.frequency, signal_freq)?;
    let line = CmeLine::from_netlist(netlist, triplet)?
        .ok_or_else(|| TwpaError::Domain(format!("{signal_freq:.6e} Hz has a mode in a stop band")))?;
    let loss_per_cell: Vec<f64> = line.cells.iter().map(|c| c.k[1] * netlist.loss_tangent).collect();
    let pump_flux = pump.photon_flux(netlist.min_critical_current());
    let input = input_state(&triplet, pump_flux, options.signal_power_dbm);
    let run = solve(&line.without_loss(), input, options, true)?;
    let traj = run.trajectory.expect("trajectory recorded");
    let n = netlist.len();
    let bounds: Vec<usize> = (0..=segments).map(|j| (j * n + segments / 2) / segments).collect();
    let mut weights = Vec::with_capacity(segments);
    let mut transmissions = Vec::with_capacity(segments);
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let growth = traj[b].signal.norm_sqr().ln() - traj[a].signal.norm_sqr().ln();
        weights.push(growth.max(0.0));
        transmissions.push((-loss_per_cell[a..b].iter().sum::<f64>()).exp());
    }
    Ok(QeProfile { weights, transmissions, lossless_gain_db: run.gain_db })
}
