//! Physical description of the amplifier: junction chains, coplanar stubs,
//! phase-matching resonators and the adiabatic critical-current taper.
//!
//! Everything here is an immutable value once constructed. Frequencies are
//! angular (rad/s) throughout.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::FLUX_QUANTUM;
use crate::error::{Result, TwpaError};

/// Relative half-width of the guard band around stub admittance poles.
pub const STUB_POLE_GUARD: f64 = 1e-6;

/// Josephson inductance `Φ0 / (2π I_c)` of a single junction.
pub fn josephson_inductance(critical_current: f64) -> Result<f64> {
    if !(critical_current > 0.0) || !critical_current.is_finite() {
        return Err(TwpaError::Domain(format!(
            "critical current must be positive, got {critical_current}"
        )));
    }
    Ok(FLUX_QUANTUM / (2.0 * PI * critical_current))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionSpec {
    /// Amperes.
    pub critical_current: f64,
    /// Farads, per junction.
    pub junction_capacitance: f64,
    pub junctions_per_cell: u32,
}

impl JunctionSpec {
    pub fn new(critical_current: f64, junction_capacitance: f64, junctions_per_cell: u32) -> Result<Self> {
        if !(critical_current > 0.0) {
            return Err(TwpaError::Domain(format!(
                "critical current must be positive, got {critical_current}"
            )));
        }
        if !(junction_capacitance >= 0.0) {
            return Err(TwpaError::Domain(format!(
                "junction capacitance must be non-negative, got {junction_capacitance}"
            )));
        }
        if junctions_per_cell == 0 {
            return Err(TwpaError::Domain("a cell needs at least one junction".into()));
        }
        Ok(Self {
            critical_current,
            junction_capacitance,
            junctions_per_cell,
        })
    }

    /// Inductance of one junction.
    pub fn inductance(&self) -> f64 {
        FLUX_QUANTUM / (2.0 * PI * self.critical_current)
    }

    /// Linear inductance of the whole series chain.
    pub fn chain_inductance(&self) -> f64 {
        self.junctions_per_cell as f64 * self.inductance()
    }

    /// Plasma frequency `1/sqrt(L_J C_J)`; infinite without capacitance.
    pub fn plasma_frequency(&self) -> f64 {
        if self.junction_capacitance == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (self.inductance() * self.junction_capacitance).sqrt()
        }
    }

    /// Series impedance of the chain, each junction an `L_J || C_J`.
    pub fn chain_impedance(&self, freq: f64) -> Result<Complex64> {
        let l = self.inductance();
        let denom = 1.0 - freq * freq * l * self.junction_capacitance;
        if denom.abs() < 1e-9 {
            return Err(TwpaError::Singularity {
                freq,
                reason: "junction plasma resonance".into(),
            });
        }
        Ok(Complex64::new(0.0, self.junctions_per_cell as f64 * freq * l / denom))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StubSpec {
    /// Meters.
    pub length: f64,
    /// Meters per second.
    pub wave_velocity: f64,
    /// Ohms.
    pub characteristic_impedance: f64,
    /// rad/s, always `π ν / (2 l)`.
    pub quarter_wave_freq: f64,
}

impl StubSpec {
    pub fn new(length: f64, wave_velocity: f64, characteristic_impedance: f64) -> Result<Self> {
        for (name, v) in [
            ("length", length),
            ("wave velocity", wave_velocity),
            ("characteristic impedance", characteristic_impedance),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(TwpaError::Domain(format!("stub {name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            length,
            wave_velocity,
            characteristic_impedance,
            quarter_wave_freq: PI * wave_velocity / (2.0 * length),
        })
    }

    /// Stub whose low-frequency capacitance `l/(ν Z)` equals `capacitance`.
    pub fn with_capacitance(capacitance: f64, wave_velocity: f64, characteristic_impedance: f64) -> Result<Self> {
        Self::new(capacitance * wave_velocity * characteristic_impedance, wave_velocity, characteristic_impedance)
    }

    fn electrical_angle(&self, freq: f64) -> f64 {
        PI * freq / (2.0 * self.quarter_wave_freq)
    }

    /// Open-stub input impedance `-j Z cot(π ω / 2 ω_qw)`.
    ///
    /// Returns a singularity error near the poles of the cotangent (even
    /// multiples of `ω_qw`, where the stub looks like an open circuit).
    pub fn impedance_exact(&self, freq: f64) -> Result<Complex64> {
        if !(freq > 0.0) {
            return Err(TwpaError::Domain(format!("frequency must be positive, got {freq}")));
        }
        let ratio = freq / self.quarter_wave_freq;
        let nearest_even = 2.0 * (ratio / 2.0).round();
        if nearest_even > 0.0 && (ratio - nearest_even).abs() < STUB_POLE_GUARD {
            return Err(TwpaError::Singularity {
                freq,
                reason: "half-wave stub impedance pole".into(),
            });
        }
        let x = self.electrical_angle(freq);
        Ok(Complex64::new(0.0, -self.characteristic_impedance * x.cos() / x.sin()))
    }

    /// Input admittance `j tan(π ω / 2 ω_qw) / Z`, guarded around odd
    /// multiples of `ω_qw` where the stub shorts the line.
    pub fn admittance_exact(&self, freq: f64) -> Result<Complex64> {
        let ratio = freq / self.quarter_wave_freq;
        let nearest_odd = 2.0 * ((ratio - 1.0) / 2.0).round() + 1.0;
        if (ratio - nearest_odd).abs() < STUB_POLE_GUARD {
            return Err(TwpaError::Singularity {
                freq,
                reason: "quarter-wave stub admittance pole".into(),
            });
        }
        Ok(Complex64::new(0.0, self.electrical_angle(freq).tan() / self.characteristic_impedance))
    }

    /// Series-LC equivalent `(C_stub, L_stub)` of the open stub.
    pub fn lc_approx(&self) -> (f64, f64) {
        let c = self.length / (self.wave_velocity * self.characteristic_impedance);
        let l = self.characteristic_impedance * self.length / (3.0 * self.wave_velocity);
        (c, l)
    }

    pub fn capacitance(&self) -> f64 {
        self.lc_approx().0
    }
}

/// Capacitively coupled lumped-LC resonator shunting the line.
///
/// `capacitance` is the total capacitance seen by the inductor with the
/// line node grounded, i.e. it includes `coupling_capacitance`. With that
/// convention `resonant_frequency = 1/sqrt(L C)` is where the shunt branch
/// admittance peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorSpec {
    /// rad/s.
    pub resonant_frequency: f64,
    pub inductance: f64,
    pub capacitance: f64,
    pub coupling_capacitance: f64,
    /// One resonator after every `insertion_period` cells.
    pub insertion_period: usize,
}

impl ResonatorSpec {
    pub fn new(
        resonant_frequency: f64,
        capacitance: f64,
        coupling_capacitance: f64,
        insertion_period: usize,
    ) -> Result<Self> {
        if !(resonant_frequency > 0.0) || !(capacitance > 0.0) {
            return Err(TwpaError::Domain("resonator frequency and capacitance must be positive".into()));
        }
        if !(coupling_capacitance >= 0.0) || coupling_capacitance > capacitance {
            return Err(TwpaError::Domain(format!(
                "coupling capacitance {coupling_capacitance} must lie in [0, {capacitance}]"
            )));
        }
        if insertion_period == 0 {
            return Err(TwpaError::Domain("insertion period must be at least one cell".into()));
        }
        let inductance = 1.0 / (resonant_frequency * resonant_frequency * capacitance);
        Ok(Self {
            resonant_frequency,
            inductance,
            capacitance,
            coupling_capacitance,
            insertion_period,
        })
    }

    /// Capacitance of the parallel tank to ground (excluding the coupler).
    pub fn tank_capacitance(&self) -> f64 {
        self.capacitance - self.coupling_capacitance
    }

    /// Admittance of the shunt branch: coupler in series with the tank.
    pub fn shunt_admittance(&self, freq: f64) -> Result<Complex64> {
        if self.coupling_capacitance == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // Y = jω Cc (1 - ω² L C_tank) / (1 - ω² L C)
        let w2 = freq * freq;
        let denom = 1.0 - w2 * self.inductance * self.capacitance;
        if denom.abs() < 1e-12 {
            return Err(TwpaError::Singularity {
                freq,
                reason: "phase-matching resonator pole".into(),
            });
        }
        let num = 1.0 - w2 * self.inductance * self.tank_capacitance();
        Ok(Complex64::new(0.0, freq * self.coupling_capacitance * num / denom))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TaperShape {
    /// Straight ramps from the edges towards a flat middle plateau.
    Linear { ramp_fraction: f64 },
    /// Half-cosine ramps towards a flat middle plateau.
    RaisedCosine { ramp_fraction: f64 },
    /// Values supplied by the user, checked against the profile invariants.
    UserTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaperProfile {
    pub cell_count: usize,
    pub edge_critical_current: f64,
    pub mid_critical_current: f64,
    pub shape: TaperShape,
    pub per_cell_values: Vec<f64>,
}

/// Normalized distance from the nearest edge: 0 at both ends, 1 in the middle.
fn depth(i: usize, n: usize) -> f64 {
    let half = ((n - 1) / 2) as f64;
    i.min(n - 1 - i) as f64 / half
}

/// Builds a symmetric critical-current profile with maxima at both ends.
pub fn make_taper(cell_count: usize, edge_i: f64, mid_i: f64, shape: TaperShape) -> Result<TaperProfile> {
    if cell_count < 3 {
        return Err(TwpaError::Profile(format!("need at least 3 cells, got {cell_count}")));
    }
    if !(mid_i > 0.0) {
        return Err(TwpaError::Profile(format!("mid critical current must be positive, got {mid_i}")));
    }
    if edge_i < mid_i {
        return Err(TwpaError::Profile(format!(
            "edge critical current {edge_i} is below the middle value {mid_i}"
        )));
    }
    let ramp = |f: f64| -> Result<f64> {
        if f > 0.0 && f <= 1.0 {
            Ok(f)
        } else {
            Err(TwpaError::Profile(format!("ramp fraction must be in (0, 1], got {f}")))
        }
    };
    let span = edge_i - mid_i;
    let values: Vec<f64> = match shape {
        TaperShape::Linear { ramp_fraction } => {
            let r = ramp(ramp_fraction)?;
            (0..cell_count)
                .map(|i| edge_i - span * (depth(i, cell_count) / r).min(1.0))
                .collect()
        }
        TaperShape::RaisedCosine { ramp_fraction } => {
            let r = ramp(ramp_fraction)?;
            (0..cell_count)
                .map(|i| {
                    let s = (depth(i, cell_count) / r).min(1.0);
                    edge_i - span * 0.5 * (1.0 - (PI * s).cos())
                })
                .collect()
        }
        TaperShape::UserTable => {
            return Err(TwpaError::Profile("use TaperProfile::from_table for user tables".into()))
        }
    };
    let profile = TaperProfile {
        cell_count,
        edge_critical_current: edge_i,
        mid_critical_current: mid_i,
        shape,
        per_cell_values: values,
    };
    profile.validate()?;
    Ok(profile)
}

impl TaperProfile {
    /// Wraps a user table; endpoints and minimum are read from the data.
    pub fn from_table(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(TwpaError::Profile("a taper table needs at least 3 entries".into()));
        }
        let edge = values[0];
        let mid = values.iter().copied().fold(f64::INFINITY, f64::min);
        let profile = TaperProfile {
            cell_count: values.len(),
            edge_critical_current: edge,
            mid_critical_current: mid,
            shape: TaperShape::UserTable,
            per_cell_values: values,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let v = &self.per_cell_values;
        let n = self.cell_count;
        if v.len() != n {
            return Err(TwpaError::Profile(format!("{} values for {} cells", v.len(), n)));
        }
        if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(TwpaError::Profile("critical currents must be positive and finite".into()));
        }
        let tol = 1e-12 * self.edge_critical_current;
        if (v[0] - self.edge_critical_current).abs() > tol || (v[n - 1] - self.edge_critical_current).abs() > tol {
            return Err(TwpaError::Profile("endpoints must equal the edge critical current".into()));
        }
        for i in 0..n / 2 {
            if (v[i] - v[n - 1 - i]).abs() > tol {
                return Err(TwpaError::Profile(format!("profile not symmetric at cell {i}")));
            }
        }
        for i in 1..=(n - 1) / 2 {
            if v[i] > v[i - 1] + tol {
                return Err(TwpaError::Profile(format!("profile increases towards the middle at cell {i}")));
            }
        }
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        if (min - self.mid_critical_current).abs() > tol || (v[(n - 1) / 2] - min).abs() > tol {
            return Err(TwpaError::Profile("minimum must sit mid-device at the mid critical current".into()));
        }
        Ok(())
    }

    /// Scales every critical current by one global factor (critical-current
    /// density rescaling).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(TwpaError::Profile(format!("scale factor must be positive, got {factor}")));
        }
        Ok(TaperProfile {
            cell_count: self.cell_count,
            edge_critical_current: self.edge_critical_current * factor,
            mid_critical_current: self.mid_critical_current * factor,
            shape: self.shape,
            per_cell_values: self.per_cell_values.iter().map(|v| v * factor).collect(),
        })
    }
}

/// Maps each cell's critical current to its junction capacitance and the
/// stub that sets the cell impedance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRule {
    pub junctions_per_cell: u32,
    /// F/m² of junction area.
    pub specific_capacitance: f64,
    /// A/m²; junction area is `I_c / J_c`.
    pub critical_current_density: f64,
    pub stub_wave_velocity: f64,
    pub stub_impedance: f64,
    /// Low-frequency cell impedance `sqrt(N L_J / C_stub)` aimed for.
    pub target_impedance: f64,
    /// Highest analysis frequency (rad/s); every stub must resonate above it.
    pub analysis_max_freq: f64,
}

impl CellRule {
    pub fn junction(&self, critical_current: f64) -> Result<JunctionSpec> {
        let area = critical_current / self.critical_current_density;
        JunctionSpec::new(critical_current, self.specific_capacitance * area, self.junctions_per_cell)
    }

    pub fn stub_for(&self, junction: &JunctionSpec) -> Result<StubSpec> {
        let c = junction.chain_inductance() / (self.target_impedance * self.target_impedance);
        let stub = StubSpec::with_capacitance(c, self.stub_wave_velocity, self.stub_impedance)?;
        if stub.quarter_wave_freq <= self.analysis_max_freq {
            return Err(TwpaError::Configuration(format!(
                "stub of length {:.3e} m resonates at {:.3e} rad/s, inside the analysis band (< {:.3e})",
                stub.length, stub.quarter_wave_freq, self.analysis_max_freq
            )));
        }
        Ok(stub)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub junction: JunctionSpec,
    pub stub: StubSpec,
}

impl Cell {
    /// Low-frequency image impedance `sqrt(N L_J / C_stub)`.
    pub fn image_impedance(&self) -> f64 {
        (self.junction.chain_inductance() / self.stub.capacitance()).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceNetlist {
    pub cells: Vec<Cell>,
    /// `(cell_index, resonator)`: the resonator shunts the node after that cell.
    pub resonators: Vec<(usize, ResonatorSpec)>,
    pub target_impedance: f64,
    pub loss_tangent: f64,
}

impl DeviceNetlist {
    pub fn new(
        cells: Vec<Cell>,
        resonators: Vec<(usize, ResonatorSpec)>,
        target_impedance: f64,
        loss_tangent: f64,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(TwpaError::Configuration("netlist has no cells".into()));
        }
        if !(loss_tangent >= 0.0) {
            return Err(TwpaError::Configuration(format!("loss tangent must be >= 0, got {loss_tangent}")));
        }
        if !(target_impedance > 0.0) {
            return Err(TwpaError::Configuration("target impedance must be positive".into()));
        }
        let mut last: Option<usize> = None;
        for (idx, _) in &resonators {
            if *idx >= cells.len() || last.is_some_and(|l| *idx <= l) {
                return Err(TwpaError::Configuration(format!(
                    "resonator cell index {idx} out of order or out of range"
                )));
            }
            last = Some(*idx);
        }
        Ok(Self {
            cells,
            resonators,
            target_impedance,
            loss_tangent,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn with_loss_tangent(&self, loss_tangent: f64) -> Result<Self> {
        Self::new(self.cells.clone(), self.resonators.clone(), self.target_impedance, loss_tangent)
    }

    /// Smallest critical current on the line (`I_0`).
    pub fn min_critical_current(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.junction.critical_current)
            .fold(f64::INFINITY, f64::min)
    }

    /// Resonator attached after `cell`, if any.
    pub fn resonator_after(&self, cell: usize) -> Option<&ResonatorSpec> {
        self.resonators
            .binary_search_by_key(&cell, |(i, _)| *i)
            .ok()
            .map(|k| &self.resonators[k].1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("netlist serializes")
    }
}

/// Assembles the line: one cell per taper entry and, if given, a resonator
/// after every `insertion_period` cells.
pub fn build_device(
    taper: &TaperProfile,
    rule: &CellRule,
    resonator: Option<&ResonatorSpec>,
    loss_tangent: f64,
) -> Result<DeviceNetlist> {
    taper.validate()?;
    let cells = taper
        .per_cell_values
        .iter()
        .map(|&ic| {
            let junction = rule.junction(ic)?;
            let stub = rule.stub_for(&junction)?;
            Ok(Cell { junction, stub })
        })
        .collect::<Result<Vec<_>>>()?;
    let resonators = match resonator {
        Some(r) => (0..cells.len())
            .filter(|i| (i + 1) % r.insertion_period == 0)
            .map(|i| (i, *r))
            .collect(),
        None => Vec::new(),
    };
    DeviceNetlist::new(cells, resonators, rule.target_impedance, loss_tangent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::rel;

    mod approx_eq {
        pub fn rel(a: f64, b: f64) -> f64 {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn josephson_inductance_values() {
        // Φ0/(2π I) evaluated by hand with Φ0 = 2.067833848e-15 Wb.
        let oracle = |i: f64| 2.067_833_848e-15 / (2.0 * std::f64::consts::PI * i);
        assert!(rel(josephson_inductance(4.62e-6).unwrap(), oracle(4.62e-6)) < 1e-9);
        assert!((josephson_inductance(4.62e-6).unwrap() - 71.2e-12).abs() < 0.05e-12);
        assert!((josephson_inductance(13.1e-6).unwrap() - 25.1e-12).abs() < 0.05e-12);
        let l1 = josephson_inductance(7e-6).unwrap();
        let l2 = josephson_inductance(14e-6).unwrap();
        assert_eq!(l1, 2.0 * l2);
        assert!(josephson_inductance(0.0).is_err());
        assert!(josephson_inductance(-1e-6).is_err());
    }

    #[test]
    fn stub_impedance_special_points() {
        let stub = StubSpec::new(1e-3, 1.2e8, 50.0).unwrap();
        let wq = stub.quarter_wave_freq;
        assert!((wq - PI * 1.2e8 / 2e-3).abs() / wq < 1e-15);
        assert!(stub.impedance_exact(wq).unwrap().norm() < 1e-12);
        let half = stub.impedance_exact(wq / 2.0).unwrap();
        assert!(half.re.abs() < 1e-12 && (half.im + 50.0).abs() < 1e-9);
        let low = stub.impedance_exact(wq * 1e-6).unwrap();
        assert!(low.norm() > 1e6);
        assert!((low.arg() + PI / 2.0).abs() < 1e-12);
        assert!(matches!(stub.impedance_exact(2.0 * wq), Err(TwpaError::Singularity { .. })));
        assert!(matches!(stub.admittance_exact(wq), Err(TwpaError::Singularity { .. })));
        assert!(matches!(stub.admittance_exact(wq * (3.0 + 5e-7)), Err(TwpaError::Singularity { .. })));
        assert!(stub.admittance_exact(wq * (1.0 + 2e-6)).is_ok());
        assert!(stub.impedance_exact(0.0).is_err());
    }

    #[test]
    fn stub_lc_values() {
        let stub = StubSpec::new(1e-3, 1.2e8, 50.0).unwrap();
        let (c, l) = stub.lc_approx();
        // l/(ν Z) and Z l/(3ν) by hand
        assert!((c - 1.666_666_666_7e-13).abs() < 1e-22);
        assert!((l - 1.388_888_888_9e-10).abs() < 1e-19);
        let (c2, l2) = StubSpec::new(2e-3, 1.2e8, 50.0).unwrap().lc_approx();
        assert!(rel(c2, 2.0 * c) < 1e-15 && rel(l2, 2.0 * l) < 1e-15);
    }

    #[test]
    fn stub_lc_matches_exact_at_low_frequency() {
        let stub = StubSpec::new(0.5e-3, 1.2e8, 50.0).unwrap();
        let (c, l) = stub.lc_approx();
        let wq = stub.quarter_wave_freq;
        let mut worst_03: f64 = 0.0;
        let mut worst_01: f64 = 0.0;
        for k in 1..=3000 {
            let w = 0.3 * wq * k as f64 / 3000.0;
            let exact = stub.impedance_exact(w).unwrap();
            let approx = Complex64::new(0.0, w * l - 1.0 / (w * c));
            let err = (approx - exact).norm() / exact.norm();
            worst_03 = worst_03.max(err);
            if w <= 0.1 * wq {
                worst_01 = worst_01.max(err);
            }
        }
        assert!(worst_03 < 1e-2, "{worst_03}");
        assert!(worst_01 < 1e-3, "{worst_01}");
    }

    #[test]
    fn taper_paper_endpoints() {
        let t = make_taper(3008, 13.1e-6, 4.62e-6, TaperShape::RaisedCosine { ramp_fraction: 1.0 }).unwrap();
        assert_eq!(t.per_cell_values[0], 13.1e-6);
        assert_eq!(t.per_cell_values[3007], 13.1e-6);
        assert!((t.per_cell_values[1503] - 4.62e-6).abs() < 1e-18);
        assert!((t.per_cell_values[1504] - 4.62e-6).abs() < 1e-18);
    }

    #[test]
    fn taper_flat_and_errors() {
        let t = make_taper(3, 5e-6, 5e-6, TaperShape::Linear { ramp_fraction: 1.0 }).unwrap();
        assert!(t.per_cell_values.iter().all(|v| *v == 5e-6));
        assert!(matches!(
            make_taper(10, 4e-6, 5e-6, TaperShape::Linear { ramp_fraction: 1.0 }),
            Err(TwpaError::Profile(_))
        ));
        assert!(make_taper(2, 5e-6, 4e-6, TaperShape::Linear { ramp_fraction: 1.0 }).is_err());
        assert!(make_taper(10, 5e-6, 4e-6, TaperShape::Linear { ramp_fraction: 0.0 }).is_err());
    }

    #[test]
    fn user_table_checks() {
        assert!(TaperProfile::from_table(vec![3.0, 2.0, 1.0, 2.0, 3.0]).is_ok());
        assert!(TaperProfile::from_table(vec![3.0, 2.0, 1.0, 2.5, 3.0]).is_err());
        assert!(TaperProfile::from_table(vec![3.0, 1.0, 2.0, 1.0, 3.0]).is_err());
    }

    #[test]
    fn resonator_frequency_invariant() {
        let w = 2.0 * PI * 8e9;
        let r = ResonatorSpec::new(w, 400e-15, 20e-15, 8).unwrap();
        assert!(rel(1.0 / (r.inductance * r.capacitance).sqrt(), w) < 1e-12);
        assert!(ResonatorSpec::new(w, 10e-15, 20e-15, 8).is_err());
        assert!(ResonatorSpec::new(w, 400e-15, 20e-15, 0).is_err());
    }

    #[test]
    fn netlist_rejects_bad_resonator_order() {
        let rule = CellRule {
            junctions_per_cell: 3,
            specific_capacitance: 0.045,
            critical_current_density: 1.3e7,
            stub_wave_velocity: 1.2e8,
            stub_impedance: 50.0,
            target_impedance: 50.0,
            analysis_max_freq: 2.0 * PI * 12e9,
        };
        let j = rule.junction(5e-6).unwrap();
        let cell = Cell { junction: j, stub: rule.stub_for(&j).unwrap() };
        let r = ResonatorSpec::new(2.0 * PI * 8e9, 400e-15, 20e-15, 1).unwrap();
        assert!(DeviceNetlist::new(vec![cell; 3], vec![(1, r), (1, r)], 50.0, 0.0).is_err());
        assert!(DeviceNetlist::new(vec![cell; 3], vec![(3, r)], 50.0, 0.0).is_err());
        assert!(DeviceNetlist::new(vec![], vec![], 50.0, 0.0).is_err());
        assert!(DeviceNetlist::new(vec![cell], vec![], 50.0, -1.0).is_err());
        let single = DeviceNetlist::new(vec![cell], vec![], 50.0, 0.0).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn short_stub_rule_rejected() {
        let rule = CellRule {
            junctions_per_cell: 3,
            specific_capacitance: 0.045,
            critical_current_density: 1.3e7,
            stub_wave_velocity: 1.2e8,
            stub_impedance: 50.0,
            target_impedance: 50.0,
            analysis_max_freq: 2.0 * PI * 12e9,
        };
        // A tiny critical current needs a very long stub.
        let j = rule.junction(0.05e-6).unwrap();
        assert!(matches!(rule.stub_for(&j), Err(TwpaError::Configuration(_))));
    }
}
