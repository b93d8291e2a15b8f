//! Transfer-matrix cascade of the full line.

use num_complex::Complex64;
use rayon::prelude::*;

use super::twoport::{check_increasing, ComplexSpectrum, SParams, TwoPortMatrix};
use crate::device::{Cell, DeviceNetlist, ResonatorSpec};
use crate::error::{Result, TwpaError};
use crate::units::hz_to_angular;

/// ABCD of one L-section: the junction chain in series followed by the
/// stub to ground. Dielectric loss enters as `C -> C (1 - j tanδ)` on the
/// stub only.
pub fn unit_cell_abcd(cell: &Cell, freq: f64, loss_tangent: f64) -> Result<TwoPortMatrix> {
    if !(freq > 0.0) {
        return Err(TwpaError::Domain(format!("frequency must be positive, got {freq}")));
    }
    let z = cell.junction.chain_impedance(freq)?;
    let y = cell.stub.admittance_exact(freq)? * Complex64::new(1.0, -loss_tangent);
    Ok(TwoPortMatrix::series(z) * TwoPortMatrix::shunt(y))
}

pub fn resonator_shunt_abcd(resonator: &ResonatorSpec, freq: f64) -> Result<TwoPortMatrix> {
    Ok(TwoPortMatrix::shunt(resonator.shunt_admittance(freq)?))
}

/// Ordered product of a list of two-ports; the empty list is a through.
pub fn cascade_matrices(parts: &[TwoPortMatrix]) -> TwoPortMatrix {
    parts.iter().fold(TwoPortMatrix::IDENTITY, |acc, m| acc * *m)
}

/// Total ABCD of the netlist at one angular frequency.
pub fn netlist_abcd(netlist: &DeviceNetlist, freq: f64, loss_tangent: f64) -> Result<TwoPortMatrix> {
    let mut total = TwoPortMatrix::IDENTITY;
    let mut next_res = netlist.resonators.iter().peekable();
    for (i, cell) in netlist.cells.iter().enumerate() {
        total = total * unit_cell_abcd(cell, freq, loss_tangent)?;
        if let Some((_, r)) = next_res.next_if(|(idx, _)| *idx == i) {
            total = total * resonator_shunt_abcd(r, freq)?;
        }
        if !total.is_finite() {
            return Err(TwpaError::Numerical {
                cell: i,
                reason: format!("transfer matrix overflow at {freq:.6e} rad/s"),
            });
        }
    }
    Ok(total)
}

/// Resonator shunt, or `Y -> ∞` limit of the shunt scaled by `1/Y` when the
/// frequency sits on the resonator pole (flag set).
fn resonator_or_short(r: &ResonatorSpec, freq: f64) -> Result<(TwoPortMatrix, bool)> {
    match resonator_shunt_abcd(r, freq) {
        Ok(m) => Ok((m, false)),
        Err(TwpaError::Singularity { .. }) => {
            let zero = Complex64::new(0.0, 0.0);
            Ok((TwoPortMatrix { a: zero, b: zero, c: Complex64::new(1.0, 0.0), d: zero }, true))
        }
        Err(e) => Err(e),
    }
}

/// Total ABCD product kept as `M · e^{log_scale}` with `M` renormalized
/// whenever it grows large. Resonator poles are replaced by their scaled
/// short-circuit limit, which sets `log_scale` to infinity.
fn netlist_abcd_scaled(netlist: &DeviceNetlist, freq: f64, loss_tangent: f64) -> Result<(TwoPortMatrix, f64)> {
    let mut total = TwoPortMatrix::IDENTITY;
    let mut log_scale = 0.0;
    let mut next_res = netlist.resonators.iter().peekable();
    for (i, cell) in netlist.cells.iter().enumerate() {
        total = total * unit_cell_abcd(cell, freq, loss_tangent)?;
        if let Some((_, r)) = next_res.next_if(|(idx, _)| *idx == i) {
            let (m, shorted) = resonator_or_short(r, freq)?;
            if shorted {
                log_scale = f64::INFINITY;
            }
            total = total * m;
        }
        let big = [total.a, total.b, total.c, total.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if !big.is_finite() {
            return Err(TwpaError::Numerical {
                cell: i,
                reason: format!("transfer matrix overflow at {freq:.6e} rad/s"),
            });
        }
        if big > 1e100 {
            let inv = Complex64::new(1.0 / big, 0.0);
            total = TwoPortMatrix { a: total.a * inv, b: total.b * inv, c: total.c * inv, d: total.d * inv };
            log_scale += big.ln();
        }
    }
    Ok((total, log_scale))
}

/// S-parameters at one angular frequency. A frequency exactly on a
/// resonator pole gives zero transmission.
pub fn netlist_sparams(netlist: &DeviceNetlist, freq: f64, z0: f64) -> Result<SParams> {
    let (m, log_scale) = netlist_abcd_scaled(netlist, freq, netlist.loss_tangent)?;
    let mut s = m.to_sparams(z0);
    if log_scale != 0.0 {
        // S21 = 2/denom scales as 1/scale, S12 = 2 det/denom as scale.
        let shrink = (-log_scale).exp();
        s.s21 *= shrink;
        s.s12 = if log_scale.is_finite() { s.s12 * log_scale.exp() } else { Complex64::new(0.0, 0.0) };
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    pub s11: ComplexSpectrum,
    pub s21: ComplexSpectrum,
}

/// S-parameters of the netlist at the given frequencies (Hz), referenced to
/// the netlist target impedance.
pub fn cascade_sparams(netlist: &DeviceNetlist, frequencies: &[f64]) -> Result<CascadeResult> {
    cascade_sparams_with(netlist, frequencies, netlist.target_impedance)
}

pub fn cascade_sparams_with(netlist: &DeviceNetlist, frequencies: &[f64], z0: f64) -> Result<CascadeResult> {
    check_increasing(frequencies)?;
    let pairs = frequencies
        .par_iter()
        .map(|&f| {
            let s = netlist_sparams(netlist, hz_to_angular(f), z0)?;
            Ok((s.s11, s.s21))
        })
        .collect::<Result<Vec<_>>>()?;
    let (s11, s21): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(CascadeResult {
        s11: ComplexSpectrum::new(frequencies.to_vec(), s11, z0)?,
        s21: ComplexSpectrum::new(frequencies.to_vec(), s21, z0)?,
    })
}

/// Groups cells into lattice periods: each group ends at a resonator, and
/// without resonators every cell is its own group.
pub(crate) fn periods(netlist: &DeviceNetlist) -> Vec<std::ops::Range<usize>> {
    if netlist.resonators.is_empty() {
        return (0..netlist.len()).map(|i| i..i + 1).collect();
    }
    let mut out = Vec::with_capacity(netlist.resonators.len() + 1);
    let mut start = 0;
    for (idx, _) in &netlist.resonators {
        out.push(start..idx + 1);
        start = idx + 1;
    }
    if start < netlist.len() {
        out.push(start..netlist.len());
    }
    out
}

/// Half-trace of the lossless period matrix; `None` on a resonator pole.
fn period_half_trace(netlist: &DeviceNetlist, range: std::ops::Range<usize>, freq: f64) -> Result<Option<f64>> {
    let mut m = TwoPortMatrix::IDENTITY;
    for i in range {
        m = m * unit_cell_abcd(&netlist.cells[i], freq, 0.0)?;
        if let Some(r) = netlist.resonator_after(i) {
            let (shunt, shorted) = resonator_or_short(r, freq)?;
            if shorted {
                return Ok(None);
            }
            m = m * shunt;
        }
    }
    Ok(Some(m.half_trace().re))
}

/// Local Bloch wavenumber per cell (rad/cell) of the lossless line, from the
/// trace of each lattice period. `None` when any period is in a stop band.
pub fn local_wavenumbers(netlist: &DeviceNetlist, freq: f64) -> Result<Option<Vec<f64>>> {
    let mut k = vec![0.0; netlist.len()];
    for range in periods(netlist) {
        let x = match period_half_trace(netlist, range.clone(), freq)? {
            Some(x) if x.abs() <= 1.0 => x,
            _ => return Ok(None),
        };
        let per_cell = x.acos() / range.len() as f64;
        k[range].iter_mut().for_each(|v| *v = per_cell);
    }
    Ok(Some(k))
}

/// Sum of local Bloch phases; stop-band periods contribute the band-edge
/// value (0 or π).
pub(crate) fn bloch_phase_estimate(netlist: &DeviceNetlist, freq: f64) -> Result<f64> {
    let mut total = 0.0;
    for range in periods(netlist) {
        let x = period_half_trace(netlist, range, freq)?.unwrap_or(-1.0);
        total += x.clamp(-1.0, 1.0).acos();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{CellRule, JunctionSpec, StubSpec};
    use std::f64::consts::PI;

    fn rule() -> CellRule {
        CellRule {
            junctions_per_cell: 3,
            specific_capacitance: 0.045,
            critical_current_density: 1.3e7,
            stub_wave_velocity: 1.2e8,
            stub_impedance: 50.0,
            target_impedance: 50.0,
            analysis_max_freq: 2.0 * PI * 12e9,
        }
    }

    fn cell(ic: f64) -> Cell {
        let r = rule();
        let j = r.junction(ic).unwrap();
        Cell { junction: j, stub: r.stub_for(&j).unwrap() }
    }

    #[test]
    fn low_frequency_cell_is_identity() {
        let m = unit_cell_abcd(&cell(5e-6), 2.0 * PI * 1.0, 0.0).unwrap();
        let id = TwoPortMatrix::IDENTITY;
        for (x, y) in [(m.a, id.a), (m.b, id.b), (m.c, id.c), (m.d, id.d)] {
            assert!((x - y).norm() < 1e-6);
        }
    }

    #[test]
    fn lossless_cell_is_reciprocal_and_reactive() {
        let m = unit_cell_abcd(&cell(5e-6), 2.0 * PI * 7e9, 0.0).unwrap();
        assert!((m.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(m.a.im, 0.0);
        assert_eq!(m.b.re, 0.0);
        assert_eq!(m.c.re, 0.0);
    }

    #[test]
    fn bloch_impedance_near_image_impedance_at_1ghz() {
        for ic in [4.62e-6, 8e-6, 13.1e-6] {
            let c = cell(ic);
            let m = unit_cell_abcd(&c, 2.0 * PI * 1e9, 0.0).unwrap();
            let (cs, _) = c.stub.lc_approx();
            let oracle = (3.0 * c.junction.inductance() / cs).sqrt();
            let zb = m.bloch_impedance().norm();
            assert!(((zb - oracle) / oracle).abs() < 0.05, "{zb} vs {oracle}");
        }
    }

    #[test]
    fn resonator_shunt_limits() {
        let r = ResonatorSpec::new(2.0 * PI * 8e9, 450e-15, 20e-15, 8).unwrap();
        let far = resonator_shunt_abcd(&r, 2.0 * PI * 1e6).unwrap();
        assert!(far.c.norm() < 1e-6);
        let decoupled = ResonatorSpec::new(2.0 * PI * 8e9, 450e-15, 0.0, 8).unwrap();
        for f in [1e9, 8e9 * 1.001, 11e9] {
            assert_eq!(resonator_shunt_abcd(&decoupled, 2.0 * PI * f).unwrap(), TwoPortMatrix::IDENTITY);
        }
        // The shunt admittance magnitude peaks at the design frequency.
        let w0 = r.resonant_frequency;
        let at = |x: f64| resonator_shunt_abcd(&r, w0 * x).map(|m| m.c.norm());
        let peak = at(1.0 + 1e-9).unwrap();
        for k in 1..200 {
            let x = 1.0 + (k as f64 - 100.0) * 1e-4;
            if k != 100 {
                assert!(at(x).unwrap() < peak);
            }
        }
    }

    #[test]
    fn empty_cascade_is_through() {
        let s = cascade_matrices(&[]).to_sparams(50.0);
        assert_eq!(s.s21, Complex64::new(1.0, 0.0));
        assert_eq!(s.s11, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn uniform_line_local_k_matches_single_cell() {
        let c = cell(6e-6);
        let n = DeviceNetlist::new(vec![c; 40], vec![], 50.0, 0.0).unwrap();
        let w = 2.0 * PI * 6e9;
        let k = local_wavenumbers(&n, w).unwrap().unwrap();
        let single = unit_cell_abcd(&c, w, 0.0).unwrap().half_trace().re.acos();
        assert!(k.iter().all(|v| (v - single).abs() < 1e-15));
    }

    #[test]
    fn plasma_resonance_is_singular() {
        let j = JunctionSpec::new(5e-6, 100e-15, 3).unwrap();
        let stub = StubSpec::new(1e-4, 1.2e8, 50.0).unwrap();
        let c = Cell { junction: j, stub };
        assert!(unit_cell_abcd(&c, j.plasma_frequency(), 0.0).is_err());
    }

    #[test]
    fn periods_group_cells() {
        let c = cell(6e-6);
        let r = ResonatorSpec::new(2.0 * PI * 8e9, 450e-15, 20e-15, 4).unwrap();
        let n = DeviceNetlist::new(vec![c; 10], vec![(3, r), (7, r)], 50.0, 0.0).unwrap();
        assert_eq!(periods(&n), vec![0..4, 4..8, 8..10]);
    }
}
