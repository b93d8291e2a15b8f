//! Three-mode coupled-mode equations for degenerate-pump four-wave mixing.
//!
//! Amplitudes are normalized so that `|a|²` is a photon flux (photons/s).
//! Per cell, with `n = |a|²` and `Θ(x) = ∫ (k_s + k_i - 2 k_p) dx`:
//!
//! ```text
//! a_p' = i(χpp n_p + 2χps n_s + 2χpi n_i) a_p + 2i g a_p* a_s a_i e^{iΘ} - α_p a_p
//! a_s' = i(2χsp n_p + χss n_s + 2χsi n_i) a_s + i g a_p² a_i* e^{-iΘ}  - α_s a_s
//! a_i' = i(2χip n_p + 2χis n_s + χii n_i) a_i + i g a_p² a_s* e^{-iΘ}  - α_i a_i
//! ```
//!
//! with `χmn = ħ sqrt(k_m ω_m k_n ω_n) / (8 Z I_c²)`, `g = sqrt(χpp χsi)` and
//! `α = k tanδ / 2`. The equations derive from one Hamiltonian, so without
//! loss `n_s - n_i` and `ω_p n_p + ω_s n_s + ω_i n_i` are exact invariants.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::device::DeviceNetlist;
use crate::error::{Result, TwpaError};
use crate::network::local_wavenumbers;
use crate::units::{dbm_to_watts, hz_to_angular, linear_to_db};

/// Reference impedance for converting pump current to power.
pub const PUMP_REFERENCE_IMPEDANCE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PumpAmplitude {
    /// Peak pump current as a fraction of the smallest critical current.
    CurrentFraction { fraction: f64 },
    /// Input power with the impedance used to quote it as a current.
    PowerDbm { dbm: f64, impedance_ohm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    /// Hz.
    pub frequency: f64,
    pub amplitude: PumpAmplitude,
}

impl PumpConfig {
    pub fn current_fraction(frequency: f64, fraction: f64) -> Result<Self> {
        let p = Self { frequency, amplitude: PumpAmplitude::CurrentFraction { fraction } };
        p.validate()?;
        Ok(p)
    }

    pub fn power_dbm(frequency: f64, dbm: f64) -> Result<Self> {
        let p = Self {
            frequency,
            amplitude: PumpAmplitude::PowerDbm { dbm, impedance_ohm: PUMP_REFERENCE_IMPEDANCE },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > 0.0) {
            return Err(TwpaError::Configuration(format!("pump frequency must be positive, got {}", self.frequency)));
        }
        match self.amplitude {
            PumpAmplitude::CurrentFraction { fraction } if !(0.0..1.0).contains(&fraction) => Err(
                TwpaError::Configuration(format!("pump current fraction must lie in [0, 1), got {fraction}")),
            ),
            PumpAmplitude::PowerDbm { dbm, impedance_ohm } if !dbm.is_finite() || !(impedance_ohm > 0.0) => {
                Err(TwpaError::Configuration("pump power and impedance must be finite and positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Pump power (W) entering the line whose smallest critical current is `i0`.
    pub fn power_watts(&self, i0: f64) -> f64 {
        match self.amplitude {
            PumpAmplitude::CurrentFraction { fraction } => {
                let ip = fraction * i0;
                0.5 * PUMP_REFERENCE_IMPEDANCE * ip * ip
            }
            PumpAmplitude::PowerDbm { dbm, .. } => dbm_to_watts(dbm),
        }
    }

    /// Peak pump current over `i0`.
    pub fn fraction_of(&self, i0: f64) -> f64 {
        match self.amplitude {
            PumpAmplitude::CurrentFraction { fraction } => fraction,
            PumpAmplitude::PowerDbm { dbm, impedance_ohm } => (2.0 * dbm_to_watts(dbm) / impedance_ohm).sqrt() / i0,
        }
    }

    pub fn photon_flux(&self, i0: f64) -> f64 {
        self.power_watts(i0) / (HBAR * hz_to_angular(self.frequency))
    }

    pub fn with_amplitude(&self, amplitude: PumpAmplitude) -> Self {
        Self { frequency: self.frequency, amplitude }
    }
}

/// Pump, signal and idler frequencies (Hz) with `f_i = 2 f_p - f_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTriplet {
    pub pump: f64,
    pub signal: f64,
    pub idler: f64,
}

impl ModeTriplet {
    pub fn new(pump: f64, signal: f64) -> Result<Self> {
        let idler = 2.0 * pump - signal;
        if !(pump > 0.0) || !(signal > 0.0) || !(idler > 0.0) {
            return Err(TwpaError::Domain(format!(
                "invalid mixing triplet: pump {pump} Hz, signal {signal} Hz"
            )));
        }
        Ok(Self { pump, signal, idler })
    }

    pub fn angular(&self) -> [f64; 3] {
        [hz_to_angular(self.pump), hz_to_angular(self.signal), hz_to_angular(self.idler)]
    }
}

/// Mode amplitudes (sqrt of photons/s) at a position along the line (cells).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub position: f64,
    pub pump: Complex64,
    pub signal: Complex64,
    pub idler: Complex64,
}

impl ModeState {
    pub fn fluxes(&self) -> [f64; 3] {
        [self.pump.norm_sqr(), self.signal.norm_sqr(), self.idler.norm_sqr()]
    }
}

/// Coefficients of one cell of the coupled-mode line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCoefficients {
    /// Linear wavenumbers (rad/cell) of pump, signal, idler.
    pub k: [f64; 3],
    /// Self/cross phase coefficients (rad per cell per photon/s).
    pub chi: [[f64; 3]; 3],
    /// Parametric coupling (rad per cell per photon/s).
    pub g: f64,
    /// Linear phase mismatch `k_s + k_i - 2 k_p` (rad/cell).
    pub mismatch: f64,
    /// Amplitude loss per cell.
    pub loss: [f64; 3],
}

impl CellCoefficients {
    pub fn new(k: [f64; 3], omega: [f64; 3], impedance: f64, critical_current: f64, loss_tangent: f64) -> Self {
        let scale = HBAR / (8.0 * impedance * critical_current * critical_current);
        let mut chi = [[0.0; 3]; 3];
        for m in 0..3 {
            for n in 0..3 {
                chi[m][n] = scale * (k[m] * omega[m] * k[n] * omega[n]).sqrt();
            }
        }
        Self {
            k,
            chi,
            g: (chi[0][0] * chi[1][2]).sqrt(),
            mismatch: k[1] + k[2] - 2.0 * k[0],
            loss: k.map(|kk| 0.5 * kk * loss_tangent),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmeLine {
    pub triplet: ModeTriplet,
    pub cells: Vec<CellCoefficients>,
}

impl CmeLine {
    /// Coefficients from the local Bloch wavenumbers of the netlist.
    /// `Ok(None)` when a mode sits in a local stop band.
    pub fn from_netlist(netlist: &DeviceNetlist, triplet: ModeTriplet) -> Result<Option<Self>> {
        let omega = triplet.angular();
        let mut ks = Vec::with_capacity(3);
        for w in omega {
            match local_wavenumbers(netlist, w)? {
                Some(k) => ks.push(k),
                None => return Ok(None),
            }
        }
        let cells = netlist
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                CellCoefficients::new(
                    [ks[0][i], ks[1][i], ks[2][i]],
                    omega,
                    c.image_impedance(),
                    c.junction.critical_current,
                    netlist.loss_tangent,
                )
            })
            .collect();
        Ok(Some(Self { triplet, cells }))
    }

    /// A line of identical cells.
    pub fn uniform(
        triplet: ModeTriplet,
        cell_count: usize,
        k: [f64; 3],
        impedance: f64,
        critical_current: f64,
        loss_tangent: f64,
    ) -> Self {
        let c = CellCoefficients::new(k, triplet.angular(), impedance, critical_current, loss_tangent);
        Self { triplet, cells: vec![c; cell_count] }
    }

    /// Overrides the linear mismatch so the total phase mismatch (linear
    /// plus self/cross phase at pump flux `pump_flux`) vanishes.
    pub fn phase_matched(mut self, pump_flux: f64) -> Self {
        for c in &mut self.cells {
            c.mismatch = -2.0 * (c.chi[1][0] + c.chi[2][0] - c.chi[0][0]) * pump_flux;
        }
        self
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Lossless copy of the line.
    pub fn without_loss(mut self) -> Self {
        self.cells.iter_mut().for_each(|c| c.loss = [0.0; 3]);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmeOptions {
    pub initial_substeps: usize,
    pub max_substeps: usize,
    /// Largest gain change (dB) accepted between successive step halvings.
    pub tolerance_db: f64,
    /// Signal input power for small-signal spectra.
    pub signal_power_dbm: f64,
    /// Signal frequencies closer than this to the pump are skipped (Hz).
    pub pump_guard_hz: f64,
}

impl Default for CmeOptions {
    fn default() -> Self {
        Self {
            initial_substeps: 1,
            max_substeps: 64,
            tolerance_db: 0.01,
            signal_power_dbm: -150.0,
            pump_guard_hz: 20e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmeRun {
    /// Signal photon-flux gain in dB.
    pub gain_db: f64,
    pub substeps: usize,
    /// Gain change between the last two refinements (dB).
    pub refinement_change_db: f64,
    pub output: ModeState,
    /// State at every cell boundary when requested.
    pub trajectory: Option<Vec<ModeState>>,
}

type State = [Complex64; 3];

const I: Complex64 = Complex64::new(0.0, 1.0);

fn rhs(c: &CellCoefficients, theta: f64, y: &State) -> State {
    let n = [y[0].norm_sqr(), y[1].norm_sqr(), y[2].norm_sqr()];
    let ch = &c.chi;
    let e = Complex64::from_polar(1.0, theta);
    let (ap, as_, ai) = (y[0], y[1], y[2]);
    let phase = |m: usize| {
        (0..3)
            .map(|j| if j == m { ch[m][j] * n[j] } else { 2.0 * ch[m][j] * n[j] })
            .sum::<f64>()
    };
    [
        I * phase(0) * ap + 2.0 * I * c.g * ap.conj() * as_ * ai * e - c.loss[0] * ap,
        I * phase(1) * as_ + I * c.g * ap * ap * ai.conj() * e.conj() - c.loss[1] * as_,
        I * phase(2) * ai + I * c.g * ap * ap * as_.conj() * e.conj() - c.loss[2] * ai,
    ]
}

fn axpy(y: &State, h: f64, k1: &State, a1: f64, k2: &State, a2: f64) -> State {
    [0, 1, 2].map(|m| y[m] + h * (a1 * k1[m] + a2 * k2[m]))
}

/// One two-stage Gauss–Legendre step (order 4). The stage equations are
/// solved by fixed-point iteration; `None` if that fails to converge.
fn gauss_step(c: &CellCoefficients, theta0: f64, h: f64, y: &State) -> Option<State> {
    let s3 = 3f64.sqrt() / 6.0;
    let (c1, c2) = (0.5 - s3, 0.5 + s3);
    let (a11, a12, a21, a22) = (0.25, 0.25 - s3, 0.25 + s3, 0.25);
    let t1 = theta0 + c.mismatch * c1 * h;
    let t2 = theta0 + c.mismatch * c2 * h;
    let f0 = rhs(c, theta0 + 0.5 * c.mismatch * h, y);
    let (mut k1, mut k2) = (f0, f0);
    for _ in 0..60 {
        let n1 = rhs(c, t1, &axpy(y, h, &k1, a11, &k2, a12));
        let n2 = rhs(c, t2, &axpy(y, h, &k1, a21, &k2, a22));
        let mut done = true;
        for m in 0..3 {
            for (new, old) in [(n1[m], k1[m]), (n2[m], k2[m])] {
                if (new - old).norm() > 1e-14 * new.norm() + 1e-300 {
                    done = false;
                }
            }
        }
        k1 = n1;
        k2 = n2;
        if done {
            return Some(axpy(y, h, &k1, 0.5, &k2, 0.5));
        }
    }
    None
}

/// Integrates the line with `substeps` steps per cell. Amplitudes are in
/// sqrt(photons/s).
pub fn integrate(
    line: &CmeLine,
    input: ModeState,
    substeps: usize,
    record: bool,
) -> Result<(ModeState, Option<Vec<ModeState>>)> {
    // Work in units of the largest input flux to keep numbers near one.
    let scale = input.fluxes().iter().copied().fold(0.0, f64::max);
    if !(scale > 0.0) {
        let out = ModeState { position: line.len() as f64, ..input };
        let traj = record.then(|| (0..=line.len()).map(|i| ModeState { position: i as f64, ..input }).collect());
        return Ok((out, traj));
    }
    let root = scale.sqrt();
    let mut y: State = [input.pump / root, input.signal / root, input.idler / root];
    let state_at = |pos: f64, y: &State| ModeState {
        position: pos,
        pump: y[0] * root,
        signal: y[1] * root,
        idler: y[2] * root,
    };
    let mut traj = record.then(|| {
        let mut v = Vec::with_capacity(line.len() + 1);
        v.push(state_at(0.0, &y));
        v
    });
    let h = 1.0 / substeps as f64;
    let mut theta = 0.0;
    for (i, cell) in line.cells.iter().enumerate() {
        let mut c = *cell;
        for row in &mut c.chi {
            row.iter_mut().for_each(|v| *v *= scale);
        }
        c.g *= scale;
        for s in 0..substeps {
            let t0 = theta + cell.mismatch * h * s as f64;
            y = gauss_step(&c, t0, h, &y).ok_or_else(|| TwpaError::Convergence(format!(
                "implicit stage solve failed at cell {i} with {substeps} substeps"
            )))?;
        }
        theta += cell.mismatch;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(TwpaError::Numerical { cell: i, reason: "mode amplitude overflow".into() });
        }
        if let Some(t) = traj.as_mut() {
            t.push(state_at((i + 1) as f64, &y));
        }
    }
    Ok((state_at(line.len() as f64, &y), traj))
}

fn signal_gain_db(input: &ModeState, output: &ModeState) -> f64 {
    linear_to_db(output.signal.norm_sqr() / input.signal.norm_sqr())
}

/// Integrates with successive step halving until the signal gain changes
/// by less than `tolerance_db`.
pub fn solve(line: &CmeLine, input: ModeState, options: &CmeOptions, record: bool) -> Result<CmeRun> {
    if !(input.signal.norm_sqr() > 0.0) {
        return Err(TwpaError::Domain("signal input must be nonzero".into()));
    }
    let mut m = options.initial_substeps.max(1);
    let mut previous: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    loop {
        match integrate(line, input, m, record) {
            Ok((out, traj)) => {
                let g = signal_gain_db(&input, &out);
                if let Some(p) = previous {
                    last_change = (g - p).abs();
                    if last_change < options.tolerance_db {
                        return Ok(CmeRun {
                            gain_db: g,
                            substeps: m,
                            refinement_change_db: last_change,
                            output: out,
                            trajectory: traj,
                        });
                    }
                }
                previous = Some(g);
            }
            Err(TwpaError::Convergence(_)) => previous = None,
            Err(e) => return Err(e),
        }
        if 2 * m > options.max_substeps {
            return Err(TwpaError::Convergence(format!(
                "gain still changing by {last_change:.3e} dB at {m} substeps per cell"
            )));
        }
        m *= 2;
    }
}

/// Initial state for a pump of flux `pump_flux` and a signal of `signal_dbm`.
pub fn input_state(triplet: &ModeTriplet, pump_flux: f64, signal_dbm: f64) -> ModeState {
    let ns = dbm_to_watts(signal_dbm) / (HBAR * 2.0 * PI * triplet.signal);
    ModeState {
        position: 0.0,
        pump: Complex64::new(pump_flux.sqrt(), 0.0),
        signal: Complex64::new(ns.sqrt(), 0.0),
        idler: Complex64::new(0.0, 0.0),
    }
}

/// Largest drift of `n_s - n_i` along a trajectory, relative to the input
/// signal flux.
pub fn photon_flux_conservation(trajectory: &[ModeState]) -> f64 {
    let Some(first) = trajectory.first() else {
        return 0.0;
    };
    let [_, s0, i0] = first.fluxes();
    let reference = if s0 > 0.0 { s0 } else { i0.max(f64::MIN_POSITIVE) };
    trajectory
        .iter()
        .map(|st| {
            let [_, s, i] = st.fluxes();
            ((s - i) - (s0 - i0)).abs() / reference
        })
        .fold(0.0, f64::max)
}
