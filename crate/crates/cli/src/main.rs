mod bundle;
mod calibrate;
mod error;
mod report;
mod simulate;
mod synth;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twpa::checks::DEFAULT_SEED;
use twpa::io::DeviceConfig;

use crate::bundle::Bundle;
use crate::error::{CliError, CliResult};

/// Simulation and calibration toolkit for tapered Josephson traveling-wave
/// parametric amplifiers.
///
/// Every command writes an output bundle (results.json, CSV tables,
/// summary.txt, provenance.json) to the output directory. Exit status is 0
/// on success, 1 on a numerical failure or failed check and 2 on bad input.
#[derive(Parser)]
#[command(name = "twpa", version)]
struct Cli {
    /// Output bundle directory.
    #[arg(long, global = true, env = "TWPA_OUT_DIR", default_value = "twpa-out")]
    out: PathBuf,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DeviceArgs {
    /// Device configuration (TOML); the built-in default when absent.
    #[arg(long)]
    device: Option<PathBuf>,

    /// Override the dielectric loss tangent of the device.
    #[arg(long)]
    loss_tangent: Option<f64>,
}

impl DeviceArgs {
    /// Loads and validates the configuration. Any problem with it is an
    /// input error, including one found while building the line.
    fn load(&self) -> CliResult<DeviceConfig> {
        let mut config = match &self.device {
            Some(path) => DeviceConfig::load(path).map_err(|e| CliError::Input(e.to_string()))?,
            None => DeviceConfig::default(),
        };
        if let Some(t) = self.loss_tangent {
            config.line.loss_tangent = t;
        }
        config.build().map_err(|e| CliError::Input(format!("device configuration: {e}")))?;
        Ok(config)
    }
}

#[derive(Args, Clone)]
struct PumpArgs {
    /// Pump frequency, Hz.
    #[arg(long, default_value_t = 7.71e9)]
    pump_freq: f64,

    /// Pump current as a fraction of the smallest critical current.
    #[arg(long, default_value_t = 0.392, conflicts_with = "pump_dbm")]
    pump_fraction: f64,

    /// Pump power at the input, dBm (instead of --pump-fraction).
    #[arg(long, allow_hyphen_values = true)]
    pump_dbm: Option<f64>,

    /// Gain change (dB) below which step refinement stops.
    #[arg(long)]
    tolerance_db: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// S-parameters of the device from the transfer-matrix cascade.
    SimulateLinear {
        #[command(flatten)]
        device: DeviceArgs,
        #[arg(long, default_value_t = 4e9)]
        fmin: f64,
        #[arg(long, default_value_t = 12e9)]
        fmax: f64,
        #[arg(long, default_value_t = 4001)]
        points: usize,
    },
    /// Small-signal parametric gain spectrum.
    SimulateGain {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        pump: PumpArgs,
        #[arg(long, default_value_t = 4e9)]
        fmin: f64,
        #[arg(long, default_value_t = 7.65e9)]
        fmax: f64,
        #[arg(long, default_value_t = 147)]
        points: usize,
        /// Gain level defining the reported band, dB.
        #[arg(long, default_value_t = 20.0)]
        band_threshold_db: f64,
    },
    /// Gain versus signal power and the 1 dB compression point.
    Compression {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        pump: PumpArgs,
        /// Signal frequency, Hz.
        #[arg(long, default_value_t = 6.59e9)]
        signal_freq: f64,
        /// Solve for the pump fraction giving this small-signal gain first.
        #[arg(long)]
        target_gain_db: Option<f64>,
        /// Pump-fraction bracket for --target-gain-db.
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.2, 0.45])]
        bracket: Vec<f64>,
        #[arg(long, default_value_t = -125.0, allow_hyphen_values = true)]
        pmin: f64,
        #[arg(long, default_value_t = -90.0, allow_hyphen_values = true)]
        pmax: f64,
        #[arg(long, default_value_t = 71)]
        points: usize,
    },
    /// Effective loss tangent from a measured S21 spectrum.
    FitLoss {
        #[command(flatten)]
        device: DeviceArgs,
        /// S21 spectrum CSV (frequency_hz with re,im or magnitude_db,phase_rad).
        #[arg(long)]
        data: PathBuf,
        /// Savitzky-Golay window (points).
        #[arg(long, default_value_t = 501)]
        window: usize,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long)]
        no_smoothing: bool,
        /// Points with more insertion loss are treated as stop band, dB.
        #[arg(long, default_value_t = 20.0)]
        max_loss_db: f64,
    },
    /// Line attenuation and qubit rates from resonance-fluorescence data.
    FitWqed {
        /// CSV with power_nominal_dbm, detuning_hz, re, im.
        #[arg(long)]
        data: PathBuf,
        /// Qubit frequency, Hz.
        #[arg(long)]
        qubit_freq: f64,
    },
    /// Drive calibration from measurement-induced dephasing and Stark shift.
    FitMid {
        /// CSV with detuning_hz, dac_power, stark_hz, gamma_m_hz.
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        cqed: calibrate::CqedArgs,
    },
    /// Reflection fit of a readout resonator; with --excited also χ.
    FitResonator {
        /// CSV with freq_hz, re, im.
        #[arg(long)]
        data: PathBuf,
        /// Trace taken with the qubit excited.
        #[arg(long)]
        excited: Option<PathBuf>,
    },
    /// Noise budget and quantum efficiencies from on/off power records.
    Efficiency {
        /// CSV with plane, state, signal_dbm, noise_dbm, freq_hz.
        #[arg(long)]
        budget: PathBuf,
        /// Resolution bandwidth of the noise records, Hz.
        #[arg(long, default_value_t = 10e3)]
        bandwidth: f64,
    },
    /// Synthetic datasets with known truth.
    Synth {
        #[arg(long, value_enum)]
        kind: synth::Kind,
    },
    /// Runs every reproduction check and reports pass/fail.
    PaperReport {
        #[command(flatten)]
        device: DeviceArgs,
    },
}

/// Rejects empty or reversed grids before any work is done.
fn linear_grid(lo: f64, hi: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) || points < 2 {
        return Err(CliError::Input(format!(
            "grid needs finite bounds with max > min and at least 2 points (got {lo}..{hi}, {points})"
        )));
    }
    Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect())
}

/// Reads a data file, mapping a missing file to an input error naming it.
fn read_input(path: &Path, bundle: &mut Bundle) -> CliResult<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    bundle.input(path, &bytes);
    Ok(bytes)
}

fn run(cli: &Cli) -> CliResult<(Bundle, Option<String>)> {
    let seed = cli.seed;
    let done = |b: Bundle| Ok((b, None));
    match &cli.command {
        Command::SimulateLinear { device, fmin, fmax, points } => {
            done(simulate::linear(&device.load()?, &linear_grid(*fmin, *fmax, *points)?, seed)?)
        }
        Command::SimulateGain { device, pump, fmin, fmax, points, band_threshold_db } => done(simulate::gain(
            &device.load()?,
            pump,
            &linear_grid(*fmin, *fmax, *points)?,
            *band_threshold_db,
            seed,
        )?),
        Command::Compression { device, pump, signal_freq, target_gain_db, bracket, pmin, pmax, points } => {
            done(simulate::compression(
                &device.load()?,
                pump,
                *signal_freq,
                target_gain_db.map(|g| (g, (bracket[0], bracket[1]))),
                &linear_grid(*pmin, *pmax, *points)?,
                seed,
            )?)
        }
        Command::FitLoss { device, data, window, order, no_smoothing, max_loss_db } => {
            let smoothing = (!no_smoothing).then_some((*window, *order));
            done(simulate::fit_loss(&device.load()?, data, smoothing, *max_loss_db, seed)?)
        }
        Command::FitWqed { data, qubit_freq } => done(calibrate::wqed(data, *qubit_freq, seed)?),
        Command::FitMid { data, cqed } => done(calibrate::mid(data, cqed, seed)?),
        Command::FitResonator { data, excited } => done(calibrate::resonator(data, excited.as_deref(), seed)?),
        Command::Efficiency { budget, bandwidth } => done(calibrate::efficiency(budget, *bandwidth, seed)?),
        Command::Synth { kind } => done(synth::run(*kind, seed)?),
        Command::PaperReport { device } => report::run(&device.load()?, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((bundle, failure)) => {
            if let Err(e) = bundle.write(&cli.out) {
                eprintln!("twpa: {e}");
                return ExitCode::from(e.exit_code());
            }
            for line in bundle.summary() {
                println!("{line}");
            }
            println!("bundle written to {}", cli.out.display());
            match failure {
                Some(msg) => {
                    eprintln!("twpa: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("twpa: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
