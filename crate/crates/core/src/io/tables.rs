//! CSV tables. Every file has a header row and units in the column names.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwpaError};
use crate::fit::{MidPoint, RamseyTrace, ResonatorTrace, WqedPoint};
use crate::network::ComplexSpectrum;
use crate::noise::BudgetRecord;

fn parse_err(e: csv::Error) -> TwpaError {
    TwpaError::Parse(e.to_string())
}

fn io_err(path: &Path, source: std::io::Error) -> TwpaError {
    TwpaError::Io { path: path.display().to_string(), source }
}

pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(parse_err)?;
    }
    wr.flush().map_err(|e| TwpaError::Parse(e.to_string()))
}

pub fn read_rows<R: Read, T: DeserializeOwned>(r: R) -> Result<Vec<T>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    rd.deserialize().map(|row| row.map_err(parse_err)).collect()
}

/// Table with a header row even when empty.
pub fn write_columns<W: Write>(w: W, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let len = columns.first().map_or(0, |c| c.len());
    if header.len() != columns.len() || columns.iter().any(|c| c.len() != len) {
        return Err(TwpaError::Mismatch("column count or lengths differ".into()));
    }
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header).map_err(parse_err)?;
    for i in 0..len {
        // Display gives the shortest text that parses back to the same f64.
        let row: Vec<String> = columns.iter().map(|c| c[i].to_string()).collect();
        wr.write_record(&row).map_err(parse_err)?;
    }
    wr.flush().map_err(|e| TwpaError::Parse(e.to_string()))
}

/// Reads the named columns (in order) from a headed CSV.
pub fn read_columns<R: Read>(r: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let found = rd.headers().map_err(parse_err)?.clone();
    let idx: Vec<usize> = header
        .iter()
        .map(|h| {
            found
                .iter()
                .position(|f| f == *h)
                .ok_or_else(|| TwpaError::Parse(format!("missing column `{h}`")))
        })
        .collect::<Result<_>>()?;
    let mut cols = vec![Vec::new(); header.len()];
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(parse_err)?;
        for (c, &i) in idx.iter().enumerate() {
            let field = rec.get(i).unwrap_or("");
            let v: f64 = field
                .parse()
                .map_err(|_| TwpaError::Parse(format!("row {}: `{field}` is not a number", line + 2)))?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| io_err(path, e))
}

pub fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| io_err(path, e))
}

/// Encoding of complex values in a spectrum file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumFormat {
    /// `frequency_hz, re, im`
    Cartesian,
    /// `frequency_hz, magnitude_db, phase_rad`
    Polar,
}

pub fn write_spectrum<W: Write>(w: W, s: &ComplexSpectrum, format: SpectrumFormat) -> Result<()> {
    let (a, b): (Vec<f64>, Vec<f64>) = match format {
        SpectrumFormat::Cartesian => s.values.iter().map(|v| (v.re, v.im)).unzip(),
        SpectrumFormat::Polar => s.values.iter().map(|v| (20.0 * v.norm().log10(), v.arg())).unzip(),
    };
    let header = match format {
        SpectrumFormat::Cartesian => ["frequency_hz", "re", "im"],
        SpectrumFormat::Polar => ["frequency_hz", "magnitude_db", "phase_rad"],
    };
    write_columns(w, &header, &[&s.frequencies, &a, &b])
}

/// Reads either spectrum encoding, chosen by the header. `freq_hz` is
/// accepted for the frequency column.
pub fn read_spectrum<R: Read>(r: R, reference_impedance: f64) -> Result<(ComplexSpectrum, SpectrumFormat)> {
    let mut buf = String::new();
    let mut r = r;
    r.read_to_string(&mut buf).map_err(|e| TwpaError::Parse(e.to_string()))?;
    let first = buf.lines().next().unwrap_or("");
    let names: Vec<&str> = first.split(',').map(str::trim).collect();
    let freq = if names.contains(&"frequency_hz") { "frequency_hz" } else { "freq_hz" };
    let format = if names.contains(&"re") && names.contains(&"im") {
        SpectrumFormat::Cartesian
    } else if names.contains(&"magnitude_db") && names.contains(&"phase_rad") {
        SpectrumFormat::Polar
    } else {
        return Err(TwpaError::Parse("spectrum header needs re,im or magnitude_db,phase_rad".into()));
    };
    let cols = match format {
        SpectrumFormat::Cartesian => read_columns(buf.as_bytes(), &[freq, "re", "im"])?,
        SpectrumFormat::Polar => read_columns(buf.as_bytes(), &[freq, "magnitude_db", "phase_rad"])?,
    };
    let values = cols[1]
        .iter()
        .zip(&cols[2])
        .map(|(&a, &b)| match format {
            SpectrumFormat::Cartesian => Complex64::new(a, b),
            SpectrumFormat::Polar => Complex64::from_polar(10f64.powf(a / 20.0), b),
        })
        .collect();
    let mut cols = cols;
    Ok((ComplexSpectrum::new(std::mem::take(&mut cols[0]), values, reference_impedance)?, format))
}

pub const LINEAR_HEADER: [&str; 4] = ["freq_hz", "s21_db", "s21_phase_rad", "s11_db"];
pub const GAIN_HEADER: [&str; 2] = ["frequency_hz", "gain_db"];
pub const COMPRESSION_HEADER: [&str; 2] = ["power_dbm", "gain_db"];

pub fn read_budget<R: Read>(r: R) -> Result<Vec<BudgetRecord>> {
    read_rows(r)
}

pub fn write_budget<W: Write>(w: W, rows: &[BudgetRecord]) -> Result<()> {
    write_rows(w, rows)
}

#[derive(Serialize, Deserialize)]
struct WqedRow {
    power_nominal_dbm: f64,
    detuning_hz: f64,
    re: f64,
    im: f64,
}

pub fn write_wqed<W: Write>(w: W, points: &[WqedPoint]) -> Result<()> {
    let rows: Vec<WqedRow> = points
        .iter()
        .map(|p| WqedRow {
            power_nominal_dbm: p.nominal_dbm,
            detuning_hz: p.detuning / TAU,
            re: p.transmission.re,
            im: p.transmission.im,
        })
        .collect();
    write_rows(w, &rows)
}

pub fn read_wqed<R: Read>(r: R) -> Result<Vec<WqedPoint>> {
    Ok(read_rows::<_, WqedRow>(r)?
        .into_iter()
        .map(|r| WqedPoint {
            nominal_dbm: r.power_nominal_dbm,
            detuning: r.detuning_hz * TAU,
            transmission: Complex64::new(r.re, r.im),
        })
        .collect())
}

/// `stark_hz` is the qubit frequency shift `ω_AC/2π`; `gamma_m_hz` is the
/// dephasing rate in 1/s.
#[derive(Serialize, Deserialize)]
struct MidRow {
    detuning_hz: f64,
    dac_power: f64,
    stark_hz: f64,
    gamma_m_hz: f64,
}

pub fn write_mid<W: Write>(w: W, points: &[MidPoint]) -> Result<()> {
    let rows: Vec<MidRow> = points
        .iter()
        .map(|p| MidRow {
            detuning_hz: p.detuning / TAU,
            dac_power: p.dac_power,
            stark_hz: p.stark_shift / TAU,
            gamma_m_hz: p.dephasing,
        })
        .collect();
    write_rows(w, &rows)
}

pub fn read_mid<R: Read>(r: R) -> Result<Vec<MidPoint>> {
    Ok(read_rows::<_, MidRow>(r)?
        .into_iter()
        .map(|r| MidPoint {
            detuning: r.detuning_hz * TAU,
            dac_power: r.dac_power,
            stark_shift: r.stark_hz * TAU,
            dephasing: r.gamma_m_hz,
        })
        .collect())
}

pub fn write_resonator<W: Write>(w: W, trace: &ResonatorTrace) -> Result<()> {
    let re: Vec<f64> = trace.s11.iter().map(|v| v.re).collect();
    let im: Vec<f64> = trace.s11.iter().map(|v| v.im).collect();
    write_columns(w, &["freq_hz", "re", "im"], &[&trace.frequencies, &re, &im])
}

pub fn read_resonator<R: Read>(r: R) -> Result<ResonatorTrace> {
    let c = read_columns(r, &["freq_hz", "re", "im"])?;
    Ok(ResonatorTrace {
        s11: c[1].iter().zip(&c[2]).map(|(a, b)| Complex64::new(*a, *b)).collect(),
        frequencies: c[0].clone(),
    })
}

pub fn write_ramsey<W: Write>(w: W, trace: &RamseyTrace) -> Result<()> {
    write_columns(w, &["time_s", "signal"], &[&trace.times, &trace.signal])
}

pub fn read_ramsey<R: Read>(r: R) -> Result<RamseyTrace> {
    let mut c = read_columns(r, &["time_s", "signal"])?;
    Ok(RamseyTrace { signal: c.pop().unwrap_or_default(), times: c.pop().unwrap_or_default() })
}
