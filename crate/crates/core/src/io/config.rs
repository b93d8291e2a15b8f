//! Device configuration file (TOML with one section per building block).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::device::{build_device, make_taper, CellRule, DeviceNetlist, ResonatorSpec, TaperProfile, TaperShape};
use crate::error::{Result, TwpaError};
use crate::units::hz_to_angular;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeName {
    Linear,
    RaisedCosine,
    UserTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaperSection {
    pub cell_count: usize,
    pub edge_critical_current_ua: f64,
    pub mid_critical_current_ua: f64,
    pub shape: ShapeName,
    /// Fraction of each half taken by the ramp; the rest is a flat plateau.
    #[serde(default = "one")]
    pub ramp_fraction: f64,
    /// Global factor applied to every critical current.
    #[serde(default = "one")]
    pub jc_scale: f64,
    /// Per-cell critical currents for `shape = "user-table"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_ua: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionSection {
    pub junctions_per_cell: u32,
    pub specific_capacitance_ff_per_um2: f64,
    pub critical_current_density_ua_per_um2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StubSection {
    pub wave_velocity_m_per_s: f64,
    pub impedance_ohm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorSection {
    pub frequency_ghz: f64,
    /// Total capacitance seen by the inductor, coupler included.
    pub capacitance_ff: f64,
    pub coupling_capacitance_ff: f64,
    pub insertion_period: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSection {
    pub target_impedance_ohm: f64,
    pub loss_tangent: f64,
    pub analysis_max_ghz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub taper: TaperSection,
    pub junction: JunctionSection,
    pub stub: StubSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonator: Option<ResonatorSection>,
    pub line: LineSection,
}

/// The shipped default device.
pub const DEFAULT_CONFIG: &str = include_str!("default.toml");

impl Default for DeviceConfig {
    fn default() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("shipped default config parses")
    }
}

impl DeviceConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| TwpaError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| TwpaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn taper(&self) -> Result<TaperProfile> {
        let t = &self.taper;
        let profile = match t.shape {
            ShapeName::UserTable => {
                let table = t.table_ua.as_ref().ok_or_else(|| {
                    TwpaError::Configuration("shape user-table needs table_ua".into())
                })?;
                if table.len() != t.cell_count {
                    return Err(TwpaError::Configuration(format!(
                        "table_ua has {} entries for {} cells",
                        table.len(),
                        t.cell_count
                    )));
                }
                TaperProfile::from_table(table.iter().map(|v| v * 1e-6).collect())?
            }
            ShapeName::Linear => make_taper(
                t.cell_count,
                t.edge_critical_current_ua * 1e-6,
                t.mid_critical_current_ua * 1e-6,
                TaperShape::Linear { ramp_fraction: t.ramp_fraction },
            )?,
            ShapeName::RaisedCosine => make_taper(
                t.cell_count,
                t.edge_critical_current_ua * 1e-6,
                t.mid_critical_current_ua * 1e-6,
                TaperShape::RaisedCosine { ramp_fraction: t.ramp_fraction },
            )?,
        };
        profile.scaled(t.jc_scale)
    }

    pub fn cell_rule(&self) -> CellRule {
        CellRule {
            junctions_per_cell: self.junction.junctions_per_cell,
            // fF/µm² and µA/µm² to SI
            specific_capacitance: self.junction.specific_capacitance_ff_per_um2 * 1e-3,
            critical_current_density: self.junction.critical_current_density_ua_per_um2 * 1e6,
            stub_wave_velocity: self.stub.wave_velocity_m_per_s,
            stub_impedance: self.stub.impedance_ohm,
            target_impedance: self.line.target_impedance_ohm,
            analysis_max_freq: hz_to_angular(self.line.analysis_max_ghz * 1e9),
        }
    }

    pub fn resonator(&self) -> Result<Option<ResonatorSpec>> {
        self.resonator
            .as_ref()
            .map(|r| {
                ResonatorSpec::new(
                    hz_to_angular(r.frequency_ghz * 1e9),
                    r.capacitance_ff * 1e-15,
                    r.coupling_capacitance_ff * 1e-15,
                    r.insertion_period,
                )
                .map_err(|e| TwpaError::Configuration(e.to_string()))
            })
            .transpose()
    }

    pub fn build(&self) -> Result<DeviceNetlist> {
        let taper = self.taper()?;
        let resonator = self.resonator()?;
        build_device(&taper, &self.cell_rule(), resonator.as_ref(), self.line.loss_tangent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let c = DeviceConfig::default();
        let again = DeviceConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn default_device_shape() {
        let n = DeviceConfig::default().build().unwrap();
        assert_eq!(n.len(), 3008);
        assert_eq!(n.resonators.len(), 376);
        assert_eq!(n.resonators[0].0, 7);
        let f0 = n.resonators[0].1.resonant_frequency / (2.0 * std::f64::consts::PI);
        assert!((f0 - 8e9).abs() < 0.2e9);
    }

    #[test]
    fn unknown_key_is_a_parse_error() {
        let text = DEFAULT_CONFIG.replace("[line]", "[line]\nbogus = 1");
        assert!(matches!(DeviceConfig::from_toml(&text), Err(TwpaError::Parse(_))));
    }

    #[test]
    fn build_is_deterministic() {
        let a = DeviceConfig::default().build().unwrap().to_json();
        let b = DeviceConfig::default().build().unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn user_table_length_checked() {
        let mut c = DeviceConfig::default();
        c.taper.shape = ShapeName::UserTable;
        c.taper.cell_count = 5;
        c.taper.table_ua = Some(vec![5.0, 4.0, 3.0, 4.0]);
        assert!(matches!(c.build(), Err(TwpaError::Configuration(_))));
        c.taper.table_ua = Some(vec![5.0, 4.0, 3.0, 4.0, 5.0]);
        c.resonator = None;
        assert_eq!(c.build().unwrap().len(), 5);
    }
}
