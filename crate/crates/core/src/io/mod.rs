//! Configuration and data files.

mod config;
mod tables;

pub use config::{
    DeviceConfig, JunctionSection, LineSection, ResonatorSection, ShapeName, StubSection, TaperSection,
    DEFAULT_CONFIG,
};
pub use tables::{
    create, open, read_budget, read_columns, read_mid, read_ramsey, read_resonator, read_rows, read_spectrum,
    read_wqed, write_budget, write_columns, write_mid, write_ramsey, write_resonator, write_rows, write_spectrum,
    write_wqed, SpectrumFormat, COMPRESSION_HEADER, GAIN_HEADER, LINEAR_HEADER,
};
