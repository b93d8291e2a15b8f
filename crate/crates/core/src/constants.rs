//! Physical constants (CODATA 2018, exact where the SI fixes them).

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Magnetic flux quantum h/2e, Wb.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// Name/value/unit triples, printed in reports.
pub fn table() -> Vec<(&'static str, f64, &'static str)> {
    vec![
        ("planck", PLANCK, "J s"),
        ("hbar", HBAR, "J s"),
        ("boltzmann", BOLTZMANN, "J/K"),
        ("elementary_charge", ELEMENTARY_CHARGE, "C"),
        ("flux_quantum", FLUX_QUANTUM, "Wb"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_quantum_matches_codata() {
        assert!((FLUX_QUANTUM - 2.067_833_848e-15).abs() < 1e-23);
    }
}
