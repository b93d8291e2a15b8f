use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwpaError};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// ABCD transfer matrix; `b` in ohms, `c` in siemens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// The four scattering parameters of a two-port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SParams {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
}

impl TwoPortMatrix {
    pub const IDENTITY: TwoPortMatrix = TwoPortMatrix { a: ONE, b: ZERO, c: ZERO, d: ONE };

    pub fn series(z: Complex64) -> Self {
        Self { a: ONE, b: z, c: ZERO, d: ONE }
    }

    pub fn shunt(y: Complex64) -> Self {
        Self { a: ONE, b: ZERO, c: y, d: ONE }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.is_finite())
    }

    /// `cos(θ)` of the Bloch phase when this matrix is one period of a lattice.
    pub fn half_trace(&self) -> Complex64 {
        0.5 * (self.a + self.d)
    }

    /// Bloch impedance `sqrt(B/C)` of the symmetric-period approximation.
    pub fn bloch_impedance(&self) -> Complex64 {
        (self.b / self.c).sqrt()
    }

    /// Scattering parameters for equal real reference impedances `z0` at both ports.
    pub fn to_sparams(&self, z0: f64) -> SParams {
        let b = self.b / z0;
        let c = self.c * z0;
        let denom = self.a + b + c + self.d;
        SParams {
            s11: (self.a + b - c - self.d) / denom,
            s12: 2.0 * self.det() / denom,
            s21: 2.0 / denom,
            s22: (-self.a + b - c + self.d) / denom,
        }
    }
}

impl Mul for TwoPortMatrix {
    type Output = TwoPortMatrix;

    fn mul(self, r: TwoPortMatrix) -> TwoPortMatrix {
        TwoPortMatrix {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

/// Frequency-indexed complex response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpectrum {
    /// Hz, strictly increasing.
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
    pub reference_impedance: f64,
}

impl ComplexSpectrum {
    pub fn new(frequencies: Vec<f64>, values: Vec<Complex64>, reference_impedance: f64) -> Result<Self> {
        if frequencies.len() != values.len() {
            return Err(TwpaError::Mismatch(format!(
                "{} frequencies but {} values",
                frequencies.len(),
                values.len()
            )));
        }
        check_increasing(&frequencies)?;
        Ok(Self { frequencies, values, reference_impedance })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn magnitude_db(&self) -> Vec<f64> {
        self.values.iter().map(|v| 20.0 * v.norm().log10()).collect()
    }
}

pub(crate) fn check_increasing(frequencies: &[f64]) -> Result<()> {
    if frequencies.iter().any(|f| !f.is_finite()) {
        return Err(TwpaError::Domain("frequencies must be finite".into()));
    }
    if let Some(w) = frequencies.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(TwpaError::Domain(format!(
            "frequencies must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn through_is_matched() {
        let s = TwoPortMatrix::IDENTITY.to_sparams(50.0);
        assert_eq!(s.s21, c(1.0, 0.0));
        assert_eq!(s.s11, c(0.0, 0.0));
    }

    #[test]
    fn series_resistor_sparams() {
        // A series 50 Ω resistor between 50 Ω ports: S21 = 2/3, S11 = 1/3.
        let s = TwoPortMatrix::series(c(50.0, 0.0)).to_sparams(50.0);
        assert!((s.s21 - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((s.s11 - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_order_and_determinant() {
        let m = TwoPortMatrix::series(c(0.0, 20.0)) * TwoPortMatrix::shunt(c(0.0, 0.01));
        assert!((m.det() - c(1.0, 0.0)).norm() < 1e-15);
        // series then shunt: A = 1 + Z Y
        assert!((m.a - c(1.0 - 0.2, 0.0)).norm() < 1e-15);
        assert_eq!(m.d, c(1.0, 0.0));
    }

    #[test]
    fn spectrum_rejects_unsorted() {
        assert!(ComplexSpectrum::new(vec![1.0, 1.0], vec![c(1.0, 0.0); 2], 50.0).is_err());
        assert!(ComplexSpectrum::new(vec![1.0, 2.0], vec![c(1.0, 0.0)], 50.0).is_err());
    }
}
