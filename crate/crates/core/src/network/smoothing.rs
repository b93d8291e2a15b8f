//! Savitzky–Golay smoothing.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, TwpaError};

/// Least-squares polynomial fit of degree `order` to `ys` sampled at
/// integer offsets `xs`, evaluated at `at`.
fn local_poly_weights(xs: &[f64], order: usize, at: f64) -> Result<DVector<f64>> {
    let m = xs.len();
    let v = DMatrix::from_fn(m, order + 1, |i, j| xs[i].powi(j as i32));
    let normal = v.transpose() * &v;
    let inv = normal
        .try_inverse()
        .ok_or_else(|| TwpaError::Fit("singular smoothing design matrix".into()))?;
    let basis = DVector::from_fn(order + 1, |j, _| at.powi(j as i32));
    // weights w such that y_hat(at) = w · y
    Ok(&v * (inv * basis))
}

/// Savitzky–Golay filter with polynomial fits at the edges.
///
/// `window` must be odd and larger than `order`; it is shrunk to the
/// largest admissible odd size when the data are shorter.
pub fn savgol(data: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window.is_multiple_of(2) || window <= order {
        return Err(TwpaError::Domain(format!(
            "smoothing window {window} must be odd and exceed the order {order}"
        )));
    }
    let n = data.len();
    let mut w = window.min(if n % 2 == 1 { n } else { n.saturating_sub(1) });
    if w <= order {
        return Ok(data.to_vec());
    }
    if w % 2 == 0 {
        w -= 1;
    }
    let half = w / 2;
    // Center offsets scaled to [-1, 1] keep the normal equations well conditioned.
    let scale = half.max(1) as f64;
    let xs: Vec<f64> = (0..w).map(|i| (i as f64 - half as f64) / scale).collect();
    let center = local_poly_weights(&xs, order, 0.0)?;
    let mut out = vec![0.0; n];
    for i in half..n - half {
        out[i] = (0..w).map(|j| center[j] * data[i - half + j]).sum();
    }
    for i in 0..half {
        let wl = local_poly_weights(&xs, order, xs[i])?;
        out[i] = (0..w).map(|j| wl[j] * data[j]).sum();
        let wr = local_poly_weights(&xs, order, xs[w - 1 - i])?;
        out[n - 1 - i] = (0..w).map(|j| wr[j] * data[n - w + j]).sum();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_quadratics_exactly() {
        let data: Vec<f64> = (0..300).map(|i| {
            let x = i as f64 * 0.01;
            1.0 - 2.0 * x + 0.5 * x * x
        }).collect();
        let s = savgol(&data, 51, 2).unwrap();
        for (a, b) in s.iter().zip(&data) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn reduces_alternating_noise() {
        let data: Vec<f64> = (0..101).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let s = savgol(&data, 21, 2).unwrap();
        assert!(s[50].abs() < 0.1);
    }

    #[test]
    fn rejects_even_window() {
        assert!(savgol(&[1.0; 10], 4, 2).is_err());
    }

    #[test]
    fn short_input_shrinks_window() {
        let data = vec![1.0, 2.0, 3.0, 4.0];
        let s = savgol(&data, 501, 2).unwrap();
        for (a, b) in s.iter().zip(&data) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
