//! Unit conversions shared by every module.

use std::f64::consts::PI;

pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn angular_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    1e-3 * 10f64.powf(p_dbm / 10.0)
}

pub fn watts_to_dbm(p: f64) -> f64 {
    10.0 * (p / 1e-3).log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_round_trip() {
        for p in [-150.0, -90.0, 0.0, 13.0] {
            assert!((watts_to_dbm(dbm_to_watts(p)) - p).abs() < 1e-12);
        }
        assert!((dbm_to_watts(-90.0) - 1e-12).abs() < 1e-24);
    }
}
