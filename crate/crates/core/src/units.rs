//! Signal-to-noise ratios and power offsets.

use serde::Serialize;

use crate::error::{Error, Result};

/// Decibels per 3-dB unit, i.e. per doubling of power.
pub const DB_PER_UNIT: f64 = 3.010_299_956_639_812;

/// A signal-to-noise ratio held in linear scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct SnrValue(f64);

impl SnrValue {
    pub fn from_linear(linear: f64) -> Result<Self> {
        if linear.is_finite() && linear > 0.0 {
            Ok(SnrValue(linear))
        } else {
            Err(Error::domain(
                "snr",
                format!("linear SNR must be positive and finite, got {linear}"),
            ))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::domain("snr", format!("SNR in dB must be finite, got {db}")));
        }
        Self::from_linear(10f64.powf(db / 10.0))
    }

    #[inline]
    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }

    /// This SNR raised by `db` decibels.
    pub fn boosted_db(self, db: f64) -> Result<Self> {
        Self::from_linear(self.0 * 10f64.powf(db / 10.0))
    }
}

/// A horizontal shift between spectral-efficiency curves.
///
/// The natural unit is the 3-dB unit (one bit of log2-scale intercept);
/// `db` is always `units * DB_PER_UNIT`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerOffset {
    pub units: f64,
    pub db: f64,
}

impl PowerOffset {
    pub fn from_units(units: f64) -> Self {
        PowerOffset {
            units,
            db: units * DB_PER_UNIT,
        }
    }

    pub fn from_db(db: f64) -> Self {
        PowerOffset {
            units: db / DB_PER_UNIT,
            db,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_rejects_bad_values() {
        assert!(SnrValue::from_linear(0.0).is_err());
        assert!(SnrValue::from_linear(-1.0).is_err());
        assert!(SnrValue::from_linear(f64::INFINITY).is_err());
        assert!(SnrValue::from_linear(f64::NAN).is_err());
        assert!(SnrValue::from_db(f64::NAN).is_err());
    }

    #[test]
    fn db_round_trip() {
        let s = SnrValue::from_db(10.0).unwrap();
        assert!((s.linear() - 10.0).abs() < 1e-12);
        assert!((s.db() - 10.0).abs() < 1e-12);
        assert!((SnrValue::from_db(-10.0).unwrap().linear() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn offset_conversion_constant() {
        assert!((DB_PER_UNIT - 10.0 * 2f64.log10()).abs() < 1e-15);
        for u in [0.007, 0.5, 1.0, 3.7] {
            let p = PowerOffset::from_units(u);
            assert!((p.db / p.units - 3.0103).abs() < 1e-4);
            assert!((p.db / p.units - DB_PER_UNIT).abs() < 1e-9);
            let q = PowerOffset::from_db(p.db);
            assert!((q.units - u).abs() < 1e-15);
        }
    }
}
