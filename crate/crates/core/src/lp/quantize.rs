//! Rounding of positive reals down to integer powers of `1 + δ`.

use serde::{Deserialize, Serialize};

use super::LpError;

/// `value = (1+δ)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantized {
    pub exponent: i64,
    pub value: f64,
}

impl Quantized {
    /// Sign bit plus the magnitude of the exponent.
    pub fn bit_len(&self) -> u64 {
        1 + crate::sim::bits_for(self.exponent.unsigned_abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantizer {
    delta: f64,
    log_base: f64,
}

/// Relative slack under which `log_{1+δ} v` is snapped to the nearest
/// integer, so exact powers survive the float logarithm.
const SNAP: f64 = 1e-9;

impl Quantizer {
    pub fn new(delta: f64) -> Result<Self, LpError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(LpError::Numerical(format!("quantization step {delta} outside (0, 1)")));
        }
        Ok(Quantizer { delta, log_base: delta.ln_1p() })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn quantize(&self, v: f64) -> Result<Quantized, LpError> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(LpError::Numerical(format!("cannot quantize {v}")));
        }
        let t = v.ln() / self.log_base;
        let nearest = t.round();
        let exponent = if (t - nearest).abs() <= SNAP * nearest.abs().max(1.0) { nearest } else { t.floor() } as i64;
        Ok(Quantized { exponent, value: self.value_of(exponent) })
    }

    pub fn value_of(&self, exponent: i64) -> f64 {
        (exponent as f64 * self.log_base).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_powers_are_fixed_points() {
        let q = Quantizer::new(1e-3).unwrap();
        assert_eq!(q.quantize(1.0).unwrap().value, 1.0);
        let v = (1.0f64 + 1e-3).powi(5);
        let r = q.quantize(v).unwrap();
        assert_eq!(r.exponent, 5);
        assert!((r.value / v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive() {
        let q = Quantizer::new(0.1).unwrap();
        assert!(q.quantize(0.0).is_err());
        assert!(q.quantize(-2.0).is_err());
    }
}
