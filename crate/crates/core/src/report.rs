//! Verified inequality instances shared by the fitting, sampling and search modules.

use crate::curvature::extended_real;
use serde::Serialize;

/// `lower − tol ≤ value ≤ upper + tol`, with a short description of where the bounds come from.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub quantity: String,
    #[serde(serialize_with = "extended_real")]
    pub lower: f64,
    #[serde(serialize_with = "extended_real")]
    pub value: f64,
    #[serde(serialize_with = "extended_real")]
    pub upper: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub basis: String,
}

impl BoundReport {
    pub fn new(quantity: impl Into<String>, lower: f64, value: f64, upper: f64, tolerance: f64, basis: impl Into<String>) -> Self {
        let pass = !value.is_nan() && lower - tolerance <= value && value <= upper + tolerance;
        BoundReport { quantity: quantity.into(), lower, value, upper, tolerance, pass, basis: basis.into() }
    }

    /// One-sided check `value ≤ upper + tol`.
    pub fn at_most(quantity: impl Into<String>, value: f64, upper: f64, tolerance: f64, basis: impl Into<String>) -> Self {
        Self::new(quantity, f64::NEG_INFINITY, value, upper, tolerance, basis)
    }

    /// One-sided check `value ≥ lower − tol`.
    pub fn at_least(quantity: impl Into<String>, lower: f64, value: f64, tolerance: f64, basis: impl Into<String>) -> Self {
        Self::new(quantity, lower, value, f64::INFINITY, tolerance, basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_respects_tolerance() {
        assert!(BoundReport::new("x", 1.0, 0.95, 2.0, 0.1, "").pass);
        assert!(!BoundReport::new("x", 1.0, 0.85, 2.0, 0.1, "").pass);
        assert!(BoundReport::at_most("x", 3.0, f64::INFINITY, 0.0, "").pass);
        assert!(!BoundReport::at_least("x", 1.0, f64::NAN, 0.0, "").pass);
        let json = serde_json::to_string(&BoundReport::at_most("x", 1.0, 2.0, 0.0, "")).unwrap();
        assert!(json.contains("\"lower\":\"-inf\""));
    }
}
