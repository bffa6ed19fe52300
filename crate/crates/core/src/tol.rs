//! Numerical tolerances shared across the crate.
//!
//! All comparisons in the verification paths are one-sided: a configuration
//! that is tangency-tight in exact arithmetic must still verify, so slack is
//! always granted in the direction that admits the exact configuration.

use core::fmt;

/// Default tolerance on the norm of a unit vector.
pub const EPS_UNIT: f64 = 1e-12;
/// Default tolerance on angles and spherical distances, in radians.
pub const EPS_ANGLE: f64 = 1e-9;
/// Default tolerance on areas, in steradians.
pub const EPS_AREA: f64 = 1e-9;

/// Tolerance bundle passed to constructors and verification routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of vector norms from 1.
    pub eps_unit: f64,
    /// Allowed deviation of angles, radians.
    pub eps_angle: f64,
    /// Allowed deviation of areas, steradians.
    pub eps_area: f64,
}

impl Tolerances {
    /// Builds a tolerance bundle; every field must be positive and below
    /// `1e-3` so that tolerance slack can never mask a real geometric error.
    pub fn new(eps_unit: f64, eps_angle: f64, eps_area: f64) -> Result<Self, BadTolerance> {
        for (name, v) in [
            ("eps_unit", eps_unit),
            ("eps_angle", eps_angle),
            ("eps_area", eps_area),
        ] {
            if !(v > 0.0 && v < 1e-3) {
                return Err(BadTolerance { field: name, value: v });
            }
        }
        Ok(Self { eps_unit, eps_angle, eps_area })
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eps_unit: EPS_UNIT, eps_angle: EPS_ANGLE, eps_area: EPS_AREA }
    }
}

/// A tolerance field was zero, negative, or large enough to hide errors.
#[derive(Debug, Clone, PartialEq)]
pub struct BadTolerance {
    pub field: &'static str,
    pub value: f64,
}

impl fmt::Display for BadTolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tolerance {} = {} out of range (0, 1e-3)",
            self.field, self.value
        )
    }
}

impl core::error::Error for BadTolerance {}
