use crate::error::{Error, Result};

/// One side-by-side comparison of an identity or bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Check {
    /// Integer identity, compared exactly.
    pub fn exact(name: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Check { name: name.into(), lhs: lhs as f64, rhs: rhs as f64, pass: lhs == rhs }
    }

    /// Real identity, compared within `tol`.
    pub fn approx(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Check { name: name.into(), lhs, rhs, pass: (lhs - rhs).abs() <= tol }
    }

    /// Inequality `lhs ≤ rhs`.
    pub fn at_most(name: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Check { name: name.into(), lhs: lhs as f64, rhs: rhs as f64, pass: lhs <= rhs }
    }

    pub fn require(self) -> Result<Self> {
        if self.pass {
            Ok(self)
        } else {
            Err(Error::IdentityViolated { name: self.name, lhs: self.lhs, rhs: self.rhs })
        }
    }
}

/// Rounds `value` to the nearest integer, refusing drift beyond `tol`.
pub fn snap(value: f64, tol: f64) -> Result<i64> {
    if !value.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    let rounded = value.round();
    let distance = (value - rounded).abs();
    if distance > tol {
        return Err(Error::NotIntegral { value, distance });
    }
    Ok(rounded as i64)
}
