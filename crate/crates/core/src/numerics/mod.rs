//! Configurable-precision decimal arithmetic and the special functions the
//! iterated maps need.

mod fixed;
mod functions;
mod real;

pub use functions::{cos_pi, cos_r, frac, gamma, pi, sin_pi, sin_r, TRIG_EXPONENT_LIMIT};
pub use real::{Precision, Real, EXPONENT_LIMIT, GUARD_DIGITS, MIN_DIGITS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("gamma has a pole at non-positive integer {0}")]
    Pole(String),
    #[error("value overflows the supported exponent range")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision {0} is below the minimum of 15 digits")]
    PrecisionTooSmall(u32),
    #[error("invalid decimal literal {0:?}")]
    Parse(String),
    #[error("trigonometric argument has 10^{0} or more in magnitude")]
    ArgumentTooLarge(i64),
    #[error("value is not finite")]
    NotFinite,
}
