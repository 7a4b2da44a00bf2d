//! Distances that ignore the global sign ambiguity of magnitude measurements.

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::model::Signal;
use crate::Scalar;

pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.05;

/// `x/|x|`, with `sign(0) = 0`.
pub fn sign_of<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// `min(‖a − b‖, ‖a + b‖)`.
pub fn dist_op<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::dims("dist_op", a.len(), b.len()));
    }
    let (mut minus, mut plus) = (T::zero(), T::zero());
    for (&p, &q) in a.iter().zip(b) {
        minus = minus + (p - q) * (p - q);
        plus = plus + (p + q) * (p + q);
    }
    Ok(minus.min(plus).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryVerdict {
    pub relative_error: f64,
    pub success: bool,
    pub threshold: f64,
}

/// Relative error `dist_op(x̂, x)/‖x‖` and the `< threshold` success rule.
pub fn recovery_verdict<T: Scalar>(
    x_hat: &Signal<T>,
    x_true: &Signal<T>,
    threshold: f64,
) -> Result<RecoveryVerdict> {
    let denom = norm2(x_true.values());
    if denom == T::zero() {
        return Err(Error::contract("recovery_verdict", "true signal is zero"));
    }
    let relative_error = (dist_op(x_hat.values(), x_true.values())? / denom).as_f64();
    Ok(RecoveryVerdict {
        relative_error,
        success: relative_error < threshold,
        threshold,
    })
}
