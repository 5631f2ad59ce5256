//! Special functions: the exponential and logarithmic integrals, the
//! Euler–Mascheroni constant, the modified Bessel function `I_0` and the
//! polylogarithm on the open unit disc.
//!
//! Every series evaluation reports the number of terms it used and an error
//! bound made of the truncation tail plus a rounding allowance, so the bound
//! is always strictly positive.

mod bessel;
mod ei;
mod polylog;

use serde::Serialize;

pub use bessel::bessel_i0;
pub use ei::{eval_ei, eval_li, euler_gamma, ei_series_sum};
pub use polylog::polylog;

/// A series-evaluated value with its error bound.
#[derive(Clone, Debug, Serialize)]
pub struct SpecialValue<T> {
    pub value: T,
    pub error_bound: crate::hp::HpReal,
    pub series_terms_used: u64,
}
