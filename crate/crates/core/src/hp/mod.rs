//! Extended-precision substrate: precision contract, scalars, argument
//! reduction, the rotation stream and compensated summation.

mod precision;
mod real;
mod reduce;
mod stream;
mod sum;

pub use precision::{
    PrecisionContext, DEFAULT_GUARD_BITS, DEFAULT_MANTISSA_BITS, DEFAULT_MAX_INDEX_HINT,
    MIN_MANTISSA_BITS, PRECISION_ENV_VAR,
};
pub use real::{HpComplex, HpReal};
pub use reduce::{cos_int, reduce_mod_2pi, sin_cos_int, sin_int, Reduced};
pub(crate) use reduce::{frac_over_two_pi, sin_cos_multiple};
pub use stream::{angle_stream, sin_stream, SinCos, SinStream, DEFAULT_RESYNC_INTERVAL};
pub use sum::{compensated_sum, compensated_sum_by, CompensatedSum, DEFAULT_CHUNK};
