//! Argument reduction of integers modulo 2π and the sine/cosine values built
//! on it.

use rug::Float;

use super::precision::{ceil_log2, PrecisionContext};
use super::real::HpReal;
use crate::error::{precondition, Result};

/// `{n/(2π)}` and the matching angle `2π·{n/(2π)}`, both at working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduced {
    pub frac: HpReal,
    pub theta: HpReal,
}

/// Fractional part of `n/(2π)` and the reduced angle in `[0, 2π)`.
pub fn reduce_mod_2pi(n: u64, ctx: &PrecisionContext) -> Result<Reduced> {
    let frac = frac_over_two_pi(n, ctx)?;
    let bits = ctx.working_bits();
    let theta = Float::with_val(bits, &frac * ctx.two_pi());
    Ok(Reduced {
        frac: HpReal::new(Float::with_val(bits, &frac)),
        theta: HpReal::new(theta),
    })
}

/// `{n/(2π)}` at the context's π precision.
pub(crate) fn frac_over_two_pi(n: u64, ctx: &PrecisionContext) -> Result<Float> {
    if n == 0 {
        return precondition("reduce_mod_2pi", "n >= 1");
    }
    ctx.check_index(n)?;
    let bits = ctx.pi_bits();
    let mut x = Float::with_val(bits, ctx.inv_two_pi() * n);
    x.fract_mut();
    Ok(x)
}

/// `(sin n, cos n)` at working precision.
pub fn sin_cos_int(n: u64, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    let frac = frac_over_two_pi(n, ctx)?;
    let bits = ctx.working_bits();
    // centre the angle in (-π, π] so that sin keeps relative accuracy near 0 and 2π
    let mut theta = Float::with_val(ctx.pi_bits(), &frac * ctx.two_pi());
    if theta > *ctx.pi() {
        theta -= ctx.two_pi();
    }
    let theta = Float::with_val(bits + 8, &theta);
    let (s, c) = theta.sin_cos(Float::new(bits + 8));
    Ok((Float::with_val(bits, s), Float::with_val(bits, c)))
}

pub fn sin_int(n: u64, ctx: &PrecisionContext) -> Result<HpReal> {
    sin_cos_int(n, ctx).map(|(s, _)| HpReal::new(s))
}

pub fn cos_int(n: u64, ctx: &PrecisionContext) -> Result<HpReal> {
    sin_cos_int(n, ctx).map(|(_, c)| HpReal::new(c))
}

/// `(sin nα, cos nα)` for a real rotation angle, evaluated directly.
pub(crate) fn sin_cos_multiple(n: u64, alpha: &Float, ctx: &PrecisionContext) -> (Float, Float) {
    let bits = ctx.working_bits();
    // n·α needs log2(n) extra bits to keep the reduced angle accurate
    let wide = bits + ceil_log2(n.max(2)) + 8;
    let angle = Float::with_val(wide, alpha * n);
    let (s, c) = angle.sin_cos(Float::new(wide));
    (Float::with_val(bits, s), Float::with_val(bits, c))
}
