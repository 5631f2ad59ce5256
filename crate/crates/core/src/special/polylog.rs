use rug::Float;

use super::SpecialValue;
use crate::error::{precondition, Result};
use crate::hp::{HpComplex, HpReal, PrecisionContext};

/// Largest admissible `|z|`; closer to the unit circle the geometric tail
/// bound stops being useful.
pub const POLYLOG_MAX_RADIUS: f64 = 0.99;

/// `Li_α(z) = Σ_{n≥1} z^n / n^α` by direct summation for `|z| <= 0.99`.
///
/// Tail after `N` terms: `|z|^{N+1}/(1-|z|) · max(1, N^{-α})` for `α >= 0`;
/// for negative `α` the majorant uses the ratio `((N+2)/(N+1))^{-α}|z|` of
/// consecutive tail terms instead, since `n^{-α}` keeps growing.
pub fn polylog(alpha: &Float, z: &HpComplex, ctx: &PrecisionContext) -> Result<SpecialValue<HpComplex>> {
    let bits = ctx.working_bits();
    let radius = z.abs();
    if !radius.is_finite() || radius > POLYLOG_MAX_RADIUS {
        return precondition("polylog", format!("|z| <= {POLYLOG_MAX_RADIUS}"));
    }
    if radius.is_zero() {
        return Ok(SpecialValue {
            value: HpComplex::zero(bits),
            error_bound: HpReal::new(ctx.pow2(-(bits as i32))),
            series_terms_used: 0,
        });
    }
    let cutoff = ctx.pow2(-(ctx.mantissa_bits() as i32 + 8));
    let one_minus_r = Float::with_val(bits, 1u32) - &radius;
    let z = HpComplex::new(Float::with_val(bits, &z.re), Float::with_val(bits, &z.im));
    let mut power = z.clone();
    let mut radius_pow = radius.clone();
    let mut sum = HpComplex::zero(bits);
    let mut n = 1u64;
    let tail = loop {
        let weight = n_pow_neg(n, alpha, bits);
        sum = sum.add(&power.scale(&weight));
        power = power.mul(&z);
        radius_pow *= &radius;
        if let Some(bound) = tail_bound(n, alpha, &radius, &radius_pow, &one_minus_r, bits) {
            if bound < cutoff {
                break bound;
            }
        }
        n += 1;
    };
    let scale = sum.abs().max(&Float::with_val(bits, 1u32)).clone();
    let rounding = Float::with_val(bits, &scale * ctx.pow2(-(bits as i32 - 8))) * n;
    Ok(SpecialValue {
        value: sum,
        error_bound: HpReal::new(tail + rounding),
        series_terms_used: n,
    })
}

fn n_pow_neg(n: u64, alpha: &Float, bits: u32) -> Float {
    if alpha.is_zero() || n == 1 {
        return Float::with_val(bits, 1u32);
    }
    let log_n = Float::with_val(bits, n).ln();
    (-(log_n * alpha)).exp()
}

/// Bound on `Σ_{m>n} |z|^m m^{-α}` given `radius_pow = |z|^{n+1}`, or `None`
/// while the majorant is not yet contracting.
fn tail_bound(
    n: u64,
    alpha: &Float,
    radius: &Float,
    radius_pow: &Float,
    one_minus_r: &Float,
    bits: u32,
) -> Option<Float> {
    if *alpha >= 0 {
        let factor = n_pow_neg(n, alpha, bits).max(&Float::with_val(bits, 1u32)).clone();
        return Some(Float::with_val(bits, radius_pow * factor) / one_minus_r);
    }
    let growth = Float::with_val(bits, (n + 2) as f64 / (n + 1) as f64).ln() * alpha;
    let ratio = Float::with_val(bits, (-growth).exp()) * radius;
    if ratio >= 1 {
        return None;
    }
    let first = Float::with_val(bits, radius_pow * n_pow_neg(n + 1, alpha, bits));
    Some(first / (Float::with_val(bits, 1u32) - ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64, ctx: &PrecisionContext) -> HpComplex {
        HpComplex::new(ctx.float(re), ctx.float(im))
    }

    #[test]
    fn order_zero_is_geometric() {
        let ctx = PrecisionContext::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let one = HpComplex::one(ctx.working_bits());
        for _ in 0..20 {
            let r: f64 = rng.gen_range(0.0..0.9);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = c(r * phi.cos(), r * phi.sin(), &ctx);
            let li = polylog(&ctx.zero(), &z, &ctx).unwrap();
            let back = li.value.mul(&one.sub(&z)).sub(&z);
            assert!(back.abs() < ctx.tolerance(0));
        }
    }

    #[test]
    fn order_one_at_half_is_log_two() {
        let ctx = PrecisionContext::default();
        let li = polylog(&ctx.int(1), &c(0.5, 0.0, &ctx), &ctx).unwrap();
        let ln2 = Float::with_val(ctx.working_bits(), 2u32).ln();
        let err = Float::with_val(ctx.working_bits(), &li.value.re - &ln2).abs();
        assert!(err <= *li.error_bound.as_float());
        assert!(li.value.im.is_zero());
    }

    #[test]
    fn leading_harmonic_closed_form() {
        let ctx = PrecisionContext::default();
        let bits = ctx.working_bits();
        let w = HpComplex::from_polar(&(Float::with_val(bits, 2u32) / 3u32), &ctx.int(1));
        let li = polylog(&ctx.zero(), &w, &ctx).unwrap();
        let closed = w.div(&HpComplex::one(bits).sub(&w));
        assert!(li.value.sub(&closed).abs() < ctx.tolerance(0));
    }

    #[test]
    fn negative_order_converges() {
        // Li_{-1}(z) = z/(1-z)^2
        let ctx = PrecisionContext::default();
        let bits = ctx.working_bits();
        let z = c(0.3, -0.4, &ctx);
        let li = polylog(&(-ctx.int(1)), &z, &ctx).unwrap();
        let one_minus = HpComplex::one(bits).sub(&z);
        let closed = z.div(&one_minus.mul(&one_minus));
        assert!(li.value.sub(&closed).abs() <= *li.error_bound.as_float());
    }

    #[test]
    fn radius_guard() {
        let ctx = PrecisionContext::default();
        assert!(polylog(&ctx.int(2), &c(0.995, 0.0, &ctx), &ctx).is_err());
        assert!(polylog(&ctx.int(2), &c(0.0, 0.99, &ctx), &ctx).is_ok());
        let zero = polylog(&ctx.int(2), &c(0.0, 0.0, &ctx), &ctx).unwrap();
        assert!(zero.value.re.is_zero());
    }
}
