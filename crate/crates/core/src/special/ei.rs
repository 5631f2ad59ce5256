use rug::Float;

use super::SpecialValue;
use crate::error::{precondition, Result};
use crate::hp::{HpReal, PrecisionContext};

/// Euler–Mascheroni constant to working precision, computed once per context.
///
/// Brent–McMillan: with `A = Σ (m^k/k!)^2 (H_k - log m)` and
/// `B = Σ (m^k/k!)^2`, `γ = A/B + O(e^{-4m})`.
pub fn euler_gamma(ctx: &PrecisionContext) -> HpReal {
    let cell = ctx.gamma_cell();
    HpReal::new(cell.get_or_init(|| brent_mcmillan(ctx.working_bits())).clone())
}

fn brent_mcmillan(bits: u32) -> Float {
    // e^{-4m} < 2^-(bits + 8)
    let m = ((f64::from(bits + 8) * std::f64::consts::LN_2) / 4.0).ceil() as u64 + 1;
    // the running sums reach ~e^{2m}; carry that many extra bits
    let wide = bits + (2.0 * m as f64 * std::f64::consts::LOG2_E) as u32 + 32;
    let m2 = Float::with_val(wide, m * m);
    let mut a = -Float::with_val(wide, m).ln();
    let mut b = Float::with_val(wide, 1u32);
    let mut u = a.clone();
    let mut v = b.clone();
    let eps = Float::with_val(wide, Float::i_exp(1, -(wide as i32)));
    let mut k = 1u64;
    loop {
        b *= &m2;
        b /= k * k;
        a *= &m2;
        a /= k;
        a += &b;
        a /= k;
        u += &a;
        v += &b;
        if k > m && Float::with_val(wide, a.abs_ref()) < Float::with_val(wide, &u * &eps).abs()
            && b < Float::with_val(wide, &v * &eps)
        {
            break;
        }
        k += 1;
    }
    Float::with_val(bits, u / v)
}

/// `Σ_{k≥1} t^k/(k·k!)` truncated once a term (past its peak) drops below
/// `2^-(mantissa_bits + 8)`; returns the sum, the first omitted term and the
/// number of terms used.
pub fn ei_series_sum(t: &Float, ctx: &PrecisionContext) -> (Float, Float, u64) {
    let bits = ctx.working_bits();
    let cutoff = ctx.pow2(-(ctx.mantissa_bits() as i32 + 8));
    let mut power_over_fact = Float::with_val(bits, 1u32); // t^k / k!
    let mut sum = Float::new(bits);
    let mut k = 1u64;
    loop {
        power_over_fact *= t;
        power_over_fact /= k;
        let term = Float::with_val(bits, &power_over_fact / k);
        if term < cutoff && Float::with_val(bits, t) < k {
            return (sum, term, k - 1);
        }
        sum += term;
        k += 1;
    }
}

/// `Ei(t) = γ + log t + Σ t^k/(k·k!)` for `t > 0`.
///
/// The error bound is twice the first omitted term plus a rounding allowance.
pub fn eval_ei(t: &Float, ctx: &PrecisionContext) -> Result<SpecialValue<HpReal>> {
    if !t.is_finite() || *t <= 0 {
        return precondition("eval_Ei", "t > 0");
    }
    let bits = ctx.working_bits();
    let (series, omitted, terms) = ei_series_sum(t, ctx);
    let gamma = euler_gamma(ctx);
    let value = Float::with_val(bits, gamma.as_float() + Float::with_val(bits, t.ln_ref())) + series;
    let rounding = Float::with_val(bits, value.abs_ref()) * ctx.pow2(-(bits as i32 - 8));
    let error_bound = omitted * 2u32 + rounding;
    Ok(SpecialValue {
        value: HpReal::new(value),
        error_bound: HpReal::new(error_bound),
        series_terms_used: terms,
    })
}

/// `li(x) = Ei(log x)` for `x > 1`.
pub fn eval_li(x: &Float, ctx: &PrecisionContext) -> Result<SpecialValue<HpReal>> {
    if !x.is_finite() || *x <= 1 {
        return precondition("eval_li", "x > 1");
    }
    let t = Float::with_val(ctx.working_bits(), x.ln_ref());
    eval_ei(&t, ctx)
}
