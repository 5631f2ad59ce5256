use rug::Float;

use super::SpecialValue;
use crate::error::{precondition, Result};
use crate::hp::{HpReal, PrecisionContext};

/// Modified Bessel function `I_0(z) = Σ (z/2)^{2k}/(k!)^2` for `z >= 0`.
///
/// Summation stops once a term, past the peak of the series, falls below
/// `2^-(mantissa_bits + 8)` relative to the running sum; the tail is bounded by
/// the geometric majorant given by the term ratio `(z/2)^2/(k+1)^2`.
pub fn bessel_i0(z: &Float, ctx: &PrecisionContext) -> Result<SpecialValue<HpReal>> {
    if !z.is_finite() || *z < 0 {
        return precondition("bessel_I0", "z >= 0");
    }
    let bits = ctx.working_bits();
    let quarter_sq = Float::with_val(bits, z.square_ref()) / 4u32;
    let rel_cut = ctx.pow2(-(ctx.mantissa_bits() as i32 + 8));
    let mut term = Float::with_val(bits, 1u32);
    let mut sum = Float::with_val(bits, 1u32);
    let mut k = 0u64;
    let tail = loop {
        let next = Float::with_val(bits, &term * &quarter_sq) / ((k + 1) * (k + 1));
        // ratio of the term after `next` to `next`; decreasing in k
        let ratio = Float::with_val(bits, &quarter_sq / ((k + 2) * (k + 2)));
        if ratio < 0.5 && next <= Float::with_val(bits, &sum * &rel_cut) {
            let one_minus = Float::with_val(bits, 1u32) - &ratio;
            break next / one_minus;
        }
        sum += &next;
        term = next;
        k += 1;
    };
    let rounding = Float::with_val(bits, &sum * ctx.pow2(-(bits as i32 - 8)));
    Ok(SpecialValue {
        value: HpReal::new(sum),
        error_bound: HpReal::new(tail + rounding),
        series_terms_used: k + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    #[test]
    fn zero_argument() {
        let c = PrecisionContext::default();
        let v = bessel_i0(&c.zero(), &c).unwrap();
        assert_eq!(*v.value.as_float(), 1);
        assert!(*v.error_bound.as_float() > 0);
    }

    #[test]
    fn unit_argument_against_doubled_precision() {
        let c = PrecisionContext::default();
        let d = c.doubled();
        let v = bessel_i0(&c.int(1), &c).unwrap();
        let w = bessel_i0(&d.int(1), &d).unwrap();
        assert!(v.value.to_decimal().starts_with("1.26606587775200833"));
        let diff = Float::with_val(d.working_bits(), v.value.as_float() - w.value.as_float()).abs();
        assert!(diff <= *v.error_bound.as_float());
    }

    #[test]
    fn large_argument_asymptotics() {
        let c = PrecisionContext::default();
        for (z, tol) in [(50u32, 0.01), (100, 0.005)] {
            let zf = c.int(u64::from(z));
            let v = bessel_i0(&zf, &c).unwrap();
            let two_pi_z = Float::with_val(c.working_bits(), Constant::Pi) * 2u32 * z;
            let scaled = Float::with_val(c.working_bits(), v.value.as_float() * two_pi_z.sqrt())
                * Float::with_val(c.working_bits(), -&zf).exp();
            assert!((scaled.to_f64() - 1.0).abs() < tol, "z = {z}: {scaled}");
        }
    }

    #[test]
    fn negative_rejected() {
        let c = PrecisionContext::default();
        assert!(bessel_i0(&c.float(-0.5), &c).is_err());
    }
}
