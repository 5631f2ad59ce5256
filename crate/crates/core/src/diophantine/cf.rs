use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};

use crate::error::{precondition, Error, Result};
use crate::hp::{HpReal, PrecisionContext};

/// Certified continued fraction `[0; a_1, a_2, ...]` of a number in `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    /// `a_1, a_2, ...` (the integer part `a_0 = 0` is implicit).
    pub partial_quotients: Vec<Integer>,
    /// `(p_j, q_j)` for `j = 0..=len`, starting from `p_0/q_0 = 0/1`.
    pub convergents: Vec<(Integer, Integer)>,
    /// The input was exact and rational and its expansion ended.
    pub terminated: bool,
}

impl ContinuedFraction {
    fn from_quotients(partial_quotients: Vec<Integer>, terminated: bool) -> Self {
        let mut convergents = Vec::with_capacity(partial_quotients.len() + 1);
        let (mut p_prev, mut q_prev) = (Integer::from(1), Integer::new());
        let (mut p, mut q) = (Integer::new(), Integer::from(1));
        convergents.push((p.clone(), q.clone()));
        for a in &partial_quotients {
            let p_next = Integer::from(a * &p) + &p_prev;
            let q_next = Integer::from(a * &q) + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            convergents.push((p.clone(), q.clone()));
        }
        Self {
            partial_quotients,
            convergents,
            terminated,
        }
    }

    pub fn denominators(&self) -> Vec<Integer> {
        self.convergents.iter().map(|(_, q)| q.clone()).collect()
    }

    /// `[0; a_1, a_2, ...]`.
    pub fn notation(&self) -> String {
        let quotients: Vec<String> = self.partial_quotients.iter().map(Integer::to_string).collect();
        if quotients.is_empty() {
            "[0]".into()
        } else {
            format!("[0; {}]", quotients.join(", "))
        }
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let strings = |v: &mut dyn Iterator<Item = &Integer>| v.map(Integer::to_string).collect::<Vec<_>>();
        let mut st = serializer.serialize_struct("ContinuedFraction", 4)?;
        st.serialize_field("partial_quotients", &strings(&mut self.partial_quotients.iter()))?;
        st.serialize_field("p", &strings(&mut self.convergents.iter().map(|(p, _)| p)))?;
        st.serialize_field("q", &strings(&mut self.convergents.iter().map(|(_, q)| q)))?;
        st.serialize_field("terminated", &self.terminated)?;
        st.end()
    }
}

/// Exact expansion of a rational in `[0, 1)`, at most `limit` quotients after
/// `a_0`; the flag says whether the expansion ended.
fn rational_quotients(x: &Rational, limit: usize) -> (Vec<Integer>, bool) {
    let mut out = Vec::new();
    let (mut num, mut den) = x.clone().into_numer_denom();
    // skip a_0
    let r = Integer::from(&num % &den);
    num = r;
    while out.len() < limit {
        if num == 0 {
            return (out, true);
        }
        // 1/(num/den) = den/num
        let (a, r) = den.div_rem_floor(num.clone());
        den = std::mem::replace(&mut num, r);
        out.push(a);
    }
    (out, num == 0)
}

/// Continued fraction of any number in `[x - error, x + error] ⊂ (0, 1)`.
///
/// Both endpoints are expanded exactly and only their common prefix is kept,
/// minus the last quotient of a finite endpoint expansion (it is ambiguous
/// between `[..., a]` and `[..., a-1, 1]`). Every returned quotient is
/// therefore shared by all numbers in the interval. With `error = 0` the
/// input itself is expanded exactly and may terminate.
pub fn cf_expand(x: &HpReal, error: &Float, depth: usize, _ctx: &PrecisionContext) -> Result<ContinuedFraction> {
    if !x.is_finite() || **x <= 0 || **x >= 1 {
        return precondition("cf_expand", "0 < x < 1");
    }
    if !error.is_finite() || *error < 0 {
        return precondition("cf_expand", "error >= 0");
    }
    let centre = x.to_rational().expect("finite float");
    if error.is_zero() {
        let (quotients, terminated) = rational_quotients(&centre, depth);
        return Ok(ContinuedFraction::from_quotients(quotients, terminated));
    }
    let err = error.to_rational().expect("finite float");
    let lo = Rational::from(&centre - &err);
    let hi = Rational::from(&centre + &err);
    if lo <= 0 || hi >= 1 {
        return precondition("cf_expand", "error interval inside (0, 1)");
    }
    // one spare quotient so the ambiguity trim never eats a requested one
    let (lo_q, lo_done) = rational_quotients(&lo, depth + 1);
    let (hi_q, hi_done) = rational_quotients(&hi, depth + 1);
    let mut common = lo_q.iter().zip(&hi_q).take_while(|(a, b)| a == b).count();
    if (lo_done && common == lo_q.len()) || (hi_done && common == hi_q.len()) {
        common = common.saturating_sub(1);
    }
    if common < depth {
        return Err(Error::PrecisionExhausted { reached: common });
    }
    Ok(ContinuedFraction::from_quotients(lo_q[..depth].to_vec(), false))
}

/// `1/(2π)` at the context's π precision with a rigorous error bound: `2π`
/// and its reciprocal are each correctly rounded, so the relative error is
/// below `2^-(pi_bits - 1)`.
pub fn inv_two_pi_enclosure(ctx: &PrecisionContext) -> (HpReal, Float) {
    let x = Float::with_val(ctx.pi_bits(), ctx.inv_two_pi());
    let err = Float::with_val(ctx.pi_bits(), &x * ctx.pow2(-(ctx.pi_bits() as i32 - 2)));
    (HpReal::new(x), err)
}

/// Certified continued fraction of `1/(2π)`.
pub fn inv_two_pi_cf(depth: usize, ctx: &PrecisionContext) -> Result<ContinuedFraction> {
    let (x, err) = inv_two_pi_enclosure(ctx);
    cf_expand(&x, &err, depth, ctx)
}
