use std::cmp::Ordering;
use std::fmt;

use rug::ops::CompleteRound;
use rug::Float;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Extended-precision real scalar.
///
/// A thin wrapper around an MPFR float whose precision is fixed by the
/// [`PrecisionContext`](super::PrecisionContext) that produced it. Its
/// `Display` form is the shortest decimal string that parses back to the
/// identical value at the same precision.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct HpReal(Float);

impl HpReal {
    pub fn new(value: Float) -> Self {
        Self(value)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Parse a decimal string, rounding to nearest at `bits` of precision.
    pub fn parse(text: &str, bits: u32) -> Result<Self> {
        let parsed = Float::parse(text.trim())
            .map_err(|e| Error::Parse(format!("{text:?}: {e}")))?;
        Ok(Self(parsed.complete(bits)))
    }

    /// Shortest decimal representation that round-trips at this value's
    /// precision. Plain notation inside `[1e-4, 1e16)`, scientific outside.
    pub fn to_decimal(&self) -> String {
        float_to_decimal(&self.0)
    }

    /// Decimal rendering with exactly `digits` significant digits (no
    /// round-trip search); handy for human-facing tables.
    pub fn to_digits(&self, digits: usize) -> String {
        layout(&self.0, digits.max(1), false)
    }
}

impl std::ops::Deref for HpReal {
    type Target = Float;

    fn deref(&self) -> &Float {
        &self.0
    }
}

impl From<Float> for HpReal {
    fn from(value: Float) -> Self {
        Self(value)
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl Serialize for HpReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal())
    }
}

pub(crate) fn float_to_decimal(x: &Float) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x.is_sign_negative() {
            "-inf".into()
        } else {
            "inf".into()
        };
    }
    if x.is_zero() {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let prec = x.prec();
    // prec*log10(2) + 2 digits always identify a binary value uniquely
    let mut hi = (f64::from(prec) * std::f64::consts::LOG10_2).ceil() as usize + 2;
    let mut lo = 1usize;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if round_trips(x, mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut digits = lo;
    while !round_trips(x, digits) {
        digits += 1;
    }
    layout(x, digits, true)
}

fn round_trips(x: &Float, digits: usize) -> bool {
    let text = layout(x, digits, true);
    match Float::parse(&text) {
        Ok(p) => {
            let back = p.complete(x.prec());
            back.cmp0() == x.cmp0() && back.partial_cmp(x) == Some(Ordering::Equal)
        }
        Err(_) => false,
    }
}

fn layout(x: &Float, digits: usize, trim: bool) -> String {
    if x.is_zero() || !x.is_finite() {
        return float_to_decimal(x);
    }
    let (negative, mut mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    let exp = exp.unwrap_or(0);
    if trim {
        while mantissa.len() > 1 && mantissa.ends_with('0') {
            mantissa.pop();
        }
    }
    // value = 0.mantissa * 10^exp; scientific exponent is exp - 1
    let sci_exp = i64::from(exp) - 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-4..16).contains(&sci_exp) {
        if sci_exp >= 0 {
            let int_len = (sci_exp + 1) as usize;
            if mantissa.len() <= int_len {
                out.push_str(&mantissa);
                out.extend(std::iter::repeat('0').take(int_len - mantissa.len()));
            } else {
                out.push_str(&mantissa[..int_len]);
                out.push('.');
                out.push_str(&mantissa[int_len..]);
            }
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat('0').take((-sci_exp - 1) as usize));
            out.push_str(&mantissa);
        }
    } else {
        out.push_str(&mantissa[..1]);
        if mantissa.len() > 1 {
            out.push('.');
            out.push_str(&mantissa[1..]);
        }
        out.push('e');
        out.push_str(&sci_exp.to_string());
    }
    out
}

/// Extended-precision complex scalar as a pair of reals of equal precision.
#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    pub re: Float,
    pub im: Float,
}

impl HpComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        Self {
            re: Float::new(bits),
            im: Float::new(bits),
        }
    }

    pub fn one(bits: u32) -> Self {
        Self {
            re: Float::with_val(bits, 1),
            im: Float::new(bits),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    /// `radius * e^{i angle}`.
    pub fn from_polar(radius: &Float, angle: &Float) -> Self {
        let bits = radius.prec().max(angle.prec());
        let (s, c) = Float::with_val(bits, angle).sin_cos(Float::new(bits));
        Self {
            re: c * radius,
            im: s * radius,
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn norm_sqr(&self) -> Float {
        let bits = self.prec();
        let mut out = Float::with_val(bits, self.re.square_ref());
        out += Float::with_val(bits, self.im.square_ref());
        out
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let bits = self.prec();
        Self {
            re: Float::with_val(bits, &self.re + &other.re),
            im: Float::with_val(bits, &self.im + &other.im),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let bits = self.prec();
        Self {
            re: Float::with_val(bits, &self.re - &other.re),
            im: Float::with_val(bits, &self.im - &other.im),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let bits = self.prec();
        let re = Float::with_val(bits, &self.re * &other.re) - Float::with_val(bits, &self.im * &other.im);
        let im = Float::with_val(bits, &self.re * &other.im) + Float::with_val(bits, &self.im * &other.re);
        Self { re, im }
    }

    pub fn scale(&self, factor: &Float) -> Self {
        let bits = self.prec();
        Self {
            re: Float::with_val(bits, &self.re * factor),
            im: Float::with_val(bits, &self.im * factor),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        let bits = self.prec();
        let den = other.norm_sqr();
        let num = self.mul(&other.conj());
        Self {
            re: Float::with_val(bits, &num.re / &den),
            im: Float::with_val(bits, &num.im / &den),
        }
    }

    /// Multiply by `i^k`.
    pub fn mul_i_pow(&self, k: u32) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => Self {
                re: -self.im.clone(),
                im: self.re.clone(),
            },
            2 => Self {
                re: -self.re.clone(),
                im: -self.im.clone(),
            },
            _ => Self {
                re: self.im.clone(),
                im: -self.re.clone(),
            },
        }
    }

    pub fn pow_u(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.prec());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl Serialize for HpComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("HpComplex", 2)?;
        st.serialize_field("re", &float_to_decimal(&self.re))?;
        st.serialize_field("im", &float_to_decimal(&self.im))?;
        st.end()
    }
}
