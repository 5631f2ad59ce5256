use std::sync::OnceLock;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};

use crate::error::{precondition, Error, Result};
use crate::hp::{HpComplex, PrecisionContext};
use crate::quadrature::periodic_mean;

/// Largest `n` for which exact coefficients are produced.
pub const COEFFICIENT_N_MAX: u64 = 2000;
/// The exact path is checked against quadrature for every `k <= n <=` this.
pub const COEFFICIENT_VALIDATION_MAX: u64 = 30;

/// Exact `c_k(n) = (re_num + i·im_num)/denom`, with the fraction reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicCoefficient {
    pub k: u64,
    pub n: u64,
    pub re_num: Integer,
    pub im_num: Integer,
    pub denom: Integer,
}

impl HarmonicCoefficient {
    fn reduced(k: u64, n: u64, mut re_num: Integer, mut im_num: Integer, mut denom: Integer) -> Self {
        let g = Integer::from(re_num.gcd_ref(&im_num)).gcd(&denom);
        if g > 1 {
            re_num.div_exact_mut(&g);
            im_num.div_exact_mut(&g);
            denom.div_exact_mut(&g);
        }
        Self {
            k,
            n,
            re_num,
            im_num,
            denom,
        }
    }

    /// From the real row value `b = i^k·4^n·c_k(n)`.
    pub(crate) fn from_row_value(k: u64, n: u64, b: &Integer) -> Self {
        let b = b.clone();
        let (re, im) = match k % 4 {
            0 => (b, Integer::new()),
            1 => (Integer::new(), -b),
            2 => (-b, Integer::new()),
            _ => (Integer::new(), b),
        };
        Self::reduced(k, n, re, im, Integer::from(1) << (2 * n as u32))
    }

    pub fn is_zero(&self) -> bool {
        self.re_num == 0 && self.im_num == 0
    }

    pub fn re(&self) -> Rational {
        Rational::from((self.re_num.clone(), self.denom.clone()))
    }

    pub fn im(&self) -> Rational {
        Rational::from((self.im_num.clone(), self.denom.clone()))
    }

    /// Numerator of `i^k·c_k(n)` as `(re, im)`; the coefficient has the
    /// documented parity exactly when `im` is zero.
    pub fn rotated_numerator(&self) -> (Integer, Integer) {
        let (re, im) = (self.re_num.clone(), self.im_num.clone());
        match self.k % 4 {
            0 => (re, im),
            1 => (-im, re),
            2 => (-re, -im),
            _ => (im, -re),
        }
    }

    /// `|c_k(n)|²` as an exact rational.
    pub fn norm_sqr(&self) -> Rational {
        let num = Integer::from(self.re_num.square_ref()) + Integer::from(self.im_num.square_ref());
        Rational::from((num, Integer::from(self.denom.square_ref())))
    }

    pub fn to_complex(&self, bits: u32) -> HpComplex {
        HpComplex::new(
            Float::with_val(bits, &self.re()),
            Float::with_val(bits, &self.im()),
        )
    }
}

impl Serialize for HarmonicCoefficient {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("HarmonicCoefficient", 5)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("c_re_num", &self.re_num.to_string())?;
        st.serialize_field("c_im_num", &self.im_num.to_string())?;
        st.serialize_field("denom", &self.denom.to_string())?;
        st.end()
    }
}

/// `c_k(n)` by expanding `(1 + sin θ/2)^n` binomially and each `sin^j θ` into
/// exponentials: the `e^{ikθ}` coefficient of `sin^j θ` is
/// `(2i)^{-j} (-1)^m C(j, m)` with `m = (j-k)/2`.
pub fn fourier_coefficient(k: u64, n: u64) -> Result<HarmonicCoefficient> {
    if n > COEFFICIENT_N_MAX {
        return precondition("fourier_coefficient", format!("n <= {COEFFICIENT_N_MAX}"));
    }
    validate_exact_path()?;
    Ok(binomial_coefficient(k, n))
}

fn binomial_coefficient(k: u64, n: u64) -> HarmonicCoefficient {
    // 4^n c_k(n) = Σ_j C(n,j) C(j,m) (-1)^m i^{-j} 4^{n-j}
    let mut re = Integer::new();
    let mut im = Integer::new();
    let mut j = k;
    while j <= n {
        let m = (j - k) / 2;
        let mut t = Integer::from(Integer::binomial_u(n as u32, j as u32));
        t *= Integer::from(Integer::binomial_u(j as u32, m as u32));
        t <<= 2 * (n - j) as u32;
        if m % 2 == 1 {
            t = -t;
        }
        match j % 4 {
            0 => re += t,
            1 => im -= t,
            2 => re -= t,
            _ => im += t,
        }
        j += 2;
    }
    HarmonicCoefficient::reduced(k, n, re, im, Integer::from(1) << (2 * n as u32))
}

/// Streams rows `b_0(n), ..., b_n(n)` of `b_k(n) = i^k 4^n c_k(n)`, the
/// coefficients of the Laurent polynomial `(x + 4 + 1/x)^n`, for
/// `n = 0, 1, 2, ...` via `b_k(n+1) = b_{k-1}(n) + 4 b_k(n) + b_{k+1}(n)`
/// (with `b_{-1} = b_1`).
#[derive(Clone, Debug)]
pub struct CoefficientRows {
    n: u64,
    row: Vec<Integer>,
}

impl CoefficientRows {
    pub fn new() -> Self {
        Self { n: 0, row: Vec::new() }
    }
}

impl Default for CoefficientRows {
    fn default() -> Self {
        Self::new()
    }
}

impl CoefficientRows {
    /// Moves to the next row and borrows it; the first call yields row 0.
    pub fn advance(&mut self) -> (u64, &[Integer]) {
        if self.row.is_empty() {
            self.row.push(Integer::from(1));
        } else {
            let old = &self.row;
            let len = old.len();
            let mut next = Vec::with_capacity(len + 1);
            for k in 0..=len {
                let left = if k == 0 { old.get(1) } else { old.get(k - 1) };
                let mut v = Integer::new();
                if let Some(l) = left {
                    v += l;
                }
                if let Some(c) = old.get(k) {
                    v += Integer::from(c << 2);
                }
                if let Some(r) = old.get(k + 1) {
                    v += r;
                }
                next.push(v);
            }
            self.row = next;
            self.n += 1;
        }
        (self.n, &self.row)
    }
}

impl Iterator for CoefficientRows {
    type Item = (u64, Vec<Integer>);

    fn next(&mut self) -> Option<Self::Item> {
        let (n, row) = self.advance();
        Some((n, row.to_vec()))
    }
}

/// Row `b_0(n), ..., b_n(n)` (see [`CoefficientRows`]).
pub fn coefficient_row(n: u64) -> Result<Vec<Integer>> {
    if n > COEFFICIENT_N_MAX {
        return precondition("coefficient_row", format!("n <= {COEFFICIENT_N_MAX}"));
    }
    validate_exact_path()?;
    let mut rows = CoefficientRows::new();
    for _ in 0..n {
        rows.advance();
    }
    Ok(rows.advance().1.to_vec())
}

/// All `c_k(n)` for `0 <= k <= n` from the row recurrence.
pub fn coefficient_table_row(n: u64) -> Result<Vec<HarmonicCoefficient>> {
    let row = coefficient_row(n)?;
    Ok(row
        .iter()
        .enumerate()
        .map(|(k, b)| HarmonicCoefficient::from_row_value(k as u64, n, b))
        .collect())
}

/// `c_k(n)` as the mean of `(1 + sin θ/2)^n e^{-ikθ}` by the trapezoid rule,
/// which is exact for this trigonometric polynomial once the node count
/// exceeds `n + k`.
pub fn coefficient_by_quadrature(k: u64, n: u64, bits: u32) -> HpComplex {
    let points = (n + k + 1).next_power_of_two().max(8) * 2;
    let f = |theta: &Float, sine: bool| {
        let base = Float::with_val(bits, theta.sin_ref()) / 2u32 + 1u32;
        let p = Float::with_val(bits, (&base).pow(n as u32));
        let phase = Float::with_val(bits, theta * k);
        let w = if sine { phase.sin() } else { phase.cos() };
        p * w
    };
    let re = periodic_mean(|t| f(t, false), points, bits);
    let im = -periodic_mean(|t| f(t, true), points, bits);
    HpComplex::new(re, im)
}

static VALIDATION: OnceLock<std::result::Result<(), String>> = OnceLock::new();

/// Checks both exact paths against quadrature for all `k <= n <= 30`, once
/// per process.
pub fn validate_exact_path() -> Result<()> {
    VALIDATION
        .get_or_init(|| run_validation(binomial_coefficient))
        .clone()
        .map_err(Error::Validation)
}

fn run_validation<F>(exact: F) -> std::result::Result<(), String>
where
    F: Fn(u64, u64) -> HarmonicCoefficient,
{
    let ctx = PrecisionContext::default();
    let bits = ctx.working_bits();
    let tol = ctx.tolerance(16);
    let mut rows = CoefficientRows::new();
    for n in 0..=COEFFICIENT_VALIDATION_MAX {
        let (_, row) = rows.next().expect("row stream is infinite");
        for k in 0..=n {
            let c = exact(k, n);
            if c != HarmonicCoefficient::from_row_value(k, n, &row[k as usize]) {
                return Err(format!("binomial and row recurrence disagree at (k, n) = ({k}, {n})"));
            }
            let q = coefficient_by_quadrature(k, n, bits);
            let err = c.to_complex(bits).sub(&q).abs();
            if err >= tol {
                return Err(format!(
                    "exact coefficient misses quadrature at (k, n) = ({k}, {n}) by {}",
                    err.to_f64()
                ));
            }
        }
    }
    Ok(())
}
