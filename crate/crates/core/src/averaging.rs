//! Averages of powers of `(2 + sin θ)/3` over a period.
//!
//! `J_n` is the mean of `(1 + sin θ/2)^n` and `I_n = (2/3)^n J_n` the mean of
//! `((2 + sin θ)/3)^n`. The averaged series is `M = Σ I_n/n`.
//!
//! `J_n` has an exact binomial form. The fast path instead runs the
//! three-term recurrence
//! `J_{n+1} = ((2n+1) J_n - (3/4) n J_{n-1})/(n+1)`, which follows from the
//! Legendre identity `J_n = (√3/2)^n P_n(2/√3)`. That identity is checked
//! against the exact sums before each use, and the exact sums take over when
//! the check fails.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{precondition, Error, Result};
use crate::export::CsvTable;
use crate::hp::{CompensatedSum, HpReal, PrecisionContext};
use crate::outcome::{decade_checkpoints, Diagnostic, ErrorKind, SeriesResult};
use crate::quadrature::{periodic_mean_refined, tanh_sinh};

/// Largest index for which the exact binomial sum is offered.
pub const J_EXACT_MAX: u64 = 10_000;
/// Indices checked against the exact sum before the recurrence is trusted.
pub const RECURRENCE_VALIDATION_MAX: u64 = 100;
/// Width of the windows around the singularities of `log(1 - cos t)` that
/// are integrated analytically.
pub const LOG_COS_DELTA: f64 = 1e-3;

/// Where the values of an [`AveragingSequence`] came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSource {
    Recurrence,
    /// The recurrence failed validation; values are exact binomial sums.
    ExactFallback { diagnostic: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct AveragingSequence {
    pub n_max: u64,
    pub j: Vec<HpReal>,
    pub i: Vec<HpReal>,
    pub source: SequenceSource,
}

/// `J_n = Σ_k C(n,2k) C(2k,k) / 16^k` as an exact rational.
pub fn j_exact(n: u64) -> Result<Rational> {
    if n > J_EXACT_MAX {
        return precondition("J_exact", format!("n <= {J_EXACT_MAX}"));
    }
    // t_k = C(n,2k) C(2k,k); t_{k+1} = t_k (n-2k)(n-2k-1)/(k+1)^2.
    // Accumulate Σ t_k 16^{K-k} over the common denominator 16^K.
    let top = n / 2;
    let mut t = Integer::from(1);
    let mut numer = Integer::new();
    for k in 0..=top {
        numer <<= 4;
        numer += &t;
        let m = n - 2 * k;
        if m >= 2 {
            t *= m;
            t *= m - 1;
            t.div_exact_u_mut(((k + 1) * (k + 1)) as u32);
        }
    }
    let denom = Integer::from(1) << (4 * top as u32);
    Ok(Rational::from((numer, denom)))
}

/// One step of the recurrence: `J_{n+1}` from `J_n` and `J_{n-1}`.
fn j_step(n: u64, j_n: &Float, j_prev: &Float, bits: u32) -> Float {
    let a = Float::with_val(bits, j_n * (2 * n + 1));
    let b = Float::with_val(bits, j_prev * n) * 3u32 / 4u32;
    (a - b) / (n + 1)
}

/// Relative disagreement between the recurrence and the exact sums for
/// `n <= RECURRENCE_VALIDATION_MAX`, or a diagnostic naming the first index
/// that misses `2^-(mantissa_bits - 8)`.
fn validate_recurrence<S>(step: S, ctx: &PrecisionContext) -> std::result::Result<(), String>
where
    S: Fn(u64, &Float, &Float, u32) -> Float,
{
    let bits = ctx.working_bits();
    let tol = ctx.tolerance(8);
    let mut prev = Float::with_val(bits, 1u32);
    let mut cur = Float::with_val(bits, 1u32);
    for n in 0..=RECURRENCE_VALIDATION_MAX {
        let value = match n {
            0 | 1 => Float::with_val(bits, 1u32),
            _ => {
                let next = step(n - 1, &cur, &prev, bits);
                prev = std::mem::replace(&mut cur, next);
                cur.clone()
            }
        };
        let exact = Float::with_val(bits, &j_exact(n).expect("n within exact range"));
        let rel = Float::with_val(bits, &value - &exact).abs() / &exact;
        if rel >= tol {
            return Err(format!(
                "recurrence for J_n disagrees with the binomial sum at n = {n}: relative error {}",
                rel.to_f64()
            ));
        }
    }
    Ok(())
}

/// `J_0..=J_{n_max}` and `I_0..=I_{n_max}` at working precision.
pub fn j_recurrence(n_max: u64, ctx: &PrecisionContext) -> Result<AveragingSequence> {
    build_sequence(n_max, ctx, j_step)
}

fn build_sequence<S>(n_max: u64, ctx: &PrecisionContext, step: S) -> Result<AveragingSequence>
where
    S: Fn(u64, &Float, &Float, u32) -> Float,
{
    let bits = ctx.working_bits();
    let source = match validate_recurrence(&step, ctx) {
        Ok(()) => SequenceSource::Recurrence,
        Err(diagnostic) if n_max <= J_EXACT_MAX => SequenceSource::ExactFallback { diagnostic },
        Err(diagnostic) => return Err(Error::Validation(diagnostic)),
    };
    let mut j = Vec::with_capacity(n_max as usize + 1);
    match source {
        SequenceSource::Recurrence => {
            for n in 0..=n_max {
                let v = if n < 2 {
                    Float::with_val(bits, 1u32)
                } else {
                    step(n - 1, &j[n as usize - 1], &j[n as usize - 2], bits)
                };
                j.push(v);
            }
        }
        SequenceSource::ExactFallback { .. } => {
            for n in 0..=n_max {
                j.push(Float::with_val(bits, &j_exact(n)?));
            }
        }
    }
    let two_thirds = Float::with_val(bits, 2u32) / 3u32;
    let mut scale = Float::with_val(bits, 1u32);
    let mut i = Vec::with_capacity(j.len());
    for v in &j {
        i.push(HpReal::new(Float::with_val(bits, v * &scale)));
        scale *= &two_thirds;
    }
    Ok(AveragingSequence {
        n_max,
        j: j.into_iter().map(HpReal::new).collect(),
        i,
        source,
    })
}

/// Streams `(n, I_n)` for `n = 0, 1, 2, ...` from the recurrence
/// `I_{n+1} = (2(2n+1) I_n - n I_{n-1}) / (3(n+1))`.
///
/// This is the `J` recurrence rescaled by `(2/3)^n`. It computes the dominant
/// solution, so it is forward stable. Call [`i_stream`] to get one that has
/// passed validation.
#[derive(Clone, Debug)]
pub struct IStream {
    n: u64,
    prev: Float,
    cur: Float,
}

impl IStream {
    fn unchecked(bits: u32) -> Self {
        Self {
            n: 0,
            prev: Float::with_val(bits, 1u32),
            cur: Float::with_val(bits, 1u32),
        }
    }
}

impl Iterator for IStream {
    type Item = (u64, Float);

    fn next(&mut self) -> Option<Self::Item> {
        let bits = self.cur.prec();
        let n = self.n;
        let value = match n {
            0 => Float::with_val(bits, 1u32),
            1 => {
                self.cur = Float::with_val(bits, 2u32) / 3u32;
                self.cur.clone()
            }
            _ => {
                let m = n - 1;
                let a = Float::with_val(bits, &self.cur * (2 * (2 * m + 1)));
                let b = Float::with_val(bits, &self.prev * m);
                let next = (a - b) / (3 * (m + 1));
                self.prev = std::mem::replace(&mut self.cur, next);
                self.cur.clone()
            }
        };
        self.n += 1;
        Some((n, value))
    }
}

/// Validated stream of `I_n`; fails if the recurrence does not reproduce the
/// exact sums.
pub fn i_stream(ctx: &PrecisionContext) -> Result<IStream> {
    validate_recurrence(j_step, ctx).map_err(Error::Validation)?;
    Ok(IStream::unchecked(ctx.working_bits()))
}

/// `I_n` as the mean of `((2 + sin θ)/3)^n` by the doubling trapezoid rule,
/// refined until successive values agree to `2^-(mantissa_bits - 16)`.
pub fn i_quadrature(n: u64, ctx: &PrecisionContext) -> HpReal {
    let bits = ctx.working_bits();
    if n == 0 {
        return HpReal::new(Float::with_val(bits, 1u32));
    }
    let tol = ctx.tolerance(16);
    // the integrand has about n/2 significant harmonics
    let start = (n / 2 + 8).next_power_of_two();
    let (mean, _) = periodic_mean_refined(
        |theta| {
            let base = (Float::with_val(bits, theta.sin_ref()) + 2u32) / 3u32;
            base.pow(n as u32)
        },
        start,
        &tol,
        bits,
    );
    HpReal::new(mean)
}

/// Partial sum `M_N = Σ_{n=1}^N I_n/n`.
///
/// The error estimate models the tail as `Σ_{n>N} ĉ n^{-3/2} ≈ 2ĉ/√N`, with
/// `ĉ` the limit of `I_n √n` extrapolated from `n = N` and `n = ⌊N/2⌋`
/// assuming a `1/n` correction. It is heuristic and flagged as such.
pub fn m_partial(n_terms: u64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    if n_terms == 0 {
        return precondition("M_partial", "N >= 1");
    }
    let bits = ctx.working_bits();
    let values: Box<dyn Iterator<Item = (u64, Float)>> = match i_stream(ctx) {
        Ok(stream) => Box::new(stream),
        Err(_) if n_terms <= J_EXACT_MAX => {
            let seq = j_recurrence(n_terms, ctx)?;
            Box::new(seq.i.into_iter().enumerate().map(|(n, v)| (n as u64, v.into_float())))
        }
        Err(e) => return Err(e),
    };
    let half = n_terms / 2;
    let checkpoints_at = decade_checkpoints(n_terms);
    let mut checkpoints = Vec::with_capacity(checkpoints_at.len());
    let mut next_cp = 0;
    let mut acc = CompensatedSum::new(bits);
    let mut i_half = Float::new(bits);
    let mut i_last = Float::new(bits);
    for (n, i_n) in values.skip(1).take(n_terms as usize) {
        acc.add(&Float::with_val(bits, &i_n / n));
        if n == half {
            i_half = i_n.clone();
        }
        if next_cp < checkpoints_at.len() && n == checkpoints_at[next_cp] {
            checkpoints.push((n, HpReal::new(acc.value())));
            next_cp += 1;
        }
        if n == n_terms {
            i_last = i_n;
        }
    }
    let a_last = Float::with_val(bits, &i_last * Float::with_val(bits, n_terms).sqrt());
    let c_hat = if half == 0 {
        a_last.clone()
    } else {
        let a_half = Float::with_val(bits, &i_half * Float::with_val(bits, half).sqrt());
        (Float::with_val(bits, &a_last * n_terms) - Float::with_val(bits, &a_half * half))
            / (n_terms - half)
    };
    let error = Float::with_val(bits, &c_hat * 2u32) / Float::with_val(bits, n_terms).sqrt();
    Ok(SeriesResult {
        value: HpReal::new(acc.value()),
        truncation_n: n_terms,
        error_estimate: HpReal::new(error),
        error_kind: ErrorKind::HeuristicExtrapolation,
        checkpoints,
        diagnostics: vec![
            Diagnostic {
                name: "fitted_constant".into(),
                value: HpReal::new(c_hat),
            },
            Diagnostic {
                name: "I_N_sqrt_N".into(),
                value: HpReal::new(a_last),
            },
        ],
        method: "recurrence + compensated summation".into(),
        precision_bits: ctx.mantissa_bits(),
    })
}

/// `∫_0^δ log(1 - cos t) dt` from
/// `log(1 - cos t) = 2 log t - log 2 - t²/12 - t⁴/1440 - t⁶/90720 - ...`.
fn log_one_minus_cos_end(delta: &Float, bits: u32) -> Float {
    let ln_d = Float::with_val(bits, delta.ln_ref());
    let ln2 = Float::with_val(bits, 2u32).ln();
    let d3 = Float::with_val(bits, delta.pow(3u32));
    let d5 = Float::with_val(bits, delta.pow(5u32));
    let d7 = Float::with_val(bits, delta.pow(7u32));
    let mut v = Float::with_val(bits, delta * ((ln_d - 1u32) * 2u32 - ln2));
    v -= d3 / 36u32;
    v -= d5 / 7200u32;
    v -= d7 / 635_040u32;
    v
}

/// `(1/2π) ∫_0^{2π} log(1 - cos t) dt`, which equals `-log 2`.
///
/// The windows `[0, δ]` and `[2π-δ, 2π]` around the logarithmic
/// singularities use the series expansion; the rest is tanh-sinh with the
/// integrand written as `log(2 sin²(t/2))` to avoid cancellation.
pub fn log_one_minus_cos_mean(ctx: &PrecisionContext) -> HpReal {
    let bits = ctx.working_bits();
    let delta = ctx.float(LOG_COS_DELTA);
    let two_pi = Float::with_val(bits, ctx.two_pi());
    let tol = ctx.tolerance(16);
    let ln2 = Float::with_val(bits, 2u32).ln();
    let middle = tanh_sinh(
        |t| {
            let s = Float::with_val(bits, t / 2u32).sin();
            Float::with_val(bits, s.square_ref()).ln() + &ln2
        },
        &delta,
        &Float::with_val(bits, &two_pi - &delta),
        &tol,
        bits,
    );
    let ends = log_one_minus_cos_end(&delta, bits) * 2u32;
    HpReal::new((middle + ends) / two_pi)
}

/// The same mean computed from `log(1 + cos t)`, whose singularity sits at
/// `t = π`; the window `[π-δ, π+δ]` uses the series expansion.
pub fn log_one_plus_cos_mean(ctx: &PrecisionContext) -> HpReal {
    let bits = ctx.working_bits();
    let delta = ctx.float(LOG_COS_DELTA);
    let pi = Float::with_val(bits, ctx.pi());
    let two_pi = Float::with_val(bits, ctx.two_pi());
    let tol = ctx.tolerance(16);
    let ln2 = Float::with_val(bits, 2u32).ln();
    let integrand = |t: &Float| {
        let c = Float::with_val(bits, t / 2u32).cos();
        Float::with_val(bits, c.square_ref()).ln() + &ln2
    };
    let left = tanh_sinh(
        integrand,
        &Float::new(bits),
        &Float::with_val(bits, &pi - &delta),
        &tol,
        bits,
    );
    let right = tanh_sinh(
        integrand,
        &Float::with_val(bits, &pi + &delta),
        &two_pi,
        &tol,
        bits,
    );
    let window = log_one_minus_cos_end(&delta, bits) * 2u32;
    HpReal::new((left + right + window) / two_pi)
}

/// Truncated cosine series `-log 2 - 2 Σ_{k<=K} cos(kt)/k` of `log(1 - cos t)`.
pub fn log_one_minus_cos_fourier(t: &Float, k_max: u64, ctx: &PrecisionContext) -> HpReal {
    let bits = ctx.working_bits();
    let mut acc = CompensatedSum::new(bits);
    for k in 1..=k_max {
        let c = Float::with_val(bits, t * k).cos();
        acc.add(&(c / k));
    }
    let ln2 = Float::with_val(bits, 2u32).ln();
    HpReal::new(-(acc.value() * 2u32) - ln2)
}

/// Rows `(n, J_n, I_n, I_n/n, M_n)` for `n = 0..=n_max`; `I_n/n` and `M_n`
/// are left empty at `n = 0`.
pub fn averaging_table(n_max: u64, ctx: &PrecisionContext) -> Result<CsvTable> {
    let bits = ctx.working_bits();
    let seq = j_recurrence(n_max, ctx)?;
    let mut table = CsvTable::new(&["n", "J_n", "I_n", "I_n_over_n", "M_n"]);
    let mut acc = CompensatedSum::new(bits);
    for (n, (j, i)) in seq.j.iter().zip(&seq.i).enumerate() {
        let (ratio, running) = if n == 0 {
            (String::new(), String::new())
        } else {
            let r = HpReal::new(Float::with_val(bits, i.as_float() / n as u64));
            acc.add(r.as_float());
            (r.to_decimal(), HpReal::new(acc.value()).to_decimal())
        };
        table.push(vec![n.to_string(), j.to_decimal(), i.to_decimal(), ratio, running]);
    }
    Ok(table)
}
