//! The series `S = Σ f(n)`, `f(n) = (1/n) ((2 + sin n)/3)^n`, its partial
//! sums (also with `sin(nα)` in place of `sin n`), the split `S_N = M_N + R_N`
//! into the averaged part and the remainder, and the remainder's split by
//! whether `sin n` is close to 1.

use rug::Float;
use serde::Serialize;

use crate::averaging::i_stream;
use crate::diophantine::DEFAULT_WILD_DELTA;
use crate::error::{precondition, Result};
use crate::export::CsvTable;
use crate::hp::{
    angle_stream, sin_cos_int, sin_cos_multiple, sin_stream, CompensatedSum, HpReal, PrecisionContext,
    DEFAULT_RESYNC_INTERVAL,
};
use crate::outcome::{decade_checkpoints, Diagnostic, ErrorKind, SeriesResult};
use crate::special::eval_ei;

/// Largest `N` for partial sums at the default precision.
pub const PARTIAL_SUM_N_MAX: u64 = 10_000_000;
/// Largest `N` for the decomposition and the remainder split.
pub const DECOMPOSE_N_MAX: u64 = 1_000_000;
/// Thresholds used to fit the shape of the non-wild remainder.
pub const REMAINDER_FIT_DELTAS: [f64; 4] = [0.1, 0.03, 0.01, 0.003];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Tame,
    Wild,
}

#[derive(Clone, Debug, Serialize)]
pub struct TermRecord {
    pub n: u64,
    pub sin_n: HpReal,
    /// `log(1 + sin n / 2)`.
    pub l_n: HpReal,
    pub f_n: HpReal,
    pub classification: Classification,
}

/// `f(n)` and its ingredients, classified against the default threshold.
pub fn term(n: u64, ctx: &PrecisionContext) -> Result<TermRecord> {
    if n == 0 {
        return precondition("term", "n >= 1");
    }
    let (sin_n, _) = sin_cos_int(n, ctx)?;
    let delta = ctx.float(DEFAULT_WILD_DELTA);
    Ok(term_from_sin(n, sin_n, &delta, ctx))
}

/// [`term`] with a supplied value standing in for `sin n`.
pub fn term_from_sin(n: u64, sin_n: Float, delta: &Float, ctx: &PrecisionContext) -> TermRecord {
    let bits = ctx.working_bits();
    let l_n = (Float::with_val(bits, &sin_n / 2u32) + 1u32).ln();
    let f_n = f_exact(n, &sin_n, bits);
    let wild = sin_n > Float::with_val(bits, 1u32) - delta;
    TermRecord {
        n,
        sin_n: HpReal::new(sin_n),
        l_n: HpReal::new(l_n),
        f_n: HpReal::new(f_n),
        classification: if wild {
            Classification::Wild
        } else {
            Classification::Tame
        },
    }
}

/// `exp(n log((2 + s)/3)) / n`.
fn f_exact(n: u64, sin_n: &Float, bits: u32) -> Float {
    let log_base = ((Float::with_val(bits, sin_n) + 2u32) / 3u32).ln();
    (log_base * n).exp() / n
}

/// `f(n)`, or zero when a double-precision estimate puts it below
/// `2^-(bits + 64)`. Terms that small cannot move a sum of size one, and
/// skipping their `exp`/`log` is what keeps long sums fast.
fn f_fast(n: u64, sin_n: &Float, bits: u32) -> Float {
    let s = sin_n.to_f64();
    let log_f = n as f64 * ((2.0 + s) / 3.0).ln() - (n as f64).ln();
    if log_f < -f64::from(bits + 64) * std::f64::consts::LN_2 {
        Float::new(bits)
    } else {
        f_exact(n, sin_n, bits)
    }
}

/// How `sin(nα)` is produced for a pass over `n = 1..=N`.
#[derive(Clone, Debug, Default)]
pub struct SumOptions {
    /// Rotation angle; `None` means `α = 1`, served by integer reduction.
    pub alpha: Option<Float>,
    /// Evaluate every sine directly instead of by the rotation stream.
    pub exact: bool,
    /// Where to record running sums; defaults to decades and `N`.
    pub checkpoints: Option<Vec<u64>>,
}

/// Calls `visit(n, sin(nα))` for `n = 1..=N` in order.
fn for_each_sine<V>(n_max: u64, opts: &SumOptions, ctx: &PrecisionContext, mut visit: V) -> Result<()>
where
    V: FnMut(u64, Float),
{
    let alpha = opts.alpha.as_ref().filter(|a| **a != 1);
    match (alpha, opts.exact) {
        (None, false) => {
            for sc in sin_stream(1, n_max, DEFAULT_RESYNC_INTERVAL, ctx)? {
                visit(sc.n, sc.sin);
            }
        }
        (None, true) => {
            for n in 1..=n_max {
                visit(n, sin_cos_int(n, ctx)?.0);
            }
        }
        (Some(a), false) => {
            for sc in angle_stream(a, 1, n_max, DEFAULT_RESYNC_INTERVAL, ctx)? {
                visit(sc.n, sc.sin);
            }
        }
        (Some(a), true) => {
            let a = Float::with_val(ctx.working_bits(), a);
            for n in 1..=n_max {
                visit(n, sin_cos_multiple(n, &a, ctx).0);
            }
        }
    }
    Ok(())
}

fn checkpoint_list(n_max: u64, opts: &SumOptions) -> Result<Vec<u64>> {
    match &opts.checkpoints {
        None => Ok(decade_checkpoints(n_max)),
        Some(list) => {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return precondition("checkpoints", "strictly ascending");
            }
            if list.iter().any(|&c| c == 0 || c > n_max) {
                return precondition("checkpoints", format!("each in 1..={n_max}"));
            }
            Ok(list.clone())
        }
    }
}

/// `S_N = Σ_{n<=N} f(n)` with default options.
pub fn partial_sum_s(n_max: u64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    partial_sum_s_with(n_max, &SumOptions::default(), ctx)
}

/// `S_N(α) = Σ_{n<=N} (1/n) ((2 + sin nα)/3)^n`.
///
/// The error estimate is the Laplace-method size `2√(3/(2π))/√N` of the
/// averaged tail `Σ_{n>N} I_n/n`; it is a heuristic, not a bound.
pub fn partial_sum_s_with(n_max: u64, opts: &SumOptions, ctx: &PrecisionContext) -> Result<SeriesResult> {
    if n_max == 0 || n_max > PARTIAL_SUM_N_MAX {
        return precondition("partial_sum_S", format!("1 <= N <= {PARTIAL_SUM_N_MAX}"));
    }
    let bits = ctx.working_bits();
    let marks = checkpoint_list(n_max, opts)?;
    let mut next = 0;
    let mut checkpoints = Vec::with_capacity(marks.len());
    let mut acc = CompensatedSum::new(bits);
    for_each_sine(n_max, opts, ctx, |n, s| {
        acc.add(&f_fast(n, &s, bits));
        if next < marks.len() && marks[next] == n {
            checkpoints.push((n, HpReal::new(acc.value())));
            next += 1;
        }
    })?;
    let laplace = (Float::with_val(bits, 3u32) / Float::with_val(bits, ctx.two_pi())).sqrt();
    let error = Float::with_val(bits, &laplace * 2u32) / Float::with_val(bits, n_max).sqrt();
    let method = match (&opts.alpha, opts.exact) {
        (Some(a), _) if *a != 1 => "rotation by alpha",
        (_, true) => "direct reduction per term",
        _ => "sine stream",
    };
    let mut diagnostics = Vec::new();
    if let Some(a) = &opts.alpha {
        diagnostics.push(Diagnostic {
            name: "alpha".into(),
            value: HpReal::new(Float::with_val(bits, a)),
        });
    }
    Ok(SeriesResult {
        value: HpReal::new(acc.value()),
        truncation_n: n_max,
        error_estimate: HpReal::new(error),
        error_kind: ErrorKind::HeuristicExtrapolation,
        checkpoints,
        diagnostics,
        method: method.into(),
        precision_bits: ctx.mantissa_bits(),
    })
}

/// Running values of the three sums at one `N`.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCheckpoint {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "S_N")]
    pub s_n: HpReal,
    #[serde(rename = "M_N")]
    pub m_n: HpReal,
    #[serde(rename = "R_N")]
    pub r_n: HpReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "S_N")]
    pub s_n: HpReal,
    #[serde(rename = "M_N")]
    pub m_n: HpReal,
    #[serde(rename = "R_N")]
    pub r_n: HpReal,
    /// `Ei(log 3)`.
    #[serde(rename = "target_S")]
    pub target_s: HpReal,
    /// `Ei(log 3) - log 6`.
    #[serde(rename = "target_R")]
    pub target_r: HpReal,
    /// `target_S - S_N`.
    #[serde(rename = "gap_S")]
    pub gap_s: HpReal,
    /// `target_R - R_N`.
    #[serde(rename = "gap_R")]
    pub gap_r: HpReal,
    pub precision_bits: u32,
    pub checkpoints: Vec<DecompositionCheckpoint>,
}

/// `Ei(log 3)` and `Ei(log 3) - log 6`.
pub fn targets(ctx: &PrecisionContext) -> Result<(HpReal, HpReal)> {
    let bits = ctx.working_bits();
    let ei = eval_ei(&Float::with_val(bits, 3u32).ln(), ctx)?.value;
    let r = Float::with_val(bits, ei.as_float() - Float::with_val(bits, 6u32).ln());
    Ok((ei, HpReal::new(r)))
}

/// `S_N`, `M_N = Σ I_n/n` and `R_N = Σ (f(n) - I_n/n)` in one pass.
///
/// All three are compensated sums over the same terms, with `R_N` taken
/// term by term rather than as `S_N - M_N`, so `S_N = M_N + R_N` holds to
/// rounding without cancellation in `R_N`.
pub fn decompose(n_max: u64, ctx: &PrecisionContext) -> Result<DecompositionReport> {
    decompose_at(n_max, &decade_checkpoints(n_max), ctx)
}

pub fn decompose_at(n_max: u64, marks: &[u64], ctx: &PrecisionContext) -> Result<DecompositionReport> {
    if n_max == 0 || n_max > DECOMPOSE_N_MAX {
        return precondition("decompose", format!("1 <= N <= {DECOMPOSE_N_MAX}"));
    }
    let opts = SumOptions {
        checkpoints: Some(marks.to_vec()),
        ..SumOptions::default()
    };
    let marks = checkpoint_list(n_max, &opts)?;
    let bits = ctx.working_bits();
    let mut averages = i_stream(ctx)?.skip(1);
    let mut s = CompensatedSum::new(bits);
    let mut m = CompensatedSum::new(bits);
    let mut r = CompensatedSum::new(bits);
    let mut next = 0;
    let mut checkpoints = Vec::with_capacity(marks.len());
    for_each_sine(n_max, &SumOptions::default(), ctx, |n, sin_n| {
        let (_, i_n) = averages.next().expect("stream is infinite");
        let f = f_fast(n, &sin_n, bits);
        let avg = i_n / n;
        r.add(&Float::with_val(bits, &f - &avg));
        s.add(&f);
        m.add(&avg);
        if next < marks.len() && marks[next] == n {
            checkpoints.push(DecompositionCheckpoint {
                n,
                s_n: HpReal::new(s.value()),
                m_n: HpReal::new(m.value()),
                r_n: HpReal::new(r.value()),
            });
            next += 1;
        }
    })?;
    let (target_s, target_r) = targets(ctx)?;
    let s_n = s.value();
    let m_n = m.value();
    let r_n = r.value();
    Ok(DecompositionReport {
        n: n_max,
        gap_s: HpReal::new(Float::with_val(bits, target_s.as_float() - &s_n)),
        gap_r: HpReal::new(Float::with_val(bits, target_r.as_float() - &r_n)),
        s_n: HpReal::new(s_n),
        m_n: HpReal::new(m_n),
        r_n: HpReal::new(r_n),
        target_s,
        target_r,
        precision_bits: ctx.mantissa_bits(),
        checkpoints,
    })
}

/// Remainder split at one threshold: `R_δ^+` over `sin n > 1 - δ`, `R_δ^-`
/// over the rest.
#[derive(Clone, Debug, Serialize)]
pub struct RemainderSplit {
    pub delta: HpReal,
    #[serde(rename = "N")]
    pub n: u64,
    pub r_plus: HpReal,
    pub r_minus: HpReal,
    /// `r_plus + r_minus`.
    pub r_n: HpReal,
}

fn check_split_delta(delta: &Float) -> Result<()> {
    if !delta.is_finite() || *delta <= 0 || *delta > 2 {
        return precondition("remainder_split", "0 < delta <= 2");
    }
    Ok(())
}

/// `(R_δ^+, R_δ^-)` summed to `N`.
pub fn remainder_split(delta: &Float, n_max: u64, ctx: &PrecisionContext) -> Result<RemainderSplit> {
    Ok(remainder_split_many(std::slice::from_ref(delta), n_max, ctx)?.remove(0))
}

/// [`remainder_split`] for several thresholds in one pass.
pub fn remainder_split_many(deltas: &[Float], n_max: u64, ctx: &PrecisionContext) -> Result<Vec<RemainderSplit>> {
    if n_max == 0 || n_max > DECOMPOSE_N_MAX {
        return precondition("remainder_split", format!("1 <= N <= {DECOMPOSE_N_MAX}"));
    }
    for d in deltas {
        check_split_delta(d)?;
    }
    let bits = ctx.working_bits();
    let thresholds: Vec<Float> = deltas
        .iter()
        .map(|d| Float::with_val(bits, 1u32) - d)
        .collect();
    let mut plus: Vec<CompensatedSum> = deltas.iter().map(|_| CompensatedSum::new(bits)).collect();
    let mut minus = plus.clone();
    let mut averages = i_stream(ctx)?.skip(1);
    for_each_sine(n_max, &SumOptions::default(), ctx, |n, sin_n| {
        let (_, i_n) = averages.next().expect("stream is infinite");
        let term = f_fast(n, &sin_n, bits) - i_n / n;
        for (idx, t) in thresholds.iter().enumerate() {
            if sin_n > *t {
                plus[idx].add(&term);
            } else {
                minus[idx].add(&term);
            }
        }
    })?;
    Ok(deltas
        .iter()
        .zip(plus.iter().zip(&minus))
        .map(|(d, (p, m))| {
            let (p, m) = (p.value(), m.value());
            RemainderSplit {
                delta: HpReal::new(Float::with_val(bits, d)),
                n: n_max,
                r_n: HpReal::new(Float::with_val(bits, &p + &m)),
                r_plus: HpReal::new(p),
                r_minus: HpReal::new(m),
            }
        })
        .collect())
}

/// `|R_δ^-|` against the shape `δ^{1/2} log(1/δ)` at several `δ`.
#[derive(Clone, Debug, Serialize)]
pub struct RemainderShapeFit {
    pub splits: Vec<RemainderSplit>,
    /// `|R_δ^-| / (δ^{1/2} log(1/δ))` per threshold.
    pub ratios: Vec<HpReal>,
    /// Smallest constant for which the shape bounds every observed `|R_δ^-|`.
    pub fitted_c: HpReal,
}

pub fn remainder_shape_fit(deltas: &[f64], n_max: u64, ctx: &PrecisionContext) -> Result<RemainderShapeFit> {
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return precondition("remainder_shape_fit", "0 < delta < 1");
    }
    let bits = ctx.working_bits();
    let ds: Vec<Float> = deltas.iter().map(|&d| ctx.float(d)).collect();
    let splits = remainder_split_many(&ds, n_max, ctx)?;
    let ratios: Vec<HpReal> = splits
        .iter()
        .map(|sp| {
            let d = sp.delta.as_float();
            let shape = Float::with_val(bits, d.sqrt_ref()) * (-Float::with_val(bits, d.ln_ref()));
            HpReal::new(Float::with_val(bits, sp.r_minus.as_float().abs_ref()) / shape)
        })
        .collect();
    let fitted = ratios
        .iter()
        .map(|r| r.as_float().clone())
        .fold(Float::new(bits), |a, b| a.max(&b).clone());
    Ok(RemainderShapeFit {
        splits,
        ratios,
        fitted_c: HpReal::new(fitted),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "S_N")]
    pub s_n: HpReal,
    /// `Ei(log 3) - S_N`.
    pub gap: HpReal,
}

/// `(N, S_N, Ei(log 3) - S_N)` at ascending checkpoints, in one pass.
pub fn convergence_trace(checkpoints: &[u64], ctx: &PrecisionContext) -> Result<Vec<TraceRow>> {
    let Some(&last) = checkpoints.last() else {
        return Ok(Vec::new());
    };
    let opts = SumOptions {
        checkpoints: Some(checkpoints.to_vec()),
        ..SumOptions::default()
    };
    let sums = partial_sum_s_with(last, &opts, ctx)?;
    let (target, _) = targets(ctx)?;
    let bits = ctx.working_bits();
    Ok(sums
        .checkpoints
        .into_iter()
        .map(|(n, s)| TraceRow {
            n,
            gap: HpReal::new(Float::with_val(bits, target.as_float() - s.as_float())),
            s_n: s,
        })
        .collect())
}

pub fn trace_table(rows: &[TraceRow]) -> CsvTable {
    let mut table = CsvTable::new(&["N", "S_N", "gap"]);
    for r in rows {
        table.push(vec![r.n.to_string(), r.s_n.to_decimal(), r.gap.to_decimal()]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    /// Oracle: f64 partial sums with the sine of the exact integer.
    fn s_f64(n_max: u64) -> f64 {
        (1..=n_max)
            .map(|n| {
                let s = Float::with_val(128, n).sin().to_f64();
                ((2.0 + s) / 3.0).powf(n as f64) / n as f64
            })
            .sum()
    }

    #[test]
    fn first_term() {
        let c = ctx();
        let t = term(1, &c).unwrap();
        let want = (2.0 + 1f64.sin()) / 3.0;
        assert!((t.f_n.to_f64() - want).abs() < 1e-15);
        assert!(t.f_n.to_decimal().starts_with("0.94715699"));
        assert_eq!(t.classification, Classification::Tame);
        assert!(term(0, &c).is_err());
    }

    #[test]
    fn forced_zero_sine_gives_geometric_term() {
        let c = ctx();
        let bits = c.working_bits();
        for n in [1u64, 7, 40] {
            let t = term_from_sin(n, c.zero(), &c.float(0.01), &c);
            assert!(t.l_n.as_float().is_zero());
            let want = Float::with_val(bits, Float::with_val(bits, 2u32) / 3u32).pow(n as u32) / n;
            assert!(Float::with_val(bits, t.f_n.as_float() - &want).abs() < c.tolerance(8) * &want);
        }
    }

    #[test]
    fn term_invariants_on_stream_up_to_a_million() {
        // 1 + sin n / 2 never reaches 2, and L stays in [-log 2, log 3/2]
        let c = PrecisionContext::with_mantissa_bits(64).unwrap();
        let bits = c.working_bits();
        let lo = -Float::with_val(bits, 2u32).ln();
        let hi = (Float::with_val(bits, 3u32) / 2u32).ln();
        for sc in sin_stream(1, 1_000_000, DEFAULT_RESYNC_INTERVAL, &c).unwrap() {
            let base = Float::with_val(bits, &sc.sin / 2u32) + 1u32;
            assert!(base < 2u32 && base > 0.5);
            if sc.n % 997 == 0 {
                let l = base.ln();
                assert!(l >= lo && l <= hi);
            }
        }
    }

    #[test]
    fn wild_classification_follows_threshold() {
        let c = ctx();
        // sin 33 ≈ 0.99991
        let t = term(33, &c).unwrap();
        assert_eq!(t.classification, Classification::Wild);
    }

    #[test]
    fn partial_sums_against_f64_oracle() {
        let c = ctx();
        for n in [1u64, 10, 1000] {
            let s = partial_sum_s(n, &c).unwrap();
            assert!((s.value.to_f64() - s_f64(n)).abs() < 1e-13, "N = {n}");
        }
        let one = partial_sum_s(1, &c).unwrap();
        assert_eq!(one.value, term(1, &c).unwrap().f_n);
        assert!(partial_sum_s(0, &c).is_err());
    }

    #[test]
    fn alpha_one_is_bitwise_default() {
        let c = ctx();
        let plain = partial_sum_s(5000, &c).unwrap();
        let opts = SumOptions {
            alpha: Some(c.int(1)),
            ..SumOptions::default()
        };
        let with_alpha = partial_sum_s_with(5000, &opts, &c).unwrap();
        assert_eq!(plain.value, with_alpha.value);
        assert_eq!(plain.checkpoints, with_alpha.checkpoints);
    }

    #[test]
    fn other_alpha_matches_direct_evaluation() {
        let c = ctx();
        let bits = c.working_bits();
        let alpha = Float::with_val(bits, 2u32).sqrt();
        let stream = partial_sum_s_with(
            3000,
            &SumOptions {
                alpha: Some(alpha.clone()),
                ..SumOptions::default()
            },
            &c,
        )
        .unwrap();
        let direct = partial_sum_s_with(
            3000,
            &SumOptions {
                alpha: Some(alpha),
                exact: true,
                checkpoints: None,
            },
            &c,
        )
        .unwrap();
        let diff = Float::with_val(bits, stream.value.as_float() - direct.value.as_float()).abs();
        assert!(diff < c.tolerance(12));
    }

    #[test]
    fn stream_and_exact_paths_agree() {
        let c = ctx();
        let bits = c.working_bits();
        let fast = partial_sum_s(100_000, &c).unwrap();
        let exact = partial_sum_s_with(
            100_000,
            &SumOptions {
                exact: true,
                ..SumOptions::default()
            },
            &c,
        )
        .unwrap();
        let diff = Float::with_val(bits, fast.value.as_float() - exact.value.as_float()).abs();
        assert!(diff < c.tolerance(12), "{}", diff.to_f64());
    }

    #[test]
    fn checkpoint_validation() {
        let c = ctx();
        let bad = SumOptions {
            checkpoints: Some(vec![10, 5]),
            ..SumOptions::default()
        };
        assert!(partial_sum_s_with(20, &bad, &c).is_err());
        let beyond = SumOptions {
            checkpoints: Some(vec![10, 50]),
            ..SumOptions::default()
        };
        assert!(partial_sum_s_with(20, &beyond, &c).is_err());
    }

    #[test]
    fn decomposition_first_term() {
        let c = ctx();
        let bits = c.working_bits();
        let d = decompose(1, &c).unwrap();
        let two_thirds = Float::with_val(bits, 2u32) / 3u32;
        assert!(Float::with_val(bits, d.m_n.as_float() - &two_thirds).abs() < c.tolerance(4));
        let f1 = term(1, &c).unwrap().f_n;
        let r1 = Float::with_val(bits, f1.as_float() - &two_thirds);
        assert!(Float::with_val(bits, d.r_n.as_float() - &r1).abs() < c.tolerance(4));
    }

    #[test]
    fn decomposition_identity_at_checkpoints() {
        let c = ctx();
        let bits = c.working_bits();
        let d = decompose_at(100_000, &[10, 1000, 100_000], &c).unwrap();
        assert_eq!(d.checkpoints.len(), 3);
        for cp in &d.checkpoints {
            let split = Float::with_val(bits, cp.m_n.as_float() + cp.r_n.as_float());
            let gap = Float::with_val(bits, cp.s_n.as_float() - &split).abs();
            assert!(gap < c.tolerance(20), "N = {}", cp.n);
        }
        let json = crate::export::to_json(&d);
        for key in ["\"N\"", "\"S_N\"", "\"M_N\"", "\"R_N\"", "\"target_S\"", "\"gap_R\"", "\"precision_bits\""] {
            assert!(json.contains(key), "{key}");
        }
    }

    #[test]
    fn remainder_split_partitions() {
        let c = ctx();
        let bits = c.working_bits();
        let whole = decompose(2000, &c).unwrap().r_n;
        let everything = remainder_split(&c.int(2), 2000, &c).unwrap();
        assert!(everything.r_minus.as_float().is_zero());
        let diff = Float::with_val(bits, everything.r_plus.as_float() - whole.as_float()).abs();
        assert!(diff < c.tolerance(16));
        let tiny = remainder_split(&c.float(1e-9), 20, &c).unwrap();
        assert!(tiny.r_plus.as_float().is_zero());
        let sp = remainder_split(&c.float(0.01), 2000, &c).unwrap();
        let sum = Float::with_val(bits, sp.r_plus.as_float() + sp.r_minus.as_float());
        assert_eq!(&sum, sp.r_n.as_float());
        assert!(remainder_split(&c.zero(), 10, &c).is_err());
    }

    #[test]
    fn shape_fit_reports_constant() {
        let c = ctx();
        let fit = remainder_shape_fit(&REMAINDER_FIT_DELTAS, 20_000, &c).unwrap();
        assert_eq!(fit.ratios.len(), 4);
        for r in &fit.ratios {
            assert!(r <= &fit.fitted_c);
        }
        assert!(remainder_shape_fit(&[1.5], 10, &c).is_err());
    }

    #[test]
    fn trace_rows_and_gaps() {
        let c = ctx();
        assert!(convergence_trace(&[], &c).unwrap().is_empty());
        let rows = convergence_trace(&[100, 1000, 10_000], &c).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.windows(2).all(|w| w[1].s_n > w[0].s_n));
        assert!((rows[1].gap.to_f64() - 0.0441).abs() < 1e-3);
        assert!((rows[2].gap.to_f64() - 0.0142).abs() < 1e-3);
        let text = trace_table(&rows).to_csv_string();
        assert!(text.starts_with("N,S_N,gap\n"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn term_invariants(n in 1u64..2_000_000) {
            let c = PrecisionContext::default();
            let bits = c.working_bits();
            let t = term(n, &c).unwrap();
            let f = t.f_n.as_float();
            prop_assert!(*f > 0);
            prop_assert!(Float::with_val(bits, f * n) <= 1u32);
            let log2 = Float::with_val(bits, 2u32).ln();
            let log32 = (Float::with_val(bits, 3u32) / 2u32).ln();
            prop_assert!(*t.l_n.as_float() >= -log2 && *t.l_n.as_float() <= log32);
            // f = (2/3)^n exp(n L) / n
            let two_thirds = Float::with_val(bits, 2u32) / 3u32;
            let factored = Float::with_val(bits, two_thirds.pow(n as u32))
                * Float::with_val(bits, t.l_n.as_float() * n).exp() / n;
            let rel = Float::with_val(bits, &factored - f).abs() / f;
            prop_assert!(rel < c.tolerance(24));
        }

        #[test]
        fn partial_sums_increase(n in 1u64..5000) {
            // strictly whenever the next term is visible at working precision
            let c = PrecisionContext::with_mantissa_bits(64).unwrap();
            let a = partial_sum_s(n, &c).unwrap();
            let b = partial_sum_s(n + 1, &c).unwrap();
            let next = term(n + 1, &c).unwrap().f_n;
            prop_assert!(b.value >= a.value);
            if *next.as_float() > c.pow2(-(c.working_bits() as i32 - 4)) {
                prop_assert!(b.value > a.value);
            }
        }
    }
}
