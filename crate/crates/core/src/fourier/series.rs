use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use super::coefficients::{
    coefficient_row, validate_exact_path, CoefficientRows, HarmonicCoefficient, COEFFICIENT_N_MAX,
};
use crate::averaging::i_stream;
use crate::error::{precondition, Result};
use crate::export::CsvTable;
use crate::hp::{sin_stream, CompensatedSum, HpComplex, HpReal, PrecisionContext, DEFAULT_RESYNC_INTERVAL};
use crate::outcome::{decade_checkpoints, Diagnostic, ErrorKind, SeriesResult};

/// Radius slack for arguments meant to lie on `|z| = 2/3`; inside it the
/// argument is treated as lying exactly on that circle.
pub const RADIUS_SLACK: f64 = 1e-9;

/// A truncated harmonic series `Σ_{n=k}^N c_k(n) z^n / n^s` with a bound on
/// the omitted terms.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicSeriesValue {
    pub k: u64,
    pub argument: HpComplex,
    pub truncation_n: u64,
    pub value: HpComplex,
    pub tail_bound: HpReal,
}

/// One line of the harmonic report.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicContribution {
    pub k: u64,
    pub contribution: HpReal,
    pub running_total: HpReal,
    pub tail_bound: HpReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicReport {
    pub result: SeriesResult,
    pub contributions: Vec<HarmonicContribution>,
}

/// `(2/3) e^{ik}`.
pub fn harmonic_argument(k: u64, ctx: &PrecisionContext) -> HpComplex {
    let bits = ctx.working_bits();
    let radius = Float::with_val(bits, 2u32) / 3u32;
    HpComplex::from_polar(&radius, &ctx.int(k))
}

/// `n^{-s}`, with `s = 1` done as a plain division so that the `s = 1`
/// Dirichlet sum and the generating function share every rounding.
fn weight(n: u64, s: &Float, bits: u32) -> Float {
    if *s == 1 {
        Float::with_val(bits, 1u32) / n
    } else {
        (-(Float::with_val(bits, n).ln() * s)).exp()
    }
}

/// `Σ_{n=k}^{N} c_k(n) z_k^n n^{-s}` for every `k` in `ks`, in one pass over
/// the coefficient rows.
fn column_sums(ks: &[u64], args: &[HpComplex], n_max: u64, s: &Float, bits: u32) -> Vec<HpComplex> {
    // c_k(n) z^n = i^{-k} b_k(n) (z/4)^n
    let steps: Vec<HpComplex> = args
        .iter()
        .map(|z| z.scale(&(Float::with_val(bits, 1u32) / 4u32)))
        .collect();
    let mut powers: Vec<HpComplex> = ks.iter().map(|_| HpComplex::one(bits)).collect();
    let mut acc: Vec<(CompensatedSum, CompensatedSum)> = ks
        .iter()
        .map(|_| (CompensatedSum::new(bits), CompensatedSum::new(bits)))
        .collect();
    let mut rows = CoefficientRows::new();
    rows.advance();
    for n in 1..=n_max {
        let (_, row) = rows.advance();
        let w = weight(n, s, bits);
        for (idx, &k) in ks.iter().enumerate() {
            powers[idx] = powers[idx].mul(&steps[idx]);
            if k > n {
                continue;
            }
            let b = Float::with_val(bits, &row[k as usize]) * &w;
            let term = powers[idx].scale(&b).mul_i_pow((4 - (k % 4) as u32) % 4);
            acc[idx].0.add(&term.re);
            acc[idx].1.add(&term.im);
        }
    }
    acc.into_iter()
        .map(|(re, im)| HpComplex::new(re.value(), im.value()))
        .collect()
}

/// `I_m √m` at `m = max(N, 2)`. The sequence `I_n √n` decreases for `n >= 2`,
/// so this bounds `I_n √n` for every `n > N`.
fn scaled_average_bound(n_max: u64, ctx: &PrecisionContext) -> Result<Float> {
    let bits = ctx.working_bits();
    let m = n_max.max(2);
    let (_, i_m) = i_stream(ctx)?.nth(m as usize).expect("stream is infinite");
    Ok(i_m * Float::with_val(bits, m).sqrt())
}

/// Bound on `Σ_{n>N} |c_k(n)| |z|^n n^{-s}` using `|c_k(n)| <= J_n`,
/// `J_n |z|^n = I_n ρ^n` with `ρ = 3|z|/2 <= 1`, and `I_n <= A/√n`.
/// With `p = s + 1/2 > 1` the sum `Σ_{n>N} ρ^n n^{-p}` is bounded by the
/// smaller of a geometric and an integral majorant.
fn tail_bound(a_bound: &Float, rho: &Float, s: &Float, n_max: u64, bits: u32) -> Float {
    let p = Float::with_val(bits, s + 0.5);
    let first = Float::with_val(bits, n_max + 1);
    let rho_pow = Float::with_val(bits, rho.pow(n_max as u32 + 1));
    let lead = (-(Float::with_val(bits, first.ln_ref()) * &p)).exp();
    let p_minus_one = Float::with_val(bits, &p - 1u32);
    // (N+1)^{-p} + (N+1)^{1-p}/(p-1)
    let integral = Float::with_val(bits, &lead * &first) / &p_minus_one + &lead;
    let mut majorant = integral;
    if *rho < 1 {
        let geometric = Float::with_val(bits, &lead / (Float::with_val(bits, 1u32) - rho));
        if geometric < majorant {
            majorant = geometric;
        }
    }
    Float::with_val(bits, a_bound * rho_pow) * majorant
}

fn check_truncation(op: &'static str, n_max: u64) -> Result<()> {
    if n_max > COEFFICIENT_N_MAX {
        return precondition(op, format!("N <= {COEFFICIENT_N_MAX}"));
    }
    Ok(())
}

/// `G_k(z) = Σ_{n>=1} c_k(n) z^n / n` truncated at `N`, for `|z| <= 2/3`.
pub fn g_k_value(k: u64, z: &HpComplex, n_max: u64, ctx: &PrecisionContext) -> Result<HarmonicSeriesValue> {
    check_truncation("G_k_value", n_max)?;
    let bits = ctx.working_bits();
    let radius = z.abs();
    if radius >= 1.0 - 1e-6 {
        return precondition("G_k_value", "|z| < 1 - 1e-6");
    }
    if radius > 2.0 / 3.0 + RADIUS_SLACK {
        return precondition("G_k_value", "|z| <= 2/3 + 1e-9");
    }
    validate_exact_path()?;
    let mut rho = Float::with_val(bits, &radius * 3u32) / 2u32;
    if rho > 1 {
        rho = Float::with_val(bits, 1u32);
    }
    let one = Float::with_val(bits, 1u32);
    let value = column_sums(&[k], std::slice::from_ref(z), n_max, &one, bits).remove(0);
    let a = scaled_average_bound(n_max, ctx)?;
    Ok(HarmonicSeriesValue {
        k,
        argument: z.clone(),
        truncation_n: n_max,
        value,
        tail_bound: HpReal::new(tail_bound(&a, &rho, &one, n_max, bits)),
    })
}

/// `H_k(s) = Σ_{n>=1} c_k(n) ((2/3) e^{ik})^n / n^s` truncated at `N`.
pub fn h_k_value(k: u64, s: &Float, n_max: u64, ctx: &PrecisionContext) -> Result<HarmonicSeriesValue> {
    check_truncation("H_k_value", n_max)?;
    if !s.is_finite() || *s <= 0.5 {
        return precondition("H_k_value", "s > 1/2");
    }
    validate_exact_path()?;
    let bits = ctx.working_bits();
    let z = harmonic_argument(k, ctx);
    let s = Float::with_val(bits, s);
    let value = column_sums(&[k], std::slice::from_ref(&z), n_max, &s, bits).remove(0);
    let a = scaled_average_bound(n_max, ctx)?;
    let rho = Float::with_val(bits, 1u32);
    Ok(HarmonicSeriesValue {
        k,
        argument: z,
        truncation_n: n_max,
        value,
        tail_bound: HpReal::new(tail_bound(&a, &rho, &s, n_max, bits)),
    })
}

/// `Σ_{k=1}^{K} 2 Re G_k((2/3) e^{ik})` with each `G_k` truncated at `N`.
///
/// The error estimate adds the per-`k` tail bounds; it says nothing about
/// the harmonics `k > K`, so the result is flagged heuristic as an estimate
/// of the full remainder.
pub fn harmonic_sum_r(k_max: u64, n_max: u64, ctx: &PrecisionContext) -> Result<HarmonicReport> {
    check_truncation("harmonic_sum_R", n_max)?;
    if k_max > n_max {
        return precondition("harmonic_sum_R", "K <= N");
    }
    validate_exact_path()?;
    let bits = ctx.working_bits();
    let ks: Vec<u64> = (1..=k_max).collect();
    let args: Vec<HpComplex> = ks.iter().map(|&k| harmonic_argument(k, ctx)).collect();
    let one = Float::with_val(bits, 1u32);
    let sums = column_sums(&ks, &args, n_max, &one, bits);
    let per_k_tail = if k_max == 0 {
        Float::new(bits)
    } else {
        tail_bound(&scaled_average_bound(n_max, ctx)?, &one, &one, n_max, bits)
    };
    let mut running = CompensatedSum::new(bits);
    let mut contributions = Vec::with_capacity(ks.len());
    let mut checkpoints = Vec::new();
    for (k, g) in ks.iter().zip(&sums) {
        let contribution = Float::with_val(bits, &g.re * 2u32);
        running.add(&contribution);
        let total = HpReal::new(running.value());
        checkpoints.push((*k, total.clone()));
        contributions.push(HarmonicContribution {
            k: *k,
            contribution: HpReal::new(contribution),
            running_total: total,
            tail_bound: HpReal::new(Float::with_val(bits, &per_k_tail * 2u32)),
        });
    }
    let total_tail = Float::with_val(bits, &per_k_tail * (2 * k_max));
    Ok(HarmonicReport {
        result: SeriesResult {
            value: HpReal::new(running.value()),
            truncation_n: n_max,
            error_estimate: HpReal::new(total_tail),
            error_kind: ErrorKind::HeuristicExtrapolation,
            checkpoints,
            diagnostics: vec![Diagnostic {
                name: "harmonics".into(),
                value: HpReal::new(Float::with_val(bits, k_max)),
            }],
            method: "exact coefficients, harmonics k > K omitted".into(),
            precision_bits: ctx.mantissa_bits(),
        },
        contributions,
    })
}

/// `Φ(s) = Σ_{n>=1} n^{-s} [((2 + sin n)/3)^n - I_n]` truncated at `N`, for
/// `s >= 1`. The error estimate is the change over the last decade of
/// partial sums.
pub fn phi_value(s: &Float, n_max: u64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    if !s.is_finite() || *s < 1 {
        return precondition("phi_value", "s >= 1");
    }
    if n_max == 0 {
        return precondition("phi_value", "N >= 1");
    }
    let bits = ctx.working_bits();
    let s = Float::with_val(bits, s);
    let sines = sin_stream(1, n_max, DEFAULT_RESYNC_INTERVAL, ctx)?;
    let averages = i_stream(ctx)?.skip(1);
    let marks = decade_checkpoints(n_max);
    let mut next_mark = 0;
    let mut checkpoints = Vec::with_capacity(marks.len());
    let mut acc = CompensatedSum::new(bits);
    let mut decade_back = Float::new(bits);
    for (sc, (n, i_n)) in sines.zip(averages) {
        debug_assert_eq!(sc.n, n);
        let base = (sc.sin + 2u32) / 3u32;
        let power = Float::with_val(bits, base.pow(n as u32));
        let term = (power - i_n) * weight(n, &s, bits);
        acc.add(&term);
        if n == n_max / 10 {
            decade_back = acc.value();
        }
        if next_mark < marks.len() && n == marks[next_mark] {
            checkpoints.push((n, HpReal::new(acc.value())));
            next_mark += 1;
        }
    }
    let value = acc.value();
    let error = Float::with_val(bits, &value - &decade_back).abs();
    Ok(SeriesResult {
        value: HpReal::new(value),
        truncation_n: n_max,
        error_estimate: HpReal::new(error),
        error_kind: ErrorKind::HeuristicExtrapolation,
        checkpoints,
        diagnostics: Vec::new(),
        method: "direct summation".into(),
        precision_bits: ctx.mantissa_bits(),
    })
}

/// `J_n + Σ_{k=1}^{n} 2 Re[c_k(n) e^{ikθ}]` from the exact coefficients.
///
/// The terms reach `J_n ~ (3/2)^n` while the sum can be tiny, so the
/// evaluation carries `n log2(3/2)` extra bits and rounds at the end.
pub fn reconstruct_pointwise(n: u64, theta: &Float, ctx: &PrecisionContext) -> Result<HpReal> {
    let row = coefficient_row(n)?;
    let bits = ctx.working_bits() + (n as f64 * 1.5f64.log2()).ceil() as u32 + 8;
    let mut acc = CompensatedSum::new(bits);
    for (k, b) in row.iter().enumerate() {
        let c = HarmonicCoefficient::from_row_value(k as u64, n, b).to_complex(bits);
        if k == 0 {
            acc.add(&c.re);
            continue;
        }
        let angle = Float::with_val(bits + 16, theta * k as u64);
        let rotated = c.mul(&HpComplex::from_polar(&Float::with_val(bits, 1u32), &angle));
        acc.add(&(rotated.re * 2u32));
    }
    Ok(HpReal::new(Float::with_val(ctx.working_bits(), acc.value())))
}

/// Leading-order estimate of the remainder from the `k = 1` harmonic with
/// `c_1(n) ≈ -in/4`: `(1/2) Σ (2/3)^n sin n`, in closed form
/// `(1/2)((2/3) sin 1)/(1 - (4/3) cos 1 + 4/9)`.
pub fn leading_order_estimate(ctx: &PrecisionContext) -> HpReal {
    let bits = ctx.working_bits();
    let (s, c) = Float::with_val(bits, 1u32).sin_cos(Float::new(bits));
    let num = Float::with_val(bits, &s * 2u32) / 3u32;
    let den = Float::with_val(bits, 13u32) / 9u32 - Float::with_val(bits, &c * 4u32) / 3u32;
    HpReal::new(num / den / 2u32)
}

/// How `Im c_1(n)` compares with `n` and with `J_n`.
#[derive(Clone, Debug, Serialize)]
pub struct FirstHarmonicTrend {
    pub n: u64,
    pub im_over_n: HpReal,
    pub im_over_j: HpReal,
}

/// `Im c_1(n)/n` and `Im c_1(n)/J_n` at the requested `n` (each `1..=2000`).
pub fn first_harmonic_trend(ns: &[u64], ctx: &PrecisionContext) -> Result<Vec<FirstHarmonicTrend>> {
    let bits = ctx.working_bits();
    let top = ns.iter().copied().max().unwrap_or(0);
    check_truncation("first_harmonic_trend", top)?;
    if ns.contains(&0) {
        return precondition("first_harmonic_trend", "n >= 1");
    }
    validate_exact_path()?;
    let mut rows = CoefficientRows::new();
    let mut out = Vec::with_capacity(ns.len());
    for _ in 0..=top {
        let (n, row) = rows.advance();
        if !ns.contains(&n) {
            continue;
        }
        let c1 = HarmonicCoefficient::from_row_value(1, n, &row[1]).to_complex(bits);
        let j = HarmonicCoefficient::from_row_value(0, n, &row[0]).to_complex(bits).re;
        out.push(FirstHarmonicTrend {
            n,
            im_over_n: HpReal::new(Float::with_val(bits, &c1.im / n)),
            im_over_j: HpReal::new(Float::with_val(bits, &c1.im / &j)),
        });
    }
    out.sort_by_key(|t| ns.iter().position(|&m| m == t.n));
    Ok(out)
}

/// Rows `(k, contribution, running_total, tail_bound)`.
pub fn contribution_table(lines: &[HarmonicContribution]) -> CsvTable {
    let mut table = CsvTable::new(&["k", "contribution", "running_total", "tail_bound"]);
    for l in lines {
        table.push(vec![
            l.k.to_string(),
            l.contribution.to_decimal(),
            l.running_total.to_decimal(),
            l.tail_bound.to_decimal(),
        ]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn trivial_g_values() {
        let c = ctx();
        let zero = HpComplex::zero(c.working_bits());
        let g = g_k_value(1, &zero, 50, &c).unwrap();
        assert!(g.value.abs().is_zero());
        let g = g_k_value(5, &harmonic_argument(5, &c), 4, &c).unwrap();
        assert!(g.value.abs().is_zero());
    }

    #[test]
    fn argument_guards() {
        let c = ctx();
        let bits = c.working_bits();
        let big = HpComplex::from_real(c.float(0.7));
        assert!(g_k_value(1, &big, 10, &c).is_err());
        let near_one = HpComplex::from_real(Float::with_val(bits, 1u32) - c.float(1e-7));
        assert!(g_k_value(1, &near_one, 10, &c).is_err());
        assert!(h_k_value(1, &c.float(0.5), 10, &c).is_err());
        assert!(g_k_value(1, &harmonic_argument(1, &c), 2001, &c).is_err());
        assert!(harmonic_sum_r(5, 4, &c).is_err());
    }

    #[test]
    fn single_term_dirichlet_value() {
        let c = ctx();
        let bits = c.working_bits();
        let h = h_k_value(1, &c.int(2), 1, &c).unwrap();
        let want = HpComplex::new(c.zero(), -Float::with_val(bits, 1u32) / 4u32).mul(&harmonic_argument(1, &c));
        assert!(h.value.sub(&want).abs() < c.tolerance(4));
    }

    #[test]
    fn dirichlet_at_one_equals_generating_function() {
        let c = ctx();
        for k in 1..=4 {
            let g = g_k_value(k, &harmonic_argument(k, &c), 120, &c).unwrap();
            let h = h_k_value(k, &c.int(1), 120, &c).unwrap();
            assert_eq!(g.value, h.value);
        }
    }

    #[test]
    fn tail_bound_dominates_observed_tail() {
        let c = ctx();
        for k in [1u64, 3] {
            let short = g_k_value(k, &harmonic_argument(k, &c), 60, &c).unwrap();
            let long = g_k_value(k, &harmonic_argument(k, &c), 400, &c).unwrap();
            let observed = long.value.sub(&short.value).abs();
            assert!(observed <= *short.tail_bound.as_float());
        }
        // strictly inside the disc the geometric majorant applies
        let z = HpComplex::from_real(c.float(0.3));
        let short = g_k_value(2, &z, 20, &c).unwrap();
        let long = g_k_value(2, &z, 200, &c).unwrap();
        assert!(long.value.sub(&short.value).abs() <= *short.tail_bound.as_float());
    }

    #[test]
    fn reconstruction_matches_direct_power() {
        let c = ctx();
        let bits = c.working_bits();
        let half_pi = Float::with_val(bits, c.pi()) / 2u32;
        assert_eq!(reconstruct_pointwise(1, &half_pi, &c).unwrap().to_f64(), 1.5);
        let at_zero = reconstruct_pointwise(20, &c.zero(), &c).unwrap();
        assert!(Float::with_val(bits, at_zero.as_float() - 1u32).abs() < c.tolerance(16));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut cases: Vec<(u64, f64)> = vec![(5, 1.0)];
        for _ in 0..50 {
            cases.push((rng.gen_range(1..=100), rng.gen_range(0.0..std::f64::consts::TAU)));
        }
        for (n, t) in cases {
            let theta = c.float(t);
            let direct = (Float::with_val(bits, theta.sin_ref()) / 2u32 + 1u32).pow(n as u32);
            let rebuilt = reconstruct_pointwise(n, &theta, &c).unwrap();
            let scale = direct.clone().max(&Float::with_val(bits, 1u32)).clone();
            let rel = Float::with_val(bits, rebuilt.as_float() - &direct).abs() / scale;
            assert!(rel < c.tolerance(16), "n = {n}, θ = {t}");
        }
    }

    #[test]
    fn finite_rearrangement_identity() {
        let c = ctx();
        let bits = c.working_bits();
        let n_max = 60;
        // left side: Σ (2/3)^n/n [(1 + sin n/2)^n - J_n], summed directly
        let seq = crate::averaging::j_recurrence(n_max, &c).unwrap();
        let mut lhs = CompensatedSum::new(bits);
        let two_thirds = Float::with_val(bits, 2u32) / 3u32;
        for n in 1..=n_max {
            let s = crate::hp::sin_int(n, &c).unwrap();
            let p = (Float::with_val(bits, s.as_float()) / 2u32 + 1u32).pow(n as u32);
            let diff = p - seq.j[n as usize].as_float();
            let scale = Float::with_val(bits, (&two_thirds).pow(n as u32)) / n;
            lhs.add(&(diff * scale));
        }
        let rhs = harmonic_sum_r(n_max, n_max, &c).unwrap();
        let err = Float::with_val(bits, lhs.value() - rhs.result.value.as_float()).abs();
        assert!(err < c.tolerance(20), "{}", err.to_f64());
    }

    #[test]
    fn empty_harmonic_sum() {
        let c = ctx();
        let r = harmonic_sum_r(0, 0, &c).unwrap();
        assert!(r.result.value.as_float().is_zero());
        assert!(r.contributions.is_empty());
    }

    #[test]
    fn harmonic_report_running_totals() {
        let c = ctx();
        let r = harmonic_sum_r(3, 80, &c).unwrap();
        let mut total = 0.0;
        for line in &r.contributions {
            total += line.contribution.to_f64();
            assert!((line.running_total.to_f64() - total).abs() < 1e-15);
        }
        let json = crate::export::to_json(&r.contributions);
        assert!(json.contains("\"running_total\""));
    }

    #[test]
    fn phi_single_term_and_large_s() {
        let c = ctx();
        let bits = c.working_bits();
        let phi = phi_value(&c.float(2.5), 1, &c).unwrap();
        let want = Float::with_val(bits, 1u32).sin() / 3u32;
        assert!(Float::with_val(bits, phi.value.as_float() - &want).abs() < c.tolerance(8));
        let a = phi_value(&c.int(3), 10_000, &c).unwrap();
        let b = phi_value(&c.int(3), 20_000, &c).unwrap();
        assert!((a.value.to_f64() - b.value.to_f64()).abs() < 1e-6);
        assert!(phi_value(&c.float(0.9), 10, &c).is_err());
    }

    #[test]
    fn leading_order_value() {
        let c = ctx();
        let v = leading_order_estimate(&c);
        assert!((v.to_f64() - 0.38740).abs() < 1e-4, "{v}");
        // same number as half the imaginary part of Σ w^n, summed by the polylog
        let w = harmonic_argument(1, &c);
        let li = crate::special::polylog(&c.zero(), &w, &c).unwrap();
        let half = Float::with_val(c.working_bits(), &li.value.im / 2u32);
        assert!(Float::with_val(c.working_bits(), &half - v.as_float()).abs() < c.tolerance(8));
    }

    #[test]
    fn first_harmonic_trend_reports_requested_points() {
        let c = ctx();
        let t = first_harmonic_trend(&[100, 10, 1], &c).unwrap();
        assert_eq!(t.iter().map(|x| x.n).collect::<Vec<_>>(), vec![100, 10, 1]);
        // c_1(1) = -i/4
        assert_eq!(t[2].im_over_n.to_f64(), -0.25);
        assert_eq!(t[2].im_over_j.to_f64(), -0.25);
    }
}
