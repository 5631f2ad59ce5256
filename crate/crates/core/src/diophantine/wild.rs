use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::export::CsvTable;
use crate::hp::{frac_over_two_pi, sin_stream, HpReal, PrecisionContext, DEFAULT_RESYNC_INTERVAL};

/// Default wild threshold: `sin n > 1 - δ`.
pub const DEFAULT_WILD_DELTA: f64 = 0.01;
/// Bucket thresholds on `ε_n` used by the saddle audit.
pub const AUDIT_THRESHOLDS: [f64; 2] = [1e-3, 1e-2];

const SCAN_CHUNK: u64 = 1 << 15;

/// An integer `n` with `sin n` close to 1, and how well the saddle-point
/// weight approximates its term.
#[derive(Clone, Debug, Serialize)]
pub struct WildRecord {
    pub n: u64,
    pub sin_n: HpReal,
    /// `ε_n = 1 - sin n`.
    pub epsilon: HpReal,
    /// `{n/2π} - 1/4`, wrapped into `(-1/2, 1/2]`.
    pub theta_dev: HpReal,
    /// `(1/n) ((2 + sin n)/3)^n`.
    pub f_exact: HpReal,
    /// `(1/n) exp(-n ε_n / 3)`.
    pub f_saddle: HpReal,
    pub rel_error: HpReal,
}

fn check_delta(op: &'static str, delta: &Float) -> Result<()> {
    if !delta.is_finite() || *delta <= 0 || *delta > 2 {
        return precondition(op, "0 < delta <= 2");
    }
    Ok(())
}

fn wild_record(n: u64, sin_n: Float, ctx: &PrecisionContext) -> Result<WildRecord> {
    let bits = ctx.working_bits();
    let epsilon = Float::with_val(bits, 1u32) - &sin_n;
    let mut theta = Float::with_val(bits, frac_over_two_pi(n, ctx)? - 0.25f64);
    if theta > 0.5 {
        theta -= 1u32;
    } else if theta <= -0.5 {
        theta += 1u32;
    }
    let base = Float::with_val(bits, &sin_n + 2u32) / 3u32;
    let f_exact = Float::with_val(bits, base.pow(n as u32)) / n;
    let f_saddle = (-(Float::with_val(bits, &epsilon * n) / 3u32)).exp() / n;
    let rel_error = Float::with_val(bits, &f_saddle - &f_exact).abs() / &f_exact;
    Ok(WildRecord {
        n,
        sin_n: HpReal::new(sin_n),
        epsilon: HpReal::new(epsilon),
        theta_dev: HpReal::new(theta),
        f_exact: HpReal::new(f_exact),
        f_saddle: HpReal::new(f_saddle),
        rel_error: HpReal::new(rel_error),
    })
}

/// All `n <= n_max` with `sin n > 1 - δ`, in increasing order.
///
/// Ranges of `n` are scanned in parallel with independent sine streams and
/// concatenated in order, so the output does not depend on scheduling.
pub fn wild_enumerate(delta: &Float, n_max: u64, ctx: &PrecisionContext) -> Result<Vec<WildRecord>> {
    check_delta("wild_enumerate", delta)?;
    if n_max == 0 {
        return Ok(Vec::new());
    }
    ctx.check_index(n_max)?;
    let bits = ctx.working_bits();
    let threshold = Float::with_val(bits, 1u32) - delta;
    let chunks = n_max.div_ceil(SCAN_CHUNK);
    let parts: Vec<Result<Vec<WildRecord>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * SCAN_CHUNK + 1;
            let end = ((c + 1) * SCAN_CHUNK).min(n_max);
            let mut out = Vec::new();
            for sc in sin_stream(start, end, DEFAULT_RESYNC_INTERVAL, ctx)? {
                if sc.sin > threshold {
                    out.push(wild_record(sc.n, sc.sin, ctx)?);
                }
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::new();
    for part in parts {
        records.extend(part?);
    }
    Ok(records)
}

/// Relative-error statistics of the saddle weight over records with
/// `ε_n < threshold`; absent when no record qualifies.
#[derive(Clone, Debug, Serialize)]
pub struct AuditBucket {
    pub epsilon_below: f64,
    pub count: usize,
    pub max_rel_error: Option<HpReal>,
    pub mean_rel_error: Option<HpReal>,
    /// The `n` attaining the maximum.
    pub worst_n: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SaddleAudit {
    pub delta: HpReal,
    pub n_max: u64,
    pub wild_count: usize,
    pub buckets: Vec<AuditBucket>,
}

impl SaddleAudit {
    pub fn bucket(&self, epsilon_below: f64) -> Option<&AuditBucket> {
        self.buckets.iter().find(|b| b.epsilon_below == epsilon_below)
    }
}

/// Buckets the wild records of `wild_enumerate(δ, n_max)` by `ε_n < 10^-3`
/// and `ε_n < 10^-2`.
pub fn saddle_error_audit(delta: &Float, n_max: u64, ctx: &PrecisionContext) -> Result<SaddleAudit> {
    let records = wild_enumerate(delta, n_max, ctx)?;
    Ok(audit_records(delta, n_max, &records, ctx))
}

pub fn audit_records(delta: &Float, n_max: u64, records: &[WildRecord], ctx: &PrecisionContext) -> SaddleAudit {
    let bits = ctx.working_bits();
    let buckets = AUDIT_THRESHOLDS
        .iter()
        .map(|&threshold| {
            let members: Vec<&WildRecord> = records
                .iter()
                .filter(|r| *r.epsilon.as_float() < threshold)
                .collect();
            let worst = members
                .iter()
                .max_by(|a, b| a.rel_error.partial_cmp(&b.rel_error).expect("finite errors"));
            let mean = (!members.is_empty()).then(|| {
                let mut total = Float::new(bits);
                for r in &members {
                    total += r.rel_error.as_float();
                }
                HpReal::new(total / members.len() as u64)
            });
            AuditBucket {
                epsilon_below: threshold,
                count: members.len(),
                max_rel_error: worst.map(|r| r.rel_error.clone()),
                mean_rel_error: mean,
                worst_n: worst.map(|r| r.n),
            }
        })
        .collect();
    SaddleAudit {
        delta: HpReal::new(Float::with_val(bits, delta)),
        n_max,
        wild_count: records.len(),
        buckets,
    }
}

/// Smallest `ε_n` over `n <= q`, for each scale `q`.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleMinimum {
    pub scale: u64,
    pub n: u64,
    pub epsilon: HpReal,
}

/// The best (smallest `ε_n`) integer up to each scale in `scales`.
pub fn best_wild_by_scale(scales: &[u64], ctx: &PrecisionContext) -> Result<Vec<ScaleMinimum>> {
    let top = scales.iter().copied().max().unwrap_or(0);
    if top == 0 {
        return Ok(Vec::new());
    }
    let bits = ctx.working_bits();
    let mut best: Option<(u64, Float)> = None;
    let mut out = Vec::new();
    let mut sorted: Vec<u64> = scales.to_vec();
    sorted.sort_unstable();
    let mut next = 0;
    for sc in sin_stream(1, top, DEFAULT_RESYNC_INTERVAL, ctx)? {
        let eps = Float::with_val(bits, 1u32) - &sc.sin;
        if best.as_ref().is_none_or(|(_, e)| eps < *e) {
            best = Some((sc.n, eps));
        }
        while next < sorted.len() && sorted[next] == sc.n {
            let (n, e) = best.clone().expect("at least one term seen");
            out.push(ScaleMinimum {
                scale: sc.n,
                n,
                epsilon: HpReal::new(e),
            });
            next += 1;
        }
    }
    Ok(out)
}

/// Rows `(n, sin_n, epsilon, theta_dev, f_exact, f_saddle, rel_error)`.
pub fn wild_table(records: &[WildRecord]) -> CsvTable {
    let mut table = CsvTable::new(&[
        "n", "sin_n", "epsilon", "theta_dev", "f_exact", "f_saddle", "rel_error",
    ]);
    for r in records {
        table.push(vec![
            r.n.to_string(),
            r.sin_n.to_decimal(),
            r.epsilon.to_decimal(),
            r.theta_dev.to_decimal(),
            r.f_exact.to_decimal(),
            r.f_saddle.to_decimal(),
            r.rel_error.to_decimal(),
        ]);
    }
    table
}
