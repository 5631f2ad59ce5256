use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::export::CsvTable;
use crate::hp::{frac_over_two_pi, HpReal, PrecisionContext};

/// Explicit constant used in the Erdős–Turán inequality.
pub const ERDOS_TURAN_C: u32 = 3;
/// Largest `N` accepted by [`star_discrepancy`].
pub const DISCREPANCY_N_MAX: u64 = 1_000_000;

/// `{n/(2π)}` for `n = 1..=N`, sorted ascending.
pub fn sorted_orbit(n_max: u64, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    ctx.check_index(n_max.max(1))?;
    let bits = ctx.working_bits();
    let mut points: Vec<Float> = (1..=n_max)
        .into_par_iter()
        .map(|n| frac_over_two_pi(n, ctx).map(|x| Float::with_val(bits, x)))
        .collect::<Result<_>>()?;
    points.par_sort_by(|a, b| a.partial_cmp(b).expect("orbit points are finite"));
    Ok(points)
}

/// Exact star discrepancy of the first `N` orbit points:
/// `max_i max(x_(i) - (i-1)/N, i/N - x_(i))` over the sorted points.
pub fn star_discrepancy(n_max: u64, ctx: &PrecisionContext) -> Result<HpReal> {
    if n_max == 0 || n_max > DISCREPANCY_N_MAX {
        return precondition("star_discrepancy", format!("1 <= N <= {DISCREPANCY_N_MAX}"));
    }
    let bits = ctx.working_bits();
    let points = sorted_orbit(n_max, ctx)?;
    let n = Float::with_val(bits, n_max);
    let worst = points
        .par_iter()
        .enumerate()
        .map(|(idx, x)| {
            let i = idx as u64 + 1;
            let below = Float::with_val(bits, x - Float::with_val(bits, i - 1) / &n);
            let above = Float::with_val(bits, Float::with_val(bits, i) / &n - x);
            below.max(&above).clone()
        })
        .reduce(|| Float::new(bits), |a, b| a.max(&b).clone());
    Ok(HpReal::new(worst))
}

/// Star discrepancy with its `N log N` normalisation.
#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub n: u64,
    pub d_star: HpReal,
    pub n_times_d_star: HpReal,
    /// `N·D*(N) / log N`; bounded if `D* = O(log N / N)`.
    pub ratio_to_log_n: Option<HpReal>,
}

pub fn discrepancy_report(n_max: u64, ctx: &PrecisionContext) -> Result<DiscrepancyReport> {
    let bits = ctx.working_bits();
    let d = star_discrepancy(n_max, ctx)?;
    let nd = Float::with_val(bits, d.as_float() * n_max);
    let ratio = (n_max > 1).then(|| HpReal::new(Float::with_val(bits, &nd / Float::with_val(bits, n_max).ln())));
    Ok(DiscrepancyReport {
        n: n_max,
        d_star: d,
        n_times_d_star: HpReal::new(nd),
        ratio_to_log_n: ratio,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ErdosTuranBound {
    pub n: u64,
    pub h: u64,
    /// Bound at the requested `H`.
    pub bound: HpReal,
    /// Minimiser of the bound over `1..=H`.
    pub optimal_h: u64,
    pub optimal_bound: HpReal,
}

/// `C (1/H + (1/N) Σ_{h<=H} (1/h) min(N, 1/|sin(h/2)|))` with `C = 3`, the
/// exponential sums `|Σ_{n<=N} e^{ihn}|` replaced by their geometric bound.
/// Every `H' <= H` is evaluated on the way and the smallest bound kept.
pub fn erdos_turan_bound(n_max: u64, h_max: u64, ctx: &PrecisionContext) -> Result<ErdosTuranBound> {
    if n_max == 0 || h_max == 0 {
        return precondition("erdos_turan_bound", "N >= 1 and H >= 1");
    }
    let bits = ctx.working_bits();
    let n = Float::with_val(bits, n_max);
    let mut partial = Float::new(bits);
    let mut best: Option<(u64, Float)> = None;
    let mut at_h = Float::new(bits);
    for h in 1..=h_max {
        let half = Float::with_val(bits, h) / 2u32;
        let inv_sin = Float::with_val(bits, 1u32) / half.sin().abs();
        let exp_sum = inv_sin.min(&n).clone();
        partial += exp_sum / h;
        let bound = (Float::with_val(bits, 1u32) / h + Float::with_val(bits, &partial / &n)) * ERDOS_TURAN_C;
        if best.as_ref().is_none_or(|(_, b)| bound < *b) {
            best = Some((h, bound.clone()));
        }
        if h == h_max {
            at_h = bound;
        }
    }
    let (optimal_h, optimal_bound) = best.expect("h_max >= 1");
    Ok(ErdosTuranBound {
        n: n_max,
        h: h_max,
        bound: HpReal::new(at_h),
        optimal_h,
        optimal_bound: HpReal::new(optimal_bound),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GapLength {
    pub length: HpReal,
    pub count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapStatistics {
    pub n: u64,
    /// Distinct circular gap lengths, ascending, with multiplicities.
    pub gaps: Vec<GapLength>,
}

impl GapStatistics {
    pub fn distinct(&self) -> usize {
        self.gaps.len()
    }
}

/// Distinct circular gaps between the first `N` orbit points, merging
/// lengths that agree to `2^-(mantissa_bits - 16)`.
pub fn three_distance_gaps(n_max: u64, ctx: &PrecisionContext) -> Result<GapStatistics> {
    if n_max < 2 {
        return precondition("three_distance_gaps", "N >= 2");
    }
    let bits = ctx.working_bits();
    let points = sorted_orbit(n_max, ctx)?;
    let mut gaps: Vec<Float> = points
        .windows(2)
        .map(|w| Float::with_val(bits, &w[1] - &w[0]))
        .collect();
    let wrap = Float::with_val(bits, 1u32) - &points[points.len() - 1] + &points[0];
    gaps.push(wrap);
    gaps.sort_by(|a, b| a.partial_cmp(b).expect("finite gaps"));
    let tol = ctx.tolerance(16);
    let mut out: Vec<GapLength> = Vec::new();
    for g in gaps {
        match out.last_mut() {
            Some(last) if Float::with_val(bits, &g - last.length.as_float()) <= tol => last.count += 1,
            _ => out.push(GapLength {
                length: HpReal::new(g),
                count: 1,
            }),
        }
    }
    Ok(GapStatistics { n: n_max, gaps: out })
}

/// Rows `(N, D_star, N_times_D_star, ratio_to_log_N)`; the ratio is empty at `N = 1`.
pub fn discrepancy_table(reports: &[DiscrepancyReport]) -> CsvTable {
    let mut table = CsvTable::new(&["N", "D_star", "N_times_D_star", "ratio_to_log_N"]);
    for r in reports {
        table.push(vec![
            r.n.to_string(),
            r.d_star.to_decimal(),
            r.n_times_d_star.to_decimal(),
            r.ratio_to_log_n.as_ref().map(HpReal::to_decimal).unwrap_or_default(),
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

    /// Oracle: `sup |#{x_n < α}/N - α|` over a grid of candidate `α` around
    /// every point and every `i/N`, counting points by linear scan.
    fn brute_force(n_max: u64) -> f64 {
        let tau = std::f64::consts::TAU;
        let xs: Vec<f64> = (1..=n_max).map(|n| (n as f64 / tau).fract()).collect();
        let mut alphas: Vec<f64> = Vec::new();
        for &x in &xs {
            alphas.extend([x, x - 1e-9, x + 1e-9]);
        }
        alphas.extend((1..=n_max).map(|i| i as f64 / n_max as f64));
        alphas
            .into_iter()
            .filter(|a| *a > 0.0 && *a <= 1.0)
            .map(|a| {
                let count = xs.iter().filter(|&&x| x < a).count() as f64;
                (count / n_max as f64 - a).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_point() {
        let c = ctx();
        let d = star_discrepancy(1, &c).unwrap().to_f64();
        let x1 = 1.0 / std::f64::consts::TAU;
        assert!((d - (1.0 - x1)).abs() < 1e-15);
        assert!((d - 0.840845).abs() < 1e-6);
    }

    #[test]
    fn matches_brute_force_oracle() {
        let c = ctx();
        for n in [2u64, 5, 10, 37] {
            let d = star_discrepancy(n, &c).unwrap().to_f64();
            assert!((d - brute_force(n)).abs() < 1e-8, "N = {n}");
        }
    }

    #[test]
    fn normalised_discrepancy_stays_logarithmic() {
        let c = ctx();
        let ratios: Vec<f64> = [1_000u64, 10_000, 100_000]
            .iter()
            .map(|&n| discrepancy_report(n, &c).unwrap().ratio_to_log_n.unwrap().to_f64())
            .collect();
        let fitted = ratios.iter().copied().fold(0.0, f64::max);
        assert!(fitted < 2.0, "{ratios:?}");
    }

    #[test]
    fn erdos_turan_single_term_and_domination() {
        let c = ctx();
        let n = 10_000u64;
        let one = erdos_turan_bound(n, 1, &c).unwrap();
        let want = 3.0 * (1.0 + (1.0 / 0.5f64.sin()) / n as f64);
        assert!((one.bound.to_f64() - want).abs() < 1e-12);
        for n in [100u64, 1_000, 10_000] {
            let et = erdos_turan_bound(n, n, &c).unwrap();
            let d = star_discrepancy(n, &c).unwrap();
            assert!(d < et.optimal_bound, "N = {n}");
            assert!(et.optimal_h > 1 && et.optimal_bound < one.bound);
        }
        assert!(erdos_turan_bound(0, 3, &c).is_err());
    }

    #[test]
    fn two_points_have_two_gaps_summing_to_one() {
        let c = ctx();
        let g = three_distance_gaps(2, &c).unwrap();
        let total: f64 = g.gaps.iter().map(|x| x.length.to_f64() * x.count as f64).sum();
        assert_eq!(g.gaps.iter().map(|x| x.count).sum::<u64>(), 2);
        assert!((total - 1.0).abs() < 1e-15);
        assert!(three_distance_gaps(1, &c).is_err());
    }

    #[test]
    fn at_most_three_distances() {
        let c = ctx();
        assert!(three_distance_gaps(6, &c).unwrap().distinct() <= 3);
        let at_convergent = three_distance_gaps(44, &c).unwrap();
        assert!(at_convergent.distinct() <= 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.gen_range(2..=10_000u64);
            let g = three_distance_gaps(n, &c).unwrap();
            assert!(g.distinct() <= 3, "N = {n}: {}", g.distinct());
            assert_eq!(g.gaps.iter().map(|x| x.count).sum::<u64>(), n);
        }
    }
}
