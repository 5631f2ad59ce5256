//! Deterministic error-compensated summation.
//!
//! Chunks are accumulated independently (possibly on different threads) and
//! their partial sums are folded in ascending chunk order, so the result only
//! depends on the chunk size and never on the schedule.

use rayon::prelude::*;
use rug::Float;

pub const DEFAULT_CHUNK: usize = 4096;

/// Neumaier-style compensated accumulator at a fixed precision.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Float,
    comp: Float,
}

impl CompensatedSum {
    pub fn new(bits: u32) -> Self {
        Self {
            sum: Float::new(bits),
            comp: Float::new(bits),
        }
    }

    pub fn prec(&self) -> u32 {
        self.sum.prec()
    }

    pub fn add(&mut self, x: &Float) {
        let bits = self.sum.prec();
        let t = Float::with_val(bits, &self.sum + x);
        // the rounding error of sum + x is exact in binary floating point
        let err = if self.sum.cmp_abs(x).is_some_and(|o| o.is_ge()) {
            Float::with_val(bits, &self.sum - &t) + x
        } else {
            Float::with_val(bits, x - &t) + &self.sum
        };
        self.comp += err;
        self.sum = t;
    }

    pub fn add_sum(&mut self, other: &CompensatedSum) {
        self.add(&other.sum);
        self.add(&other.comp);
    }

    pub fn value(&self) -> Float {
        Float::with_val(self.sum.prec(), &self.sum + &self.comp)
    }
}

/// Compensated sum of `terms`, chunked by `chunk` terms (0 means one chunk).
pub fn compensated_sum(terms: &[Float], chunk: usize, bits: u32) -> Float {
    if terms.is_empty() {
        return Float::new(bits);
    }
    let chunk = if chunk == 0 { terms.len() } else { chunk };
    let partials: Vec<CompensatedSum> = terms
        .par_chunks(chunk)
        .map(|c| {
            let mut acc = CompensatedSum::new(bits);
            for x in c {
                acc.add(x);
            }
            acc
        })
        .collect();
    fold_in_order(&partials, bits)
}

/// Compensated sum of `f(i)` for `i` in `0..count`, evaluated in parallel
/// chunks of `chunk` indices.
pub fn compensated_sum_by<F>(count: u64, chunk: u64, bits: u32, f: F) -> Float
where
    F: Fn(u64) -> Float + Sync,
{
    if count == 0 {
        return Float::new(bits);
    }
    let chunk = chunk.max(1);
    let chunks = count.div_ceil(chunk);
    let partials: Vec<CompensatedSum> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = CompensatedSum::new(bits);
            let hi = ((c + 1) * chunk).min(count);
            for i in c * chunk..hi {
                acc.add(&f(i));
            }
            acc
        })
        .collect();
    fold_in_order(&partials, bits)
}

fn fold_in_order(partials: &[CompensatedSum], bits: u32) -> Float {
    let mut total = CompensatedSum::new(bits);
    for p in partials {
        total.add_sum(p);
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cancellation_keeps_tiny_term() {
        let bits = 128;
        let tiny = Float::with_val(bits, Float::i_exp(1, -200));
        let terms = vec![Float::with_val(bits, 1), Float::with_val(bits, -1), tiny.clone()];
        assert_eq!(compensated_sum(&terms, 2, bits), tiny);
        // tiny first: naive summation would lose it entirely
        let terms = vec![tiny.clone(), Float::with_val(bits, 1), Float::with_val(bits, -1)];
        assert_eq!(compensated_sum(&terms, 0, bits), tiny);
    }

    #[test]
    fn empty_is_zero() {
        assert!(compensated_sum(&[], 16, 128).is_zero());
        assert!(compensated_sum_by(0, 16, 128, |_| Float::with_val(128, 1)).is_zero());
    }

    #[test]
    fn million_micro_terms() {
        let bits = 128;
        let micro = Float::with_val(bits, 1) / 1_000_000u32;
        let total = compensated_sum_by(1_000_000, 4096, bits, |_| micro.clone());
        let err = Float::with_val(bits, total - 1u32).abs();
        assert!(err < 1e-30, "{err}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn chunking_invariance(values in prop::collection::vec(-1.0e6f64..1.0e6, 1..300), c1 in 1usize..64, c2 in 1usize..64) {
            let bits = 128;
            let terms: Vec<Float> = values.iter().enumerate()
                .map(|(i, v)| Float::with_val(bits, *v) / (i as u32 + 3))
                .collect();
            let a = compensated_sum(&terms, c1, bits);
            let b = compensated_sum(&terms, c2, bits);
            let scale = terms.iter().map(|t| t.to_f64().abs()).fold(1.0, f64::max);
            let diff = Float::with_val(bits, &a - &b).abs().to_f64();
            prop_assert!(diff <= scale * 2f64.powi(-(128 - 16)));
        }
    }
}
