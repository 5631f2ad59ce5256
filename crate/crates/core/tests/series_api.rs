use bbg_core::averaging::m_partial;
use bbg_core::series::{decompose, partial_sum_s_with, remainder_split_many, SumOptions};
use bbg_core::PrecisionContext;
use rug::Float;

#[test]
fn averaged_part_is_shared_by_every_angle() {
    // M_N is built from the averages I_n alone, so rotating the angle moves
    // S_N(α) but never M_N
    let ctx = PrecisionContext::default();
    let bits = ctx.working_bits();
    let m = m_partial(5000, &ctx).unwrap();
    let d = decompose(5000, &ctx).unwrap();
    assert_eq!(m.value, d.m_n);
    let sqrt2 = Float::with_val(bits, 2u32).sqrt();
    let rotated = partial_sum_s_with(
        5000,
        &SumOptions {
            alpha: Some(sqrt2),
            ..SumOptions::default()
        },
        &ctx,
    )
    .unwrap();
    assert_ne!(rotated.value, d.s_n);
}

#[test]
fn remainder_splits_share_one_total() {
    let ctx = PrecisionContext::default();
    let bits = ctx.working_bits();
    let whole = decompose(20_000, &ctx).unwrap().r_n;
    let deltas: Vec<Float> = [0.1, 0.01, 0.001].iter().map(|&d| ctx.float(d)).collect();
    let splits = remainder_split_many(&deltas, 20_000, &ctx).unwrap();
    for sp in &splits {
        let diff = Float::with_val(bits, sp.r_n.as_float() - whole.as_float()).abs();
        assert!(diff < ctx.tolerance(16));
    }
}
