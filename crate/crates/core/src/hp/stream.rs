use rug::Float;

use super::precision::PrecisionContext;
use super::reduce::{sin_cos_int, sin_cos_multiple};
use crate::error::{precondition, Result};

pub const DEFAULT_RESYNC_INTERVAL: u64 = 1024;

/// One step of a [`SinStream`].
#[derive(Clone, Debug)]
pub struct SinCos {
    pub n: u64,
    pub sin: Float,
    pub cos: Float,
}

#[derive(Clone, Debug)]
enum Anchor {
    /// integer arguments: re-anchor through reduction modulo 2π
    Integer,
    /// multiples of a real angle: re-anchor through a widened product
    Angle(Float),
}

/// `(n, sin nα, cos nα)` for consecutive `n`, advanced by the rotation
/// recurrence and re-anchored from a direct evaluation every
/// `resync_interval` steps.
#[derive(Clone, Debug)]
pub struct SinStream {
    ctx: PrecisionContext,
    anchor: Anchor,
    next_n: u64,
    end: u64,
    resync: u64,
    since_sync: u64,
    sin_step: Float,
    cos_step: Float,
    sin: Float,
    cos: Float,
    started: bool,
}

/// Stream over `n_start..=n_end` with unit rotation angle.
pub fn sin_stream(
    n_start: u64,
    n_end: u64,
    resync_interval: u64,
    ctx: &PrecisionContext,
) -> Result<SinStream> {
    if n_start == 0 {
        return precondition("sin_stream", "n_start >= 1");
    }
    if n_start > n_end {
        return precondition("sin_stream", format!("n_start ({n_start}) <= n_end ({n_end})"));
    }
    if resync_interval == 0 {
        return precondition("sin_stream", "resync_interval >= 1");
    }
    ctx.check_index(n_end)?;
    let (sin_step, cos_step) = sin_cos_int(1, ctx)?;
    Ok(SinStream::build(ctx, Anchor::Integer, n_start, n_end, resync_interval, sin_step, cos_step))
}

/// Stream of `(sin nα, cos nα)` for a real angle `α`.
pub fn angle_stream(
    alpha: &Float,
    n_start: u64,
    n_end: u64,
    resync_interval: u64,
    ctx: &PrecisionContext,
) -> Result<SinStream> {
    if n_start == 0 || n_start > n_end || resync_interval == 0 {
        return precondition(
            "angle_stream",
            "1 <= n_start <= n_end and resync_interval >= 1",
        );
    }
    let alpha = Float::with_val(ctx.working_bits(), alpha);
    let (sin_step, cos_step) = sin_cos_multiple(1, &alpha, ctx);
    Ok(SinStream::build(
        ctx,
        Anchor::Angle(alpha),
        n_start,
        n_end,
        resync_interval,
        sin_step,
        cos_step,
    ))
}

impl SinStream {
    fn build(
        ctx: &PrecisionContext,
        anchor: Anchor,
        n_start: u64,
        n_end: u64,
        resync: u64,
        sin_step: Float,
        cos_step: Float,
    ) -> Self {
        let bits = ctx.working_bits();
        Self {
            ctx: ctx.clone(),
            anchor,
            next_n: n_start,
            end: n_end,
            resync,
            since_sync: 0,
            sin_step,
            cos_step,
            sin: Float::new(bits),
            cos: Float::new(bits),
            started: false,
        }
    }

    fn anchor_at(&self, n: u64) -> (Float, Float) {
        match &self.anchor {
            Anchor::Integer => sin_cos_int(n, &self.ctx).expect("index checked at construction"),
            Anchor::Angle(alpha) => sin_cos_multiple(n, alpha, &self.ctx),
        }
    }

    fn rotate(&mut self) {
        let bits = self.ctx.working_bits();
        let s = Float::with_val(bits, &self.sin * &self.cos_step)
            + Float::with_val(bits, &self.cos * &self.sin_step);
        let c = Float::with_val(bits, &self.cos * &self.cos_step)
            - Float::with_val(bits, &self.sin * &self.sin_step);
        self.sin = s;
        self.cos = c;
    }
}

impl Iterator for SinStream {
    type Item = SinCos;

    fn next(&mut self) -> Option<SinCos> {
        if self.next_n > self.end {
            return None;
        }
        let n = self.next_n;
        if !self.started || self.since_sync >= self.resync {
            let (s, c) = self.anchor_at(n);
            self.sin = s;
            self.cos = c;
            self.since_sync = 1;
            self.started = true;
        } else {
            self.rotate();
            self.since_sync += 1;
        }
        self.next_n += 1;
        Some(SinCos {
            n,
            sin: self.sin.clone(),
            cos: self.cos.clone(),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end + 1).saturating_sub(self.next_n) as usize;
        (left, Some(left))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::reduce::sin_int;
    use rand::{Rng, SeedableRng};

    #[test]
    fn resync_every_step_is_direct_evaluation() {
        let ctx = PrecisionContext::default();
        let items: Vec<_> = sin_stream(1, 3, 1, &ctx).unwrap().collect();
        assert_eq!(items.len(), 3);
        for item in items {
            let (s, c) = sin_cos_int(item.n, &ctx).unwrap();
            assert_eq!(item.sin, s);
            assert_eq!(item.cos, c);
        }
    }

    #[test]
    fn single_element_range() {
        let ctx = PrecisionContext::default();
        for resync in [1, 5, 1024] {
            let items: Vec<_> = sin_stream(1, 1, resync, &ctx).unwrap().collect();
            assert_eq!(items.len(), 1);
            assert_eq!(items[0].n, 1);
            assert_eq!(items[0].sin, *sin_int(1, &ctx).unwrap().as_float());
        }
    }

    #[test]
    fn drift_stays_within_budget() {
        let ctx = PrecisionContext::default();
        let tol = ctx.tolerance(8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut spots: Vec<u64> = (0..100).map(|_| rng.gen_range(1..=100_000)).collect();
        spots.sort_unstable();
        let mut want = spots.iter().peekable();
        let mut worst = ctx.zero();
        for item in sin_stream(1, 100_000, 1024, &ctx).unwrap() {
            while want.peek() == Some(&&item.n) {
                want.next();
                let exact = sin_int(item.n, &ctx).unwrap();
                let dev = Float::with_val(64, &item.sin - exact.as_float()).abs();
                if dev > worst {
                    worst = Float::with_val(ctx.working_bits(), &dev);
                }
            }
        }
        assert!(want.peek().is_none());
        assert!(worst < tol, "worst drift {worst}");
    }

    #[test]
    fn bad_ranges_rejected() {
        let ctx = PrecisionContext::default();
        assert!(sin_stream(0, 3, 1, &ctx).is_err());
        assert!(sin_stream(4, 3, 1, &ctx).is_err());
        assert!(sin_stream(1, 3, 0, &ctx).is_err());
    }

    #[test]
    fn angle_stream_tracks_direct_multiples() {
        let ctx = PrecisionContext::default();
        let alpha = ctx.float(0.5);
        for item in angle_stream(&alpha, 1, 3000, 1024, &ctx).unwrap().step_by(97) {
            let (s, _) = sin_cos_multiple(item.n, &alpha, &ctx);
            assert!(Float::with_val(64, &item.sin - &s).abs() < ctx.tolerance(8));
        }
    }
}
