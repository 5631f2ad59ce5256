//! Extended-precision quadrature rules: the equispaced trapezoid rule for
//! periodic integrands and double-exponential (tanh-sinh) quadrature for
//! finite intervals.

use rug::float::Constant;
use rug::Float;

use crate::hp::compensated_sum_by;

/// Mean of a `2π`-periodic function by the `points`-node trapezoid rule.
///
/// `f` receives the node angle `2πj/points`.
pub fn periodic_mean<F>(f: F, points: u64, bits: u32) -> Float
where
    F: Fn(&Float) -> Float + Sync,
{
    let two_pi = Float::with_val(bits + 16, Constant::Pi) * 2u32;
    let step = Float::with_val(bits + 16, &two_pi / points);
    let total = compensated_sum_by(points, 256, bits, |j| {
        let theta = Float::with_val(bits, &step * j);
        f(&theta)
    });
    total / points
}

/// Periodic trapezoid mean with node doubling until two successive values
/// agree to `tol`. Returns the refined value and the final node count.
pub fn periodic_mean_refined<F>(f: F, start_points: u64, tol: &Float, bits: u32) -> (Float, u64)
where
    F: Fn(&Float) -> Float + Sync,
{
    let mut points = start_points.max(4);
    let mut prev = periodic_mean(&f, points, bits);
    loop {
        points *= 2;
        let next = periodic_mean(&f, points, bits);
        let diff = Float::with_val(bits, &next - &prev).abs();
        if diff <= *tol || points >= 1 << 24 {
            return (next, points);
        }
        prev = next;
    }
}

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// Halves the step until successive levels agree to `tol` (or a level cap is
/// hit). The integrand is never evaluated at the endpoints themselves.
pub fn tanh_sinh<F>(f: F, a: &Float, b: &Float, tol: &Float, bits: u32) -> Float
where
    F: Fn(&Float) -> Float,
{
    let wide = bits + 16;
    let half_pi = Float::with_val(wide, Constant::Pi) / 2u32;
    let mid = Float::with_val(wide, a + b) / 2u32;
    let half = Float::with_val(wide, b - a) / 2u32;
    let cutoff = Float::with_val(wide, Float::i_exp(1, -(bits as i32 + 24)));

    // contribution of abscissa t (t = 0 handled separately); returns None
    // once the weight drops below the cutoff
    let pair = |t: &Float| -> Option<Float> {
        let u = Float::with_val(wide, t.sinh_ref()) * &half_pi;
        let cosh_u = Float::with_val(wide, u.cosh_ref());
        let weight = Float::with_val(wide, t.cosh_ref()) * &half_pi / cosh_u.square();
        if weight < cutoff {
            return None;
        }
        // distance from each endpoint: half * (1 - tanh u) = 2*half/(e^{2u} + 1)
        let e2u = Float::with_val(wide, &u * 2u32).exp();
        let gap = Float::with_val(wide, &half * 2u32) / (e2u + 1u32);
        let right = Float::with_val(bits, b - &gap);
        let left = Float::with_val(bits, a + &gap);
        let s = f(&right) + f(&left);
        Some(Float::with_val(wide, s * &weight))
    };

    let mut level = 0u32;
    let mut h = Float::with_val(wide, 1u32);
    let mut sum = Float::with_val(wide, f(&Float::with_val(bits, &mid))) * &half_pi;
    // level 0: integer abscissae
    let mut k = 1u64;
    while let Some(v) = pair(&Float::with_val(wide, k)) {
        sum += v;
        k += 1;
    }
    let mut estimate = Float::with_val(wide, &sum * &h) * &half;
    loop {
        level += 1;
        h /= 2u32;
        // new abscissae are the odd multiples of h
        let mut k = 1u64;
        loop {
            let t = Float::with_val(wide, &h * k);
            match pair(&t) {
                Some(v) => sum += v,
                None => break,
            }
            k += 2;
        }
        let next = Float::with_val(wide, &sum * &h) * &half;
        let diff = Float::with_val(wide, &next - &estimate).abs();
        estimate = next;
        if diff <= *tol || level >= 12 {
            return Float::with_val(bits, estimate);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_on_trig_polynomials() {
        let bits = 160;
        // mean of sin^2 is 1/2 and already exact with 4 nodes
        let m = periodic_mean(|t| Float::with_val(bits, t.sin_ref()).square(), 4, bits);
        let err = (m - Float::with_val(bits, 0.5)).abs();
        assert!(err < Float::with_val(bits, Float::i_exp(1, -150)));
    }

    #[test]
    fn tanh_sinh_on_smooth_and_endpoint_singular() {
        let bits = 160;
        let tol = Float::with_val(bits, Float::i_exp(1, -140));
        let zero = Float::new(bits);
        let one = Float::with_val(bits, 1);
        // integral of e^x on [0, 1] = e - 1
        let v = tanh_sinh(|x| Float::with_val(bits, x.exp_ref()), &zero, &one, &tol, bits);
        let want = Float::with_val(bits, 1u32).exp() - 1u32;
        assert!(Float::with_val(bits, &v - &want).abs() < 1e-40);
        // integral of log x on [0, 1] = -1 (log singularity at 0)
        let v = tanh_sinh(|x| Float::with_val(bits, x.ln_ref()), &zero, &one, &tol, bits);
        assert!(Float::with_val(bits, &v + 1u32).abs() < 1e-30, "{v}");
    }
}
