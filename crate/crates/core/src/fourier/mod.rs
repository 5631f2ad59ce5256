//! Exact Fourier coefficients `c_k(n)` of `(1 + sin θ/2)^n` and the series
//! built from them: the generating functions `G_k(z) = Σ c_k(n) z^n/n`, the
//! Dirichlet-type sums `H_k(s)`, the harmonic split of the remainder and the
//! direct series `Φ(s)`.
//!
//! `b_k(n) = i^k 4^n c_k(n)` is a non-negative integer (the coefficient of
//! `x^k` in `(x + 4 + 1/x)^n`), so rows of the whole table follow from a
//! three-term integer recurrence. A binomial formula gives single
//! coefficients independently, and both are checked against quadrature.

mod coefficients;
mod series;

pub use coefficients::{
    coefficient_by_quadrature, coefficient_row, coefficient_table_row, fourier_coefficient,
    validate_exact_path, CoefficientRows, HarmonicCoefficient, COEFFICIENT_N_MAX,
    COEFFICIENT_VALIDATION_MAX,
};
pub use series::{
    contribution_table, first_harmonic_trend, g_k_value, h_k_value, harmonic_argument, harmonic_sum_r,
    leading_order_estimate, phi_value, reconstruct_pointwise, FirstHarmonicTrend,
    HarmonicContribution, HarmonicReport, HarmonicSeriesValue, RADIUS_SLACK,
};
