//! Diophantine structure of the orbit `x_n = {n/(2π)}`: the certified
//! continued fraction of `1/(2π)`, integers with `sin n` close to 1 and the
//! saddle-point approximation of their terms, star discrepancy, the
//! Erdős–Turán bound and the three-gap structure.

mod cf;
mod discrepancy;
mod wild;

pub use cf::{cf_expand, inv_two_pi_cf, inv_two_pi_enclosure, ContinuedFraction};
pub use discrepancy::{
    discrepancy_report, discrepancy_table, erdos_turan_bound, sorted_orbit, star_discrepancy, three_distance_gaps,
    DiscrepancyReport, ErdosTuranBound, GapLength, GapStatistics, DISCREPANCY_N_MAX, ERDOS_TURAN_C,
};
pub use wild::{
    audit_records, best_wild_by_scale, saddle_error_audit, wild_enumerate, wild_table, AuditBucket,
    SaddleAudit, ScaleMinimum, WildRecord, AUDIT_THRESHOLDS, DEFAULT_WILD_DELTA,
};
