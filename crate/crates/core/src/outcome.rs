use serde::Serialize;

use crate::hp::HpReal;

/// How a [`SeriesResult`]'s error estimate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Provable bound on the neglected tail (plus rounding).
    RigorousTailBound,
    /// Extrapolated from observed behaviour; not a bound.
    HeuristicExtrapolation,
}

/// A named auxiliary quantity reported alongside a series value.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: HpReal,
}

/// Value of a truncated series together with how far it was summed and how
/// much it may be off.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesResult {
    pub value: HpReal,
    pub truncation_n: u64,
    pub error_estimate: HpReal,
    pub error_kind: ErrorKind,
    /// Running partial sums `(n, value)` at the recorded checkpoints.
    pub checkpoints: Vec<(u64, HpReal)>,
    pub diagnostics: Vec<Diagnostic>,
    pub method: String,
    pub precision_bits: u32,
}

impl SeriesResult {
    pub fn diagnostic(&self, name: &str) -> Option<&HpReal> {
        self.diagnostics
            .iter()
            .find(|d| d.name == name)
            .map(|d| &d.value)
    }

    pub fn checkpoint(&self, n: u64) -> Option<&HpReal> {
        self.checkpoints
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, v)| v)
    }
}

/// Decade checkpoints `10, 100, ...` below `n`, followed by `n` itself.
pub(crate) fn decade_checkpoints(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 10u64;
    while p < n {
        out.push(p);
        p = p.saturating_mul(10);
    }
    out.push(n);
    out
}
