//! Extended-precision laboratory for the series
//! `S = sum_{n>=1} (1/n) ((2 + sin n)/3)^n`.
//!
//! The crate evaluates the series directly, through its averaged part
//! `M = sum I_n/n` and remainder `R`, through the exact Fourier harmonics of
//! `(1 + sin θ/2)^n`, and provides the Diophantine tooling (continued
//! fraction of `1/(2π)`, wild integers, discrepancy) and special functions
//! (`Ei`, `li`, `γ`, `I_0`, `Li_α`) needed to compare it with `Ei(log 3)`.

pub mod averaging;
pub mod diophantine;
pub mod error;
pub mod export;
pub mod fourier;
pub mod hp;
pub mod outcome;
pub mod quadrature;
pub mod report;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use hp::{HpComplex, HpReal, PrecisionContext};
pub use outcome::{Diagnostic, ErrorKind, SeriesResult};
