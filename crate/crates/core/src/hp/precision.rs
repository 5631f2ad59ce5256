use std::fmt;
use std::sync::{Arc, OnceLock};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

pub const DEFAULT_MANTISSA_BITS: u32 = 128;
pub const DEFAULT_GUARD_BITS: u32 = 32;
/// Covers sums to 10^7 and phase products k*n for k, n <= 2000 with room to spare.
pub const DEFAULT_MAX_INDEX_HINT: u64 = 1 << 32;
pub const MIN_MANTISSA_BITS: u32 = 64;

/// Environment variable that overrides the default mantissa width.
pub const PRECISION_ENV_VAR: &str = "BBG_PRECISION_BITS";

/// Immutable working-precision contract shared by every extended-precision
/// computation.
///
/// The stored π carries `mantissa_bits + guard_bits + ceil(log2(max_index_hint))`
/// bits (plus a small margin), so that `n/(2π)` keeps its full relative accuracy
/// in the fractional part for every `n <= max_index_hint`. Cloning is cheap.
#[derive(Clone)]
pub struct PrecisionContext {
    inner: Arc<Inner>,
}

struct Inner {
    mantissa_bits: u32,
    guard_bits: u32,
    max_index_hint: u64,
    pi_bits: u32,
    pi: Float,
    two_pi: Float,
    inv_two_pi: Float,
    gamma: OnceLock<Float>,
}

impl PrecisionContext {
    pub fn new(mantissa_bits: u32, guard_bits: u32, max_index_hint: u64) -> Result<Self> {
        if mantissa_bits < MIN_MANTISSA_BITS {
            return Err(Error::Precision(format!(
                "mantissa_bits = {mantissa_bits} < {MIN_MANTISSA_BITS}"
            )));
        }
        if guard_bits == 0 {
            return Err(Error::Precision("guard_bits must be positive".into()));
        }
        if max_index_hint == 0 {
            return Err(Error::Precision("max_index_hint must be positive".into()));
        }
        let index_bits = ceil_log2(max_index_hint);
        let pi_bits = mantissa_bits + guard_bits + index_bits + 8;
        let pi = Float::with_val(pi_bits, Constant::Pi);
        let two_pi = Float::with_val(pi_bits, &pi * 2u32);
        let inv_two_pi = Float::with_val(pi_bits, 1u32 / &two_pi);
        Ok(Self {
            inner: Arc::new(Inner {
                mantissa_bits,
                guard_bits,
                max_index_hint,
                pi_bits,
                pi,
                two_pi,
                inv_two_pi,
                gamma: OnceLock::new(),
            }),
        })
    }

    /// Default context with the given mantissa width.
    pub fn with_mantissa_bits(mantissa_bits: u32) -> Result<Self> {
        Self::new(mantissa_bits, DEFAULT_GUARD_BITS, DEFAULT_MAX_INDEX_HINT)
    }

    /// Default context, honouring `BBG_PRECISION_BITS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PRECISION_ENV_VAR) {
            Ok(raw) => {
                let bits = raw.trim().parse::<u32>().map_err(|_| {
                    Error::Precision(format!("{PRECISION_ENV_VAR}={raw:?} is not an integer"))
                })?;
                Self::with_mantissa_bits(bits)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.inner.mantissa_bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.inner.guard_bits
    }

    pub fn max_index_hint(&self) -> u64 {
        self.inner.max_index_hint
    }

    /// Precision of every intermediate value: mantissa plus guard bits.
    pub fn working_bits(&self) -> u32 {
        self.inner.mantissa_bits + self.inner.guard_bits
    }

    pub fn pi_bits(&self) -> u32 {
        self.inner.pi_bits
    }

    /// π at `pi_bits` precision.
    pub fn pi(&self) -> &Float {
        &self.inner.pi
    }

    pub fn two_pi(&self) -> &Float {
        &self.inner.two_pi
    }

    pub fn inv_two_pi(&self) -> &Float {
        &self.inner.inv_two_pi
    }

    /// `2^-bits` at working precision.
    pub fn pow2(&self, bits: i32) -> Float {
        Float::with_val(self.working_bits(), Float::i_exp(1, bits))
    }

    /// The accuracy target `2^-(mantissa_bits - slack)` used by tolerances.
    pub fn tolerance(&self, slack: u32) -> Float {
        self.pow2(-(self.mantissa_bits() as i32 - slack as i32))
    }

    pub fn float(&self, value: impl Into<f64>) -> Float {
        Float::with_val(self.working_bits(), value.into())
    }

    pub fn int(&self, value: u64) -> Float {
        Float::with_val(self.working_bits(), value)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.working_bits())
    }

    pub(crate) fn gamma_cell(&self) -> &OnceLock<Float> {
        &self.inner.gamma
    }

    pub(crate) fn check_index(&self, n: u64) -> Result<()> {
        if n > self.inner.max_index_hint {
            Err(Error::IndexBeyondHint {
                n,
                max: self.inner.max_index_hint,
            })
        } else {
            Ok(())
        }
    }

    /// Same contract with twice the mantissa; used for cross-checks.
    pub fn doubled(&self) -> Self {
        Self::new(
            self.mantissa_bits() * 2,
            self.guard_bits(),
            self.max_index_hint(),
        )
        .expect("doubling a valid context stays valid")
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(
            DEFAULT_MANTISSA_BITS,
            DEFAULT_GUARD_BITS,
            DEFAULT_MAX_INDEX_HINT,
        )
        .expect("default precision is valid")
    }
}

impl fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecisionContext")
            .field("mantissa_bits", &self.mantissa_bits())
            .field("guard_bits", &self.guard_bits())
            .field("max_index_hint", &self.max_index_hint())
            .field("pi_bits", &self.pi_bits())
            .finish()
    }
}

pub(crate) fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}
