//! Resource budgets for the exhaustive searches.
//!
//! Every enumeration whose size is doubly exponential in the input checks a
//! budget before starting and fails with [`Error::Budget`] instead of running
//! for hours or silently truncating.

use std::env;

use crate::error::{Error, Result};

pub const ENV_MAX_TABLE_BITS: &str = "RELCON_MAX_TABLE_BITS";
pub const ENV_MAX_CANDIDATES: &str = "RELCON_MAX_CANDIDATES";
pub const ENV_JOBS: &str = "RELCON_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on `|A|^n * log2 |B|` for any enumeration over function tables.
    pub max_table_bits: u32,
    /// Upper bound on the number of candidates in a single search.
    pub max_candidates: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_table_bits: 16,
            max_candidates: 1 << 20,
        }
    }
}

impl Limits {
    /// Defaults overridden by `RELCON_MAX_TABLE_BITS` / `RELCON_MAX_CANDIDATES` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(v) = env::var(ENV_MAX_TABLE_BITS) {
            limits.max_table_bits = v
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("{ENV_MAX_TABLE_BITS}={v} is not an integer")))?;
        }
        if let Ok(v) = env::var(ENV_MAX_CANDIDATES) {
            limits.max_candidates = v
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("{ENV_MAX_CANDIDATES}={v} is not an integer")))?;
        }
        Ok(limits)
    }

    pub fn unlimited() -> Self {
        Limits {
            max_table_bits: u32::MAX,
            max_candidates: u64::MAX,
        }
    }

    /// Guards an enumeration over all `positions`-entry tables with values in a set of size `values`.
    pub fn check_table(&self, positions: usize, values: usize, what: &str) -> Result<()> {
        let bits = positions as f64 * (values as f64).log2();
        if bits > self.max_table_bits as f64 + 1e-9 {
            return Err(Error::Budget(format!(
                "{what}: {positions} table positions over {values} values is {bits:.2} bits, limit {}",
                self.max_table_bits
            )));
        }
        Ok(())
    }

    /// Guards a search over `count` candidates; `count` is given as log2 to avoid overflow.
    pub fn check_candidates_log2(&self, log2_count: f64, what: &str) -> Result<()> {
        let limit = (self.max_candidates as f64).log2();
        if log2_count > limit + 1e-9 {
            return Err(Error::Budget(format!(
                "{what}: 2^{log2_count:.2} candidates exceeds limit {}",
                self.max_candidates
            )));
        }
        Ok(())
    }

    pub fn check_candidates(&self, count: u128, what: &str) -> Result<()> {
        if count > self.max_candidates as u128 {
            return Err(Error::Budget(format!(
                "{what}: {count} candidates exceeds limit {}",
                self.max_candidates
            )));
        }
        Ok(())
    }
}

/// `base^exp` as `u128`, saturating.
pub(crate) fn saturating_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
