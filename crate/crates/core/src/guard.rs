use crate::error::{Error, Result};

/// Default bound on the number of items any single enumeration may produce.
pub const DEFAULT_GUARD: u64 = 1_000_000;

/// Upper bound on enumeration sizes. Enumerations that would exceed it fail
/// with [`Error::GuardExceeded`] instead of exhausting memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guard(pub u64);

impl Default for Guard {
    fn default() -> Self {
        Guard(DEFAULT_GUARD)
    }
}

impl Guard {
    pub fn limit(self) -> u64 {
        self.0
    }

    pub fn check(self, what: &str, needed: u128) -> Result<()> {
        if needed > self.0 as u128 {
            Err(Error::GuardExceeded {
                what: what.to_string(),
                needed,
                limit: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// Saturating product used to predict enumeration sizes before materializing.
pub(crate) fn sat_mul(a: u128, b: u128) -> u128 {
    a.saturating_mul(b)
}

pub(crate) fn sat_pow(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u128::MAX {
            break;
        }
    }
    acc
}
