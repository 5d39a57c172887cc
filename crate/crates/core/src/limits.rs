use crate::error::{Error, Result};

/// Work caps for the exponential enumerations (state sums and subset sums).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: u64,
    pub max_subsets: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 1 << 22, max_subsets: 1 << 22 }
    }
}

impl Limits {
    pub fn unbounded() -> Self {
        Limits { max_states: u64::MAX, max_subsets: u64::MAX }
    }

    /// Checks `k^n <= max_states` and returns the state count.
    pub fn check_states(&self, k: u32, n: usize) -> Result<u64> {
        let mut total: u64 = 1;
        for _ in 0..n {
            total = match total.checked_mul(k as u64) {
                Some(t) if t <= self.max_states => t,
                _ => {
                    return Err(Error::CapExceeded {
                        what: "state sum",
                        needed: format!("{k}^{n}"),
                        cap: self.max_states,
                    })
                }
            };
        }
        if total > self.max_states {
            return Err(Error::CapExceeded {
                what: "state sum",
                needed: format!("{k}^{n}"),
                cap: self.max_states,
            });
        }
        Ok(total)
    }

    /// Checks `2^m <= max_subsets` and returns the subset count.
    pub fn check_subsets(&self, m: usize) -> Result<u64> {
        if m >= 64 || (1u64 << m) > self.max_subsets {
            return Err(Error::CapExceeded {
                what: "subset sum",
                needed: format!("2^{m}"),
                cap: self.max_subsets,
            });
        }
        Ok(1u64 << m)
    }
}
