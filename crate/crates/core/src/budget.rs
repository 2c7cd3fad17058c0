use crate::error::{Error, Result};

/// Cap on the number of objects an exhaustive enumeration may visit.
///
/// Every streaming enumerator checks its projected population against the
/// budget before yielding anything, so a request like `n = 9, q = 5` is
/// refused up front instead of running forever. The `FFVERIFY_BUDGET`
/// environment variable overrides the default cap.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    cap: u128,
}

pub const DEFAULT_CAP: u128 = 100_000_000;

impl Budget {
    pub fn new(cap: u128) -> Self {
        Budget { cap }
    }

    pub fn from_env() -> Self {
        let cap = std::env::var("FFVERIFY_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
            .unwrap_or(DEFAULT_CAP);
        Budget { cap }
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.cap {
            Err(Error::BudgetExceeded {
                needed,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_CAP)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_rejects_oversized_requests() {
        let b = Budget::new(100);
        assert!(b.check(100).is_ok());
        assert!(matches!(
            b.check(101),
            Err(Error::BudgetExceeded { needed: 101, cap: 100 })
        ));
    }
}
