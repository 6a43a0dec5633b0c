use std::cell::Cell;

use crate::error::{KmError, Result};

pub const DEFAULT_TERM_BUDGET: u128 = 5_000_000;
pub const BUDGET_ENV: &str = "KMLAB_TERM_BUDGET";

/// Counts monomial operations during the expensive expansions and fails with
/// [`KmError::ResourceLimit`] once the limit is crossed.
#[derive(Debug)]
pub struct TermBudget {
    limit: u128,
    used: Cell<u128>,
}

impl TermBudget {
    pub fn new(limit: u128) -> Self {
        TermBudget { limit, used: Cell::new(0) }
    }

    /// The default budget, overridden by `KMLAB_TERM_BUDGET` when it parses.
    pub fn from_env() -> Self {
        let limit = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u128>().ok())
            .unwrap_or(DEFAULT_TERM_BUDGET);
        TermBudget::new(limit)
    }

    pub fn unlimited() -> Self {
        TermBudget::new(u128::MAX)
    }

    pub fn limit(&self) -> u128 {
        self.limit
    }

    pub fn used(&self) -> u128 {
        self.used.get()
    }

    /// Fails without charging if `needed` would not fit in the remaining budget.
    pub fn require(&self, needed: u128) -> Result<()> {
        if self.used.get().saturating_add(needed) > self.limit {
            return Err(KmError::ResourceLimit { needed: self.used.get().saturating_add(needed), budget: self.limit });
        }
        Ok(())
    }

    pub fn charge(&self, ops: u128) -> Result<()> {
        self.require(ops)?;
        self.used.set(self.used.get() + ops);
        Ok(())
    }
}

impl Default for TermBudget {
    fn default() -> Self {
        TermBudget::from_env()
    }
}
