//! Resource limits shared by the pipeline stages.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::pattern::DEFAULT_MAX_STATES;

/// Wall-clock deadline. Checked at loop heads of the expensive phases.
#[derive(Debug, Clone, Copy, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Deadline {
        Deadline(None)
    }

    pub fn after(d: Duration) -> Deadline {
        Deadline(Instant::now().checked_add(d))
    }

    pub fn check(&self) -> Result<()> {
        match self.0 {
            Some(t) if Instant::now() >= t => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub deadline: Deadline,
    /// Per-automaton state budget.
    pub max_states: usize,
    /// Upper bound on the number of variables of the working environment.
    pub max_vars: usize,
    /// Upper bound on the number of conjunctions of one normal form.
    pub max_dnf: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { deadline: Deadline::none(), max_states: DEFAULT_MAX_STATES, max_vars: 200_000, max_dnf: 1_000_000 }
    }
}
