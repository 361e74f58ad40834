use std::time::{Duration, Instant};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_EXPLORED: u64 = 10_000_000;

/// Resource bounds for one generation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Cap on partial paths/walks created by a search or enumeration.
    pub max_explored: u64,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_explored: DEFAULT_MAX_EXPLORED,
            deadline: None,
        }
    }
}

impl Limits {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }

    pub fn budget(&self) -> Budget {
        Budget {
            limits: *self,
            explored: 0,
        }
    }
}

/// Running counter checked against [`Limits`].
#[derive(Debug, Clone)]
pub struct Budget {
    limits: Limits,
    explored: u64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Limits {
            max_explored: u64::MAX,
            deadline: None,
        }
        .budget()
    }

    pub fn explored(&self) -> u64 {
        self.explored
    }

    #[inline]
    pub fn spend(&mut self, n: u64) -> Result<()> {
        let before = self.explored;
        self.explored = self.explored.saturating_add(n);
        if self.explored > self.limits.max_explored {
            return Err(Error::ResourceLimit(format!(
                "explored more than {} partial paths",
                self.limits.max_explored
            )));
        }
        // clock check roughly every 4096 units
        if before >> 12 != self.explored >> 12 {
            if let Some(deadline) = self.limits.deadline {
                if Instant::now() >= deadline {
                    return Err(Error::ResourceLimit("run timed out".into()));
                }
            }
        }
        Ok(())
    }
}
