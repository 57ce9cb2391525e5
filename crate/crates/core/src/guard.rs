//! Resource limits for operations that enumerate alternating patterns.

use crate::error::{Error, Result};

/// Environment variable overriding both enumeration limits.
pub const GUARD_ENV: &str = "ALT_MARK_GUARD_N";

pub const DEFAULT_PATTERN_LIMIT: usize = 20;
pub const DEFAULT_SHTARKOV_LIMIT: usize = 12;

/// Largest lengths for which enumeration is attempted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    /// Pattern and profile enumeration.
    pub patterns: usize,
    /// Work that needs a supremum per pattern class (Shtarkov sums, measured
    /// redundancy).
    pub shtarkov: usize,
}

impl Default for Guard {
    fn default() -> Self {
        Self {
            patterns: DEFAULT_PATTERN_LIMIT,
            shtarkov: DEFAULT_SHTARKOV_LIMIT,
        }
    }
}

impl Guard {
    /// Same limit for everything.
    pub fn uniform(limit: usize) -> Self {
        Self {
            patterns: limit,
            shtarkov: limit,
        }
    }

    /// Defaults, or the value of `ALT_MARK_GUARD_N` when it parses.
    pub fn from_env() -> Self {
        std::env::var(GUARD_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Self::uniform)
            .unwrap_or_default()
    }

    pub fn check_patterns(&self, n: usize) -> Result<()> {
        check(n, self.patterns)
    }

    pub fn check_shtarkov(&self, n: usize) -> Result<()> {
        check(n, self.shtarkov)
    }
}

fn check(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::GuardExceeded { n, limit })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        let g = Guard::default();
        assert!(g.check_patterns(20).is_ok());
        assert_eq!(
            g.check_patterns(21),
            Err(Error::GuardExceeded { n: 21, limit: 20 })
        );
        assert!(g.check_shtarkov(13).is_err());
        assert!(Guard::uniform(5).check_shtarkov(5).is_ok());
    }
}
