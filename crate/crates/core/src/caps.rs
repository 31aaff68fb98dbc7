use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Limits on the exhaustive searches. Every oracle in the crate is
/// exponential somewhere, so each one refuses work past its cap instead of
/// running away.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest n for the subset searches behind MAIS and feedback vertex sets.
    pub fvs_max_n: usize,
    /// Largest n for the minrank subspace enumeration.
    pub minrank_max_n: usize,
    /// Maximum number of cycles enumerated before reporting overflow.
    pub cycle_limit: usize,
    /// Maximum number of paths enumerated per query before reporting overflow.
    pub path_limit: usize,
    /// Maximum number of maximal subpaths handed to the assignment search.
    pub max_segments: usize,
    /// Maximum number of partial assignments visited by the assignment search.
    pub max_search_nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            fvs_max_n: 20,
            minrank_max_n: 8,
            cycle_limit: 1_000_000,
            path_limit: 100_000,
            max_segments: 40,
            max_search_nodes: 2_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{what}: {value} exceeds the configured limit of {limit}")]
pub struct CapExceeded {
    pub what: &'static str,
    pub value: usize,
    pub limit: usize,
}

impl CapExceeded {
    pub fn check(what: &'static str, value: usize, limit: usize) -> Result<(), CapExceeded> {
        if value > limit {
            Err(CapExceeded { what, value, limit })
        } else {
            Ok(())
        }
    }
}
