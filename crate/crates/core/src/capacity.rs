//! Enumeration limits shared by the exact oracles.

use serde::{Deserialize, Serialize};

/// Size guards for exact enumeration. Plans may lower or raise them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Capacity {
    /// Largest `m^(2nd)` accepted by the exact total-variation oracle.
    pub max_tv_states: u64,
    /// Largest `n` for `n!` permutation enumeration.
    pub max_factorial_n: usize,
    /// Largest `n` for integer-partition enumeration.
    pub max_partition_n: usize,
}

impl Default for Capacity {
    fn default() -> Self {
        Self {
            max_tv_states: 1 << 24,
            max_factorial_n: 8,
            max_partition_n: 60,
        }
    }
}
