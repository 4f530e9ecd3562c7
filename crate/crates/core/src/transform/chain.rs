//! Chaining and period detection.

use num_integer::Integer;

use super::partition::partition_blocks;
use crate::linalg::{default_period_cap, period_of};
use crate::program::{identity_update, then, Guard, Loop};

/// Default ceiling on detected periods.
pub const PERIOD_CEILING: u64 = 360;

/// The loop that runs `p` iterations of `l` at once.
pub fn chain(l: &Loop, p: u32) -> Loop {
    assert!(p >= 1, "chaining needs p >= 1");
    let mut power = identity_update(l.update.keys());
    let mut guards = Vec::with_capacity(p as usize);
    for _ in 0..p {
        guards.push(l.guard.compose(&power));
        power = then(&power, &l.update);
    }
    Loop { guard: Guard::and(guards), update: power }
}

/// Period of a periodic-rational loop: the least `p` such that every block
/// matrix of the `p`-th power has integer eigenvalues.
pub fn detect_prs(l: &Loop, ceiling: u64) -> Option<u64> {
    let part = partition_blocks(&l.update)?;
    let mut p = 1u64;
    for b in &part.blocks {
        let cap = default_period_cap(b.vars.len(), ceiling);
        p = p.lcm(&period_of(&b.matrix, cap)?);
        if p > ceiling {
            return None;
        }
    }
    Some(p)
}
