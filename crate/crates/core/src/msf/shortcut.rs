//! Pointer-jumping strategies.

use thiserror::Error;

use crate::forest::{ChangeSet, ParentVector, StarFlags};

/// Entry count below which [`shortcut_auto`] prefetches.
pub const DEFAULT_CSP_THRESHOLD: usize = 1_310_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShortcutError {
    #[error("parent vectors differ in length ({p} vs {p_prev})")]
    LengthMismatch { p: usize, p_prev: usize },
    #[error("changed entries form a cycle through vertex {vertex}")]
    Cycle { vertex: usize },
}

/// One jump `p_i ← p_{p_i}` for every vertex outside a star.
pub fn shortcut_baseline(p: &ParentVector, s: &StarFlags) -> ParentVector {
    let old = p.as_slice();
    let mut out = p.clone();
    for (i, slot) in out.as_mut_slice().iter_mut().enumerate() {
        if !s.get(i) {
            *slot = old[old[i]];
        }
    }
    out
}

/// One synchronous jump for every vertex. Stars are fixed points, so this
/// agrees with [`shortcut_baseline`] without needing star flags.
fn jump_all(p: &ParentVector) -> Option<ParentVector> {
    let old = p.as_slice();
    let next: Vec<usize> = old.iter().map(|&pi| old[pi]).collect();
    if next == old {
        None
    } else {
        Some(ParentVector::from_vec(next).expect("grandparents stay in range"))
    }
}

/// Jumps until every tree is a star.
///
/// Returns the star forest and the number of passes that changed an entry;
/// the final pass that only confirms convergence is not counted.
pub fn shortcut_complete(p: &ParentVector) -> (ParentVector, usize) {
    shortcut_complete_observed(p, |_| {})
}

/// [`shortcut_complete`] that shows each pass's input to `observe`,
/// including the final confirming pass.
pub(crate) fn shortcut_complete_observed<F>(
    p: &ParentVector,
    mut observe: F,
) -> (ParentVector, usize)
where
    F: FnMut(&ParentVector),
{
    let mut current = p.clone();
    let mut passes = 0;
    loop {
        observe(&current);
        match jump_all(&current) {
            Some(next) => {
                current = next;
                passes += 1;
            }
            None => return (current, passes),
        }
    }
}

/// Complete shortcutting by chasing a globally known change map.
///
/// Valid when `p_prev` was a star forest and `p` differs from it only at
/// former roots that hooked, which is how the driver calls it.
pub fn shortcut_csp(
    p: &ParentVector,
    p_prev: &ParentVector,
) -> Result<(ParentVector, ChangeSet), ShortcutError> {
    let (out, changed, _) = shortcut_csp_counted(p, p_prev)?;
    Ok((out, changed))
}

/// Also returns the number of map lookups that hit.
pub(crate) fn shortcut_csp_counted(
    p: &ParentVector,
    p_prev: &ParentVector,
) -> Result<(ParentVector, ChangeSet, u64), ShortcutError> {
    if p.len() != p_prev.len() {
        return Err(ShortcutError::LengthMismatch {
            p: p.len(),
            p_prev: p_prev.len(),
        });
    }
    let changed = ChangeSet::between(p, p_prev);
    if changed.is_empty() {
        return Ok((p.clone(), changed, 0));
    }
    let mut out = p.clone();
    let mut lookups = 0u64;
    let limit = changed.len();
    for (i, slot) in out.as_mut_slice().iter_mut().enumerate() {
        let mut steps = 0;
        while let Some(next) = changed.get(*slot) {
            if next == *slot {
                break;
            }
            *slot = next;
            steps += 1;
            if steps > limit {
                return Err(ShortcutError::Cycle { vertex: i + 1 });
            }
        }
        lookups += steps as u64;
    }
    Ok((out, changed, lookups))
}

/// CSP when fewer than `threshold` entries changed, otherwise repeated
/// jumping. Both paths give the same result.
pub fn shortcut_auto(
    p: &ParentVector,
    p_prev: &ParentVector,
    threshold: usize,
) -> Result<ParentVector, ShortcutError> {
    if ChangeSet::between(p, p_prev).len() < threshold {
        shortcut_csp(p, p_prev).map(|(out, _)| out)
    } else {
        Ok(shortcut_complete(p).0)
    }
}
