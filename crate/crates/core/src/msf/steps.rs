//! The per-iteration building blocks of the MSF loop.

use std::collections::BTreeSet;

use crate::algebra::{outgoing_edge_fn, EdgeEntry, EdgeKey, MinWeight, Weight};
use crate::forest::{ParentVector, StarFlags};
use crate::kernels::{multilinear_counted, scatter_combine};
use crate::matrix::AdjacencyMatrix;

/// Marks every vertex whose tree has height at most one.
///
/// A vertex with a grandparent different from its parent clears its own
/// flag, its parent's and its grandparent's; the survivors then copy their
/// parent's flag.
pub fn starcheck(p: &ParentVector) -> StarFlags {
    let p = p.as_slice();
    let mut s = vec![true; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        let gp = p[pi];
        if pi != gp {
            s[i] = false;
            s[pi] = false;
            s[gp] = false;
        }
    }
    let informed = s.clone();
    for (i, &pi) in p.iter().enumerate() {
        if s[i] {
            s[i] = informed[pi];
        }
    }
    StarFlags::from_vec(s)
}

/// Minimum outgoing edge of each star member; identity elsewhere.
pub fn min_outgoing(a: &AdjacencyMatrix, p: &ParentVector, s: &StarFlags) -> Vec<EdgeEntry> {
    min_outgoing_counted(a, p, Some(s)).0
}

pub(crate) fn min_outgoing_counted(
    a: &AdjacencyMatrix,
    p: &ParentVector,
    s: Option<&StarFlags>,
) -> (Vec<EdgeEntry>, usize) {
    multilinear_counted(
        a,
        p.as_slice(),
        p.as_slice(),
        &outgoing_edge_fn(),
        &MinWeight,
        s.map(StarFlags::as_slice),
    )
    .expect("parent vector matches the matrix dimension")
}

/// `r_i = MinWeight { q_j : p_j = i }`.
pub fn scatter_to_roots(q: &[EdgeEntry], p: &ParentVector) -> Vec<EdgeEntry> {
    scatter_combine(q, p.as_slice(), &MinWeight).expect("parent vector is in range")
}

/// Roots of stars, snapshotted before hooking.
pub fn star_roots(p: &ParentVector, s: &StarFlags) -> Vec<bool> {
    (0..p.len()).map(|i| p.is_root(i) && s.get(i)).collect()
}

/// `p_i ← r_i.parent` wherever `r_i` is not the identity.
pub fn hook(p: &ParentVector, r: &[EdgeEntry]) -> ParentVector {
    let mut out = p.clone();
    for (slot, entry) in out.as_mut_slice().iter_mut().zip(r) {
        if let Some(parent) = entry.parent {
            *slot = parent;
        }
    }
    out
}

/// Breaks the 2-cycles left by mutual hooks, keeping the smaller root.
///
/// Returns the repaired vector and `t`, true for each vertex that was reset.
pub fn tie_break(p: &ParentVector, roots_before_hook: &[bool]) -> (ParentVector, Vec<bool>) {
    let hooked = p.as_slice();
    let t: Vec<bool> = (0..p.len())
        .map(|i| roots_before_hook[i] && i < hooked[i] && hooked[hooked[i]] == i)
        .collect();
    let mut out = p.clone();
    for (i, slot) in out.as_mut_slice().iter_mut().enumerate() {
        if t[i] {
            *slot = i;
        }
    }
    (out, t)
}

/// Running forest weight and edge set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ForestAccumulator {
    pub total_weight: Weight,
    pub edges: BTreeSet<EdgeKey>,
}

/// Adds every hook that survived tie breaking. Returns how many were added.
pub fn accumulate(r: &[EdgeEntry], t: &[bool], acc: &mut ForestAccumulator) -> usize {
    let mut added = 0;
    for (entry, &reset) in r.iter().zip(t) {
        if let (Some(key), false) = (entry.key, reset) {
            acc.total_weight = acc.total_weight + entry.weight;
            acc.edges.insert(key);
            added += 1;
        }
    }
    added
}
