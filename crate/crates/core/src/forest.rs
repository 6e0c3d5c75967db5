//! Parent-pointer forests and the small vectors derived from them.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("parent of vertex {vertex} is {parent}, outside 1..={n}")]
    ParentOutOfRange {
        vertex: usize,
        parent: usize,
        n: usize,
    },
    #[error("pointer cycle through vertex {vertex}")]
    Cycle { vertex: usize },
}

/// The forest pointer array `p`: `p[i]` is the parent of `i`, roots point
/// to themselves. Stored 0-based; [`ParentVector::from_one_based`] and
/// [`ParentVector::to_one_based`] convert at the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParentVector(Vec<usize>);

impl ParentVector {
    /// Every vertex its own root.
    pub fn identity(n: usize) -> ParentVector {
        ParentVector((0..n).collect())
    }

    pub fn from_vec(parents: Vec<usize>) -> Result<ParentVector, ForestError> {
        let n = parents.len();
        if let Some((vertex, &parent)) = parents.iter().enumerate().find(|(_, &p)| p >= n) {
            return Err(ForestError::ParentOutOfRange {
                vertex: vertex + 1,
                parent: parent + 1,
                n,
            });
        }
        Ok(ParentVector(parents))
    }

    pub fn from_one_based(parents: &[usize]) -> Result<ParentVector, ForestError> {
        let n = parents.len();
        let mut out = Vec::with_capacity(n);
        for (vertex, &parent) in parents.iter().enumerate() {
            if parent == 0 || parent > n {
                return Err(ForestError::ParentOutOfRange {
                    vertex: vertex + 1,
                    parent,
                    n,
                });
            }
            out.push(parent - 1);
        }
        Ok(ParentVector(out))
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|p| p + 1).collect()
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn parent(&self, i: usize) -> usize {
        self.0[i]
    }

    #[inline]
    pub fn is_root(&self, i: usize) -> bool {
        self.0[i] == i
    }

    pub fn root_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_root(i)).count()
    }

    /// `p[p[i]]` for every `i`.
    pub fn grandparents(&self) -> Vec<usize> {
        self.0.iter().map(|&p| self.0[p]).collect()
    }

    /// Every tree has height at most one.
    pub fn is_star_forest(&self) -> bool {
        self.0.iter().all(|&p| self.0[p] == p)
    }

    /// Root reached by pointer chasing from every vertex.
    ///
    /// Fails if some chase revisits a vertex before reaching a self loop.
    pub fn roots(&self) -> Result<Vec<usize>, ForestError> {
        const UNKNOWN: usize = usize::MAX;
        let n = self.len();
        let mut root = vec![UNKNOWN; n];
        // 0 = unseen, 1 = on the current chase, 2 = resolved
        let mut state = vec![0u8; n];
        let mut path = Vec::new();
        for start in 0..n {
            let mut v = start;
            while state[v] == 0 && !self.is_root(v) {
                state[v] = 1;
                path.push(v);
                v = self.0[v];
            }
            if state[v] == 1 {
                return Err(ForestError::Cycle { vertex: v + 1 });
            }
            let r = if self.is_root(v) { v } else { root[v] };
            root[v] = r;
            state[v] = 2;
            for u in path.drain(..) {
                root[u] = r;
                state[u] = 2;
            }
        }
        Ok(root)
    }

    /// Checks the vector is a directed rooted forest.
    pub fn check_rooted_forest(&self) -> Result<(), ForestError> {
        self.roots().map(|_| ())
    }

    /// Lengths of every pointer cycle other than root self loops.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.len();
        let mut color = vec![0usize; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if color[start] != 0 {
                continue;
            }
            let mark = start + 1;
            let mut v = start;
            while color[v] == 0 {
                color[v] = mark;
                v = self.0[v];
            }
            if color[v] == mark && !self.is_root(v) {
                let mut len = 1;
                let mut u = self.0[v];
                while u != v {
                    len += 1;
                    u = self.0[u];
                }
                lengths.push(len);
            }
        }
        lengths
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [usize] {
        &mut self.0
    }
}

/// `s[i]` is true exactly when `i` lies in a tree of height at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarFlags(Vec<bool>);

impl StarFlags {
    pub fn all(n: usize) -> StarFlags {
        StarFlags(vec![true; n])
    }

    pub fn from_vec(flags: Vec<bool>) -> StarFlags {
        StarFlags(flags)
    }

    #[inline]
    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Vertices whose parent moved during one hook step, with their new parent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChangeSet(BTreeMap<usize, usize>);

impl ChangeSet {
    pub fn new() -> ChangeSet {
        ChangeSet(BTreeMap::new())
    }

    /// `{(i, p[i]) : p[i] != previous[i]}`.
    pub fn between(p: &ParentVector, previous: &ParentVector) -> ChangeSet {
        ChangeSet(
            p.as_slice()
                .iter()
                .zip(previous.as_slice())
                .enumerate()
                .filter(|(_, (now, before))| now != before)
                .map(|(i, (&now, _))| (i, now))
                .collect(),
        )
    }

    /// Returns the previous value when `vertex` was already present.
    pub fn insert(&mut self, vertex: usize, parent: usize) -> Option<usize> {
        self.0.insert(vertex, parent)
    }

    #[inline]
    pub fn get(&self, vertex: usize) -> Option<usize> {
        self.0.get(&vertex).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }
}

impl FromIterator<(usize, usize)> for ChangeSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        ChangeSet(iter.into_iter().collect())
    }
}
