//! Sequential verification oracle.

use std::collections::BTreeSet;

use super::driver::MsfResult;
use crate::algebra::{EdgeKey, Weight};
use crate::forest::ParentVector;
use crate::matrix::AdjacencyMatrix;

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> DisjointSets {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal's algorithm under the same `(weight, key)` order as the engine.
pub fn kruskal_oracle(a: &AdjacencyMatrix) -> MsfResult {
    let n = a.n();
    let mut edges: Vec<(Weight, EdgeKey)> = a.edges().map(|(k, w)| (w, k)).collect();
    edges.sort_unstable();
    let mut sets = DisjointSets::new(n);
    let mut total = Weight::ZERO;
    let mut forest = BTreeSet::new();
    for (w, k) in edges {
        if sets.union(k.lo(), k.hi()) {
            total = total + w;
            forest.insert(k);
        }
    }
    let roots: Vec<usize> = (0..n).map(|v| sets.find(v)).collect();
    MsfResult {
        n,
        total_weight: total,
        forest_edges: forest,
        iterations: 0,
        per_iteration: Vec::new(),
        parents: ParentVector::from_vec(roots).expect("roots are vertices"),
    }
}
