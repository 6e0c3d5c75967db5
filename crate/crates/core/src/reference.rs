//! Classical sequential algorithms used to verify the algebraic ones.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::algebra::Weight;
use crate::matrix::AdjacencyMatrix;

/// Component id per vertex by breadth-first search, numbered in order of
/// each component's smallest vertex.
pub fn bfs_components(a: &AdjacencyMatrix) -> Vec<usize> {
    let n = a.n();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &u in a.row(v).0 {
                if label[u] == usize::MAX {
                    label[u] = next;
                    queue.push_back(u);
                }
            }
        }
        next += 1;
    }
    label
}

/// Dijkstra with a binary heap. Weights must be non-negative.
pub fn dijkstra(a: &AdjacencyMatrix, source: usize) -> Vec<Weight> {
    let mut dist = vec![Weight::INFINITY; a.n()];
    let mut heap = BinaryHeap::new();
    dist[source] = Weight::ZERO;
    heap.push(Reverse((Weight::ZERO, source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        let (cols, vals) = a.row(v);
        for (&u, entry) in cols.iter().zip(vals) {
            let candidate = d + entry.weight;
            if candidate < dist[u] {
                dist[u] = candidate;
                heap.push(Reverse((candidate, u)));
            }
        }
    }
    dist
}

/// Shortest distances by enumerating every simple path from `source`.
/// Exponential; for tiny graphs only.
pub fn brute_force_distances(a: &AdjacencyMatrix, source: usize) -> Vec<Weight> {
    fn walk(a: &AdjacencyMatrix, v: usize, len: Weight, on_path: &mut [bool], best: &mut [Weight]) {
        if len < best[v] {
            best[v] = len;
        }
        on_path[v] = true;
        let (cols, vals) = a.row(v);
        for (&u, entry) in cols.iter().zip(vals) {
            if !on_path[u] {
                walk(a, u, len + entry.weight, on_path, best);
            }
        }
        on_path[v] = false;
    }
    let mut best = vec![Weight::INFINITY; a.n()];
    let mut on_path = vec![false; a.n()];
    walk(a, source, Weight::ZERO, &mut on_path, &mut best);
    best
}
