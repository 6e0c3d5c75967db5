//! Deterministic simulation of the 2D-matrix / 1D-vector distributed layout.
//!
//! Ranks execute in fixed order; collectives are costed analytically under
//! the volume model below rather than timed.
//!
//! * Matrix: `√p × √p` grid of contiguous blocks of `b = ⌈n/√p⌉` rows and
//!   columns. Rank `(r, s)` is linear rank `r·√p + s`.
//! * Vectors: 1D blocks of `⌈n/p⌉` entries, block `k` on linear rank `k`.
//! * Redistribution: row block `r` of an input is collected on the diagonal
//!   rank `(r, r)`; every element not already owned there costs its size.
//!   Outputs travel back the same way.
//! * Broadcast and reduce: every participating rank is charged one padded
//!   block of `b` elements per vector, and nothing when `√p = 1`.
//! * All-gather: `(p - 1) · |payload|` words in total.
//! * Gathers of remote vector entries collate duplicate indices per rank.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{MatrixEntry, Monoid, MultilinearFn};
use crate::cost::{CostCounters, WordSize, CHANGED_ENTRY_WORDS};
use crate::forest::ChangeSet;
use crate::kernels::{check_len, KernelError};
use crate::matrix::{AdjacencyMatrix, MatrixError};

/// Short description of the cost model, echoed in reports.
pub const COST_MODEL: &str = "matrix in contiguous ceil(n/sqrt(p)) blocks on a sqrt(p) x sqrt(p) grid; \
vectors in contiguous ceil(n/p) blocks; redistribution counts elements not already on the diagonal collector; \
broadcast and reduce charge one padded block per participating rank, none when p = 1; \
all-gather charges (p-1)*|payload|; gathers collate duplicate remote indices per rank; \
scatters pre-combine per rank and charge distinct remote targets; \
words: vertex id, flag or weight = 1, edge entry = 3, changed-map entry = 2";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("process count {0} is not a positive perfect square")]
    NotPerfectSquare(usize),
    #[error("expected {expected} per-rank contributions, got {found}")]
    ContributionCount { expected: usize, found: usize },
    #[error("vertex {vertex} contributed by ranks {first} and {second}")]
    DuplicateKey {
        vertex: usize,
        first: usize,
        second: usize,
    },
}

/// Validated process count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridShape {
    processes: usize,
    side: usize,
}

impl GridShape {
    pub fn new(processes: usize) -> Result<GridShape, GridError> {
        let side = (processes as f64).sqrt().round() as usize;
        if processes == 0 || side * side != processes {
            return Err(GridError::NotPerfectSquare(processes));
        }
        Ok(GridShape { processes, side })
    }

    pub fn processes(&self) -> usize {
        self.processes
    }

    pub fn side(&self) -> usize {
        self.side
    }
}

/// Ownership maps for an `n`-vertex problem on a given grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridLayout {
    shape: GridShape,
    n: usize,
    block: usize,
    vec_block: usize,
}

impl GridLayout {
    pub fn new(processes: usize, n: usize) -> Result<GridLayout, GridError> {
        Ok(GridLayout::from_shape(GridShape::new(processes)?, n))
    }

    pub fn from_shape(shape: GridShape, n: usize) -> GridLayout {
        GridLayout {
            shape,
            n,
            block: n.div_ceil(shape.side),
            vec_block: n.div_ceil(shape.processes),
        }
    }

    #[inline]
    pub fn processes(&self) -> usize {
        self.shape.processes
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.shape.side
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// `⌈n/√p⌉`, the row/column block size.
    #[inline]
    pub fn block_size(&self) -> usize {
        self.block
    }

    /// `⌈n/p⌉`, the 1D vector block size.
    #[inline]
    pub fn vector_block_size(&self) -> usize {
        self.vec_block
    }

    /// Row or column block holding index `i`.
    #[inline]
    pub fn block_of(&self, i: usize) -> usize {
        i / self.block.max(1)
    }

    pub fn block_range(&self, b: usize) -> std::ops::Range<usize> {
        let start = (b * self.block).min(self.n);
        let end = ((b + 1) * self.block).min(self.n);
        start..end
    }

    #[inline]
    pub fn rank(&self, r: usize, s: usize) -> usize {
        r * self.side() + s
    }

    #[inline]
    pub fn coords(&self, rank: usize) -> (usize, usize) {
        (rank / self.side(), rank % self.side())
    }

    /// 1D owner of vector entry `i`.
    #[inline]
    pub fn owner(&self, i: usize) -> usize {
        i / self.vec_block.max(1)
    }

    /// 2D owner of matrix entry `(i, j)`.
    #[inline]
    pub fn matrix_owner(&self, i: usize, j: usize) -> usize {
        self.rank(self.block_of(i), self.block_of(j))
    }
}

/// Counters for one simulated collective step: totals plus the per-rank
/// breakdown they sum to.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GridCounters {
    pub total: CostCounters,
    pub per_rank: Vec<CostCounters>,
}

impl GridCounters {
    fn new(processes: usize) -> GridCounters {
        GridCounters {
            total: CostCounters::default(),
            per_rank: vec![CostCounters::default(); processes],
        }
    }

    fn charge(&mut self, rank: usize, f: impl Fn(&mut CostCounters)) {
        f(&mut self.per_rank[rank]);
        f(&mut self.total);
    }
}

/// The submatrix `A^(r,s)` owned by one rank; column ids stay global.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalBlock {
    pub rows: std::ops::Range<usize>,
    pub cols: std::ops::Range<usize>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<MatrixEntry>,
}

impl LocalBlock {
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Entries of global row `i`, which must lie in `self.rows`.
    pub fn row(&self, i: usize) -> (&[usize], &[MatrixEntry]) {
        let local = i - self.rows.start;
        let range = self.row_ptr[local]..self.row_ptr[local + 1];
        (&self.col_idx[range.clone()], &self.vals[range])
    }
}

/// A matrix split over the 2D grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionedMatrix {
    layout: GridLayout,
    blocks: Vec<LocalBlock>,
}

pub fn partition(a: &AdjacencyMatrix, shape: GridShape) -> PartitionedMatrix {
    let layout = GridLayout::from_shape(shape, a.n());
    let q = layout.side();
    let mut blocks = Vec::with_capacity(layout.processes());
    for rank in 0..layout.processes() {
        let (r, s) = layout.coords(rank);
        let rows = layout.block_range(r);
        let cols = layout.block_range(s);
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        for i in rows.clone() {
            let (rc, rv) = a.row(i);
            let lo = rc.partition_point(|&j| j < cols.start);
            let hi = rc.partition_point(|&j| j < cols.end);
            col_idx.extend_from_slice(&rc[lo..hi]);
            vals.extend_from_slice(&rv[lo..hi]);
            row_ptr.push(col_idx.len());
        }
        blocks.push(LocalBlock {
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
        });
    }
    debug_assert_eq!(blocks.len(), q * q);
    PartitionedMatrix { layout, blocks }
}

impl PartitionedMatrix {
    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    pub fn block(&self, r: usize, s: usize) -> &LocalBlock {
        &self.blocks[self.layout.rank(r, s)]
    }

    pub fn blocks(&self) -> &[LocalBlock] {
        &self.blocks
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().map(LocalBlock::nnz).sum()
    }

    /// Rebuilds the global matrix from the blocks.
    pub fn reassemble(&self) -> Result<AdjacencyMatrix, MatrixError> {
        let mut edges = Vec::with_capacity(self.nnz() / 2);
        for block in &self.blocks {
            for i in block.rows.clone() {
                let (cols, vals) = block.row(i);
                for (&j, a) in cols.iter().zip(vals) {
                    if i < j {
                        edges.push((i, j, a.weight.value()));
                    }
                }
            }
        }
        AdjacencyMatrix::from_edges(self.layout.n(), edges)
    }

    /// Charges collecting row (or column) blocks of a vector on diagonal ranks.
    fn charge_redistribution(&self, words: u64, counters: &mut GridCounters, inbound: bool) {
        let layout = &self.layout;
        for b in 0..layout.side() {
            let collector = layout.rank(b, b);
            for i in layout.block_range(b) {
                let owner = layout.owner(i);
                if owner != collector {
                    // Inputs are charged to the sender, outputs to the collector.
                    let rank = if inbound { owner } else { collector };
                    counters.charge(rank, |c| c.words_redistributed += words);
                }
            }
        }
    }

    fn charge_broadcast(&self, words: u64, counters: &mut GridCounters) {
        if self.layout.side() > 1 {
            let volume = self.layout.block_size() as u64 * words;
            for rank in 0..self.layout.processes() {
                counters.charge(rank, |c| c.words_broadcast += volume);
            }
        }
    }

    /// Local apply on every rank followed by the reduction along each grid
    /// row. `eval(rank, i, slot, j, a_ij)` produces one term, where `slot`
    /// is the entry's position in that rank's block storage.
    fn apply_and_reduce<M, E>(
        &self,
        m: &M,
        mask: Option<&[bool]>,
        eval: E,
        counters: &mut GridCounters,
    ) -> Vec<M::Elem>
    where
        M: Monoid,
        M::Elem: WordSize,
        E: Fn(usize, usize, usize, usize, &MatrixEntry) -> M::Elem,
    {
        let layout = &self.layout;
        let q = layout.side();
        let b = layout.block_size() as u64;
        let mut w = Vec::with_capacity(layout.n());
        for r in 0..q {
            let rows = layout.block_range(r);
            let mut partials: Vec<Vec<M::Elem>> = Vec::with_capacity(q);
            for s in 0..q {
                let rank = layout.rank(r, s);
                let block = self.block(r, s);
                let mut partial = Vec::with_capacity(rows.len());
                let mut visited = 0u64;
                for i in rows.clone() {
                    let mut acc = m.identity();
                    if !mask.is_some_and(|mask| !mask[i]) {
                        let base = block.row_ptr[i - block.rows.start];
                        let (cols, vals) = block.row(i);
                        for (k, (&j, a)) in cols.iter().zip(vals).enumerate() {
                            acc = m.combine(&acc, &eval(rank, i, base + k, j, a));
                        }
                        visited += cols.len() as u64;
                    }
                    partial.push(acc);
                }
                counters.charge(rank, |c| c.local_combines += visited);
                partials.push(partial);
            }

            if q > 1 {
                let collector = layout.rank(r, r);
                for s in 0..q {
                    let rank = layout.rank(r, s);
                    counters.charge(rank, |c| c.words_reduced += b * M::Elem::WORDS);
                    if rank != collector {
                        counters.charge(rank, |c| c.remote_writes += b);
                        counters.charge(collector, |c| c.local_combines += b);
                    }
                }
            }
            // Partials are combined in ascending column-block order.
            for local in 0..rows.len() {
                let mut acc = m.identity();
                for partial in &partials {
                    acc = m.combine(&acc, &partial[local]);
                }
                w.push(acc);
            }
        }
        w
    }
}

fn check_grid_dims<X, Y>(
    state: &PartitionedMatrix,
    x: &[X],
    y: &[Y],
    mask: Option<&[bool]>,
) -> Result<(), KernelError> {
    let n = state.layout.n();
    check_len("x", n, x.len())?;
    check_len("y", n, y.len())?;
    if let Some(mask) = mask {
        check_len("mask", n, mask.len())?;
    }
    Ok(())
}

/// All-at-once multilinear kernel on the simulated grid.
///
/// Redistributes `x` and `y` into row/column blocks, broadcasts them along
/// grid rows and columns, applies `f` to every local entry, reduces partial
/// outputs along each grid row and returns the result to the 1D layout.
pub fn grid_multilinear<X, Y, F, M>(
    state: &PartitionedMatrix,
    x: &[X],
    y: &[Y],
    f: &F,
    m: &M,
    mask: Option<&[bool]>,
) -> Result<(Vec<M::Elem>, GridCounters), KernelError>
where
    X: WordSize,
    Y: WordSize,
    F: MultilinearFn<X, Y, Output = M::Elem>,
    M: Monoid,
    M::Elem: WordSize,
{
    check_grid_dims(state, x, y, mask)?;
    let mut counters = GridCounters::new(state.layout.processes());
    state.charge_redistribution(X::WORDS, &mut counters, true);
    state.charge_redistribution(Y::WORDS, &mut counters, true);
    state.charge_broadcast(X::WORDS, &mut counters);
    state.charge_broadcast(Y::WORDS, &mut counters);
    let w = state.apply_and_reduce(
        m,
        mask,
        |_, i, _, j, a| f.apply(&x[i], a, &y[j]),
        &mut counters,
    );
    state.charge_redistribution(M::Elem::WORDS, &mut counters, false);
    Ok((w, counters))
}

/// Pairwise scheme on the grid: first writes `(a_ij, y_j)` into every local
/// matrix entry, then combines rows against `x`. Same output and vector
/// traffic as [`grid_multilinear`], plus one write per stored entry.
pub fn grid_multilinear_pairwise<X, Y, F, M>(
    state: &PartitionedMatrix,
    x: &[X],
    y: &[Y],
    f: &F,
    m: &M,
    mask: Option<&[bool]>,
) -> Result<(Vec<M::Elem>, GridCounters), KernelError>
where
    X: WordSize,
    Y: WordSize + Clone,
    F: MultilinearFn<X, Y, Output = M::Elem>,
    M: Monoid,
    M::Elem: WordSize,
{
    check_grid_dims(state, x, y, mask)?;
    let mut counters = GridCounters::new(state.layout.processes());

    state.charge_redistribution(Y::WORDS, &mut counters, true);
    state.charge_broadcast(Y::WORDS, &mut counters);
    let mut paired: Vec<Vec<(MatrixEntry, Y)>> = Vec::with_capacity(state.blocks.len());
    for (rank, block) in state.blocks.iter().enumerate() {
        let stored: Vec<_> = block
            .col_idx
            .iter()
            .zip(&block.vals)
            .map(|(&j, a)| (*a, y[j].clone()))
            .collect();
        counters.charge(rank, |c| c.remote_writes += stored.len() as u64);
        paired.push(stored);
    }

    state.charge_redistribution(X::WORDS, &mut counters, true);
    state.charge_broadcast(X::WORDS, &mut counters);
    let w = state.apply_and_reduce(
        m,
        mask,
        |rank, i, slot, _, _| {
            let (a, yj) = &paired[rank][slot];
            f.apply(&x[i], a, yj)
        },
        &mut counters,
    );
    state.charge_redistribution(M::Elem::WORDS, &mut counters, false);
    Ok((w, counters))
}

/// Splits a change set into per-rank contributions by 1D ownership.
pub fn split_changes(changed: &ChangeSet, layout: &GridLayout) -> Vec<Vec<(usize, usize)>> {
    let mut parts = vec![Vec::new(); layout.processes()];
    for (vertex, parent) in changed.iter() {
        parts[layout.owner(vertex)].push((vertex, parent));
    }
    parts
}

/// Every rank ends up holding the union of all contributions.
pub fn grid_allgather(
    contributions: &[Vec<(usize, usize)>],
    layout: &GridLayout,
) -> Result<(ChangeSet, GridCounters), GridError> {
    let p = layout.processes();
    if contributions.len() != p {
        return Err(GridError::ContributionCount {
            expected: p,
            found: contributions.len(),
        });
    }
    let mut merged = ChangeSet::new();
    let mut source = std::collections::BTreeMap::new();
    for (rank, part) in contributions.iter().enumerate() {
        for &(vertex, parent) in part {
            if let Some(first) = source.insert(vertex, rank) {
                return Err(GridError::DuplicateKey {
                    vertex: vertex + 1,
                    first,
                    second: rank,
                });
            }
            merged.insert(vertex, parent);
        }
    }
    let total = merged.len() as u64;
    let mut counters = GridCounters::new(p);
    for (rank, part) in contributions.iter().enumerate() {
        let received = (total - part.len() as u64) * CHANGED_ENTRY_WORDS;
        counters.charge(rank, |c| c.words_allgathered += received);
    }
    Ok((merged, counters))
}

/// Remote reads needed for `out_i = v[idx_i]` where rank `owner(i)` reads
/// for position `i`. Positions with `active[i] == false` read nothing.
pub fn gather_cost(
    layout: &GridLayout,
    idx: &[usize],
    active: Option<&[bool]>,
    words: u64,
) -> GridCounters {
    let mut counters = GridCounters::new(layout.processes());
    let mut wanted: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); layout.processes()];
    for (i, &target) in idx.iter().enumerate() {
        if active.is_some_and(|a| !a[i]) {
            continue;
        }
        let rank = layout.owner(i);
        if layout.owner(target) != rank {
            wanted[rank].insert(target);
        }
    }
    for (rank, set) in wanted.iter().enumerate() {
        let volume = set.len() as u64 * words;
        counters.charge(rank, |c| c.words_gathered += volume);
    }
    counters
}

/// Remote writes for `out[target_j] ⊕= q_j` after per-rank pre-combining.
pub fn scatter_cost(
    layout: &GridLayout,
    targets: impl Iterator<Item = (usize, usize)>,
    words: u64,
) -> GridCounters {
    let mut counters = GridCounters::new(layout.processes());
    let mut remote: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); layout.processes()];
    for (source, target) in targets {
        let rank = layout.owner(source);
        counters.charge(rank, |c| c.local_combines += 1);
        if layout.owner(target) != rank {
            remote[rank].insert(target);
        }
    }
    for (rank, set) in remote.iter().enumerate() {
        let count = set.len() as u64;
        counters.charge(rank, |c| {
            c.remote_writes += count;
            c.words_scattered += count * words;
        });
    }
    counters
}
