//! Semiring SpMV, the all-at-once multilinear kernel, its pairwise
//! reference, and the vector scatter/gather primitives.
//!
//! Rows are reduced independently in ascending column order, so results are
//! bitwise identical whatever the rayon pool size.

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Monoid, MultilinearFn, Semiring, Weight};
use crate::cost::CostCounters;
use crate::matrix::AdjacencyMatrix;

/// Below this many stored entries kernels stay on the calling thread.
const PAR_NNZ: usize = 1 << 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("{what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("index {index} out of range for a vector of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

pub(crate) fn check_len(
    what: &'static str,
    expected: usize,
    found: usize,
) -> Result<(), KernelError> {
    if expected == found {
        Ok(())
    } else {
        Err(KernelError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

/// Applies `row_fn` to every row, in parallel for large matrices.
fn map_rows<T, G>(a: &AdjacencyMatrix, row_fn: G) -> Vec<T>
where
    T: Send,
    G: Fn(usize) -> T + Sync + Send,
{
    if a.nnz() >= PAR_NNZ {
        (0..a.n()).into_par_iter().map(row_fn).collect()
    } else {
        (0..a.n()).map(row_fn).collect()
    }
}

/// `y_j = x_j ⊕ ⊕_k x_k ⊗ a_kj`.
///
/// The diagonal is taken as the multiplicative identity (a zero-hop path),
/// which is what makes iterated products accumulate "at most ℓ hops".
pub fn spmv<S>(a: &AdjacencyMatrix, x: &[S::Elem], sr: &S) -> Result<Vec<S::Elem>, KernelError>
where
    S: Semiring + Sync,
    S::Elem: From<Weight> + Send + Sync,
{
    check_len("x", a.n(), x.len())?;
    let one = sr.one();
    Ok(map_rows(a, |j| {
        let (cols, vals) = a.row(j);
        let mut acc = sr.mul(&x[j], &one);
        for (&k, entry) in cols.iter().zip(vals) {
            let term = sr.mul(&x[k], &S::Elem::from(entry.weight));
            acc = sr.add(&acc, &term);
        }
        acc
    }))
}

fn check_multilinear_dims<X, Y>(
    a: &AdjacencyMatrix,
    x: &[X],
    y: &[Y],
    mask: Option<&[bool]>,
) -> Result<(), KernelError> {
    check_len("x", a.n(), x.len())?;
    check_len("y", a.n(), y.len())?;
    if let Some(mask) = mask {
        check_len("mask", a.n(), mask.len())?;
    }
    Ok(())
}

/// `w_i = ⊕_j f(x_i, a_ij, y_j)` over the stored entries of row `i`.
///
/// Rows with `mask[i] == false` are skipped and yield the identity.
pub fn multilinear<X, Y, F, M>(
    a: &AdjacencyMatrix,
    x: &[X],
    y: &[Y],
    f: &F,
    m: &M,
    mask: Option<&[bool]>,
) -> Result<Vec<M::Elem>, KernelError>
where
    X: Sync,
    Y: Sync,
    F: MultilinearFn<X, Y, Output = M::Elem> + Sync,
    M: Monoid + Sync,
    M::Elem: Send,
{
    multilinear_counted(a, x, y, f, m, mask).map(|(w, _)| w)
}

/// [`multilinear`] that also returns how many stored entries were visited.
pub fn multilinear_counted<X, Y, F, M>(
    a: &AdjacencyMatrix,
    x: &[X],
    y: &[Y],
    f: &F,
    m: &M,
    mask: Option<&[bool]>,
) -> Result<(Vec<M::Elem>, usize), KernelError>
where
    X: Sync,
    Y: Sync,
    F: MultilinearFn<X, Y, Output = M::Elem> + Sync,
    M: Monoid + Sync,
    M::Elem: Send,
{
    check_multilinear_dims(a, x, y, mask)?;
    let rows = map_rows(a, |i| {
        if mask.is_some_and(|mask| !mask[i]) {
            return (m.identity(), 0);
        }
        let (cols, vals) = a.row(i);
        let mut acc = m.identity();
        for (&j, entry) in cols.iter().zip(vals) {
            acc = m.combine(&acc, &f.apply(&x[i], entry, &y[j]));
        }
        (acc, cols.len())
    });
    let visited = rows.iter().map(|(_, v)| v).sum();
    Ok((rows.into_iter().map(|(w, _)| w).collect(), visited))
}

/// Two-step evaluation of the same kernel.
///
/// First writes `(a_ij, y_j)` into a copy of every stored entry (one write
/// per nonzero, tallied as `remote_writes`), then reduces each row against
/// `x_i`. Output equals [`multilinear`].
pub fn multilinear_pairwise_reference<X, Y, F, M>(
    a: &AdjacencyMatrix,
    x: &[X],
    y: &[Y],
    f: &F,
    m: &M,
    mask: Option<&[bool]>,
) -> Result<(Vec<M::Elem>, CostCounters), KernelError>
where
    X: Sync,
    Y: Clone + Send + Sync,
    F: MultilinearFn<X, Y, Output = M::Elem> + Sync,
    M: Monoid + Sync,
    M::Elem: Send,
{
    check_multilinear_dims(a, x, y, mask)?;
    let paired: Vec<_> = a
        .entries()
        .map(|(_, j, entry)| (*entry, y[j].clone()))
        .collect();
    let mut counters = CostCounters {
        remote_writes: paired.len() as u64,
        ..CostCounters::default()
    };
    let row_ptr = a.row_ptr();
    let rows = map_rows(a, |i| {
        if mask.is_some_and(|mask| !mask[i]) {
            return (m.identity(), 0u64);
        }
        let mut acc = m.identity();
        for (entry, yj) in &paired[row_ptr[i]..row_ptr[i + 1]] {
            acc = m.combine(&acc, &f.apply(&x[i], entry, yj));
        }
        (acc, (row_ptr[i + 1] - row_ptr[i]) as u64)
    });
    counters.local_combines = rows.iter().map(|(_, c)| c).sum();
    Ok((rows.into_iter().map(|(w, _)| w).collect(), counters))
}

/// `r_i = ⊕ { q_j : p_j = i }`, identity where nothing lands.
pub fn scatter_combine<M>(q: &[M::Elem], p: &[usize], m: &M) -> Result<Vec<M::Elem>, KernelError>
where
    M: Monoid,
{
    check_len("q", p.len(), q.len())?;
    let n = p.len();
    let mut r = vec![m.identity(); n];
    for (qj, &target) in q.iter().zip(p) {
        if target >= n {
            return Err(KernelError::IndexOutOfRange {
                index: target,
                len: n,
            });
        }
        r[target] = m.combine(&r[target], qj);
    }
    Ok(r)
}

/// `out_i = p[idx_i]`.
pub fn gather(p: &[usize], idx: &[usize]) -> Result<Vec<usize>, KernelError> {
    idx.iter()
        .map(|&i| {
            p.get(i).copied().ok_or(KernelError::IndexOutOfRange {
                index: i,
                len: p.len(),
            })
        })
        .collect()
}
