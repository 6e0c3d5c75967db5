//! Single-source shortest paths by repeated tropical SpMV.

use thiserror::Error;

use crate::algebra::{tropical, Weight};
use crate::kernels::spmv;
use crate::matrix::AdjacencyMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("source vertex {vertex} out of range 1..={n}")]
pub struct SourceOutOfRange {
    /// 1-based.
    pub vertex: usize,
    pub n: usize,
}

/// Distances from `source` (0-based), `∞` where unreachable.
///
/// Runs at most `n - 1` products and stops early at a fixed point.
pub fn sssp_bellman_ford(
    a: &AdjacencyMatrix,
    source: usize,
) -> Result<Vec<Weight>, SourceOutOfRange> {
    let n = a.n();
    if source >= n {
        return Err(SourceOutOfRange {
            vertex: source + 1,
            n,
        });
    }
    let sr = tropical();
    let mut d = vec![Weight::INFINITY; n];
    d[source] = Weight::ZERO;
    for _ in 1..n {
        let next = spmv(a, &d, &sr).expect("distance vector has length n");
        if next == d {
            break;
        }
        d = next;
    }
    Ok(d)
}
