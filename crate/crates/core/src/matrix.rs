//! Symmetric sparse adjacency matrix in row-compressed form.

use thiserror::Error;

use crate::algebra::{EdgeKey, MatrixEntry, Weight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {key} has invalid weight {weight}; weights must be finite")]
    InvalidWeight { key: EdgeKey, weight: f64 },
    #[error("row {row} is not sorted or holds a duplicate column")]
    UnsortedRow { row: usize },
    #[error("self loop stored at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("entry ({row},{col}) has no symmetric counterpart")]
    Asymmetric { row: usize, col: usize },
    #[error("entry ({row},{col}) carries key {key}")]
    KeyMismatch {
        row: usize,
        col: usize,
        key: EdgeKey,
    },
    #[error("malformed row pointer array")]
    BadRowPointers,
}

/// `n × n` symmetric adjacency matrix; absent entries mean `∞`.
///
/// Both triangles are stored so that row `i` lists every edge incident to
/// `i`, with column ids sorted ascending. There are no self loops and no
/// duplicate `(i, j)` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<MatrixEntry>,
}

impl AdjacencyMatrix {
    pub fn empty(n: usize) -> AdjacencyMatrix {
        AdjacencyMatrix {
            n,
            row_ptr: vec![0; n + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds a matrix from undirected 0-based edges.
    ///
    /// Self loops are dropped and repeated pairs keep their smallest weight.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<AdjacencyMatrix, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut canon: Vec<(EdgeKey, Weight)> = Vec::new();
        for (u, v, w) in edges {
            for vertex in [u, v] {
                if vertex >= n {
                    return Err(MatrixError::VertexOutOfRange { vertex, n });
                }
            }
            let key = EdgeKey::new(u, v);
            let weight = match Weight::new(w) {
                Some(weight) if weight.is_finite() => weight,
                _ => return Err(MatrixError::InvalidWeight { key, weight: w }),
            };
            if u != v {
                canon.push((key, weight));
            }
        }
        Ok(Self::from_canonical(n, canon))
    }

    /// `edges` must hold in-range keys with `lo != hi` and finite weights.
    fn from_canonical(n: usize, mut edges: Vec<(EdgeKey, Weight)>) -> AdjacencyMatrix {
        edges.sort_unstable();
        edges.dedup_by_key(|(k, _)| *k);

        let mut degree = vec![0usize; n];
        for (k, _) in &edges {
            degree[k.lo()] += 1;
            degree[k.hi()] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        for d in &degree {
            row_ptr.push(row_ptr.last().unwrap() + d);
        }
        let nnz = row_ptr[n];
        let mut cols = vec![0usize; nnz];
        let placeholder = MatrixEntry {
            weight: Weight::INFINITY,
            key: EdgeKey::new(0, 0),
        };
        let mut vals = vec![placeholder; nnz];
        let mut cursor = row_ptr[..n].to_vec();
        // Keys are sorted by (lo, hi): each row receives its columns in
        // ascending order, first as `hi` partners of smaller rows then as
        // `lo` partners of larger ones.
        let mut place = |row: usize, col: usize, entry: MatrixEntry| {
            let at = cursor[row];
            cols[at] = col;
            vals[at] = entry;
            cursor[row] += 1;
        };
        let mut by_hi: Vec<&(EdgeKey, Weight)> = edges.iter().collect();
        by_hi.sort_unstable_by_key(|(k, _)| (k.hi(), k.lo()));
        for (k, w) in by_hi {
            place(
                k.hi(),
                k.lo(),
                MatrixEntry {
                    weight: *w,
                    key: *k,
                },
            );
        }
        for (k, w) in &edges {
            place(
                k.lo(),
                k.hi(),
                MatrixEntry {
                    weight: *w,
                    key: *k,
                },
            );
        }

        AdjacencyMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Same structure with every undirected edge reweighted by `weight_of`.
    pub fn map_weights<F>(&self, mut weight_of: F) -> Result<AdjacencyMatrix, MatrixError>
    where
        F: FnMut(EdgeKey) -> f64,
    {
        let edges: Vec<_> = self
            .edges()
            .map(|(k, _)| (k.lo(), k.hi(), weight_of(k)))
            .collect();
        AdjacencyMatrix::from_edges(self.n, edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries, i.e. twice the undirected edge count.
    #[inline]
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.cols.len() / 2
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[MatrixEntry]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[range.clone()], &self.vals[range])
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// All stored `(i, j, a_ij)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &MatrixEntry)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, a)| (i, j, a))
        })
    }

    /// Each undirected edge once, in key order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeKey, Weight)> + '_ {
        self.entries()
            .filter(|(i, j, _)| i < j)
            .map(|(_, _, a)| (a.key, a.weight))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<Weight> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (cols, vals) = self.row(u);
        cols.binary_search(&v).ok().map(|at| vals[at].weight)
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), MatrixError> {
        if self.row_ptr.len() != self.n + 1
            || self.row_ptr[0] != 0
            || self.row_ptr.windows(2).any(|w| w[0] > w[1])
            || self.row_ptr[self.n] != self.cols.len()
            || self.cols.len() != self.vals.len()
        {
            return Err(MatrixError::BadRowPointers);
        }
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(MatrixError::UnsortedRow { row: i });
            }
            for (&j, a) in cols.iter().zip(vals) {
                if j >= self.n {
                    return Err(MatrixError::VertexOutOfRange {
                        vertex: j,
                        n: self.n,
                    });
                }
                if j == i {
                    return Err(MatrixError::SelfLoop { vertex: i });
                }
                if a.key != EdgeKey::new(i, j) {
                    return Err(MatrixError::KeyMismatch {
                        row: i,
                        col: j,
                        key: a.key,
                    });
                }
                if !a.weight.is_finite() {
                    return Err(MatrixError::InvalidWeight {
                        key: a.key,
                        weight: a.weight.value(),
                    });
                }
                let (tcols, tvals) = self.row(j);
                match tcols.binary_search(&i) {
                    Ok(at) if tvals[at] == *a => {}
                    _ => return Err(MatrixError::Asymmetric { row: i, col: j }),
                }
            }
        }
        Ok(())
    }
}
