//! Algebraic minimum spanning forest engine.
//!
//! Vertex ids are 0-based inside the library. Parsers, `Display` impls and
//! serialised output use 1-based ids.

pub mod algebra;
pub mod cost;
pub mod forest;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod matrix;
pub mod msf;
pub mod reference;

pub use algebra::{EdgeEntry, EdgeKey, MatrixEntry, Weight};
pub use cost::CostCounters;
pub use forest::{ChangeSet, ParentVector, StarFlags};
pub use matrix::AdjacencyMatrix;
