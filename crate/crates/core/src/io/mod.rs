//! Graph files, synthetic generators and weight assignment.

mod formats;
mod gen;

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::{AdjacencyMatrix, MatrixError};

pub use gen::{
    gen_rmat, gen_uniform, generate, rmat_samples, GenKind, GenSpec, DEFAULT_RMAT_PROBS,
};

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: vertex {vertex} outside 1..={n}")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("header declares {declared} entries but {found} were read")]
    CountMismatch { declared: usize, found: usize },
    #[error("missing header: {0}")]
    MissingHeader(&'static str),
    #[error("unknown graph format '{0}' (expected mm, dimacs or edgelist)")]
    UnknownFormat(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl GraphIoError {
    fn parse(line: usize, message: impl Into<String>) -> GraphIoError {
        GraphIoError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Supported file formats. Vertex ids are 1-based in all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Matrix Market coordinate, real/integer/pattern, symmetric or general.
    Mm,
    /// DIMACS shortest-path `.gr`.
    Dimacs,
    /// `u v [w]` per line, `#` comments.
    Edgelist,
}

impl Format {
    /// Guesses from the extension, defaulting to an edge list.
    pub fn infer(path: &Path) -> Format {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("mtx" | "mm") => Format::Mm,
            Some("gr" | "dimacs") => Format::Dimacs,
            _ => Format::Edgelist,
        }
    }
}

impl FromStr for Format {
    type Err = GraphIoError;

    fn from_str(s: &str) -> Result<Format, GraphIoError> {
        match s {
            "mm" | "mtx" => Ok(Format::Mm),
            "dimacs" | "gr" => Ok(Format::Dimacs),
            "edgelist" | "el" => Ok(Format::Edgelist),
            other => Err(GraphIoError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Mm => "mm",
            Format::Dimacs => "dimacs",
            Format::Edgelist => "edgelist",
        })
    }
}

/// Parses a graph. Unweighted inputs receive weights from `weight_seed`.
pub fn parse<R: Read>(
    reader: R,
    format: Format,
    weight_seed: u64,
) -> Result<AdjacencyMatrix, GraphIoError> {
    let parsed = match format {
        Format::Mm => formats::parse_matrix_market(reader)?,
        Format::Dimacs => formats::parse_dimacs(reader)?,
        Format::Edgelist => formats::parse_edge_list(reader)?,
    };
    parsed.into_matrix(weight_seed)
}

pub fn load(
    path: &Path,
    format: Format,
    weight_seed: u64,
) -> Result<AdjacencyMatrix, GraphIoError> {
    parse(BufReader::new(File::open(path)?), format, weight_seed)
}

pub fn write<W: Write>(a: &AdjacencyMatrix, writer: W, format: Format) -> std::io::Result<()> {
    formats::write(a, writer, format)
}

pub fn save(a: &AdjacencyMatrix, path: &Path, format: Format) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write(a, &mut out, format)?;
    out.flush()
}

/// Gives every undirected edge an integer weight uniform in `1..=255`,
/// drawn in edge-key order from a generator seeded with `seed`.
pub fn assign_weights(a: &AdjacencyMatrix, seed: u64) -> AdjacencyMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    a.map_weights(|_| f64::from(rng.gen_range(1u32..=255)))
        .expect("integer weights are valid")
}
