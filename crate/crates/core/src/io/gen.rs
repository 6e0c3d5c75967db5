use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{assign_weights, GraphIoError};
use crate::matrix::AdjacencyMatrix;

/// Graph500 quadrant probabilities `(a, b, c, d)`.
pub const DEFAULT_RMAT_PROBS: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

/// Largest supported R-MAT scale.
const MAX_SCALE: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenKind {
    /// `2^scale` vertices and `edge_factor · 2^scale` sampled pairs.
    Rmat {
        scale: u32,
        edge_factor: usize,
        probs: [f64; 4],
    },
    /// Every pair present independently with probability `density / 100`.
    Uniform { n: usize, density: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub kind: GenKind,
    pub seed: u64,
}

impl GenSpec {
    pub fn rmat(scale: u32, edge_factor: usize, seed: u64) -> GenSpec {
        GenSpec {
            kind: GenKind::Rmat {
                scale,
                edge_factor,
                probs: DEFAULT_RMAT_PROBS,
            },
            seed,
        }
    }

    pub fn uniform(n: usize, density: f64, seed: u64) -> GenSpec {
        GenSpec {
            kind: GenKind::Uniform { n, density },
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GraphIoError> {
        let invalid = |msg: String| Err(GraphIoError::InvalidSpec(msg));
        match &self.kind {
            GenKind::Rmat { scale, probs, .. } => {
                if *scale > MAX_SCALE {
                    return invalid(format!("scale {scale} exceeds {MAX_SCALE}"));
                }
                if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return invalid("probabilities must be non-negative".into());
                }
                let sum: f64 = probs.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return invalid(format!("probabilities sum to {sum}, not 1"));
                }
            }
            GenKind::Uniform { density, .. } => {
                if !(*density > 0.0 && *density <= 100.0) {
                    return invalid(format!("density {density} outside (0, 100]"));
                }
            }
        }
        Ok(())
    }

    /// Independent streams for structure and weights.
    fn streams(&self) -> (ChaCha8Rng, u64) {
        let structure = ChaCha8Rng::seed_from_u64(self.seed);
        let weight_seed = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        (structure, weight_seed)
    }
}

/// The raw R-MAT pairs, 0-based, before any cleaning.
pub fn rmat_samples(spec: &GenSpec) -> Result<Vec<(usize, usize)>, GraphIoError> {
    spec.validate()?;
    let GenKind::Rmat {
        scale,
        edge_factor,
        probs,
    } = spec.kind
    else {
        return Err(GraphIoError::InvalidSpec("not an R-MAT generator".into()));
    };
    let (mut rng, _) = spec.streams();
    let n = 1usize << scale;
    let (ab, abc) = (probs[0] + probs[1], probs[0] + probs[1] + probs[2]);
    let samples = edge_factor * n;
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (mut u, mut v) = (0usize, 0usize);
        for _ in 0..scale {
            let x: f64 = rng.gen();
            let (bu, bv) = if x < probs[0] {
                (0, 0)
            } else if x < ab {
                (0, 1)
            } else if x < abc {
                (1, 0)
            } else {
                (1, 1)
            };
            u = (u << 1) | bu;
            v = (v << 1) | bv;
        }
        out.push((u, v));
    }
    Ok(out)
}

/// R-MAT graph, symmetrised, cleaned and weighted.
pub fn gen_rmat(spec: &GenSpec) -> Result<AdjacencyMatrix, GraphIoError> {
    let samples = rmat_samples(spec)?;
    let GenKind::Rmat { scale, .. } = spec.kind else {
        unreachable!("checked by rmat_samples");
    };
    let a = AdjacencyMatrix::from_edges(1 << scale, samples.into_iter().map(|(u, v)| (u, v, 1.0)))?;
    Ok(assign_weights(&a, spec.streams().1))
}

/// Uniform random graph with independent pair inclusion.
///
/// Pairs `i < j` are enumerated in order and skipped geometrically, so the
/// cost is proportional to the number of edges produced.
pub fn gen_uniform(spec: &GenSpec) -> Result<AdjacencyMatrix, GraphIoError> {
    spec.validate()?;
    let GenKind::Uniform { n, density } = spec.kind else {
        return Err(GraphIoError::InvalidSpec("not a uniform generator".into()));
    };
    let (mut rng, weight_seed) = spec.streams();
    let prob = density / 100.0;
    let pairs = (n as u64) * (n.saturating_sub(1) as u64) / 2;
    // Pairs in rows before `i`.
    let row_start = |i: u64| i * (2 * n as u64 - i - 1) / 2;
    let log_q = (1.0 - prob).ln();

    let mut edges = Vec::new();
    let mut row = 0u64;
    let mut k: Option<u64> = None;
    loop {
        let skip = if prob >= 1.0 {
            0
        } else {
            let u: f64 = 1.0 - rng.gen::<f64>();
            (u.ln() / log_q).floor() as u64
        };
        let next = match k {
            None => skip,
            Some(k) => k.saturating_add(skip).saturating_add(1),
        };
        if next >= pairs {
            break;
        }
        k = Some(next);
        while row_start(row + 1) <= next {
            row += 1;
        }
        let col = row + 1 + (next - row_start(row));
        edges.push((row as usize, col as usize, 1.0));
    }
    let a = AdjacencyMatrix::from_edges(n, edges)?;
    Ok(assign_weights(&a, weight_seed))
}

/// Dispatches on the generator kind.
pub fn generate(spec: &GenSpec) -> Result<AdjacencyMatrix, GraphIoError> {
    match spec.kind {
        GenKind::Rmat { .. } => gen_rmat(spec),
        GenKind::Uniform { .. } => gen_uniform(spec),
    }
}
