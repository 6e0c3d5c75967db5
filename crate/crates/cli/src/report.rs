//! JSON report documents.
//!
//! Everything except the top-level `timings` object is a pure function of
//! the input and flags.

use msf_core::grid::COST_MODEL;
use msf_core::io::{Format, GenSpec};
use msf_core::msf::{Components, IterationStats, MsfOptions, MsfResult, PhaseTimings};
use msf_core::{AdjacencyMatrix, CostCounters, Weight};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum InputReport {
    File { path: String, format: Format },
    Generated(GenSpec),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edges: usize,
    pub nnz: usize,
}

impl GraphSummary {
    pub fn of(a: &AdjacencyMatrix) -> GraphSummary {
        GraphSummary {
            n: a.n(),
            edges: a.edge_count(),
            nnz: a.nnz(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub reference: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Wall-clock seconds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Timings {
    pub load: f64,
    pub run: f64,
    pub verify: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseTimings>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_weight: Option<Weight>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_count: Option<usize>,
    pub component_count: usize,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forest_edges: Option<Vec<[usize; 2]>>,
}

/// Report for `compute` and `cc`.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub input: InputReport,
    pub graph: GraphSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub options: Option<MsfOptions>,
    pub result: ResultSummary,
    pub verification: Option<Verification>,
    pub per_iteration: Vec<IterationStats>,
    pub counters: CostCounters,
    pub cost_model: &'static str,
    pub timings: Timings,
}

impl RunReport {
    pub fn msf(
        graph: GraphSummary,
        input: InputReport,
        options: &MsfOptions,
        result: &MsfResult,
        verification: Option<Verification>,
        timings: Timings,
    ) -> RunReport {
        RunReport {
            command: "compute",
            input,
            graph,
            options: Some(*options),
            result: ResultSummary {
                total_weight: Some(result.total_weight),
                edge_count: Some(result.forest_edges.len()),
                component_count: result.components(),
                iterations: result.iterations,
                forest_edges: Some(
                    result
                        .forest_edges
                        .iter()
                        .map(|k| [k.lo() + 1, k.hi() + 1])
                        .collect(),
                ),
            },
            verification,
            per_iteration: result.per_iteration.clone(),
            counters: result.counters(),
            cost_model: COST_MODEL,
            timings,
        }
    }

    pub fn cc(
        graph: GraphSummary,
        input: InputReport,
        comps: &Components,
        verification: Option<Verification>,
        timings: Timings,
    ) -> RunReport {
        RunReport {
            command: "cc",
            input,
            graph,
            options: None,
            result: ResultSummary {
                total_weight: None,
                edge_count: None,
                component_count: comps.count(),
                iterations: comps.iterations,
                forest_edges: None,
            },
            verification,
            per_iteration: comps.per_iteration.clone(),
            counters: comps.per_iteration.iter().map(|it| it.counters).sum(),
            cost_model: COST_MODEL,
            timings,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SsspReport {
    pub command: &'static str,
    pub input: InputReport,
    pub graph: GraphSummary,
    /// 1-based.
    pub source: usize,
    pub reachable: usize,
    pub distances: Vec<Weight>,
    pub verification: Option<Verification>,
    pub timings: Timings,
}
