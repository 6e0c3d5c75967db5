//! Minimum spanning forest engine and its connectivity and shortest-path
//! relatives.

mod cc;
mod driver;
mod kruskal;
mod shortcut;
mod sssp;
mod steps;

pub use cc::{connected_components, Components};
pub use driver::{
    msf, msf_timed, msf_traced, IterationStats, IterationTrace, MsfObserver, MsfOptions, MsfResult,
    PhaseTimings, ShortcutMode, ShortcutPath, Termination,
};
pub use kruskal::kruskal_oracle;
pub use shortcut::{
    shortcut_auto, shortcut_baseline, shortcut_complete, shortcut_csp, ShortcutError,
    DEFAULT_CSP_THRESHOLD,
};
pub use sssp::{sssp_bellman_ford, SourceOutOfRange};
pub use steps::{
    accumulate, hook, min_outgoing, scatter_to_roots, star_roots, starcheck, tie_break,
    ForestAccumulator,
};
