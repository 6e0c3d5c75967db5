//! The hook / tie-break / shortcut loop.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use super::shortcut::{
    shortcut_baseline, shortcut_complete_observed, shortcut_csp_counted, DEFAULT_CSP_THRESHOLD,
};
use super::steps::{
    accumulate, hook, min_outgoing_counted, scatter_to_roots, star_roots, starcheck, tie_break,
    ForestAccumulator,
};
use crate::algebra::{outgoing_edge_fn, EdgeEntry, EdgeKey, MinWeight, Weight};
use crate::cost::{CostCounters, WordSize};
use crate::forest::{ChangeSet, ParentVector, StarFlags};
use crate::grid::{
    gather_cost, grid_allgather, grid_multilinear, grid_multilinear_pairwise, partition,
    scatter_cost, split_changes, GridLayout, GridShape, PartitionedMatrix,
};
use crate::kernels::multilinear_pairwise_reference;
use crate::matrix::AdjacencyMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShortcutMode {
    /// One jump per iteration for non-star vertices.
    Baseline,
    /// Jump until every tree is a star.
    Complete,
    /// Complete shortcutting through an all-gathered change map.
    Csp,
    /// CSP below the threshold, complete otherwise.
    Auto,
}

impl ShortcutMode {
    pub const ALL: [ShortcutMode; 4] = [
        ShortcutMode::Baseline,
        ShortcutMode::Complete,
        ShortcutMode::Csp,
        ShortcutMode::Auto,
    ];

    /// Whether every tree is a star at the start of each iteration.
    pub fn keeps_stars(self) -> bool {
        self != ShortcutMode::Baseline
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    /// Stop when an iteration leaves `p` unchanged.
    Parent,
    /// Stop when an iteration leaves `p[p]` unchanged and no tree has an
    /// outgoing edge left.
    Grandparent,
}

impl Termination {
    pub const ALL: [Termination; 2] = [Termination::Parent, Termination::Grandparent];
}

/// The shortcut routine an iteration actually ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShortcutPath {
    Baseline,
    Complete,
    Csp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MsfOptions {
    pub shortcut: ShortcutMode,
    pub termination: Termination,
    /// Change-set size below which `Auto` uses CSP.
    pub threshold: usize,
    /// Run the kernels on a simulated process grid.
    pub grid: Option<GridShape>,
    /// Use the two-step pairwise kernel instead of the all-at-once one.
    pub pairwise: bool,
}

impl Default for MsfOptions {
    fn default() -> Self {
        MsfOptions {
            shortcut: ShortcutMode::Auto,
            termination: Termination::Grandparent,
            threshold: DEFAULT_CSP_THRESHOLD,
            grid: None,
            pairwise: false,
        }
    }
}

impl MsfOptions {
    pub fn new(shortcut: ShortcutMode, termination: Termination) -> MsfOptions {
        MsfOptions {
            shortcut,
            termination,
            ..MsfOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationStats {
    /// Hooks kept after tie breaking, i.e. forest edges added.
    pub hooks: usize,
    pub tie_breaks: usize,
    /// Jump passes that changed at least one parent.
    pub shortcut_sub_iterations: usize,
    pub shortcut_path: ShortcutPath,
    /// Vertices whose parent moved in the hook step.
    pub changed_count: usize,
    /// Trees left at the end of the iteration.
    pub trees: usize,
    pub counters: CostCounters,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MsfResult {
    pub n: usize,
    pub total_weight: Weight,
    #[serde(serialize_with = "serialize_keys")]
    pub forest_edges: BTreeSet<EdgeKey>,
    pub iterations: usize,
    pub per_iteration: Vec<IterationStats>,
    #[serde(skip)]
    pub parents: ParentVector,
}

fn serialize_keys<S: Serializer>(keys: &BTreeSet<EdgeKey>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(keys.iter().map(|k| [k.lo() + 1, k.hi() + 1]))
}

impl MsfResult {
    pub fn components(&self) -> usize {
        self.n - self.forest_edges.len()
    }

    /// Sum of the per-iteration counters.
    pub fn counters(&self) -> CostCounters {
        self.per_iteration.iter().map(|it| it.counters).sum()
    }
}

/// Wall-clock time per phase, summed over iterations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimings {
    pub starcheck: Duration,
    pub multilinear: Duration,
    pub scatter: Duration,
    pub hook: Duration,
    pub tie_break: Duration,
    pub shortcut: Duration,
    pub total: Duration,
}

impl Serialize for PhaseTimings {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PhaseTimings", 7)?;
        st.serialize_field("starcheck", &self.starcheck.as_secs_f64())?;
        st.serialize_field("multilinear", &self.multilinear.as_secs_f64())?;
        st.serialize_field("scatter", &self.scatter.as_secs_f64())?;
        st.serialize_field("hook", &self.hook.as_secs_f64())?;
        st.serialize_field("tie_break", &self.tie_break.as_secs_f64())?;
        st.serialize_field("shortcut", &self.shortcut.as_secs_f64())?;
        st.serialize_field("total", &self.total.as_secs_f64())?;
        st.end()
    }
}

/// Everything one iteration produced, for tests and diagnostics.
pub struct IterationTrace<'a> {
    /// 1-based iteration number.
    pub iteration: usize,
    pub p_before: &'a ParentVector,
    pub stars: &'a StarFlags,
    pub r: &'a [EdgeEntry],
    pub p_hooked: &'a ParentVector,
    pub p_tied: &'a ParentVector,
    pub p_after: &'a ParentVector,
    pub stats: &'a IterationStats,
}

pub trait MsfObserver {
    fn iteration(&mut self, trace: &IterationTrace<'_>);
}

impl<F: FnMut(&IterationTrace<'_>)> MsfObserver for F {
    fn iteration(&mut self, trace: &IterationTrace<'_>) {
        self(trace)
    }
}

/// Minimum spanning forest of `a`.
pub fn msf(a: &AdjacencyMatrix, opts: &MsfOptions) -> MsfResult {
    run(a, opts, None, &mut PhaseTimings::default())
}

/// [`msf`] with per-phase wall-clock timings.
pub fn msf_timed(a: &AdjacencyMatrix, opts: &MsfOptions) -> (MsfResult, PhaseTimings) {
    let mut timings = PhaseTimings::default();
    let result = run(a, opts, None, &mut timings);
    (result, timings)
}

/// [`msf`] reporting every iteration to `observer`.
pub fn msf_traced(
    a: &AdjacencyMatrix,
    opts: &MsfOptions,
    observer: &mut dyn MsfObserver,
) -> MsfResult {
    run(a, opts, Some(observer), &mut PhaseTimings::default())
}

/// Kernel dispatch plus the cost accounting for the vector operations.
struct Exec<'a> {
    a: &'a AdjacencyMatrix,
    grid: Option<PartitionedMatrix>,
    pairwise: bool,
}

impl<'a> Exec<'a> {
    fn new(a: &'a AdjacencyMatrix, opts: &MsfOptions) -> Exec<'a> {
        Exec {
            a,
            grid: opts.grid.map(|shape| partition(a, shape)),
            pairwise: opts.pairwise,
        }
    }

    fn layout(&self) -> Option<&GridLayout> {
        self.grid.as_ref().map(PartitionedMatrix::layout)
    }

    fn min_outgoing(
        &self,
        p: &ParentVector,
        mask: Option<&StarFlags>,
    ) -> (Vec<EdgeEntry>, CostCounters) {
        let mask_slice = mask.map(StarFlags::as_slice);
        let x = p.as_slice();
        let f = outgoing_edge_fn();
        match (&self.grid, self.pairwise) {
            (Some(state), false) => {
                let (q, c) = grid_multilinear(state, x, x, &f, &MinWeight, mask_slice)
                    .expect("parent vector matches the matrix dimension");
                (q, c.total)
            }
            (Some(state), true) => {
                let (q, c) = grid_multilinear_pairwise(state, x, x, &f, &MinWeight, mask_slice)
                    .expect("parent vector matches the matrix dimension");
                (q, c.total)
            }
            (None, true) => {
                multilinear_pairwise_reference(self.a, x, x, &f, &MinWeight, mask_slice)
                    .expect("parent vector matches the matrix dimension")
            }
            (None, false) => {
                let (q, visited) = min_outgoing_counted(self.a, p, mask);
                let c = CostCounters {
                    local_combines: visited as u64,
                    ..CostCounters::default()
                };
                (q, c)
            }
        }
    }

    fn gather(&self, idx: &[usize], active: Option<&[bool]>) -> CostCounters {
        match self.layout() {
            Some(layout) => gather_cost(layout, idx, active, usize::WORDS).total,
            None => CostCounters::default(),
        }
    }

    fn scatter(&self, q: &[EdgeEntry], p: &ParentVector) -> CostCounters {
        let targets = q
            .iter()
            .zip(p.as_slice())
            .enumerate()
            .filter(|(_, (entry, _))| !entry.is_identity())
            .map(|(j, (_, &target))| (j, target));
        match self.layout() {
            Some(layout) => scatter_cost(layout, targets, EdgeEntry::WORDS).total,
            None => CostCounters {
                local_combines: targets.count() as u64,
                ..CostCounters::default()
            },
        }
    }

    /// Cost of one starcheck: two reads of `p[p_i]` and one of `s[p_i]`,
    /// plus the flag writes to parents and grandparents.
    fn starcheck(&self, p: &ParentVector) -> CostCounters {
        let Some(layout) = self.layout() else {
            return CostCounters::default();
        };
        let idx = p.as_slice();
        let gp = p.grandparents();
        let mut c = gather_cost(layout, idx, None, usize::WORDS).total;
        c += gather_cost(layout, idx, None, bool::WORDS).total;
        let writes = (0..p.len())
            .filter(|&i| idx[i] != gp[i])
            .flat_map(|i| [(i, idx[i]), (i, gp[i])]);
        c += scatter_cost(layout, writes, bool::WORDS).total;
        c
    }

    fn allgather(&self, changed: &ChangeSet) -> CostCounters {
        match self.layout() {
            Some(layout) => {
                let (merged, c) = grid_allgather(&split_changes(changed, layout), layout)
                    .expect("1D ownership gives each vertex one owner");
                debug_assert_eq!(&merged, changed);
                c.total
            }
            None => CostCounters::default(),
        }
    }
}

fn run(
    a: &AdjacencyMatrix,
    opts: &MsfOptions,
    mut observer: Option<&mut dyn MsfObserver>,
    timings: &mut PhaseTimings,
) -> MsfResult {
    let started = Instant::now();
    let n = a.n();
    let exec = Exec::new(a, opts);
    let baseline = !opts.shortcut.keeps_stars();
    let grandparent = opts.termination == Termination::Grandparent;

    let mut p = ParentVector::identity(n);
    let mut acc = ForestAccumulator::default();
    let mut per_iteration = Vec::new();
    // Each productive iteration hooks or jumps at least once.
    let cap = 2 * n + 8;

    let mut done = n == 0;
    while !done {
        let iteration = per_iteration.len() + 1;
        assert!(iteration <= cap, "no convergence after {cap} iterations");
        let mut counters = CostCounters::default();
        let p_before = p.clone();
        let gp_before = grandparent.then(|| p.grandparents());

        let clock = Instant::now();
        let stars = if baseline {
            counters += exec.starcheck(&p);
            starcheck(&p)
        } else {
            StarFlags::all(n)
        };
        timings.starcheck += clock.elapsed();

        // Baseline grandparent termination must know whether any tree still
        // has an outgoing edge, so it evaluates every row and masks after.
        let clock = Instant::now();
        let (q, outgoing_left) = if baseline && grandparent {
            let (mut q, c) = exec.min_outgoing(&p, None);
            counters += c;
            let left = q.iter().any(|e| !e.is_identity());
            for (entry, star) in q.iter_mut().zip(stars.as_slice()) {
                if !star {
                    *entry = EdgeEntry::IDENTITY;
                }
            }
            (q, left)
        } else {
            let (q, c) = exec.min_outgoing(&p, baseline.then_some(&stars));
            counters += c;
            let left = q.iter().any(|e| !e.is_identity());
            (q, left)
        };
        timings.multilinear += clock.elapsed();

        let clock = Instant::now();
        counters += exec.scatter(&q, &p);
        let r = scatter_to_roots(&q, &p);
        timings.scatter += clock.elapsed();

        let clock = Instant::now();
        let roots = star_roots(&p, &stars);
        let p_hooked = hook(&p, &r);
        timings.hook += clock.elapsed();

        let clock = Instant::now();
        let hooked_roots: Vec<bool> = (0..n)
            .map(|i| roots[i] && p_hooked.parent(i) != i)
            .collect();
        counters += exec.gather(p_hooked.as_slice(), Some(&hooked_roots));
        let (p_tied, t) = tie_break(&p_hooked, &roots);
        let hooks = accumulate(&r, &t, &mut acc);
        let tie_breaks = t.iter().filter(|&&x| x).count();
        timings.tie_break += clock.elapsed();

        let clock = Instant::now();
        let changed = ChangeSet::between(&p_tied, &p_before);
        let use_csp = match opts.shortcut {
            ShortcutMode::Baseline | ShortcutMode::Complete => false,
            ShortcutMode::Csp => true,
            ShortcutMode::Auto => changed.len() < opts.threshold,
        };
        let (p_after, sub_iterations, path) = if baseline {
            counters += exec.starcheck(&p_tied);
            let s = starcheck(&p_tied);
            let non_star: Vec<bool> = s.as_slice().iter().map(|&x| !x).collect();
            counters += exec.gather(p_tied.as_slice(), Some(&non_star));
            let out = shortcut_baseline(&p_tied, &s);
            let jumped = usize::from(out != p_tied);
            (out, jumped, ShortcutPath::Baseline)
        } else if use_csp {
            counters += exec.allgather(&changed);
            let (out, _, lookups) = shortcut_csp_counted(&p_tied, &p_before)
                .expect("post tie-break forest has no pointer cycles");
            counters.local_combines += lookups;
            (out, 0, ShortcutPath::Csp)
        } else {
            let (out, passes) = shortcut_complete_observed(&p_tied, |current| {
                let non_root: Vec<bool> = (0..n).map(|i| !current.is_root(i)).collect();
                counters += exec.gather(current.as_slice(), Some(&non_root));
            });
            (out, passes, ShortcutPath::Complete)
        };
        timings.shortcut += clock.elapsed();

        let stats = IterationStats {
            hooks,
            tie_breaks,
            shortcut_sub_iterations: sub_iterations,
            shortcut_path: path,
            changed_count: changed.len(),
            trees: p_after.root_count(),
            counters,
        };
        if let Some(obs) = observer.as_deref_mut() {
            obs.iteration(&IterationTrace {
                iteration,
                p_before: &p_before,
                stars: &stars,
                r: &r,
                p_hooked: &p_hooked,
                p_tied: &p_tied,
                p_after: &p_after,
                stats: &stats,
            });
        }
        per_iteration.push(stats);

        done = match gp_before {
            None => p_after == p_before,
            Some(gp_before) => !outgoing_left && p_after.grandparents() == gp_before,
        };
        p = p_after;
    }
    timings.total += started.elapsed();

    MsfResult {
        n,
        total_weight: acc.total_weight,
        forest_edges: acc.edges,
        iterations: per_iteration.len(),
        per_iteration,
        parents: p,
    }
}
