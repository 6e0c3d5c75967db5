//! Connected components with conditional and unconditional star hooking.

use super::driver::{IterationStats, ShortcutPath};
use super::shortcut::shortcut_baseline;
use super::steps::starcheck;
use crate::algebra::{multilinear_fn, MatrixEntry, MinVertex};
use crate::cost::CostCounters;
use crate::forest::{ChangeSet, ParentVector, StarFlags};
use crate::kernels::{multilinear_counted, scatter_combine};
use crate::matrix::AdjacencyMatrix;

/// Outcome of [`connected_components`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    /// Root of each vertex's tree, 0-based.
    pub labels: Vec<usize>,
    pub iterations: usize,
    /// `tie_breaks` is always zero; hooks count both hooking kinds.
    pub per_iteration: Vec<IterationStats>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(i, &l)| i == l)
            .count()
    }
}

/// Smallest neighbouring parent in a different tree, for star members.
fn neighbour_min(
    a: &AdjacencyMatrix,
    p: &ParentVector,
    s: &StarFlags,
) -> (Vec<Option<usize>>, usize) {
    let f = multilinear_fn(|&pi: &usize, _: &MatrixEntry, &pj: &usize| (pi != pj).then_some(pj));
    multilinear_counted(
        a,
        p.as_slice(),
        p.as_slice(),
        &f,
        &MinVertex,
        Some(s.as_slice()),
    )
    .expect("parent vector matches the matrix dimension")
}

/// Min-writes `ph_i` into `p[p_i]` for every `i` selected by `take`.
/// Returns the per-root proposals.
fn hook_roots<F>(p: &ParentVector, ph: &[Option<usize>], take: F) -> Vec<Option<usize>>
where
    F: Fn(usize, usize) -> bool,
{
    let proposals: Vec<Option<usize>> = ph
        .iter()
        .enumerate()
        .map(|(i, &h)| h.filter(|&h| take(i, h)))
        .collect();
    scatter_combine(&proposals, p.as_slice(), &MinVertex).expect("parent vector is in range")
}

fn apply(p: &mut ParentVector, proposals: &[Option<usize>]) {
    for (slot, proposal) in p.as_mut_slice().iter_mut().zip(proposals) {
        if let Some(target) = proposal {
            *slot = *target;
        }
    }
}

/// Component labels by star hooking.
///
/// Star roots first hook onto a smaller neighbouring parent id. Stars that
/// neither hooked nor received a hook then hook onto any neighbouring tree.
/// Non-star vertices jump once and the loop repeats until `p` is stable.
pub fn connected_components(a: &AdjacencyMatrix) -> Components {
    let n = a.n();
    let mut p = ParentVector::identity(n);
    let mut per_iteration = Vec::new();
    if n == 0 {
        return Components {
            labels: Vec::new(),
            iterations: 0,
            per_iteration,
        };
    }
    loop {
        let p_old = p.clone();

        let s = starcheck(&p);
        let (ph, visited_cond) = neighbour_min(a, &p, &s);
        let conditional = hook_roots(&p, &ph, |i, h| h < p.parent(i));
        let mut received = vec![false; n];
        for &target in conditional.iter().flatten() {
            received[target] = true;
        }
        let stagnant: Vec<bool> = (0..n)
            .map(|i| {
                let root = p.parent(i);
                s.get(i) && conditional[root].is_none() && !received[root]
            })
            .collect();
        apply(&mut p, &conditional);

        let s = StarFlags::from_vec(stagnant);
        let (ph, visited_uncond) = neighbour_min(a, &p, &s);
        let unconditional = hook_roots(&p, &ph, |_, _| true);
        apply(&mut p, &unconditional);
        let hooked = p.clone();

        let s = starcheck(&p);
        p = shortcut_baseline(&p, &s);

        let hooks = conditional.iter().chain(&unconditional).flatten().count();
        per_iteration.push(IterationStats {
            hooks,
            tie_breaks: 0,
            shortcut_sub_iterations: usize::from(p != hooked),
            shortcut_path: ShortcutPath::Baseline,
            changed_count: ChangeSet::between(&hooked, &p_old).len(),
            trees: p.root_count(),
            counters: CostCounters {
                local_combines: (visited_cond + visited_uncond) as u64,
                ..CostCounters::default()
            },
        });
        if p == p_old {
            break;
        }
    }
    let labels = p.roots().expect("hooking keeps the pointer graph acyclic");
    Components {
        labels,
        iterations: per_iteration.len(),
        per_iteration,
    }
}
