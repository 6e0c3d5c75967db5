//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the summary is always printed.
//! Exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use msf_core::algebra::{min_weight, outgoing_edge_fn, MinWeight};
use msf_core::grid::{grid_multilinear, grid_multilinear_pairwise, partition, GridShape};
use msf_core::io::{generate, load, Format, GenSpec};
use msf_core::kernels::{multilinear, multilinear_pairwise_reference};
use msf_core::msf::{
    connected_components, kruskal_oracle, msf, msf_traced, shortcut_auto, shortcut_complete,
    shortcut_csp, sssp_bellman_ford, IterationTrace, MsfOptions, ShortcutMode, ShortcutPath,
    Termination, DEFAULT_CSP_THRESHOLD,
};
use msf_core::reference::{bfs_components, brute_force_distances, dijkstra};
use msf_core::{AdjacencyMatrix, EdgeEntry, ParentVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixtures() -> Vec<(String, AdjacencyMatrix)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    ["triangle.el", "path.el", "disjoint.el", "empty.el"]
        .iter()
        .map(|name| {
            (
                name.to_string(),
                load(&dir.join(name), Format::Edgelist, 0).unwrap(),
            )
        })
        .collect()
}

/// Uniform and R-MAT graphs over the full parameter grid, plus fixtures.
fn corpus() -> Vec<(String, AdjacencyMatrix)> {
    let mut graphs = fixtures();
    let mut seed = 1000;
    for n in [16, 32, 64, 128, 256, 512, 1024, 2048, 4096] {
        for density in [0.1, 1.0, 5.0, 25.0] {
            for _ in 0..2 {
                seed += 1;
                let spec = GenSpec::uniform(n, density, seed);
                graphs.push((
                    format!("uniform n={n} f={density}% seed={seed}"),
                    generate(&spec).unwrap(),
                ));
            }
        }
    }
    for scale in 4..=12 {
        for edge_factor in [2, 8, 16] {
            for _ in 0..5 {
                seed += 1;
                let spec = GenSpec::rmat(scale, edge_factor, seed);
                graphs.push((
                    format!("rmat S={scale} E={edge_factor} seed={seed}"),
                    generate(&spec).unwrap(),
                ));
            }
        }
    }
    graphs
}

/// Smallest `k` with `base^k >= n`.
fn ceil_log(base: f64, n: usize) -> usize {
    let mut k = 0;
    let mut power = 1.0;
    while power < n as f64 {
        power *= base;
        k += 1;
    }
    k
}

/// Vertices on pointer cycles of length two or more.
fn cycle_members(p: &ParentVector) -> Vec<usize> {
    let n = p.len();
    // 0 = unvisited, 1 = on the current walk, 2 = finished.
    let mut state = vec![0u8; n];
    let mut members = Vec::new();
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            v = p.parent(v);
        }
        if state[v] == 1 && p.parent(v) != v {
            let at = walk.iter().position(|&w| w == v).unwrap();
            members.extend_from_slice(&walk[at..]);
        }
        for w in walk {
            state[w] = 2;
        }
    }
    members
}

/// Roots of `p` whose tree has at least one edge leaving it.
fn trees_with_outgoing_edges(a: &AdjacencyMatrix, p: &ParentVector) -> usize {
    let roots = p.roots().expect("iteration input is a rooted forest");
    let mut active = vec![false; a.n()];
    for (k, _) in a.edges() {
        let (x, y) = (roots[k.lo()], roots[k.hi()]);
        if x != y {
            active[x] = true;
            active[y] = true;
        }
    }
    active.iter().filter(|&&x| x).count()
}

/// Per-iteration checks for criteria 2, 3, 8 and 9.
struct IterationChecks<'a> {
    a: &'a AdjacencyMatrix,
    mode: ShortcutMode,
    strategy_checks: usize,
    cycle_checks: usize,
    progress_checks: usize,
    failures: [Vec<String>; 4],
}

impl IterationChecks<'_> {
    fn observe(&mut self, t: &IterationTrace<'_>) {
        let n = self.a.n();

        // Criterion 2 needs the previous forest to be all stars.
        if t.p_before.is_star_forest() {
            self.strategy_checks += 1;
            let (complete, _) = shortcut_complete(t.p_tied);
            match shortcut_csp(t.p_tied, t.p_before) {
                Ok((csp, changed)) => {
                    let mut ok = csp == complete;
                    for threshold in [0, changed.len(), changed.len() + 1, DEFAULT_CSP_THRESHOLD] {
                        ok &= shortcut_auto(t.p_tied, t.p_before, threshold).ok().as_ref()
                            == Some(&complete);
                    }
                    if !ok {
                        self.failures[0]
                            .push(format!("iteration {}: strategies disagree", t.iteration));
                    }
                }
                Err(e) => self.failures[0].push(format!("iteration {}: {e}", t.iteration)),
            }
        }

        if t.stats.shortcut_path == ShortcutPath::Complete
            && t.stats.shortcut_sub_iterations > ceil_log(1.5, n)
        {
            self.failures[1].push(format!(
                "iteration {}: {} shortcut passes",
                t.iteration, t.stats.shortcut_sub_iterations
            ));
        }

        if n <= 256 {
            self.cycle_checks += 1;
            let members = cycle_members(t.p_tied);
            if !members.is_empty() {
                self.failures[2].push(format!(
                    "iteration {}: cycle through {:?}",
                    t.iteration, members
                ));
            }
        }

        if self.mode.keeps_stars() {
            self.progress_checks += 1;
            let active = trees_with_outgoing_edges(self.a, t.p_before);
            let before = t.p_before.root_count();
            let dropped = before - t.stats.trees;
            if dropped < active.div_ceil(2) {
                self.failures[3].push(format!(
                    "iteration {}: {dropped} of {active} active trees hooked",
                    t.iteration
                ));
            }
        }
    }
}

/// Criteria 1, 2, 3, 8 and 9 share one sweep over the corpus.
fn corpus_sweep() -> [Outcome; 5] {
    let started = Instant::now();
    let graphs = corpus();
    let mut runs = 0;
    let mut mismatches = Vec::new();
    let mut bound_failures = Vec::new();
    let mut strategy = (0, Vec::new());
    let mut subiter = Vec::new();
    let mut cycles = (0, Vec::new());
    let mut progress = (0, Vec::new());

    for (name, a) in &graphs {
        let oracle = kruskal_oracle(a);
        let n = a.n();
        for mode in ShortcutMode::ALL {
            for termination in Termination::ALL {
                runs += 1;
                let mut checks = IterationChecks {
                    a,
                    mode,
                    strategy_checks: 0,
                    cycle_checks: 0,
                    progress_checks: 0,
                    failures: Default::default(),
                };
                let result = msf_traced(
                    a,
                    &MsfOptions::new(mode, termination),
                    &mut |t: &IterationTrace<'_>| checks.observe(t),
                );
                let tag = format!("{name} {mode:?}/{termination:?}");
                if result.total_weight != oracle.total_weight
                    || result.forest_edges != oracle.forest_edges
                {
                    mismatches.push(tag.clone());
                }
                let bound = if mode.keeps_stars() {
                    ceil_log(2.0, n) + 1
                } else {
                    ceil_log(1.5, n) + 1
                };
                if result.iterations > bound {
                    bound_failures
                        .push(format!("{tag}: {} iterations > {bound}", result.iterations));
                }
                strategy.0 += checks.strategy_checks;
                cycles.0 += checks.cycle_checks;
                progress.0 += checks.progress_checks;
                let [s, b, c, p] = checks.failures;
                strategy
                    .1
                    .extend(s.into_iter().map(|f| format!("{tag} {f}")));
                subiter.extend(b.into_iter().map(|f| format!("{tag} {f}")));
                cycles.1.extend(c.into_iter().map(|f| format!("{tag} {f}")));
                progress
                    .1
                    .extend(p.into_iter().map(|f| format!("{tag} {f}")));
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();

    let first = |v: &[String]| v.iter().take(3).cloned().collect::<Vec<_>>().join("; ");
    let c1 = if !mismatches.is_empty() {
        Err(format!(
            "{} of {runs} runs differ from the oracle: {}",
            mismatches.len(),
            first(&mismatches)
        ))
    } else if elapsed >= 120.0 {
        Err(format!(
            "{runs} runs matched but took {elapsed:.1} s (limit 120 s)"
        ))
    } else {
        Ok(format!(
            "{} graphs, {runs} runs match the oracle in {elapsed:.1} s",
            graphs.len()
        ))
    };
    let c2 = if strategy.1.is_empty() {
        Ok(format!(
            "{} iterations with star-forest input agree",
            strategy.0
        ))
    } else {
        Err(first(&strategy.1))
    };
    let c3 = if bound_failures.is_empty() && subiter.is_empty() {
        Ok(format!(
            "{runs} runs within iteration and shortcut-pass bounds"
        ))
    } else {
        Err(first(&[bound_failures, subiter].concat()))
    };
    let c8 = if cycles.1.is_empty() {
        Ok(format!("{} tie-broken forests without cycles", cycles.0))
    } else {
        Err(first(&cycles.1))
    };
    let c9 = if progress.1.is_empty() {
        Ok(format!(
            "{} star-mode iterations hooked at least half the active trees",
            progress.0
        ))
    } else {
        Err(first(&progress.1))
    };
    [c1, c2, c3, c8, c9]
}

fn random_graph(rng: &mut ChaCha8Rng, max_n: usize, max_w: u32) -> AdjacencyMatrix {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=3 * n);
    let edges: Vec<_> = (0..m)
        .map(|_| {
            (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                f64::from(rng.gen_range(1..=max_w)),
            )
        })
        .collect();
    AdjacencyMatrix::from_edges(n, edges).unwrap()
}

fn dense_outgoing(a: &AdjacencyMatrix, p: &[usize], mask: &[bool]) -> Vec<EdgeEntry> {
    let n = a.n();
    let mut table = vec![vec![None; n]; n];
    for (k, w) in a.edges() {
        table[k.lo()][k.hi()] = Some((w, k));
        table[k.hi()][k.lo()] = Some((w, k));
    }
    let mut out = vec![EdgeEntry::IDENTITY; n];
    for i in (0..n).filter(|&i| mask[i]) {
        for j in 0..n {
            if let Some((w, k)) = table[i][j] {
                if p[i] != p[j] {
                    out[i] = min_weight(out[i], EdgeEntry::new(w, k, p[j]));
                }
            }
        }
    }
    out
}

fn kernel_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for instance in 0..500 {
        let a = random_graph(&mut rng, 64, 5);
        let n = a.n();
        let p: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
        let f = outgoing_edge_fn();
        let expected = dense_outgoing(&a, &p, &mask);
        let once = multilinear(&a, &p, &p, &f, &MinWeight, Some(&mask)).unwrap();
        let (pairwise, _) =
            multilinear_pairwise_reference(&a, &p, &p, &f, &MinWeight, Some(&mask)).unwrap();
        ensure!(
            once == expected,
            "instance {instance}: all-at-once differs from dense"
        );
        ensure!(
            pairwise == expected,
            "instance {instance}: pairwise differs from dense"
        );
    }
    Ok("500 instances identical across three evaluations".into())
}

fn grid_graphs() -> Vec<AdjacencyMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..100)
        .map(|k| {
            if k % 2 == 0 {
                random_graph(&mut rng, 200, 50)
            } else {
                generate(&GenSpec::rmat(rng.gen_range(3..=8), 4, k)).unwrap()
            }
        })
        .collect()
}

fn write_counts() -> Outcome {
    let mut checked = 0;
    for (g, a) in grid_graphs().iter().enumerate() {
        let p: Vec<usize> = (0..a.n()).collect();
        for procs in [1, 4, 16, 64] {
            let shape = GridShape::new(procs).unwrap();
            let state = partition(a, shape);
            let f = outgoing_edge_fn();
            let (_, once) = grid_multilinear(&state, &p, &p, &f, &MinWeight, None).unwrap();
            let (_, pair) =
                grid_multilinear_pairwise(&state, &p, &p, &f, &MinWeight, None).unwrap();
            let diff = pair.total.remote_writes as i64 - once.total.remote_writes as i64;
            ensure!(
                diff == a.nnz() as i64,
                "graph {g}, p = {procs}: difference {diff}, nnz {}",
                a.nnz()
            );

            // The same holds for every iteration of a full run.
            let run = |pairwise| {
                msf(
                    a,
                    &MsfOptions {
                        grid: Some(shape),
                        pairwise,
                        ..MsfOptions::default()
                    },
                )
            };
            let (r_once, r_pair) = (run(false), run(true));
            ensure!(
                r_once.iterations == r_pair.iterations,
                "graph {g}: iteration counts differ"
            );
            for (x, y) in r_once.per_iteration.iter().zip(&r_pair.per_iteration) {
                let diff = y.counters.remote_writes as i64 - x.counters.remote_writes as i64;
                ensure!(
                    diff == a.nnz() as i64,
                    "graph {g}, p = {procs}: run difference {diff}"
                );
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} graph/grid pairs differ by exactly nnz"))
}

fn broadcast_volume() -> Outcome {
    let mut checked = 0;
    for (g, a) in grid_graphs().iter().enumerate() {
        let p: Vec<usize> = (0..a.n()).map(|i| i / 2).collect();
        for procs in [4, 9, 16, 64] {
            let state = partition(a, GridShape::new(procs).unwrap());
            let side = (procs as f64).sqrt().round() as usize;
            let block = a.n().div_ceil(side) as u64;
            let (_, c) =
                grid_multilinear(&state, &p, &p, &outgoing_edge_fn(), &MinWeight, None).unwrap();
            for (rank, counters) in c.per_rank.iter().enumerate() {
                // Two input vectors of one-word vertex ids.
                ensure!(
                    counters.words_broadcast == 2 * block,
                    "graph {g}, p = {procs}, rank {rank}: broadcast {} != 2 x {block}",
                    counters.words_broadcast
                );
                // Reduced entries are three words each.
                ensure!(
                    counters.words_reduced == 3 * block,
                    "graph {g}, p = {procs}, rank {rank}: reduce {} != 3 x {block}",
                    counters.words_reduced
                );
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} graph/grid pairs move ceil(n/sqrt(p)) elements per rank and phase"
    ))
}

fn grid_determinism() -> Outcome {
    let graphs = grid_graphs();
    for (g, a) in graphs.iter().enumerate() {
        let n = a.n();
        let p: Vec<usize> = (0..n).map(|i| (i * 7) % n.max(1)).collect();
        let expected = multilinear(a, &p, &p, &outgoing_edge_fn(), &MinWeight, None).unwrap();
        for procs in [1, 4, 9, 16, 64] {
            let state = partition(a, GridShape::new(procs).unwrap());
            let (w, _) =
                grid_multilinear(&state, &p, &p, &outgoing_edge_fn(), &MinWeight, None).unwrap();
            ensure!(w == expected, "graph {g}, p = {procs}: grid output differs");
        }
    }
    for (g, a) in graphs.iter().enumerate().step_by(10) {
        for procs in [4, 16] {
            let opts = MsfOptions {
                grid: Some(GridShape::new(procs).unwrap()),
                ..MsfOptions::default()
            };
            let reference = msf(a, &opts);
            for threads in [1, 2, 4, 8] {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap();
                let again = pool.install(|| msf(a, &opts));
                ensure!(
                    again == reference,
                    "graph {g}, p = {procs}, {threads} threads: run differs"
                );
            }
        }
    }
    Ok("100 graphs x 5 grids bitwise equal; counters stable over 1-8 threads".into())
}

fn sssp_demo() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut brute = 0;
    for g in 0..100 {
        let a = random_graph(&mut rng, 128, 20);
        let source = rng.gen_range(0..a.n());
        let d = sssp_bellman_ford(&a, source).unwrap();
        ensure!(
            d == dijkstra(&a, source),
            "graph {g}: distances differ from Dijkstra"
        );
    }
    for g in 0..100 {
        let a = random_graph(&mut rng, 10, 20);
        let source = rng.gen_range(0..a.n());
        let d = sssp_bellman_ford(&a, source).unwrap();
        ensure!(
            d == brute_force_distances(&a, source),
            "small graph {g}: differs from enumeration"
        );
        brute += 1;
    }
    Ok(format!(
        "100 graphs match Dijkstra, {brute} small graphs match enumeration"
    ))
}

fn connectivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in 0..100 {
        let a = if g % 2 == 0 {
            random_graph(&mut rng, 300, 1)
        } else {
            generate(&GenSpec::rmat(rng.gen_range(3..=9), 2, g)).unwrap()
        };
        let labels = connected_components(&a).labels;
        let bfs = bfs_components(&a);
        // Same partition iff the label maps are mutually consistent.
        let mut forward = vec![usize::MAX; a.n()];
        let mut backward = vec![usize::MAX; a.n()];
        for (v, (&l, &b)) in labels.iter().zip(&bfs).enumerate() {
            ensure!(
                forward[l] == usize::MAX || forward[l] == b,
                "graph {g}: vertex {v} split from its BFS component"
            );
            ensure!(
                backward[b] == usize::MAX || backward[b] == l,
                "graph {g}: vertex {v} merged across BFS components"
            );
            forward[l] = b;
            backward[b] = l;
        }
    }
    Ok("100 graphs partition identically to BFS".into())
}

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_msf"))
}

/// Runs the CLI and returns its JSON report with `timings` removed.
fn report_without_timings(args: &[&str], json: &Path) -> Result<String, String> {
    let out = Command::new(binary())
        .args(args)
        .arg("--json")
        .arg(json)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "msf {} exited with {}",
        args.join(" "),
        out.status
    );
    let text = std::fs::read_to_string(json).map_err(|e| e.to_string())?;
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    value
        .as_object_mut()
        .ok_or("report is not an object")?
        .remove("timings")
        .ok_or("report has no timings")?;
    Ok(serde_json::to_string(&value).unwrap())
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/disjoint.el");
    let fixture = fixture.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "compute",
            "--gen",
            "uniform",
            "--n",
            "512",
            "--density",
            "2",
            "--seed",
            "7",
            "--verify",
        ],
        vec![
            "compute",
            "--gen",
            "rmat",
            "--scale",
            "9",
            "--edge-factor",
            "8",
            "--seed",
            "3",
            "--shortcut",
            "baseline",
        ],
        vec![
            "compute",
            "--gen",
            "rmat",
            "--scale",
            "8",
            "--seed",
            "3",
            "--grid",
            "16",
            "--pairwise",
        ],
        vec![
            "compute",
            "--input",
            fixture,
            "--shortcut",
            "csp",
            "--termination",
            "parent",
        ],
        vec![
            "cc",
            "--gen",
            "rmat",
            "--scale",
            "9",
            "--edge-factor",
            "2",
            "--seed",
            "5",
            "--verify",
        ],
        vec![
            "sssp",
            "--gen",
            "uniform",
            "--n",
            "64",
            "--density",
            "10",
            "--seed",
            "2",
            "--source",
            "1",
            "--verify",
        ],
    ];
    for (k, args) in commands.iter().enumerate() {
        let mut args = args.clone();
        let out = dir.path().join(format!("distances{k}.txt"));
        if args[0] == "sssp" {
            args.extend(["--output", out.to_str().unwrap()]);
        }
        let first = report_without_timings(&args, &dir.path().join(format!("a{k}.json")))?;
        let second = report_without_timings(&args, &dir.path().join(format!("b{k}.json")))?;
        ensure!(
            first == second,
            "msf {} produced different reports",
            args.join(" ")
        );
    }
    let mut files = Vec::new();
    for name in ["g1.mtx", "g2.mtx"] {
        let path = dir.path().join(name);
        let status = Command::new(binary())
            .args([
                "gen", "--gen", "rmat", "--scale", "8", "--seed", "9", "--output",
            ])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure!(status.success(), "gen exited with {status}");
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure!(
        files[0] == files[1],
        "gen wrote different files for one seed"
    );
    Ok(format!(
        "{} commands and gen output byte-identical across runs",
        commands.len()
    ))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let started = Instant::now();
    let [c1, c2, c3, c8, c9] = panic::catch_unwind(corpus_sweep)
        .unwrap_or_else(|_| std::array::from_fn(|_| Err("corpus sweep panicked".to_string())));
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "oracle equivalence", c1),
        (2, "shortcut strategy equivalence", c2),
        (3, "iteration bounds", c3),
        (4, "kernel equivalence", guarded(kernel_equivalence)),
        (5, "pairwise write count", guarded(write_counts)),
        (6, "broadcast/reduce volume", guarded(broadcast_volume)),
        (7, "grid determinism", guarded(grid_determinism)),
        (8, "tie-break soundness", c8),
        (9, "progress guarantee", c9),
        (10, "sssp", guarded(sssp_demo)),
        (11, "connected components", guarded(connectivity)),
        (12, "cli determinism", guarded(cli_determinism)),
    ];
    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
