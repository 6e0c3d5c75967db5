mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use msf_core::grid::GridShape;
use msf_core::io::{self, Format, GenKind, GenSpec, DEFAULT_RMAT_PROBS};
use msf_core::msf::{
    connected_components, kruskal_oracle, msf_timed, sssp_bellman_ford, MsfOptions, ShortcutMode,
    Termination, DEFAULT_CSP_THRESHOLD,
};
use msf_core::reference::{bfs_components, brute_force_distances, dijkstra};
use msf_core::AdjacencyMatrix;

use report::{GraphSummary, InputReport, RunReport, SsspReport, Timings, Verification};

/// Failures that map to a non-zero exit code.
enum Failure {
    Input(anyhow::Error),
    Verification(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Input(e.into())
    }
}

#[derive(Parser)]
#[command(
    name = "msf",
    version,
    about = "Algebraic minimum spanning forest engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum spanning forest.
    Compute(ComputeArgs),
    /// Connected components.
    Cc(CcArgs),
    /// Single-source shortest paths by tropical SpMV.
    Sssp(SsspArgs),
    /// Generate a synthetic graph file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Mm,
    Dimacs,
    Edgelist,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Mm => Format::Mm,
            FormatArg::Dimacs => Format::Dimacs,
            FormatArg::Edgelist => Format::Edgelist,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKindArg {
    Rmat,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShortcutArg {
    Baseline,
    Complete,
    Csp,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum TerminationArg {
    Parent,
    Grandparent,
}

/// Synthetic graph parameters.
#[derive(Args, Clone)]
struct GenParams {
    /// R-MAT scale S, giving 2^S vertices.
    #[arg(long)]
    scale: Option<u32>,
    /// R-MAT samples per vertex.
    #[arg(long, default_value_t = 8)]
    edge_factor: usize,
    /// Uniform graph vertex count.
    #[arg(long)]
    n: Option<usize>,
    /// Uniform graph edge percentage in (0, 100].
    #[arg(long)]
    density: Option<f64>,
    /// Seed for structure and weights.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// R-MAT quadrant probabilities a,b,c,d.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    rmat_probs: Option<Vec<f64>>,
}

impl GenParams {
    fn spec(&self, kind: GenKindArg) -> Result<GenSpec> {
        let kind = match kind {
            GenKindArg::Rmat => {
                let Some(scale) = self.scale else {
                    bail!("--gen rmat needs --scale");
                };
                let probs = match &self.rmat_probs {
                    Some(p) => [p[0], p[1], p[2], p[3]],
                    None => DEFAULT_RMAT_PROBS,
                };
                GenKind::Rmat {
                    scale,
                    edge_factor: self.edge_factor,
                    probs,
                }
            }
            GenKindArg::Uniform => {
                let (Some(n), Some(density)) = (self.n, self.density) else {
                    bail!("--gen uniform needs --n and --density");
                };
                GenKind::Uniform { n, density }
            }
        };
        let spec = GenSpec {
            kind,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Where the graph comes from.
#[derive(Args)]
struct Source {
    /// Graph file.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// File format; inferred from the extension when omitted.
    #[arg(long, value_enum, requires = "input")]
    format: Option<FormatArg>,
    /// Generate the graph instead of reading it.
    #[arg(long, value_enum)]
    gen: Option<GenKindArg>,
    #[command(flatten)]
    params: GenParams,
}

impl Source {
    fn load(&self) -> Result<(AdjacencyMatrix, InputReport)> {
        match (&self.input, self.gen) {
            (Some(path), _) => {
                let format = self
                    .format
                    .map(Format::from)
                    .unwrap_or_else(|| Format::infer(path));
                let a = io::load(path, format, self.params.seed)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok((
                    a,
                    InputReport::File {
                        path: path.display().to_string(),
                        format,
                    },
                ))
            }
            (None, Some(kind)) => {
                let spec = self.params.spec(kind)?;
                let a = io::generate(&spec)?;
                Ok((a, InputReport::Generated(spec)))
            }
            (None, None) => bail!("give --input or --gen"),
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Check the result against a sequential reference.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "auto")]
    shortcut: ShortcutArg,
    /// Change-set size below which auto mode prefetches.
    #[arg(long, default_value_t = DEFAULT_CSP_THRESHOLD)]
    threshold: usize,
    #[arg(long, value_enum, default_value = "grandparent")]
    termination: TerminationArg,
    /// Simulate a grid of this many ranks (a perfect square).
    #[arg(long)]
    grid: Option<usize>,
    /// Use the two-step pairwise kernel.
    #[arg(long)]
    pairwise: bool,
    #[command(flatten)]
    output: Output,
    /// Write the forest edges as an edge list.
    #[arg(long)]
    emit_forest: Option<PathBuf>,
}

#[derive(Args)]
struct CcArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SsspArgs {
    #[command(flatten)]
    source: Source,
    /// Source vertex, 1-based.
    #[arg(long = "source")]
    from: usize,
    /// Write distances here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    report: Output,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    gen: GenKindArg,
    #[command(flatten)]
    params: GenParams,
    /// Destination file.
    #[arg(long)]
    output: PathBuf,
    /// Output format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let outcome = match cli.command {
        Command::Compute(args) => compute(args),
        Command::Cc(args) => cc(args),
        Command::Sssp(args) => sssp(args),
        Command::Gen(args) => gen(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Applies `MSF_THREADS` (0 or unset means one thread per core).
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("MSF_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("MSF_THREADS must be a non-negative integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn compute(args: ComputeArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let (a, input) = args.source.load()?;
    let load = started.elapsed();

    let opts = MsfOptions {
        shortcut: match args.shortcut {
            ShortcutArg::Baseline => ShortcutMode::Baseline,
            ShortcutArg::Complete => ShortcutMode::Complete,
            ShortcutArg::Csp => ShortcutMode::Csp,
            ShortcutArg::Auto => ShortcutMode::Auto,
        },
        termination: match args.termination {
            TerminationArg::Parent => Termination::Parent,
            TerminationArg::Grandparent => Termination::Grandparent,
        },
        threshold: args.threshold,
        grid: args.grid.map(GridShape::new).transpose()?,
        pairwise: args.pairwise,
    };
    let (result, phases) = msf_timed(&a, &opts);

    let clock = Instant::now();
    let verification = args.output.verify.then(|| {
        let oracle = kruskal_oracle(&a);
        let passed = oracle.total_weight == result.total_weight
            && oracle.forest_edges == result.forest_edges;
        Verification {
            reference: "kruskal",
            passed,
            detail: format!(
                "oracle weight {} with {} edges, engine weight {} with {} edges",
                oracle.total_weight,
                oracle.forest_edges.len(),
                result.total_weight,
                result.forest_edges.len()
            ),
        }
    });
    let verify = clock.elapsed();

    println!("graph: n={} edges={}", a.n(), a.edge_count());
    println!(
        "msf: total_weight={} forest_edges={} components={} iterations={}",
        result.total_weight,
        result.forest_edges.len(),
        result.components(),
        result.iterations
    );
    if let Some(v) = &verification {
        println!(
            "verify: {} ({})",
            if v.passed { "match" } else { "MISMATCH" },
            v.detail
        );
    }

    if let Some(path) = &args.emit_forest {
        let mut out = BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        for key in &result.forest_edges {
            let w = a
                .weight(key.lo(), key.hi())
                .expect("forest edges come from the matrix");
            writeln!(out, "{} {} {}", key.lo() + 1, key.hi() + 1, w.value())?;
        }
        out.flush()?;
    }

    if let Some(path) = &args.output.json {
        let report = RunReport::msf(
            GraphSummary::of(&a),
            input,
            &opts,
            &result,
            verification.clone(),
            Timings {
                load: load.as_secs_f64(),
                run: phases.total.as_secs_f64(),
                verify: verify.as_secs_f64(),
                phases: Some(phases),
            },
        );
        write_json(path, &report)?;
    }
    finish(verification)
}

fn cc(args: CcArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let (a, input) = args.source.load()?;
    let load = started.elapsed();

    let clock = Instant::now();
    let comps = connected_components(&a);
    let run = clock.elapsed();

    let clock = Instant::now();
    let verification = args.output.verify.then(|| {
        let reference = bfs_components(&a);
        let passed = same_partition(&comps.labels, &reference);
        let bfs_count = reference.iter().max().map_or(0, |m| m + 1);
        Verification {
            reference: "bfs",
            passed,
            detail: format!("bfs found {bfs_count} components, engine {}", comps.count()),
        }
    });
    let verify = clock.elapsed();

    println!("graph: n={} edges={}", a.n(), a.edge_count());
    println!(
        "cc: components={} iterations={}",
        comps.count(),
        comps.iterations
    );
    if let Some(v) = &verification {
        println!(
            "verify: {} ({})",
            if v.passed { "match" } else { "MISMATCH" },
            v.detail
        );
    }
    if let Some(path) = &args.output.json {
        let report = RunReport::cc(
            GraphSummary::of(&a),
            input,
            &comps,
            verification.clone(),
            Timings {
                load: load.as_secs_f64(),
                run: run.as_secs_f64(),
                verify: verify.as_secs_f64(),
                phases: None,
            },
        );
        write_json(path, &report)?;
    }
    finish(verification)
}

fn same_partition(labels: &[usize], reference: &[usize]) -> bool {
    use std::collections::HashMap;
    let mut forward = HashMap::new();
    let mut backward = HashMap::new();
    labels
        .iter()
        .zip(reference)
        .all(|(&l, &r)| *forward.entry(l).or_insert(r) == r && *backward.entry(r).or_insert(l) == l)
}

fn sssp(args: SsspArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let (a, input) = args.source.load()?;
    let load = started.elapsed();
    if let Some((k, w)) = a.edges().find(|(_, w)| w.value() < 0.0) {
        return Err(Failure::Input(anyhow::anyhow!(
            "edge {k} has negative weight {w}; shortest paths need non-negative weights"
        )));
    }
    if args.from == 0 {
        return Err(Failure::Input(anyhow::anyhow!("--source is 1-based")));
    }
    let source = args.from - 1;

    let clock = Instant::now();
    let dist = sssp_bellman_ford(&a, source)?;
    let run = clock.elapsed();

    let clock = Instant::now();
    let verification = args.report.verify.then(|| {
        let (reference, expected) = if a.n() <= 12 {
            ("brute_force", brute_force_distances(&a, source))
        } else {
            ("dijkstra", dijkstra(&a, source))
        };
        let mismatches = dist.iter().zip(&expected).filter(|(x, y)| x != y).count();
        Verification {
            reference,
            passed: mismatches == 0,
            detail: format!("{mismatches} of {} distances differ", a.n()),
        }
    });
    let verify = clock.elapsed();

    let mut lines = String::new();
    for (v, d) in dist.iter().enumerate() {
        lines.push_str(&format!("{} {}\n", v + 1, d));
    }
    match &args.output {
        Some(path) => {
            std::fs::write(path, &lines).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{lines}"),
    }
    if let Some(v) = &verification {
        println!(
            "verify: {} ({})",
            if v.passed { "match" } else { "MISMATCH" },
            v.detail
        );
    }
    if let Some(path) = &args.report.json {
        let report = SsspReport {
            command: "sssp",
            input,
            graph: GraphSummary::of(&a),
            source: args.from,
            reachable: dist.iter().filter(|d| d.is_finite()).count(),
            distances: dist.clone(),
            verification: verification.clone(),
            timings: Timings {
                load: load.as_secs_f64(),
                run: run.as_secs_f64(),
                verify: verify.as_secs_f64(),
                phases: None,
            },
        };
        write_json(path, &report)?;
    }
    finish(verification)
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let spec = args.params.spec(args.gen)?;
    let a = io::generate(&spec)?;
    let format = args
        .format
        .map(Format::from)
        .unwrap_or_else(|| Format::infer(&args.output));
    io::save(&a, &args.output, format)
        .with_context(|| format!("writing {}", args.output.display()))?;
    println!(
        "wrote {} ({format}): n={} edges={}",
        args.output.display(),
        a.n(),
        a.edge_count()
    );
    Ok(())
}

fn finish(verification: Option<Verification>) -> Result<(), Failure> {
    match verification {
        Some(v) if !v.passed => Err(Failure::Verification(format!(
            "{} reference: {}",
            v.reference, v.detail
        ))),
        _ => Ok(()),
    }
}
