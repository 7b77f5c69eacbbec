//! `spexp`: generators, expansion searches, decomposition, verification
//! sweeps and embedding experiments.
//!
//! JSON results carry a `manifest` key with the subcommand, its flags, the
//! master seed and the tool version. `SPEXP_THREADS` caps the worker pool.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spexp::channels::{BistochasticTuple, Permutation, BISTOCH_TOL};
use spexp::embedlab::{
    distortion, distortion_lower_bound, lower_bound_experiment, lp_expansion_estimate, schatten_comparison,
    sp_expansion_estimate, EmbedConfig, HSource,
};
use spexp::graphs::{
    build_complete, build_cycle, build_hypercube, cut_oracle_l1, decompose_permutations, edge_expansion_bruteforce,
    metric_ratio_r, random_permutation, random_regular, shortest_path_metric, spectral_l2_expansion, RegularGraph,
    EXHAUSTIVE_LIMIT,
};
use spexp::rng::substream;
use spexp::search::{estimate, Mode, SearchConfig, Strategy};
use spexp::verify::{sweep, SweepConfig};

use output::{parse_value, read_json, read_value, with_manifest, write_json, write_output, CliError, CliResult, RunManifest};

#[derive(Parser)]
#[command(name = "spexp", version, about = "Schatten-p expansion of bistochastic tuples and regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph or tuple file.
    Gen(GenArgs),
    /// Minimize an expansion ratio of a tuple or graph file.
    Expansion(ExpansionArgs),
    /// Split a regular graph into permutations.
    Decompose(DecomposeArgs),
    /// Randomized sweep of the inequality checkers; exit 0 iff all pass.
    Verify(VerifyArgs),
    /// Embedding expansion estimate, metric ratio and distortion bound.
    Embed(EmbedArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GenKind {
    Cycle,
    Complete,
    Hypercube,
    RandomRegular,
    UnitaryTuple,
    PermutationTuple,
}

#[derive(Args, Serialize)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Vertices or matrix size.
    #[arg(long)]
    n: Option<usize>,
    /// Degree or tuple length.
    #[arg(long)]
    d: Option<usize>,
    /// Hypercube dimension.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// For permutation-tuple: decompose this graph instead of sampling.
    #[arg(long)]
    from: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Sp,
    Dim,
    #[value(alias = "Q")]
    Q,
    Classical,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StrategyArg {
    #[value(alias = "coordinate")]
    CoordinateExhaustive,
    #[value(alias = "random")]
    RandomSample,
    Riemannian,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::CoordinateExhaustive => Strategy::CoordinateExhaustive,
            StrategyArg::RandomSample => Strategy::RandomSample,
            StrategyArg::Riemannian => Strategy::Riemannian,
        }
    }
}

#[derive(Args, Serialize)]
struct ExpansionArgs {
    /// Tuple or graph JSON; graphs are turned into permutation tuples for
    /// the quantum modes.
    input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, value_enum, default_value = "sp")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "coordinate-exhaustive")]
    strategy: StrategyArg,
    /// Base search configuration (JSON); explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Subspace dimension; default sweeps 1..=n/2.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DecomposeArgs {
    graph: PathBuf,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    #[arg(long, default_value_t = 2)]
    d_min: usize,
    #[arg(long, default_value_t = 5)]
    d_max: usize,
    #[arg(long, default_value_t = 1.0)]
    p_min: f64,
    #[arg(long, default_value_t = 6.0)]
    p_max: f64,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TargetArg {
    Lp,
    Sp,
}

#[derive(Args, Serialize)]
struct EmbedArgs {
    /// Graph files; more than one requires --csv.
    graphs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "lp")]
    target: TargetArg,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Target dimension; default n.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit one CSV row per graph instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Instead of files, use one connected random regular graph per size
    /// (comma separated), e.g. 64,128,256. Implies --csv.
    #[arg(long, value_delimiter = ',')]
    random_sizes: Vec<usize>,
    /// Degree for --random-sizes.
    #[arg(long, default_value_t = 3)]
    degree: usize,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    let started = Instant::now();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Expansion(a) => cmd_expansion(&a),
        Command::Decompose(a) => cmd_decompose(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Embed(a) => cmd_embed(&a),
    };
    // kept out of the written results so that reruns are byte-identical
    eprintln!("elapsed_ms: {}", started.elapsed().as_millis());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("SPEXP_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("SPEXP_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn require(value: Option<usize>, flag: &str, kind: GenKind) -> CliResult<usize> {
    value.ok_or_else(|| CliError::Usage(format!("gen {kind:?} needs --{flag}")))
}

fn cmd_gen(a: &GenArgs) -> CliResult<()> {
    let manifest = RunManifest::new("gen", a, Some(a.seed));
    let value = match a.kind {
        GenKind::Cycle => with_manifest(&build_cycle(require(a.n, "n", a.kind)?)?, &manifest),
        GenKind::Complete => with_manifest(&build_complete(require(a.n, "n", a.kind)?)?, &manifest),
        GenKind::Hypercube => with_manifest(&build_hypercube(require(a.k, "k", a.kind)?)?, &manifest),
        GenKind::RandomRegular => {
            let g = random_regular(require(a.n, "n", a.kind)?, require(a.d, "d", a.kind)?, a.seed)?;
            with_manifest(&g, &manifest)
        }
        GenKind::UnitaryTuple => {
            let t = BistochasticTuple::random_unitary(require(a.n, "n", a.kind)?, require(a.d, "d", a.kind)?, a.seed)?;
            let report = t.validate(BISTOCH_TOL);
            if !report.pass {
                return Err(CliError::Core(spexp::Error::InvalidMatrix(format!(
                    "generated tuple failed validation: {report:?}"
                ))));
            }
            with_manifest(&t, &manifest)
        }
        GenKind::PermutationTuple => {
            let perms: Vec<Permutation> = match &a.from {
                Some(path) => decompose_permutations(&read_json::<RegularGraph>(path)?)?,
                None => {
                    let n = require(a.n, "n", a.kind)?;
                    (0..require(a.d, "d", a.kind)?)
                        .map(|s| random_permutation(n, &mut substream(a.seed, s as u64)))
                        .collect()
                }
            };
            with_manifest(&BistochasticTuple::from_permutations(&perms)?, &manifest)
        }
    };
    write_json(a.out.as_deref(), &value)
}

enum Input {
    Tuple(BistochasticTuple),
    Graph(RegularGraph),
}

fn read_input(path: &Path) -> CliResult<Input> {
    let value = read_value(path)?;
    let has = |key: &str| value.get(key).is_some();
    if has("matrices") {
        Ok(Input::Tuple(parse_value(path, value)?))
    } else if has("adjacency") {
        Ok(Input::Graph(parse_value(path, value)?))
    } else {
        Err(CliError::Parse {
            path: path.to_path_buf(),
            detail: "neither a tuple (no \"matrices\") nor a graph (no \"adjacency\")".into(),
        })
    }
}

fn search_config(a: &ExpansionArgs) -> CliResult<SearchConfig> {
    let mut cfg: SearchConfig = match &a.config {
        Some(path) => read_json(path)?,
        None => SearchConfig::default(),
    };
    cfg.strategy = a.strategy.into();
    if a.k.is_some() {
        cfg.k = a.k;
    }
    cfg.samples = a.samples.unwrap_or(cfg.samples);
    cfg.restarts = a.restarts.unwrap_or(cfg.restarts);
    cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
    cfg.epsilon = a.epsilon.unwrap_or(cfg.epsilon);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    Ok(cfg)
}

fn cmd_expansion(a: &ExpansionArgs) -> CliResult<()> {
    let input = read_input(&a.input)?;
    let cfg = search_config(a)?;
    let manifest = RunManifest::new("expansion", &json!({ "flags": a, "search": cfg }), Some(cfg.seed));
    let mode = match a.mode {
        ModeArg::Classical => {
            let Input::Graph(g) = input else {
                return Err(CliError::Usage("--mode classical needs a graph file".into()));
            };
            let w = edge_expansion_bruteforce(&g)?;
            let result = json!({ "mode": "classical", "value": w.value, "witness": w });
            return write_json(a.out.as_deref(), &with_manifest(&result, &manifest));
        }
        ModeArg::Sp => Mode::Sp,
        ModeArg::Dim => Mode::Dim,
        ModeArg::Q => Mode::Q,
    };
    let tuple = match input {
        Input::Tuple(t) => t,
        Input::Graph(g) => BistochasticTuple::from_permutations(&decompose_permutations(&g)?)?,
    };
    let est = estimate(&tuple, mode, a.p, &cfg)?;
    write_json(a.out.as_deref(), &with_manifest(&est, &manifest))
}

fn cmd_decompose(a: &DecomposeArgs) -> CliResult<()> {
    let g: RegularGraph = read_json(&a.graph)?;
    let perms = decompose_permutations(&g)?;
    let mut sum = vec![vec![0u32; g.n()]; g.n()];
    for perm in &perms {
        for (j, &i) in perm.iter().enumerate() {
            sum[i][j] += 1;
        }
    }
    if sum != g.adjacency() {
        return Err(CliError::Core(spexp::Error::NumericalFailure {
            restart: 0,
            detail: "permutations do not reconstruct the adjacency".into(),
        }));
    }
    let result = json!({ "n": g.n(), "d": g.d(), "permutations": perms });
    write_json(a.out.as_deref(), &with_manifest(&result, &RunManifest::new("decompose", a, None)))
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    let cfg = SweepConfig {
        instances: a.instances,
        n_min: a.n_min,
        n_max: a.n_max,
        d_min: a.d_min,
        d_max: a.d_max,
        exponent_min: a.p_min,
        exponent_max: a.p_max,
        seed: a.seed,
        ..SweepConfig::default()
    };
    let report = sweep(&cfg)?;
    write_json(a.out.as_deref(), &with_manifest(&report, &RunManifest::new("verify", a, Some(a.seed))))?;
    let failures: usize = report.checkers.iter().map(|c| c.failures).sum();
    if failures > 0 {
        return Err(CliError::ChecksFailed(failures));
    }
    Ok(())
}

#[derive(Serialize)]
struct EmbedRow {
    graph: String,
    n: usize,
    d: usize,
    target: String,
    p: f64,
    m: usize,
    estimate: f64,
    metric_ratio_r: f64,
    h: f64,
    h_source: String,
    distortion_lower_bound: f64,
}

fn h_source_name(s: HSource) -> String {
    match s {
        HSource::CutOracle => "cut-oracle",
        HSource::Spectral => "spectral",
        HSource::Estimator => "estimator",
    }
    .into()
}

/// Exact expansion for the bound when one is available, else the estimate.
fn bound_source(g: &RegularGraph, p: f64, est: f64) -> CliResult<(f64, HSource)> {
    Ok(if p == 2.0 {
        (spectral_l2_expansion(g)?, HSource::Spectral)
    } else if p == 1.0 && g.n() <= EXHAUSTIVE_LIMIT {
        (cut_oracle_l1(g)?.value, HSource::CutOracle)
    } else {
        (est, HSource::Estimator)
    })
}

fn cmd_embed(a: &EmbedArgs) -> CliResult<()> {
    let cfg = EmbedConfig {
        restarts: a.restarts,
        max_iters: a.max_iters,
        epsilon: a.epsilon,
        seed: a.seed,
        ..EmbedConfig::default()
    };
    let manifest = RunManifest::new("embed", a, Some(a.seed));
    let target = match a.target {
        TargetArg::Lp => "lp",
        TargetArg::Sp => "sp",
    };

    if !a.random_sizes.is_empty() {
        if a.target != TargetArg::Lp || !a.graphs.is_empty() {
            return Err(CliError::Usage("--random-sizes takes no graph files and needs --target lp".into()));
        }
        let rows = lower_bound_experiment(&a.random_sizes, a.degree, a.p, a.m.unwrap_or(8), a.seed, &cfg)?;
        let rows: Vec<EmbedRow> = rows
            .into_iter()
            .map(|r| EmbedRow {
                graph: format!("random-regular:seed={}", r.graph_seed),
                n: r.n,
                d: r.d,
                target: target.into(),
                p: a.p,
                m: a.m.unwrap_or(8),
                estimate: r.h,
                metric_ratio_r: r.r,
                h: r.h,
                h_source: h_source_name(r.h_source),
                distortion_lower_bound: r.bound,
            })
            .collect();
        return write_csv(a.out.as_deref(), &rows);
    }

    if a.graphs.is_empty() {
        return Err(CliError::Usage("embed needs a graph file or --random-sizes".into()));
    }
    if a.graphs.len() > 1 && !a.csv {
        return Err(CliError::Usage("several graph files need --csv".into()));
    }
    let mut rows = Vec::new();
    for path in &a.graphs {
        let g: RegularGraph = read_json(path)?;
        let m = a.m.unwrap_or(g.n());
        let est = match a.target {
            TargetArg::Lp => lp_expansion_estimate(&g, a.p, m, &cfg)?,
            TargetArg::Sp => sp_expansion_estimate(&g, a.p, m, &cfg)?,
        };
        let rho = shortest_path_metric(&g)?;
        let r = metric_ratio_r(&g, &rho, a.p)?;
        let (h, source) = bound_source(&g, a.p, est.value)?;
        let bound = distortion_lower_bound(&g, a.p, h)?;
        if !a.csv {
            let mut result: Value = json!({
                "target": target,
                "p": a.p,
                "m": m,
                "estimate": est,
                "metric_ratio_r": r,
                "lower_bound": { "h": h, "h_source": source, "distortion_lower_bound": bound },
                "witness_distortion": distortion(&est.witness, &rho)?,
            });
            if a.target == TargetArg::Sp {
                let cmp = schatten_comparison(&g, a.p, m, &cfg)?;
                result["s2_comparison"] = serde_json::to_value(cmp).expect("comparison serializes");
            }
            return write_json(a.out.as_deref(), &with_manifest(&result, &manifest));
        }
        rows.push(EmbedRow {
            graph: path.display().to_string(),
            n: g.n(),
            d: g.d(),
            target: target.into(),
            p: a.p,
            m,
            estimate: est.value,
            metric_ratio_r: r,
            h,
            h_source: h_source_name(source),
            distortion_lower_bound: bound,
        });
    }
    write_csv(a.out.as_deref(), &rows)
}

fn write_csv(path: Option<&Path>, rows: &[EmbedRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    write_output(path, &bytes)
}
