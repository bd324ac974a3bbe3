//! `cggm`: simulate, estimate and benchmark coloured graphical Gaussian
//! models from the command line.
//!
//! Exit codes: 0 on success, 1 on a runtime estimation failure, 2 on a
//! configuration/validation error (including argument parse errors).
//!
//! Vertices are 1-based in every configuration file and preset name visible
//! here; the library underneath is 0-based and the conversion happens once
//! at this boundary.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::Deserialize;

use cggm_core::bench::{
    benchmark_preset, condition_report, nmse, run_experiment, scenario_preset,
    ExperimentOptions, Scenario,
};
use cggm_core::estimator::{
    estimate_distributed, estimate_global_bayes, estimate_global_mle, CombineMode,
    EstimationMethod, GlobalEstimate, Method,
};
use cggm_core::graph::{local_model, ColouredGraph};
use cggm_core::rcon::{build_spec, cone_check, k_of_theta, simulate_data, CONE_TOL};
use cggm_core::rng::child_seed;
use cggm_core::sampler::{CgwParams, SamplerConfig, SamplerMode};

#[derive(Parser)]
#[command(
    name = "cggm",
    version,
    about = "Distributed Bayesian estimation of coloured graphical Gaussian models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw zero-mean Gaussian samples from a model's true precision matrix
    Simulate(SimulateArgs),
    /// Run one estimator on one data set
    Estimate(EstimateArgs),
    /// Run a replicated NMSE benchmark and write CSV reports
    Benchmark(BenchmarkArgs),
    /// Validate a configuration and print condition diagnostics
    Check(CheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in preset (scenario: cycle6-a, cycle20-a/b/c, cycle30-a/b/c,
    /// grid10; benchmark: table2-desk, figure2-desk, grid-desk)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Base random seed (overrides the config file)
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Worker threads (default: all available cores)
    #[arg(long, value_name = "INT")]
    workers: Option<usize>,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Log progress to standard error (repeatable); silent by default
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of observations (overrides the config file)
    #[arg(long, value_name = "INT")]
    n: Option<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Estimator: MBE-1hop, MBE-2hop, GBE, GMLE, DMLE-1hop, DMLE-2hop
    /// (or the base names MBE/DMLE combined with --hops)
    #[arg(long, value_name = "NAME")]
    method: Option<String>,
    /// Neighbourhood radius for distributed methods
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    hops: Option<u8>,
    /// Combination rule: paper or self (self-normalizing)
    #[arg(long, value_name = "MODE")]
    combine: Option<String>,
    /// Include the full precision matrix in estimate.json
    #[arg(long)]
    emit_k: bool,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Combination rule: paper or self (self-normalizing)
    #[arg(long, value_name = "MODE")]
    combine: Option<String>,
    /// Record wall times (runs cells sequentially; off by default so that
    /// reports are byte-identical for a given seed)
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
}

/// Failures split by exit code: configuration problems exit 2, runtime
/// estimation problems exit 1.
enum CliError {
    Config(String),
    Runtime(String),
}

type CliResult<T> = Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = match &cli.cmd {
        Cmd::Simulate(a) => a.common.workers,
        Cmd::Estimate(a) => a.common.workers,
        Cmd::Benchmark(a) => a.common.workers,
        Cmd::Check(a) => a.common.workers,
    };
    if let Some(w) = workers {
        if w == 0 {
            eprintln!("[cggm] configuration error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        // The process-wide pool; estimation never builds its own.
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("[cggm] failed to size the worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.cmd {
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Estimate(args) => cmd_estimate(args),
        Cmd::Benchmark(args) => cmd_benchmark(args),
        Cmd::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("[cggm] configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("[cggm] error: {msg}");
            ExitCode::from(1)
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration file model (all vertices 1-based).

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<ModelConfig>,
    /// Dense p×p true precision matrix.
    true_k: Option<Vec<Vec<f64>>>,
    /// Alternative to `true_k`: class values in specification order.
    true_theta: Option<Vec<f64>>,
    data: Option<DataConfig>,
    sampler: Option<SamplerSection>,
    method: Option<String>,
    hops: Option<u8>,
    combine: Option<String>,
    seed: Option<u64>,
    n: Option<usize>,
    n_list: Option<Vec<usize>>,
    reps: Option<usize>,
    methods: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelConfig {
    p: usize,
    edges: Vec<(usize, usize)>,
    vertex_classes: Vec<Vec<usize>>,
    edge_classes: Vec<Vec<(usize, usize)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DataConfig {
    /// Headerless CSV of observations (rows) by variables (columns).
    file: Option<PathBuf>,
    /// Simulate this many observations instead (requires a true matrix).
    n: Option<usize>,
}

#[derive(Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct SamplerSection {
    delta: Option<f64>,
    iters: Option<usize>,
    burn_in: Option<usize>,
    thin: Option<usize>,
    /// "psi" (default) or "rw".
    mode: Option<String>,
    /// Prior scale matrix as headerless CSV; global Bayesian runs only.
    d_file: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}

/// Converts a 1-based index into 0-based, range-checked.
fn to_zero_based(v: usize, p: usize, what: &str) -> CliResult<usize> {
    if v == 0 || v > p {
        return config_err(format!("{what}: vertex {v} outside 1..={p}"));
    }
    Ok(v - 1)
}

fn graph_from_config(mc: &ModelConfig) -> CliResult<ColouredGraph> {
    let p = mc.p;
    let mut edges = Vec::with_capacity(mc.edges.len());
    for &(a, b) in &mc.edges {
        edges.push((to_zero_based(a, p, "edges")?, to_zero_based(b, p, "edges")?));
    }
    let mut vertex_classes = Vec::with_capacity(mc.vertex_classes.len());
    for class in &mc.vertex_classes {
        let mut members = Vec::with_capacity(class.len());
        for &v in class {
            members.push(to_zero_based(v, p, "vertex_classes")?);
        }
        vertex_classes.push(members);
    }
    let mut edge_classes = Vec::with_capacity(mc.edge_classes.len());
    for class in &mc.edge_classes {
        let mut members = Vec::with_capacity(class.len());
        for &(a, b) in class {
            members.push((
                to_zero_based(a, p, "edge_classes")?,
                to_zero_based(b, p, "edge_classes")?,
            ));
        }
        edge_classes.push(members);
    }
    ColouredGraph::new(p, edges, vertex_classes, edge_classes)
        .map_err(|e| CliError::Config(e.to_string()))
}

/// The resolved model a subcommand operates on.
struct ModelSetup {
    name: String,
    graph: ColouredGraph,
    k_true: Option<DMatrix<f64>>,
}

/// Resolves --preset / config `model` into a graph plus optional true K.
/// A user-supplied true matrix must be a cone member of the model.
fn resolve_model(common: &CommonArgs, cfg: &FileConfig) -> CliResult<ModelSetup> {
    match (&common.preset, &cfg.model) {
        (Some(_), Some(_)) => {
            config_err("both --preset and a config `model` given; pick one")
        }
        (Some(name), None) => {
            let scenario = scenario_preset(name).map_err(|e| {
                if benchmark_preset(name).is_ok() {
                    CliError::Config(format!(
                        "{name} is a benchmark preset; use the benchmark subcommand"
                    ))
                } else {
                    CliError::Config(e.to_string())
                }
            })?;
            Ok(ModelSetup {
                name: scenario.name,
                graph: scenario.graph,
                k_true: Some(scenario.k_true),
            })
        }
        (None, Some(mc)) => {
            let graph = graph_from_config(mc)?;
            let k_true = resolve_true_k(cfg, &graph)?;
            Ok(ModelSetup { name: "config".into(), graph, k_true })
        }
        (None, None) => config_err("no model specified: pass --preset or a config with `model`"),
    }
}

fn resolve_true_k(cfg: &FileConfig, graph: &ColouredGraph) -> CliResult<Option<DMatrix<f64>>> {
    let spec = build_spec(graph);
    let k = match (&cfg.true_k, &cfg.true_theta) {
        (Some(_), Some(_)) => {
            return config_err("give either `true_k` or `true_theta`, not both");
        }
        (Some(rows), None) => {
            let p = graph.p();
            if rows.len() != p || rows.iter().any(|r| r.len() != p) {
                return config_err(format!("`true_k` must be a {p}×{p} matrix"));
            }
            DMatrix::from_fn(p, p, |i, j| rows[i][j])
        }
        (None, Some(theta)) => {
            if theta.len() != spec.n_params() {
                return config_err(format!(
                    "`true_theta` needs {} values (one per colour class), got {}",
                    spec.n_params(),
                    theta.len()
                ));
            }
            let theta = nalgebra::DVector::from_column_slice(theta);
            k_of_theta(&spec, &theta).map_err(|e| CliError::Config(e.to_string()))?
        }
        (None, None) => return Ok(None),
    };
    let report = cone_check(&spec, &k, CONE_TOL).map_err(|e| CliError::Config(e.to_string()))?;
    if !report.in_cone {
        return config_err(format!(
            "the true precision matrix is not a cone member of the model: {:?}",
            report.violations
        ));
    }
    Ok(Some(k))
}

fn resolve_seed(common: &CommonArgs, cfg: &FileConfig) -> u64 {
    common.seed.or(cfg.seed).unwrap_or(0)
}

fn resolve_combine(flag: Option<&str>, cfg: &FileConfig) -> CliResult<CombineMode> {
    let Some(name) = flag.or(cfg.combine.as_deref()) else {
        return Ok(CombineMode::default());
    };
    CombineMode::parse(name)
        .ok_or_else(|| CliError::Config(format!("unknown combine mode: {name} (paper|self)")))
}

struct SamplerSetup {
    delta: f64,
    config: SamplerConfig,
    d_file: Option<PathBuf>,
}

fn resolve_sampler(cfg: &FileConfig) -> CliResult<SamplerSetup> {
    let section = cfg.sampler.clone().unwrap_or_default();
    let mut sampler = SamplerConfig::default();
    if let Some(iters) = section.iters {
        sampler.iters = iters;
    }
    if let Some(burn_in) = section.burn_in {
        sampler.burn_in = burn_in;
    }
    if let Some(thin) = section.thin {
        sampler.thin = thin;
    }
    if let Some(mode) = &section.mode {
        sampler.mode = match mode.as_str() {
            "psi" => SamplerMode::Psi,
            "rw" => SamplerMode::Rw,
            other => return config_err(format!("unknown sampler mode: {other} (psi|rw)")),
        };
    }
    let delta = section.delta.unwrap_or(3.0);
    if delta <= 0.0 {
        return config_err(format!("sampler delta must be positive, got {delta}"));
    }
    Ok(SamplerSetup { delta, config: sampler, d_file: section.d_file.clone() })
}

/// Parses a method name, folding in the --hops flag; full names like
/// "MBE-2hop" carry their own radius and must not contradict the flag.
fn resolve_method(name: &str, hops: Option<u8>) -> CliResult<Method> {
    let base = name.to_ascii_uppercase();
    let method = match base.as_str() {
        "MBE" => match hops.unwrap_or(1) {
            1 => Method::MbeOneHop,
            _ => Method::MbeTwoHop,
        },
        "DMLE" => match hops.unwrap_or(1) {
            1 => Method::DmleOneHop,
            _ => Method::DmleTwoHop,
        },
        _ => Method::parse(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown method: {name} (MBE-1hop, MBE-2hop, GBE, GMLE, DMLE-1hop, DMLE-2hop)"
            ))
        })?,
    };
    if let Some(h) = hops {
        match method.hops() {
            Some(mh) if mh != h => {
                return config_err(format!("--hops {h} contradicts method {}", method.as_str()));
            }
            None => {
                return config_err(format!(
                    "--hops does not apply to the global method {}",
                    method.as_str()
                ));
            }
            _ => {}
        }
    }
    Ok(method)
}

/// Reads a headerless comma-separated float matrix.
fn read_matrix_csv(path: &Path) -> CliResult<DMatrix<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for tok in line.split(',') {
            let v: f64 = tok.trim().parse().map_err(|e| {
                CliError::Config(format!("{} line {}: {e}", path.display(), ln + 1))
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return config_err(format!(
                    "{} line {}: expected {} columns, got {}",
                    path.display(),
                    ln + 1,
                    first.len(),
                    row.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return config_err(format!("{} is empty", path.display()));
    }
    let (n, p) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
}

fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> CliResult<()> {
    let mut text = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn ensure_out_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

// ---------------------------------------------------------------------------
// simulate

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let cfg = load_config(args.common.config.as_deref())?;
    let model = resolve_model(&args.common, &cfg)?;
    let Some(k_true) = model.k_true else {
        return config_err("simulation needs a true precision matrix (preset, `true_k` or `true_theta`)");
    };
    let n = args
        .n
        .or(cfg.n)
        .or(cfg.data.as_ref().and_then(|d| d.n))
        .ok_or_else(|| CliError::Config("simulation needs --n (or `n` in the config)".into()))?;
    if n == 0 {
        return config_err("--n must be at least 1");
    }
    let seed = resolve_seed(&args.common, &cfg);
    let data = simulate_data(&k_true, n, seed).map_err(|e| CliError::Runtime(e.to_string()))?;
    ensure_out_dir(&args.common.out)?;
    let path = args.common.out.join("data.csv");
    write_matrix_csv(&path, &data)?;
    if args.common.verbose >= 1 {
        eprintln!(
            "[cggm] simulated {n} observations of {} ({} variables, seed {seed}) -> {}",
            model.name,
            k_true.nrows(),
            path.display()
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// estimate

#[derive(serde::Serialize)]
struct EstimateOutput {
    model: String,
    method: String,
    hops: Option<u8>,
    combine: Option<&'static str>,
    p: usize,
    n: usize,
    seed: u64,
    theta: Vec<f64>,
    contribution_counts: Vec<usize>,
    acceptance_mean: Option<f64>,
    pd: bool,
    flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<Vec<Vec<f64>>>,
}

fn cmd_estimate(args: EstimateArgs) -> CliResult<()> {
    let cfg = load_config(args.common.config.as_deref())?;
    let model = resolve_model(&args.common, &cfg)?;
    let method_name = args
        .method
        .as_deref()
        .or(cfg.method.as_deref())
        .ok_or_else(|| CliError::Config("no method specified: pass --method".into()))?;
    let method = resolve_method(method_name, args.hops.or(cfg.hops))?;
    let combine = resolve_combine(args.combine.as_deref(), &cfg)?;
    let sampler = resolve_sampler(&cfg)?;
    let seed = resolve_seed(&args.common, &cfg);

    if sampler.d_file.is_some() && method != Method::Gbe {
        return config_err(format!(
            "`sampler.d_file` only applies to GBE; {} uses identity prior scales",
            method.as_str()
        ));
    }

    // Data: an explicit file wins; otherwise simulate `data.n` observations
    // from the true matrix with a child seed of the run seed.
    let data_cfg = cfg.data.as_ref();
    let data = match (data_cfg.and_then(|d| d.file.as_ref()), data_cfg.and_then(|d| d.n)) {
        (Some(_), Some(_)) => {
            return config_err("`data` needs either `file` or `n`, not both");
        }
        (Some(path), None) => {
            let data = read_matrix_csv(path)?;
            if data.ncols() != model.graph.p() {
                return config_err(format!(
                    "data has {} columns but the model has {} vertices",
                    data.ncols(),
                    model.graph.p()
                ));
            }
            data
        }
        (None, Some(n)) => {
            let Some(k_true) = &model.k_true else {
                return config_err(
                    "`data.n` asks for simulated data, which needs a true precision matrix",
                );
            };
            simulate_data(k_true, n, child_seed(seed, 0))
                .map_err(|e| CliError::Runtime(e.to_string()))?
        }
        (None, None) => {
            return config_err("no data: point `data.file` at a CSV or set `data.n`");
        }
    };

    if args.common.verbose >= 1 {
        eprintln!(
            "[cggm] estimating {} on {} (p = {}, n = {}, seed {seed})",
            method.as_str(),
            model.name,
            model.graph.p(),
            data.nrows()
        );
    }
    let est = run_estimator(&model.graph, &data, method, combine, &sampler, seed)?;
    if args.common.verbose >= 1 {
        for local in &est.locals {
            let d = &local.diagnostics;
            let fit = match d.mle_converged {
                Some(c) => format!("mle converged {c}"),
                None => {
                    let acc = d.acceptance.iter().sum::<f64>()
                        / d.acceptance.len().max(1) as f64;
                    format!("acceptance {acc:.3}")
                }
            };
            eprintln!(
                "[cggm]   vertex {:>3}: p_i {:>3}, classes {:>3}, {fit}, {:.3}s",
                local.model.centre + 1,
                local.model.p_i(),
                local.model.s_i(),
                d.elapsed_s
            );
        }
    }

    let nmse_value = match &model.k_true {
        Some(k_true) => Some(
            nmse(&est.k_mat, k_true).map_err(|e| CliError::Runtime(e.to_string()))?,
        ),
        None => None,
    };
    // Global chains record acceptance directly; distributed Bayesian runs
    // carry it per local chain.
    let rates: Vec<f64> = if est.acceptance.is_empty() {
        est.locals.iter().flat_map(|l| l.diagnostics.acceptance.iter().copied()).collect()
    } else {
        est.acceptance.clone()
    };
    let acceptance_mean =
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64);
    let output = EstimateOutput {
        model: model.name.clone(),
        method: method.as_str().into(),
        hops: method.hops(),
        combine: est.combine_mode.map(|m| m.as_str()),
        p: model.graph.p(),
        n: data.nrows(),
        seed,
        theta: est.theta.iter().copied().collect(),
        contribution_counts: est.contribution_counts.clone(),
        acceptance_mean,
        pd: est.pd,
        flags: est.flags.clone(),
        nmse: nmse_value,
        k: args.emit_k.then(|| {
            (0..est.k_mat.nrows())
                .map(|i| (0..est.k_mat.ncols()).map(|j| est.k_mat[(i, j)]).collect())
                .collect()
        }),
    };
    ensure_out_dir(&args.common.out)?;
    let path = args.common.out.join("estimate.json");
    let json = serde_json::to_string_pretty(&output)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::write(&path, json + "\n")
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    if args.common.verbose >= 1 {
        match nmse_value {
            Some(v) => {
                eprintln!("[cggm] done: NMSE {v:.6}, pd = {} -> {}", est.pd, path.display())
            }
            None => eprintln!("[cggm] done: pd = {} -> {}", est.pd, path.display()),
        }
    }
    Ok(())
}

fn run_estimator(
    graph: &ColouredGraph,
    data: &DMatrix<f64>,
    method: Method,
    combine: CombineMode,
    sampler: &SamplerSetup,
    seed: u64,
) -> CliResult<GlobalEstimate> {
    let run = || -> cggm_core::Result<GlobalEstimate> {
        match method {
            Method::MbeOneHop | Method::MbeTwoHop => {
                let em = EstimationMethod::Bayes {
                    delta: sampler.delta,
                    sampler: sampler.config.clone(),
                };
                estimate_distributed(graph, data, method.hops().unwrap(), &em, combine, seed)
            }
            Method::DmleOneHop | Method::DmleTwoHop => {
                let em = EstimationMethod::default_mle();
                estimate_distributed(graph, data, method.hops().unwrap(), &em, combine, seed)
            }
            Method::Gbe => {
                let d_mat = match &sampler.d_file {
                    Some(path) => read_prior_scale(path, graph.p())?,
                    None => DMatrix::identity(graph.p(), graph.p()),
                };
                let prior = CgwParams::new(sampler.delta, d_mat)?;
                estimate_global_bayes(graph, data, &prior, &sampler.config, seed)
            }
            Method::Gmle => estimate_global_mle(
                graph,
                data,
                cggm_core::mle::MLE_TOL,
                cggm_core::mle::MLE_MAX_ITER,
            ),
        }
    };
    run().map_err(|e| CliError::Runtime(e.to_string()))
}

fn read_prior_scale(path: &Path, p: usize) -> cggm_core::Result<DMatrix<f64>> {
    // Reuses the CSV reader; errors degrade to strings inside the core error.
    let m = read_matrix_csv(path).map_err(|e| {
        cggm_core::Error::InvalidConfig(match e {
            CliError::Config(s) | CliError::Runtime(s) => s,
        })
    })?;
    if m.nrows() != p || m.ncols() != p {
        return Err(cggm_core::Error::InvalidConfig(format!(
            "prior scale matrix must be {p}×{p}, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// benchmark

fn cmd_benchmark(args: BenchmarkArgs) -> CliResult<()> {
    let cfg = load_config(args.common.config.as_deref())?;
    let combine = resolve_combine(args.combine.as_deref(), &cfg)?;
    let sampler = resolve_sampler(&cfg)?;
    if sampler.d_file.is_some() {
        return config_err("`sampler.d_file` does not apply to benchmarks");
    }
    let seed = resolve_seed(&args.common, &cfg);

    // A benchmark preset brings scenarios, sizes, replicates and methods in
    // one piece; otherwise everything comes from the config file.
    let (scenarios, n_list, reps, methods) = match &args.common.preset {
        Some(name) => {
            if cfg.model.is_some() {
                return config_err("both --preset and a config `model` given; pick one");
            }
            // A benchmark preset carries everything; a plain scenario preset
            // needs `n_list`, `reps` and `methods` from the config.
            let preset = match benchmark_preset(name) {
                Ok(p) => p,
                Err(e) => match scenario_preset(name) {
                    Ok(scenario) => cggm_core::bench::BenchmarkPreset {
                        name: "scenario",
                        scenarios: vec![scenario],
                        n_list: cfg.n_list.clone().ok_or_else(|| {
                            CliError::Config(format!(
                                "benchmarking the scenario preset {name} needs `n_list` in the config"
                            ))
                        })?,
                        reps: cfg.reps.ok_or_else(|| {
                            CliError::Config(format!(
                                "benchmarking the scenario preset {name} needs `reps` in the config"
                            ))
                        })?,
                        methods: parse_method_list(&cfg.methods.clone().ok_or_else(|| {
                            CliError::Config(format!(
                                "benchmarking the scenario preset {name} needs `methods` in the config"
                            ))
                        })?)?,
                    },
                    Err(_) => return Err(CliError::Config(e.to_string())),
                },
            };
            let mut n_list = preset.n_list;
            if let Some(from_cfg) = &cfg.n_list {
                n_list = from_cfg.clone();
            }
            let reps = cfg.reps.unwrap_or(preset.reps);
            let methods = match &cfg.methods {
                Some(names) => parse_method_list(names)?,
                None => preset.methods,
            };
            (preset.scenarios, n_list, reps, methods)
        }
        None => {
            let model = resolve_model(&args.common, &cfg)?;
            let Some(k_true) = model.k_true else {
                return config_err("benchmarks need a true precision matrix");
            };
            let scenario = Scenario {
                name: model.name,
                graph: model.graph,
                k_true,
                notes: String::new(),
            };
            let n_list = cfg
                .n_list
                .clone()
                .ok_or_else(|| CliError::Config("benchmarks need `n_list`".into()))?;
            let reps = cfg
                .reps
                .ok_or_else(|| CliError::Config("benchmarks need `reps`".into()))?;
            let names = cfg
                .methods
                .clone()
                .ok_or_else(|| CliError::Config("benchmarks need `methods`".into()))?;
            (vec![scenario], n_list, reps, parse_method_list(&names)?)
        }
    };
    if n_list.is_empty() || reps == 0 || methods.is_empty() {
        return config_err("benchmarks need non-empty `n_list`, `methods` and `reps` ≥ 1");
    }

    let opts = ExperimentOptions {
        combine_mode: combine,
        record_timing: args.timing,
        sampler: sampler.config.clone(),
        delta: sampler.delta,
        ..Default::default()
    };

    let multi = scenarios.len() > 1;
    let mut aggregate_lines = vec!["scenario,method,hops,n,nmse_mean,nmse_std,time_mean_s".to_string()];
    for (idx, scenario) in scenarios.iter().enumerate() {
        let cells = n_list.len() * reps * methods.len();
        eprintln!(
            "[cggm] benchmark {}: {cells} cells (n = {n_list:?}, reps = {reps}, timing {})",
            scenario.name,
            if args.timing { "on" } else { "off" }
        );
        let dir = if multi {
            args.common.out.join(&scenario.name)
        } else {
            args.common.out.clone()
        };
        ensure_out_dir(&dir)?;
        let report = run_experiment(
            scenario,
            &n_list,
            reps,
            &methods,
            child_seed(seed, idx as u64),
            &opts,
            Some(&dir),
        )
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        for failure in &report.failures {
            eprintln!(
                "[cggm]   failed cell: {} n={} rep={}: {}",
                failure.method, failure.n, failure.replicate, failure.message
            );
        }
        eprintln!(
            "[cggm]   {} rows, {} failures -> {}",
            report.rows.len(),
            report.failures.len(),
            dir.display()
        );
        for line in report.aggregate_csv().lines().skip(1) {
            aggregate_lines.push(line.to_string());
        }
    }
    // The combined aggregate table is the stdout artifact.
    for line in &aggregate_lines {
        println!("{line}");
    }
    Ok(())
}

fn parse_method_list(names: &[String]) -> CliResult<Vec<Method>> {
    names.iter().map(|n| resolve_method(n, None)).collect()
}

// ---------------------------------------------------------------------------
// check

fn cmd_check(args: CheckArgs) -> CliResult<()> {
    let cfg = load_config(args.common.config.as_deref())?;
    let model = resolve_model(&args.common, &cfg)?;
    let spec = build_spec(&model.graph);
    println!("model: {}", model.name);
    println!("p: {}", model.graph.p());
    println!("edges: {}", model.graph.edges().len());
    println!(
        "classes: {} ({} vertex + {} edge)",
        spec.n_params(),
        model.graph.n_vertex_classes(),
        model.graph.n_edge_classes()
    );

    match &model.k_true {
        Some(k_true) => {
            let scenario = Scenario {
                name: model.name.clone(),
                graph: model.graph.clone(),
                k_true: k_true.clone(),
                notes: String::new(),
            };
            let report =
                condition_report(&scenario).map_err(|e| CliError::Runtime(e.to_string()))?;
            println!("lambda_min: {}", report.lambda_min);
            println!("lambda_max: {}", report.lambda_max);
            println!("max_global_class_size: {}", report.max_global_class_size);
            println!("max_local_class_size: {}", report.max_local_class_size);
            for (hops, sizes) in &report.local_sizes {
                print_local_sizes(*hops, sizes);
            }
        }
        None => {
            println!("lambda_min: (no true matrix given)");
            for hops in [1u8, 2] {
                let mut sizes = Vec::with_capacity(model.graph.p());
                for i in 0..model.graph.p() {
                    let lm = local_model(&model.graph, i, hops)
                        .map_err(|e| CliError::Runtime(e.to_string()))?;
                    sizes.push((lm.p_i(), lm.s_i()));
                }
                print_local_sizes(hops, &sizes);
            }
        }
    }
    Ok(())
}

fn print_local_sizes(hops: u8, sizes: &[(usize, usize)]) {
    let max_p = sizes.iter().map(|&(p, _)| p).max().unwrap_or(0);
    let max_s = sizes.iter().map(|&(_, s)| s).max().unwrap_or(0);
    println!("hops {hops}: max p_i = {max_p}, max S_i = {max_s}");
    if sizes.len() <= 30 {
        for (i, &(p_i, s_i)) in sizes.iter().enumerate() {
            println!("  vertex {}: p_i = {p_i}, S_i = {s_i}", i + 1);
        }
    }
}
