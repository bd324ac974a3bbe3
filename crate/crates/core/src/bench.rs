//! Benchmark harness: simulation scenarios, the NMSE metric, the experiment
//! runner, asymptotic-normality verification, and condition diagnostics.
//!
//! # Timing model
//!
//! Distributed methods are *designed* to run one local chain per node, so
//! their recorded `wall_time_s` is the critical path: the slowest local fit
//! plus the combination step. Global methods record their plain elapsed
//! time. The total single-process CPU time of distributed methods is kept in
//! the `flags` column (`cpu_s=…`) so nothing is hidden. Timing capture is
//! opt-in (`record_timing`): when off, all wall times are written as 0 and
//! reports are byte-identical across reruns and worker counts; when on,
//! cells run sequentially so measurements do not contend for cores.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{
    estimate_distributed, estimate_global_bayes, estimate_global_mle, CombineMode,
    EstimationMethod, GlobalEstimate, Method,
};
use crate::graph::{local_model, ColouredGraph};
use crate::linalg;
use crate::rcon::{build_spec, cone_check, simulate_data, theta_of_k, CONE_TOL};
use crate::rng::{child_seed, child_seed2};
use crate::sampler::{CgwParams, SamplerConfig};

/// A named simulation setting: coloured graph plus true precision matrix.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub graph: ColouredGraph,
    pub k_true: DMatrix<f64>,
    pub notes: String,
}

/// Colouring pattern of the cycle scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CyclePattern {
    /// Two vertex classes (odd/even), two edge classes.
    A,
    /// Two vertex classes, every edge its own class.
    B,
    /// Every vertex its own class, two edge classes.
    C,
}

impl CyclePattern {
    pub fn as_str(self) -> &'static str {
        match self {
            CyclePattern::A => "a",
            CyclePattern::B => "b",
            CyclePattern::C => "c",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" => Some(CyclePattern::A),
            "b" => Some(CyclePattern::B),
            "c" => Some(CyclePattern::C),
            _ => None,
        }
    }
}

/// Cycle scenario on p vertices (p even, ≥ 4) with the benchmark parameter
/// values; vertex i below is 1-based as in the value table.
///
/// Values: diagonal 0.1 / 0.03 at odd/even i for patterns (a) and (c-base),
/// 0.1 / 0.3 for (b); consecutive edges (i, i+1) carry 0.01 (odd i) and
/// 0.02 (even i) for (a)/(c), index-dependent 0.01+0.001i / 0.01+0.002i for
/// (b); the closing edge (1, p) carries 0.02 for (a)/(c) and 0.01 for (b).
/// Index-dependent diagonals for (c): 0.1+0.1i (odd), 0.03+0.01i (even).
pub fn scenario_cycle(p: usize, pattern: CyclePattern) -> Result<Scenario> {
    if p < 4 || p % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "cycle scenarios need even p ≥ 4, got {p}"
        )));
    }
    // 0-based edges: consecutive (i−1, i) for 1-based i = 1..p−1, then the
    // closing edge (1, p) = (0, p−1).
    let mut edges = Vec::with_capacity(p);
    let mut odd_edges = Vec::new();
    let mut even_edges = Vec::new();
    for i in 1..p {
        let e = (i - 1, i);
        edges.push(e);
        if i % 2 == 1 {
            odd_edges.push(e);
        } else {
            even_edges.push(e);
        }
    }
    let closing = (0, p - 1);
    edges.push(closing);
    even_edges.push(closing);

    let odd_vertices: Vec<usize> = (0..p).step_by(2).collect(); // 1-based odd
    let even_vertices: Vec<usize> = (1..p).step_by(2).collect();

    let vertex_classes = match pattern {
        CyclePattern::A | CyclePattern::B => vec![odd_vertices, even_vertices],
        CyclePattern::C => (0..p).map(|v| vec![v]).collect(),
    };
    let edge_classes = match pattern {
        CyclePattern::A | CyclePattern::C => vec![odd_edges, even_edges],
        CyclePattern::B => edges.iter().map(|&e| vec![e]).collect(),
    };
    let graph = ColouredGraph::new(p, edges.clone(), vertex_classes, edge_classes)?;

    let mut k = DMatrix::zeros(p, p);
    for v0 in 0..p {
        let i = v0 + 1;
        k[(v0, v0)] = match (pattern, i % 2 == 1) {
            (CyclePattern::A, true) => 0.1,
            (CyclePattern::A, false) => 0.03,
            (CyclePattern::B, true) => 0.1,
            (CyclePattern::B, false) => 0.3,
            (CyclePattern::C, true) => 0.1 + 0.1 * i as f64,
            (CyclePattern::C, false) => 0.03 + 0.01 * i as f64,
        };
    }
    for i in 1..p {
        let value = match (pattern, i % 2 == 1) {
            (CyclePattern::A | CyclePattern::C, true) => 0.01,
            (CyclePattern::A | CyclePattern::C, false) => 0.02,
            (CyclePattern::B, true) => 0.01 + 0.001 * i as f64,
            (CyclePattern::B, false) => 0.01 + 0.002 * i as f64,
        };
        k[(i - 1, i)] = value;
        k[(i, i - 1)] = value;
    }
    let closing_value = match pattern {
        CyclePattern::A | CyclePattern::C => 0.02,
        CyclePattern::B => 0.01,
    };
    k[(0, p - 1)] = closing_value;
    k[(p - 1, 0)] = closing_value;

    let scenario = Scenario {
        name: format!("cycle{p}-{}", pattern.as_str()),
        graph,
        k_true: k,
        notes: format!("{p}-cycle, colouring pattern ({})", pattern.as_str()),
    };
    check_scenario(&scenario)?;
    Ok(scenario)
}

/// Grid scenario: vertices v = i + rows·(j−1) (1-based, i = 1..rows,
/// j = 1..cols). Within-column edges (v, v+1) all share one colour class
/// with value 1; across-column edges (v, v+rows) are singleton classes with
/// value 1+0.01i+0.1j; diagonals are singleton classes with value 10+0.01v.
pub fn scenario_grid(rows: usize, cols: usize) -> Result<Scenario> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid scenarios need rows, cols ≥ 2, got {rows}×{cols}"
        )));
    }
    let p = rows * cols;
    let at = |i: usize, j: usize| (i - 1) + rows * (j - 1); // 0-based vertex

    let mut edges = Vec::new();
    let mut horizontal = Vec::new();
    let mut verticals = Vec::new();
    for j in 1..=cols {
        for i in 1..rows {
            let e = (at(i, j), at(i + 1, j));
            edges.push(e);
            horizontal.push(e);
        }
    }
    for j in 1..cols {
        for i in 1..=rows {
            let e = (at(i, j), at(i, j + 1));
            edges.push(e);
            verticals.push((e, 1.0 + 0.01 * i as f64 + 0.1 * j as f64));
        }
    }
    let vertex_classes: Vec<Vec<usize>> = (0..p).map(|v| vec![v]).collect();
    let mut edge_classes = vec![horizontal.clone()];
    edge_classes.extend(verticals.iter().map(|&(e, _)| vec![e]));
    let graph = ColouredGraph::new(p, edges, vertex_classes, edge_classes)?;

    let mut k = DMatrix::zeros(p, p);
    for v0 in 0..p {
        k[(v0, v0)] = 10.0 + 0.01 * (v0 + 1) as f64;
    }
    for &(a, b) in &horizontal {
        k[(a, b)] = 1.0;
        k[(b, a)] = 1.0;
    }
    for &((a, b), value) in &verticals {
        k[(a, b)] = value;
        k[(b, a)] = value;
    }

    let scenario = Scenario {
        name: format!("grid{rows}x{cols}"),
        graph,
        k_true: k,
        notes: format!("{rows}×{cols} grid, shared horizontal edge class"),
    };
    check_scenario(&scenario)?;
    Ok(scenario)
}

/// Generation-time guarantee: every shipped k_true lies in the cone.
fn check_scenario(s: &Scenario) -> Result<()> {
    let spec = build_spec(&s.graph);
    let report = cone_check(&spec, &s.k_true, CONE_TOL)?;
    if !report.in_cone {
        return Err(Error::OutsideCone {
            context: format!("scenario {}: {:?}", s.name, report.violations),
        });
    }
    Ok(())
}

/// Normalized mean square error ‖K̂ − K‖²_F / ‖K‖²_F.
pub fn nmse(k_hat: &DMatrix<f64>, k_true: &DMatrix<f64>) -> Result<f64> {
    if k_hat.shape() != k_true.shape() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", k_true.shape()),
            got: format!("{:?}", k_hat.shape()),
        });
    }
    let denom = k_true.norm_squared();
    if denom == 0.0 {
        return Err(Error::InvalidConfig("k_true is identically zero".into()));
    }
    Ok((k_hat - k_true).norm_squared() / denom)
}

/// One successful method run.
#[derive(Debug, Clone)]
pub struct RunRow {
    pub scenario: String,
    pub method: Method,
    /// 0 for global methods.
    pub hops: u8,
    pub n: usize,
    pub replicate: usize,
    /// Data seed of this replicate.
    pub seed: u64,
    pub nmse: f64,
    pub wall_time_s: f64,
    pub flags: String,
}

/// One recorded failure (kept out of the row table).
#[derive(Debug, Clone)]
pub struct FailureRow {
    pub scenario: String,
    pub method: Method,
    pub n: usize,
    pub replicate: usize,
    pub message: String,
}

/// Aggregate of one (method, n) cell.
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub scenario: String,
    pub method: Method,
    pub hops: u8,
    pub n: usize,
    pub nmse_mean: f64,
    /// Sample standard deviation (n−1 divisor; 0 for a single row).
    pub nmse_std: f64,
    pub time_mean_s: f64,
    pub count: usize,
}

/// Full outcome of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub scenario: String,
    pub rows: Vec<RunRow>,
    pub failures: Vec<FailureRow>,
    pub aggregates: Vec<AggregateRow>,
}

/// Knobs shared by every cell of an experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub combine_mode: CombineMode,
    /// Capture wall times (sequential cells) or write zeros (parallel map,
    /// byte-identical artifacts).
    pub record_timing: bool,
    pub sampler: SamplerConfig,
    pub delta: f64,
    pub mle_tol: f64,
    pub mle_max_iter: usize,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            combine_mode: CombineMode::default(),
            record_timing: false,
            sampler: SamplerConfig::default(),
            delta: 3.0,
            mle_tol: crate::mle::MLE_TOL,
            mle_max_iter: crate::mle::MLE_MAX_ITER,
        }
    }
}

fn run_method(
    scenario: &Scenario,
    method: Method,
    data: &DMatrix<f64>,
    opts: &ExperimentOptions,
    chain_seed: u64,
) -> Result<(GlobalEstimate, f64, f64)> {
    let start = Instant::now();
    let est = match method {
        Method::MbeOneHop | Method::MbeTwoHop => {
            let em = EstimationMethod::Bayes { delta: opts.delta, sampler: opts.sampler.clone() };
            estimate_distributed(
                &scenario.graph,
                data,
                method.hops().unwrap(),
                &em,
                opts.combine_mode,
                chain_seed,
            )?
        }
        Method::DmleOneHop | Method::DmleTwoHop => {
            let em = EstimationMethod::Mle { tol: opts.mle_tol, max_iter: opts.mle_max_iter };
            estimate_distributed(
                &scenario.graph,
                data,
                method.hops().unwrap(),
                &em,
                opts.combine_mode,
                chain_seed,
            )?
        }
        Method::Gbe => {
            let prior = CgwParams::new(
                opts.delta,
                DMatrix::identity(scenario.graph.p(), scenario.graph.p()),
            )?;
            estimate_global_bayes(&scenario.graph, data, &prior, &opts.sampler, chain_seed)?
        }
        Method::Gmle => {
            estimate_global_mle(&scenario.graph, data, opts.mle_tol, opts.mle_max_iter)?
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    // Critical-path wall time for distributed methods (see module docs);
    // plain elapsed for global ones. cpu = total sequential cost.
    let (wall, cpu) = if method.is_distributed() {
        (est.critical_path_s(), est.total_local_s())
    } else {
        (elapsed, elapsed)
    };
    Ok((est, wall, cpu))
}

fn flags_of(est: &GlobalEstimate, cpu_s: Option<f64>) -> String {
    let mut items: Vec<String> = est.flags.clone();
    if let Some(cpu) = cpu_s {
        items.push(format!("cpu_s={cpu:.6}"));
    }
    items.join(";")
}

/// Runs the full (n × replicate × method) table on one scenario.
///
/// Each (n, replicate) simulates one data set seeded by
/// `child_seed2(seed, n, replicate)` and runs every method on it; chain
/// seeds derive from the data seed and the method index, so the whole
/// report is a pure function of (scenario, seed). Per-cell failures are
/// recorded, not fatal. When `out_dir` is given, the three CSV reports are
/// written there.
pub fn run_experiment(
    scenario: &Scenario,
    n_list: &[usize],
    reps: usize,
    methods: &[Method],
    seed: u64,
    opts: &ExperimentOptions,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    if n_list.is_empty() || reps == 0 || methods.is_empty() {
        return Err(Error::InvalidConfig(
            "run_experiment needs non-empty n_list, reps ≥ 1 and methods".into(),
        ));
    }

    let cells: Vec<(usize, usize)> = n_list
        .iter()
        .flat_map(|&n| (0..reps).map(move |rep| (n, rep)))
        .collect();

    let run_cell = |&(n, rep): &(usize, usize)| -> Vec<std::result::Result<RunRow, FailureRow>> {
        let data_seed = child_seed2(seed, n as u64, rep as u64);
        let data = match simulate_data(&scenario.k_true, n, data_seed) {
            Ok(d) => d,
            Err(e) => {
                return methods
                    .iter()
                    .map(|&m| {
                        Err(FailureRow {
                            scenario: scenario.name.clone(),
                            method: m,
                            n,
                            replicate: rep,
                            message: format!("simulation: {e}"),
                        })
                    })
                    .collect();
            }
        };
        methods
            .iter()
            .enumerate()
            .map(|(mi, &method)| {
                let chain_seed = child_seed(data_seed, mi as u64);
                match run_method(scenario, method, &data, opts, chain_seed) {
                    Ok((est, wall, cpu)) => {
                        let nm = nmse(&est.k_mat, &scenario.k_true).expect("shapes match");
                        let (wall_time_s, cpu_flag) = if opts.record_timing {
                            (wall, method.is_distributed().then_some(cpu))
                        } else {
                            (0.0, None)
                        };
                        Ok(RunRow {
                            scenario: scenario.name.clone(),
                            method,
                            hops: method.hops().unwrap_or(0),
                            n,
                            replicate: rep,
                            seed: data_seed,
                            nmse: nm,
                            wall_time_s,
                            flags: flags_of(&est, cpu_flag),
                        })
                    }
                    Err(e) => Err(FailureRow {
                        scenario: scenario.name.clone(),
                        method,
                        n,
                        replicate: rep,
                        message: e.to_string(),
                    }),
                }
            })
            .collect()
    };

    // Timed runs go strictly sequentially so cells never contend; untimed
    // runs are a parallel map (order restored by indexed collect).
    let outcomes: Vec<Vec<std::result::Result<RunRow, FailureRow>>> = if opts.record_timing {
        cells.iter().map(run_cell).collect()
    } else {
        cells.par_iter().map(run_cell).collect()
    };

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes.into_iter().flatten() {
        match outcome {
            Ok(r) => rows.push(r),
            Err(f) => failures.push(f),
        }
    }
    let aggregates = aggregate_rows(&rows, methods, n_list);
    let report = ExperimentReport { scenario: scenario.name.clone(), rows, failures, aggregates };
    if let Some(dir) = out_dir {
        report.write_csv(dir)?;
    }
    Ok(report)
}

/// Pure recomputation of the aggregate table from raw rows (cells ordered
/// methods-as-given × n ascending as given).
pub fn aggregate_rows(rows: &[RunRow], methods: &[Method], n_list: &[usize]) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for &method in methods {
        for &n in n_list {
            let cell: Vec<&RunRow> =
                rows.iter().filter(|r| r.method == method && r.n == n).collect();
            if cell.is_empty() {
                continue;
            }
            let count = cell.len();
            let mean = cell.iter().map(|r| r.nmse).sum::<f64>() / count as f64;
            let var = if count > 1 {
                cell.iter().map(|r| (r.nmse - mean).powi(2)).sum::<f64>() / (count as f64 - 1.0)
            } else {
                0.0
            };
            let time_mean = cell.iter().map(|r| r.wall_time_s).sum::<f64>() / count as f64;
            out.push(AggregateRow {
                scenario: cell[0].scenario.clone(),
                method,
                hops: method.hops().unwrap_or(0),
                n,
                nmse_mean: mean,
                nmse_std: var.sqrt(),
                time_mean_s: time_mean,
                count,
            });
        }
    }
    out
}

impl ExperimentReport {
    /// Raw CSV body with the exact contract columns.
    pub fn raw_csv(&self) -> String {
        let mut s = String::from("scenario,method,hops,n,replicate,seed,nmse,wall_time_s,flags\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.scenario,
                r.method,
                r.hops,
                r.n,
                r.replicate,
                r.seed,
                r.nmse,
                r.wall_time_s,
                r.flags
            )
            .unwrap();
        }
        s
    }

    /// Aggregate CSV body.
    pub fn aggregate_csv(&self) -> String {
        let mut s = String::from("scenario,method,hops,n,nmse_mean,nmse_std,time_mean_s\n");
        for a in &self.aggregates {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                a.scenario, a.method, a.hops, a.n, a.nmse_mean, a.nmse_std, a.time_mean_s
            )
            .unwrap();
        }
        s
    }

    /// Plot-data CSV (n vs mean NMSE per method) for Figure-2-style curves.
    pub fn plot_csv(&self) -> String {
        let mut s = String::from("method,n,nmse_mean\n");
        for a in &self.aggregates {
            writeln!(s, "{},{},{}", a.method, a.n, a.nmse_mean).unwrap();
        }
        s
    }

    /// Writes report_raw.csv, report_aggregate.csv and report_plot.csv.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report_raw.csv"), self.raw_csv())?;
        std::fs::write(dir.join("report_aggregate.csv"), self.aggregate_csv())?;
        std::fs::write(dir.join("report_plot.csv"), self.plot_csv())?;
        Ok(())
    }

    /// The aggregate row of one (method, n) cell, if present.
    pub fn aggregate_for(&self, method: Method, n: usize) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|a| a.method == method && a.n == n)
    }
}

/// Monte Carlo verification of the Theorem-1 covariance.
#[derive(Debug, Clone)]
pub struct NormalityReport {
    /// Theoretical covariance A.
    pub a: DMatrix<f64>,
    /// Empirical covariance of √n(θ̃ − θ0) over replicates.
    pub empirical: DMatrix<f64>,
    /// ‖empirical − A‖_F / ‖A‖_F.
    pub rel_frobenius: f64,
    /// Mean of √n(θ̃ − θ0) per coordinate.
    pub bias: DVector<f64>,
    /// 3σ CLT band √(diag(A)/reps) per coordinate.
    pub bias_band: DVector<f64>,
    pub reps: usize,
}

impl NormalityReport {
    /// True iff every coordinate's bias sits inside 3× its CLT band.
    pub fn bias_within_band(&self) -> bool {
        self.bias.iter().zip(self.bias_band.iter()).all(|(b, s)| b.abs() <= 3.0 * s)
    }
}

/// Simulates `reps` data sets, runs the distributed Bayesian estimator on
/// each, and compares the scaled estimation errors with the asymptotic
/// covariance.
pub fn normality_check(
    scenario: &Scenario,
    n: usize,
    reps: usize,
    hops: u8,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<NormalityReport> {
    if reps < 2 {
        return Err(Error::InsufficientReplicates { got: reps });
    }
    let spec = build_spec(&scenario.graph);
    let theta0 = theta_of_k(&spec, &scenario.k_true, CONE_TOL)?.theta;
    let cov = crate::asymptotic::asymptotic_cov(
        &scenario.graph,
        &theta0,
        hops,
        opts.combine_mode,
    )?;

    let errors: Vec<Result<DVector<f64>>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let data_seed = child_seed2(seed, rep as u64, 0);
            let data = simulate_data(&scenario.k_true, n, data_seed)?;
            let em = EstimationMethod::Bayes { delta: opts.delta, sampler: opts.sampler.clone() };
            let est = estimate_distributed(
                &scenario.graph,
                &data,
                hops,
                &em,
                opts.combine_mode,
                child_seed(data_seed, 1),
            )?;
            Ok((est.theta - &theta0) * (n as f64).sqrt())
        })
        .collect();
    let mut zs = Vec::with_capacity(reps);
    for e in errors {
        zs.push(e?);
    }

    let m = theta0.len();
    let mean = zs.iter().fold(DVector::zeros(m), |acc, z| acc + z) / reps as f64;
    let mut empirical = DMatrix::zeros(m, m);
    for z in &zs {
        let c = z - &mean;
        empirical += &c * c.transpose();
    }
    empirical /= reps as f64 - 1.0;

    let rel = (&empirical - &cov.a).norm() / cov.a.norm();
    let band = DVector::from_fn(m, |r, _| (cov.a[(r, r)] / reps as f64).sqrt());
    Ok(NormalityReport {
        a: cov.a,
        empirical,
        rel_frobenius: rel,
        bias: mean,
        bias_band: band,
        reps,
    })
}

/// Diagnostics oriented at the regularity conditions: spectrum of K_true
/// and the size of classes / local models.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub max_global_class_size: usize,
    /// Per hops (1 and 2): (p_i, S_i) for every vertex.
    pub local_sizes: Vec<(u8, Vec<(usize, usize)>)>,
    pub max_local_class_size: usize,
}

pub fn condition_report(scenario: &Scenario) -> Result<ConditionReport> {
    let (lambda_min, lambda_max) = linalg::extreme_eigenvalues(&scenario.k_true);
    let spec = build_spec(&scenario.graph);
    let max_global_class_size =
        spec.classes().iter().map(|c| c.positions.len()).max().unwrap_or(0);

    let mut local_sizes = Vec::new();
    let mut max_local_class_size = 0;
    for hops in [1u8, 2] {
        let mut sizes = Vec::with_capacity(scenario.graph.p());
        for i in 0..scenario.graph.p() {
            let lm = local_model(&scenario.graph, i, hops)?;
            let lspec = build_spec(&lm.local_graph);
            max_local_class_size = max_local_class_size
                .max(lspec.classes().iter().map(|c| c.positions.len()).max().unwrap_or(0));
            sizes.push((lm.vertices.len(), lspec.n_params()));
        }
        local_sizes.push((hops, sizes));
    }
    Ok(ConditionReport {
        lambda_min,
        lambda_max,
        max_global_class_size,
        local_sizes,
        max_local_class_size,
    })
}

/// A named benchmark configuration (scenarios × n × reps × methods).
#[derive(Debug, Clone)]
pub struct BenchmarkPreset {
    pub name: &'static str,
    pub scenarios: Vec<Scenario>,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub methods: Vec<Method>,
}

/// Builds a named scenario: `cycle{p}-{a|b|c}` (even p ≥ 4) or
/// `grid{rows}x{cols}`.
pub fn scenario_preset(name: &str) -> Result<Scenario> {
    if let Some(rest) = name.strip_prefix("cycle") {
        if let Some((p_str, pat_str)) = rest.split_once('-') {
            let p: usize = p_str
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad cycle size in preset {name}")))?;
            let pattern = CyclePattern::parse(pat_str)
                .ok_or_else(|| Error::InvalidConfig(format!("bad cycle pattern in {name}")))?;
            return scenario_cycle(p, pattern);
        }
    }
    if let Some(rest) = name.strip_prefix("grid") {
        if let Some((r, c)) = rest.split_once('x') {
            let rows: usize = r
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad grid rows in preset {name}")))?;
            let cols: usize = c
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad grid cols in preset {name}")))?;
            return scenario_grid(rows, cols);
        }
        if rest == "10" {
            return scenario_grid(10, 10);
        }
    }
    Err(Error::InvalidConfig(format!("unknown scenario preset: {name}")))
}

/// Desk-scale benchmark presets mirroring the study's tables and figure.
pub fn benchmark_preset(name: &str) -> Result<BenchmarkPreset> {
    match name {
        // Table-2 shape: the three 20-cycle colourings at n = 100.
        "table2-desk" => Ok(BenchmarkPreset {
            name: "table2-desk",
            scenarios: vec![
                scenario_cycle(20, CyclePattern::A)?,
                scenario_cycle(20, CyclePattern::B)?,
                scenario_cycle(20, CyclePattern::C)?,
            ],
            n_list: vec![100],
            reps: 20,
            methods: vec![Method::MbeOneHop, Method::MbeTwoHop, Method::Gbe, Method::Gmle],
        }),
        // Figure-2 shape: NMSE against sample size on the (a) colouring.
        "figure2-desk" => Ok(BenchmarkPreset {
            name: "figure2-desk",
            scenarios: vec![scenario_cycle(20, CyclePattern::A)?],
            n_list: vec![50, 75, 100],
            reps: 20,
            methods: vec![Method::MbeOneHop, Method::MbeTwoHop, Method::Gbe],
        }),
        // Grid sanity run: distributed estimation on the 10×10 lattice.
        "grid-desk" => Ok(BenchmarkPreset {
            name: "grid-desk",
            scenarios: vec![scenario_grid(10, 10)?],
            n_list: vec![100],
            reps: 5,
            methods: vec![Method::MbeOneHop],
        }),
        other => Err(Error::InvalidConfig(format!("unknown benchmark preset: {other}"))),
    }
}
