//! Distributed estimation: per-vertex local fits combined into a global θ̃.
//!
//! For every vertex i a relaxed local model on its one-hop or two-hop
//! neighbourhood (see [`crate::graph::local_model`]) is fitted — Bayesian
//! posterior mean or MLE — on the data restricted to the columns N_i. The
//! local estimates are then averaged class by class through the combiner g:
//! a global vertex class receives one term from each local model centred at
//! a class member, a global edge class one term from each model centred at
//! an endpoint of a class edge. Buffer (unmapped) local parameters never
//! contribute.
//!
//! Two averaging modes exist. `Paper` divides the contribution sum by the
//! fixed denominators |V_k| (vertex classes) and 2|E_k| (edge classes);
//! `SelfNormalizing` (default) divides by the actual number of contributing
//! terms. The two coincide whenever class members/endpoints are distinct —
//! true on all cycle scenarios — and differ on, e.g., the grid's shared
//! horizontal edge class, where 2|E_k| over-counts; self-normalization is
//! exact in all cases.
//!
//! Everything is deterministic: vertex i's chain is seeded with
//! `child_seed(seed, i)`, so results do not depend on worker count or
//! scheduling.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{local_model, ColouredGraph, LocalModel};
use crate::mle::{fit_mle, MleResult};
use crate::rcon::{build_spec, k_of_theta, suff_stats, RconSpec};
use crate::rng::child_seed;
use crate::sampler::{posterior_params, sample, CgwParams, SamplerConfig};

/// The estimators of the benchmark study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MbeOneHop,
    MbeTwoHop,
    Gbe,
    Gmle,
    DmleOneHop,
    DmleTwoHop,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::MbeOneHop,
        Method::MbeTwoHop,
        Method::Gbe,
        Method::Gmle,
        Method::DmleOneHop,
        Method::DmleTwoHop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::MbeOneHop => "MBE-1hop",
            Method::MbeTwoHop => "MBE-2hop",
            Method::Gbe => "GBE",
            Method::Gmle => "GMLE",
            Method::DmleOneHop => "DMLE-1hop",
            Method::DmleTwoHop => "DMLE-2hop",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.as_str().eq_ignore_ascii_case(s))
    }

    /// Neighbourhood radius for distributed methods, `None` for global ones.
    pub fn hops(self) -> Option<u8> {
        match self {
            Method::MbeOneHop | Method::DmleOneHop => Some(1),
            Method::MbeTwoHop | Method::DmleTwoHop => Some(2),
            Method::Gbe | Method::Gmle => None,
        }
    }

    pub fn is_bayes(self) -> bool {
        matches!(self, Method::MbeOneHop | Method::MbeTwoHop | Method::Gbe)
    }

    pub fn is_distributed(self) -> bool {
        self.hops().is_some()
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a single local (or global) model is fitted.
#[derive(Debug, Clone)]
pub enum EstimationMethod {
    /// Coloured G-Wishart posterior mean; local priors are always
    /// (δ, I_{p_i}).
    Bayes { delta: f64, sampler: SamplerConfig },
    /// Fisher-scoring MLE.
    Mle { tol: f64, max_iter: usize },
}

impl EstimationMethod {
    /// Study defaults: δ = 3, identity D, 5000 iterations after 1000
    /// burn-in.
    pub fn default_bayes() -> Self {
        EstimationMethod::Bayes { delta: 3.0, sampler: SamplerConfig::default() }
    }

    pub fn default_mle() -> Self {
        EstimationMethod::Mle { tol: crate::mle::MLE_TOL, max_iter: crate::mle::MLE_MAX_ITER }
    }
}

/// Averaging convention of the combiner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CombineMode {
    /// Fixed denominators |V_k| and 2|E_k|.
    Paper,
    /// Divide by the actual contribution count.
    #[default]
    SelfNormalizing,
}

impl CombineMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CombineMode::Paper => "paper",
            CombineMode::SelfNormalizing => "self",
        }
    }

    pub fn parse(s: &str) -> Option<CombineMode> {
        match s {
            "paper" => Some(CombineMode::Paper),
            "self" | "self_normalizing" => Some(CombineMode::SelfNormalizing),
            _ => None,
        }
    }
}

/// Fit diagnostics of one local model.
#[derive(Debug, Clone)]
pub struct LocalDiagnostics {
    /// Sampler acceptance rates (empty for MLE fits).
    pub acceptance: Vec<f64>,
    pub completion_failures: u64,
    /// MLE convergence flag (None for Bayesian fits).
    pub mle_converged: Option<bool>,
    /// Elapsed time of this local fit, seconds.
    pub elapsed_s: f64,
}

/// One vertex's local estimate over its relaxed model.
#[derive(Debug, Clone)]
pub struct LocalEstimate {
    pub model: LocalModel,
    /// θ̃^i over the local classes (unmapped/buffer entries included here
    /// but excluded from combination).
    pub theta_local: DVector<f64>,
    pub diagnostics: LocalDiagnostics,
}

impl LocalEstimate {
    pub fn centre(&self) -> usize {
        self.model.centre
    }
}

/// Fits the relaxed local model of `centre`.
///
/// Restricts `data` to the columns N_centre, builds the local spec, and runs
/// either the coloured G-Wishart posterior mean (prior D = I_{p_i}) or the
/// local MLE. `seed` is used as the chain seed directly.
pub fn estimate_local(
    g: &ColouredGraph,
    centre: usize,
    hops: u8,
    data: &DMatrix<f64>,
    method: &EstimationMethod,
    seed: u64,
) -> Result<LocalEstimate> {
    if data.ncols() != g.p() {
        return Err(Error::DimensionMismatch {
            expected: format!("data with {} columns", g.p()),
            got: format!("{}", data.ncols()),
        });
    }
    let start = Instant::now();
    let model = local_model(g, centre, hops)?;
    let spec = build_spec(&model.local_graph);
    let local_data = data.select_columns(model.vertices.iter());
    let stats = suff_stats(&spec, &local_data)?;

    let (theta_local, diagnostics) = match method {
        EstimationMethod::Bayes { delta, sampler } => {
            let p_i = model.vertices.len();
            let prior = CgwParams::new(*delta, DMatrix::identity(p_i, p_i))?;
            let post = posterior_params(&prior, &stats);
            let summary = sample(&spec, &post, sampler, seed)?;
            let diag = LocalDiagnostics {
                acceptance: summary.acceptance.clone(),
                completion_failures: summary.completion_failures,
                mle_converged: None,
                elapsed_s: 0.0,
            };
            (summary.theta_mean, diag)
        }
        EstimationMethod::Mle { tol, max_iter } => {
            let fit: MleResult = fit_mle(&spec, &stats, None, *tol, *max_iter)?;
            let diag = LocalDiagnostics {
                acceptance: Vec::new(),
                completion_failures: 0,
                mle_converged: Some(fit.converged),
                elapsed_s: 0.0,
            };
            (fit.theta_hat, diag)
        }
    };
    let mut diagnostics = diagnostics;
    diagnostics.elapsed_s = start.elapsed().as_secs_f64();
    Ok(LocalEstimate { model, theta_local, diagnostics })
}

/// Which local parameters feed each global class, plus the paper-mode
/// denominators.
#[derive(Debug, Clone)]
pub struct CombinePlan {
    /// Per global class: (centre vertex, local class id) of every
    /// contributing term.
    pub contributors: Vec<Vec<(usize, usize)>>,
    /// Per global class: |V_k| or 2|E_k|.
    pub paper_denoms: Vec<f64>,
}

/// Builds the combination plan from one local model per vertex (indexed by
/// centre).
pub fn build_combine_plan(g: &ColouredGraph, models: &[&LocalModel]) -> CombinePlan {
    debug_assert_eq!(models.len(), g.p());
    debug_assert!(models.iter().enumerate().all(|(i, m)| m.centre == i));

    // Reverse maps: global class id -> local class id, per model.
    let n_global = g.n_classes();
    let reverse: Vec<Vec<Option<usize>>> = models
        .iter()
        .map(|m| {
            let mut rev = vec![None; n_global];
            for (local_id, mapped) in m.class_map.iter().enumerate() {
                if let Some(global_id) = mapped {
                    rev[*global_id] = Some(local_id);
                }
            }
            rev
        })
        .collect();

    let mut contributors = Vec::with_capacity(n_global);
    let mut paper_denoms = Vec::with_capacity(n_global);
    for (k, members) in g.vertex_classes().iter().enumerate() {
        let mut terms = Vec::new();
        for &i in members {
            let local_id = reverse[i][k]
                .expect("a model centred at a class member always inherits the class");
            terms.push((i, local_id));
        }
        paper_denoms.push(members.len() as f64);
        contributors.push(terms);
    }
    for (e, edges) in g.edge_classes().iter().enumerate() {
        let k = g.n_vertex_classes() + e;
        // G_k: distinct endpoints of class-k edges, ascending.
        let mut endpoints: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        endpoints.sort_unstable();
        endpoints.dedup();
        let mut terms = Vec::new();
        for &i in &endpoints {
            let local_id = reverse[i][k]
                .expect("a model centred at an endpoint preserves at least one class edge");
            terms.push((i, local_id));
        }
        paper_denoms.push(2.0 * edges.len() as f64);
        contributors.push(terms);
    }
    CombinePlan { contributors, paper_denoms }
}

/// Applies the combiner to a stack of local estimates.
///
/// Returns the combined θ̃ and the per-class contribution counts.
pub fn combine(
    estimates: &[LocalEstimate],
    g: &ColouredGraph,
    mode: CombineMode,
) -> Result<(DVector<f64>, Vec<usize>)> {
    let models: Vec<&LocalModel> = estimates.iter().map(|e| &e.model).collect();
    let plan = build_combine_plan(g, &models);
    combine_with_plan(estimates, &plan, mode)
}

/// Combiner core, reusable with a precomputed plan.
pub fn combine_with_plan(
    estimates: &[LocalEstimate],
    plan: &CombinePlan,
    mode: CombineMode,
) -> Result<(DVector<f64>, Vec<usize>)> {
    let n_global = plan.contributors.len();
    let mut theta = DVector::zeros(n_global);
    let mut counts = Vec::with_capacity(n_global);
    for k in 0..n_global {
        let terms = &plan.contributors[k];
        if terms.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "global class {k} received no contributions"
            )));
        }
        let sum: f64 = terms.iter().map(|&(i, q)| estimates[i].theta_local[q]).sum();
        let denom = match mode {
            CombineMode::Paper => plan.paper_denoms[k],
            CombineMode::SelfNormalizing => terms.len() as f64,
        };
        theta[k] = sum / denom;
        counts.push(terms.len());
    }
    Ok((theta, counts))
}

/// A combined (or global) precision estimate plus provenance.
#[derive(Debug, Clone)]
pub struct GlobalEstimate {
    pub method: Method,
    pub combine_mode: Option<CombineMode>,
    pub theta: DVector<f64>,
    pub k_mat: DMatrix<f64>,
    /// Per global class contribution counts (all 1 for global methods).
    pub contribution_counts: Vec<usize>,
    /// Whether K(θ̃) is positive definite (reported, never repaired).
    pub pd: bool,
    /// Per-vertex local estimates (empty for global methods).
    pub locals: Vec<LocalEstimate>,
    /// Sampler acceptance of the global chain (GBE only).
    pub acceptance: Vec<f64>,
    /// Warnings: "k_not_pd", "mle_nonconverged", …
    pub flags: Vec<String>,
    /// Elapsed seconds of the combination step (distributed methods).
    pub combine_elapsed_s: f64,
}

impl GlobalEstimate {
    /// Critical-path wall time: slowest local fit plus combination for
    /// distributed methods — the elapsed time under the intended
    /// one-node-per-vertex deployment.
    pub fn critical_path_s(&self) -> f64 {
        let slowest = self
            .locals
            .iter()
            .map(|l| l.diagnostics.elapsed_s)
            .fold(0.0, f64::max);
        slowest + self.combine_elapsed_s
    }

    /// Total sequential CPU seconds across all local fits.
    pub fn total_local_s(&self) -> f64 {
        self.locals.iter().map(|l| l.diagnostics.elapsed_s).sum::<f64>() + self.combine_elapsed_s
    }
}

fn assemble_global(
    spec: &RconSpec,
    method: Method,
    combine_mode: Option<CombineMode>,
    theta: DVector<f64>,
    counts: Vec<usize>,
    locals: Vec<LocalEstimate>,
    acceptance: Vec<f64>,
    combine_elapsed_s: f64,
) -> Result<GlobalEstimate> {
    let k_mat = k_of_theta(spec, &theta)?;
    let pd = crate::linalg::is_pd(&k_mat);
    let mut flags = Vec::new();
    if !pd {
        flags.push("k_not_pd".to_string());
    }
    for l in &locals {
        if l.diagnostics.mle_converged == Some(false) {
            flags.push(format!("mle_nonconverged:v{}", l.centre()));
        }
    }
    Ok(GlobalEstimate {
        method,
        combine_mode,
        theta,
        k_mat,
        contribution_counts: counts,
        pd,
        locals,
        acceptance,
        flags,
        combine_elapsed_s,
    })
}

/// Runs every vertex's local fit (parallel map) and combines.
///
/// Per-vertex chains are seeded with `child_seed(seed, i)`, so the result is
/// byte-identical for any worker count. Per-vertex failures are aggregated
/// into [`Error::LocalFailures`].
pub fn estimate_distributed(
    g: &ColouredGraph,
    data: &DMatrix<f64>,
    hops: u8,
    method: &EstimationMethod,
    mode: CombineMode,
    seed: u64,
) -> Result<GlobalEstimate> {
    let results: Vec<(usize, Result<LocalEstimate>)> = (0..g.p())
        .into_par_iter()
        .map(|i| (i, estimate_local(g, i, hops, data, method, child_seed(seed, i as u64))))
        .collect();

    let mut estimates = Vec::with_capacity(g.p());
    let mut failures = Vec::new();
    for (i, r) in results {
        match r {
            Ok(e) => estimates.push(e),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    if !failures.is_empty() {
        return Err(Error::LocalFailures(failures));
    }
    estimates.sort_by_key(|e| e.centre());

    let combine_start = Instant::now();
    let (theta, counts) = combine(&estimates, g, mode)?;
    let combine_elapsed_s = combine_start.elapsed().as_secs_f64();

    let spec = build_spec(g);
    let method_tag = match (method, hops) {
        (EstimationMethod::Bayes { .. }, 1) => Method::MbeOneHop,
        (EstimationMethod::Bayes { .. }, _) => Method::MbeTwoHop,
        (EstimationMethod::Mle { .. }, 1) => Method::DmleOneHop,
        (EstimationMethod::Mle { .. }, _) => Method::DmleTwoHop,
    };
    assemble_global(
        &spec,
        method_tag,
        Some(mode),
        theta,
        counts,
        estimates,
        Vec::new(),
        combine_elapsed_s,
    )
}

/// Global Bayesian estimate: one chain on the full model.
pub fn estimate_global_bayes(
    g: &ColouredGraph,
    data: &DMatrix<f64>,
    prior: &CgwParams,
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<GlobalEstimate> {
    if data.ncols() != g.p() {
        return Err(Error::DimensionMismatch {
            expected: format!("data with {} columns", g.p()),
            got: format!("{}", data.ncols()),
        });
    }
    let spec = build_spec(g);
    let stats = suff_stats(&spec, data)?;
    let post = posterior_params(prior, &stats);
    let summary = sample(&spec, &post, cfg, seed)?;
    let counts = vec![1; spec.n_params()];
    assemble_global(
        &spec,
        Method::Gbe,
        None,
        summary.theta_mean,
        counts,
        Vec::new(),
        summary.acceptance,
        0.0,
    )
}

/// Global MLE on the full model.
pub fn estimate_global_mle(
    g: &ColouredGraph,
    data: &DMatrix<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<GlobalEstimate> {
    if data.ncols() != g.p() {
        return Err(Error::DimensionMismatch {
            expected: format!("data with {} columns", g.p()),
            got: format!("{}", data.ncols()),
        });
    }
    let spec = build_spec(g);
    let stats = suff_stats(&spec, data)?;
    let fit = fit_mle(&spec, &stats, None, tol, max_iter)?;
    let counts = vec![1; spec.n_params()];
    let mut est = assemble_global(
        &spec,
        Method::Gmle,
        None,
        fit.theta_hat,
        counts,
        Vec::new(),
        Vec::new(),
        0.0,
    )?;
    if !fit.converged {
        est.flags.push("mle_nonconverged".to_string());
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rcon::simulate_data;
    use approx::assert_relative_eq;

    fn six_cycle_a() -> (ColouredGraph, DMatrix<f64>) {
        let g = ColouredGraph::new(
            6,
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)],
            vec![vec![0, 2, 4], vec![1, 3, 5]],
            vec![vec![(0, 1), (2, 3), (4, 5)], vec![(1, 2), (3, 4), (0, 5)]],
        )
        .unwrap();
        let spec = build_spec(&g);
        let theta = nalgebra::dvector![1.0, 1.5, 0.3, -0.2];
        let k = k_of_theta(&spec, &theta).unwrap();
        (g, k)
    }

    fn complete_singleton(p: usize) -> ColouredGraph {
        let mut edges = Vec::new();
        for i in 0..p {
            for j in (i + 1)..p {
                edges.push((i, j));
            }
        }
        let vcs: Vec<Vec<usize>> = (0..p).map(|v| vec![v]).collect();
        let ecs: Vec<Vec<(usize, usize)>> = edges.iter().map(|&e| vec![e]).collect();
        ColouredGraph::new(p, edges, vcs, ecs).unwrap()
    }

    fn short_bayes() -> EstimationMethod {
        EstimationMethod::Bayes {
            delta: 3.0,
            sampler: SamplerConfig { iters: 800, burn_in: 200, ..Default::default() },
        }
    }

    #[test]
    fn complete_graph_local_equals_global_chain() {
        // On a complete graph the one-hop local model *is* the global
        // model, so a matched seed reproduces the GBE exactly.
        let g = complete_singleton(3);
        let spec = build_spec(&g);
        let theta = nalgebra::dvector![1.0, 1.2, 1.4, 0.2, 0.1, -0.1];
        let k = k_of_theta(&spec, &theta).unwrap();
        let data = simulate_data(&k, 60, 5).unwrap();

        let method = short_bayes();
        let local = estimate_local(&g, 1, 1, &data, &method, 99).unwrap();
        let prior = CgwParams::identity_prior(3, 3.0);
        let cfg = SamplerConfig { iters: 800, burn_in: 200, ..Default::default() };
        let global = estimate_global_bayes(&g, &data, &prior, &cfg, 99).unwrap();
        assert_eq!(local.theta_local, global.theta);
    }

    #[test]
    fn local_restricts_to_neighbourhood_columns() {
        let (g, k) = six_cycle_a();
        let data = simulate_data(&k, 40, 9).unwrap();
        let est = estimate_local(&g, 2, 1, &data, &short_bayes(), 1).unwrap();
        assert_eq!(est.model.vertices, vec![1, 2, 3]);
        assert_eq!(est.theta_local.len(), est.model.local_graph.n_classes());
    }

    #[test]
    fn plan_contributors_exclude_unmapped_classes() {
        // Buffer exclusion: every contributing local class must map to the
        // global class it feeds.
        let (g, _) = six_cycle_a();
        let models: Vec<LocalModel> =
            (0..6).map(|i| local_model(&g, i, 1).unwrap()).collect();
        let refs: Vec<&LocalModel> = models.iter().collect();
        let plan = build_combine_plan(&g, &refs);
        for (k, terms) in plan.contributors.iter().enumerate() {
            assert!(!terms.is_empty());
            for &(i, q) in terms {
                assert_eq!(models[i].class_map[q], Some(k));
            }
        }
    }

    #[test]
    fn combine_of_constant_locals_is_constant() {
        let (g, _) = six_cycle_a();
        let estimates: Vec<LocalEstimate> = (0..6)
            .map(|i| {
                let model = local_model(&g, i, 1).unwrap();
                let n = model.local_graph.n_classes();
                LocalEstimate {
                    model,
                    theta_local: DVector::from_element(n, 0.7),
                    diagnostics: LocalDiagnostics {
                        acceptance: vec![],
                        completion_failures: 0,
                        mle_converged: None,
                        elapsed_s: 0.0,
                    },
                }
            })
            .collect();
        let (theta, counts) = combine(&estimates, &g, CombineMode::SelfNormalizing).unwrap();
        for k in 0..theta.len() {
            assert_relative_eq!(theta[k], 0.7, epsilon = 1e-14);
        }
        // Vertex classes: 3 members each; edge classes: 6 distinct
        // endpoints each.
        assert_eq!(counts, vec![3, 3, 6, 6]);
    }

    #[test]
    fn combine_matches_hand_computed_weighted_sum() {
        // Synthetic locals with recognizable values: model i contributes
        // 10·i + local-class-id, so every combined value is checkable by
        // hand from the plan.
        let (g, _) = six_cycle_a();
        let estimates: Vec<LocalEstimate> = (0..6)
            .map(|i| {
                let model = local_model(&g, i, 1).unwrap();
                let n = model.local_graph.n_classes();
                LocalEstimate {
                    model,
                    theta_local: DVector::from_fn(n, |q, _| (10 * i + q) as f64),
                    diagnostics: LocalDiagnostics {
                        acceptance: vec![],
                        completion_failures: 0,
                        mle_converged: None,
                        elapsed_s: 0.0,
                    },
                }
            })
            .collect();
        let models: Vec<&LocalModel> = estimates.iter().map(|e| &e.model).collect();
        let plan = build_combine_plan(&g, &models);
        let (theta, _) = combine(&estimates, &g, CombineMode::Paper).unwrap();
        for k in 0..theta.len() {
            let hand: f64 = plan.contributors[k]
                .iter()
                .map(|&(i, q)| (10 * i + q) as f64)
                .sum::<f64>()
                / plan.paper_denoms[k];
            assert_relative_eq!(theta[k], hand, epsilon = 1e-14);
        }
    }

    #[test]
    fn paper_and_self_modes_coincide_when_counts_match() {
        // Single global vertex class covering a 4-cycle: |V_k| = 4 = count.
        // Edge classes here are singletons with distinct endpoints, so
        // counts match 2|E_k| as well.
        let g = ColouredGraph::new(
            4,
            vec![(0, 1), (1, 2), (2, 3), (0, 3)],
            vec![vec![0, 1, 2, 3]],
            vec![vec![(0, 1)], vec![(1, 2)], vec![(2, 3)], vec![(0, 3)]],
        )
        .unwrap();
        let spec = build_spec(&g);
        let theta = nalgebra::dvector![1.0, 0.2, -0.1, 0.15, 0.05];
        let k = k_of_theta(&spec, &theta).unwrap();
        let data = simulate_data(&k, 80, 21).unwrap();
        let a = estimate_distributed(&g, &data, 1, &short_bayes(), CombineMode::Paper, 7)
            .unwrap();
        let b = estimate_distributed(
            &g,
            &data,
            1,
            &short_bayes(),
            CombineMode::SelfNormalizing,
            7,
        )
        .unwrap();
        assert_eq!(a.theta, b.theta);
    }

    #[test]
    fn distributed_is_deterministic_and_worker_independent() {
        let (g, k) = six_cycle_a();
        let data = simulate_data(&k, 50, 3).unwrap();
        let method = short_bayes();
        let run = || {
            estimate_distributed(&g, &data, 1, &method, CombineMode::SelfNormalizing, 11)
                .unwrap()
        };
        let base = run();

        for threads in [1usize, 8] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let alt = pool.install(run);
            assert_eq!(base.theta, alt.theta, "threads = {threads}");
            assert_eq!(base.contribution_counts, alt.contribution_counts);
        }
        let other = estimate_distributed(
            &g,
            &data,
            1,
            &method,
            CombineMode::SelfNormalizing,
            12,
        )
        .unwrap();
        assert_ne!(base.theta, other.theta);
    }

    #[test]
    fn twenty_cycle_nmse_is_reasonable() {
        // Magnitude check against the benchmark scales: NMSE < 0.1.
        let p = 20;
        let mut edges = Vec::new();
        let mut odd = Vec::new();
        let mut even = Vec::new();
        for i in 1..p {
            let e = (i - 1, i);
            edges.push(e);
            if i % 2 == 1 {
                odd.push(e);
            } else {
                even.push(e);
            }
        }
        edges.push((0, p - 1));
        even.push((0, p - 1));
        let g = ColouredGraph::new(
            p,
            edges,
            vec![
                (0..p).step_by(2).collect(),
                (1..p).step_by(2).collect(),
            ],
            vec![odd, even],
        )
        .unwrap();
        let spec = build_spec(&g);
        let theta = nalgebra::dvector![0.1, 0.03, 0.01, 0.02];
        let k_true = k_of_theta(&spec, &theta).unwrap();
        let data = simulate_data(&k_true, 100, 31).unwrap();
        let est = estimate_distributed(
            &g,
            &data,
            1,
            &EstimationMethod::default_bayes(),
            CombineMode::SelfNormalizing,
            17,
        )
        .unwrap();
        let nmse = ((&est.k_mat - &k_true).norm() / k_true.norm()).powi(2);
        assert!(nmse.is_finite() && nmse < 0.1, "NMSE = {nmse}");
        assert!(est.pd);
    }

    #[test]
    fn dmle_on_complete_graph_reduces_to_global_mle() {
        let g = complete_singleton(3);
        let spec = build_spec(&g);
        let theta = nalgebra::dvector![1.0, 1.2, 1.4, 0.2, 0.1, -0.1];
        let k = k_of_theta(&spec, &theta).unwrap();
        let data = simulate_data(&k, 60, 13).unwrap();
        let dist = estimate_distributed(
            &g,
            &data,
            1,
            &EstimationMethod::default_mle(),
            CombineMode::SelfNormalizing,
            1,
        )
        .unwrap();
        let global = estimate_global_mle(&g, &data, crate::mle::MLE_TOL, 200).unwrap();
        // Every local model is the full model, so all locals agree and the
        // average equals the global fit.
        assert!((dist.theta - global.theta).amax() < 1e-7);
    }

    #[test]
    fn dmle_six_cycle_converges_and_flags_are_clean() {
        let (g, k) = six_cycle_a();
        let data = simulate_data(&k, 500, 29).unwrap();
        let est = estimate_distributed(
            &g,
            &data,
            2,
            &EstimationMethod::default_mle(),
            CombineMode::SelfNormalizing,
            3,
        )
        .unwrap();
        assert!(est.flags.is_empty(), "flags: {:?}", est.flags);
        let nmse = ((&est.k_mat - &k).norm() / k.norm()).powi(2);
        assert!(nmse < 0.05, "NMSE = {nmse}");
    }

    #[test]
    fn gbe_passes_cone_check() {
        let (g, k) = six_cycle_a();
        let spec = build_spec(&g);
        let data = simulate_data(&k, 50, 37).unwrap();
        let prior = CgwParams::identity_prior(6, 3.0);
        let cfg = SamplerConfig { iters: 500, burn_in: 100, ..Default::default() };
        let est = estimate_global_bayes(&g, &data, &prior, &cfg, 2).unwrap();
        let report = crate::rcon::cone_check(&spec, &est.k_mat, 1e-8).unwrap();
        assert!(report.in_cone);
        assert!(est.pd);
    }

    #[test]
    fn method_tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.as_str()), Some(m));
        }
        assert_eq!(Method::parse("mbe-1hop"), Some(Method::MbeOneHop));
        assert_eq!(Method::parse("nonsense"), None);
    }

    #[test]
    fn local_failure_reports_vertex_ids() {
        let (g, k) = six_cycle_a();
        let data = simulate_data(&k, 10, 3).unwrap();
        // Negative δ is invalid: CgwParams::new fails inside every local fit.
        let bad = EstimationMethod::Bayes {
            delta: -1.0,
            sampler: SamplerConfig { iters: 10, burn_in: 2, ..Default::default() },
        };
        match estimate_distributed(&g, &data, 1, &bad, CombineMode::SelfNormalizing, 1) {
            Err(Error::LocalFailures(v)) => assert_eq!(v.len(), 6),
            other => panic!("expected LocalFailures, got {other:?}"),
        }
    }
}
