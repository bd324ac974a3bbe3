//! The RCON parameterization: θ ↔ K, cone membership, sufficient statistics,
//! the cumulant function with derivatives, and Gaussian data simulation.
//!
//! A coloured graph induces a linear parameterization of structured precision
//! matrices: with one indicator matrix δ_r per colour class (ones at the
//! entries of the class, both triangles for edges),
//!
//! ```text
//! K(θ) = Σ_r θ_r δ_r,          θ ∈ R^{T+S},
//! ```
//!
//! and the model cone is {θ : K(θ) ≻ 0}. The Gaussian log-likelihood of n
//! zero-mean observations is n·(⟨θ, Ȳ⟩ − ψ(θ)) with cumulant function
//! ψ(θ) = −½ log|K(θ)| and mean sufficient statistic Ȳ_r = −tr(δ_r S)/(2n).
//! Its derivatives are
//!
//! ```text
//! μ_r(θ)  = ∂ψ/∂θ_r   = −½ tr(δ_r Σ),         Σ = K(θ)^{-1},
//! F_rs(θ) = ∂²ψ/∂θ_r∂θ_s = ½ tr(δ_r Σ δ_s Σ),
//! ```
//!
//! which drive both Fisher scoring (MLE) and the asymptotic covariance of the
//! combined distributed estimator.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::ColouredGraph;
use crate::linalg;
use crate::rng::rng_from_seed;

/// Default tolerance for cone membership tests.
pub const CONE_TOL: f64 = 1e-9;

/// One colour class in matrix-entry form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntries {
    /// Upper-triangle positions `(i, j)` with `i ≤ j` carrying this class.
    pub positions: Vec<(usize, usize)>,
    /// Whether this is a vertex (diagonal) class.
    pub is_vertex: bool,
    /// Matrix-entry multiplicity τ_r: |V_r| for vertex classes, 2|E_r| for
    /// edge classes (both triangles count).
    pub tau: usize,
}

/// The entry layout of an RCON model: p, and one [`ClassEntries`] per colour
/// class, vertex classes first (ascending class id) then edge classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RconSpec {
    p: usize,
    n_vertex_classes: usize,
    classes: Vec<ClassEntries>,
}

impl RconSpec {
    /// Matrix dimension p.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Parameter dimension T + S.
    pub fn n_params(&self) -> usize {
        self.classes.len()
    }

    /// Number of vertex (diagonal) classes T.
    pub fn n_vertex_classes(&self) -> usize {
        self.n_vertex_classes
    }

    /// Per-class entry lists.
    pub fn classes(&self) -> &[ClassEntries] {
        &self.classes
    }

    /// All off-diagonal upper-triangle positions covered by some edge class.
    pub fn edge_positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.classes
            .iter()
            .filter(|c| !c.is_vertex)
            .flat_map(|c| c.positions.iter().copied())
    }

    /// The class index covering position `(i, j)` (`i ≤ j`), if any.
    pub fn class_of_position(&self, i: usize, j: usize) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| c.positions.binary_search(&(i, j)).is_ok())
    }
}

/// Builds the entry layout for a validated coloured graph.
///
/// θ layout: vertex classes in ascending class id, then edge classes in
/// ascending class id — matching the graph's unified class numbering.
pub fn build_spec(g: &ColouredGraph) -> RconSpec {
    let mut classes = Vec::with_capacity(g.n_classes());
    for members in g.vertex_classes() {
        let positions: Vec<(usize, usize)> = members.iter().map(|&v| (v, v)).collect();
        let tau = positions.len();
        classes.push(ClassEntries { positions, is_vertex: true, tau });
    }
    for members in g.edge_classes() {
        let positions: Vec<(usize, usize)> = members.to_vec();
        let tau = 2 * positions.len();
        classes.push(ClassEntries { positions, is_vertex: false, tau });
    }
    RconSpec {
        p: g.p(),
        n_vertex_classes: g.n_vertex_classes(),
        classes,
    }
}

fn check_theta_len(spec: &RconSpec, theta: &DVector<f64>) -> Result<()> {
    if theta.len() != spec.n_params() {
        return Err(Error::DimensionMismatch {
            expected: format!("theta of length {}", spec.n_params()),
            got: format!("length {}", theta.len()),
        });
    }
    Ok(())
}

fn check_matrix_dim(spec: &RconSpec, k: &DMatrix<f64>) -> Result<()> {
    if k.nrows() != spec.p() || k.ncols() != spec.p() {
        return Err(Error::DimensionMismatch {
            expected: format!("{p}×{p} matrix", p = spec.p()),
            got: format!("{}×{}", k.nrows(), k.ncols()),
        });
    }
    Ok(())
}

/// Assembles K(θ) = Σ_r θ_r δ_r. Structure only — positive definiteness is
/// not enforced here.
pub fn k_of_theta(spec: &RconSpec, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_theta_len(spec, theta)?;
    let mut k = DMatrix::zeros(spec.p(), spec.p());
    for (r, class) in spec.classes().iter().enumerate() {
        let v = theta[r];
        for &(i, j) in &class.positions {
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Class averages of a structured matrix, with a consistency flag.
#[derive(Debug, Clone)]
pub struct ThetaOfK {
    /// θ_r = tr(δ_r K)/τ_r — the within-class entry average.
    pub theta: DVector<f64>,
    /// Largest within-class max−min spread observed.
    pub max_spread: f64,
    /// Whether every within-class spread was ≤ the requested tolerance.
    pub consistent: bool,
}

/// Projects a symmetric matrix onto θ by class averaging.
///
/// For K that actually lies in the model's linear span this recovers θ
/// exactly; otherwise the within-class spread is recorded and `consistent`
/// reports whether it stayed within `tol`.
pub fn theta_of_k(spec: &RconSpec, k: &DMatrix<f64>, tol: f64) -> Result<ThetaOfK> {
    check_matrix_dim(spec, k)?;
    let mut theta = DVector::zeros(spec.n_params());
    let mut max_spread: f64 = 0.0;
    for (r, class) in spec.classes().iter().enumerate() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &(i, j) in &class.positions {
            let v = k[(i, j)];
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        // Entry averaging: each off-diagonal position appears twice in
        // tr(δ_r K)/τ_r, so the mean over upper-triangle positions is the
        // same quantity.
        theta[r] = sum / class.positions.len() as f64;
        max_spread = max_spread.max(hi - lo);
    }
    Ok(ThetaOfK { theta, max_spread, consistent: max_spread <= tol })
}

/// A single failed cone condition.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeViolation {
    /// A non-edge off-diagonal entry exceeding the tolerance.
    ZeroPattern { position: (usize, usize), value: f64 },
    /// A colour class whose entries differ by more than the tolerance.
    ColourSpread { class: usize, spread: f64 },
    /// Smallest eigenvalue not above the tolerance.
    NotPositiveDefinite { min_eigenvalue: f64 },
}

/// Result of a cone membership test.
#[derive(Debug, Clone)]
pub struct ConeReport {
    pub in_cone: bool,
    pub violations: Vec<ConeViolation>,
}

/// Tests K for cone membership: zeros at non-edges, within-class equality,
/// and smallest eigenvalue above `tol`.
pub fn cone_check(spec: &RconSpec, k: &DMatrix<f64>, tol: f64) -> Result<ConeReport> {
    check_matrix_dim(spec, k)?;
    let mut violations = Vec::new();

    let mut covered = vec![false; spec.p() * spec.p()];
    for class in spec.classes() {
        for &(i, j) in &class.positions {
            covered[i * spec.p() + j] = true;
        }
    }
    for i in 0..spec.p() {
        for j in (i + 1)..spec.p() {
            if !covered[i * spec.p() + j] && k[(i, j)].abs() > tol {
                violations.push(ConeViolation::ZeroPattern {
                    position: (i, j),
                    value: k[(i, j)],
                });
            }
        }
    }

    for (r, class) in spec.classes().iter().enumerate() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(i, j) in &class.positions {
            lo = lo.min(k[(i, j)]);
            hi = hi.max(k[(i, j)]);
        }
        if hi - lo > tol {
            violations.push(ConeViolation::ColourSpread { class: r, spread: hi - lo });
        }
    }

    let (min_eig, _) = linalg::extreme_eigenvalues(k);
    if min_eig <= tol {
        violations.push(ConeViolation::NotPositiveDefinite { min_eigenvalue: min_eig });
    }

    Ok(ConeReport { in_cone: violations.is_empty(), violations })
}

/// Sufficient statistics of a zero-mean Gaussian sample under an RCON model.
#[derive(Debug, Clone)]
pub struct SampleStats {
    /// Observation count n.
    pub n: usize,
    /// Scatter matrix S = Σ_j x_j x_jᵗ.
    pub scatter: DMatrix<f64>,
    /// Mean sufficient statistic Ȳ with Ȳ_r = −tr(δ_r S)/(2n).
    pub ybar: DVector<f64>,
}

/// Computes scatter and mean sufficient statistics from an n×p data matrix
/// (rows are observations).
pub fn suff_stats(spec: &RconSpec, data: &DMatrix<f64>) -> Result<SampleStats> {
    if data.ncols() != spec.p() {
        return Err(Error::DimensionMismatch {
            expected: format!("data with {} columns", spec.p()),
            got: format!("{} columns", data.ncols()),
        });
    }
    if data.nrows() == 0 {
        return Err(Error::InvalidConfig("suff_stats needs at least one observation".into()));
    }
    let n = data.nrows();
    let scatter = data.transpose() * data;
    let ybar = ybar_of_scatter(spec, &scatter, n);
    Ok(SampleStats { n, scatter, ybar })
}

/// Ȳ from an explicit scatter matrix.
pub fn ybar_of_scatter(spec: &RconSpec, scatter: &DMatrix<f64>, n: usize) -> DVector<f64> {
    let mut ybar = DVector::zeros(spec.n_params());
    for (r, class) in spec.classes().iter().enumerate() {
        let mut tr = 0.0;
        for &(i, j) in &class.positions {
            tr += if i == j { scatter[(i, i)] } else { 2.0 * scatter[(i, j)] };
        }
        ybar[r] = -tr / (2.0 * n as f64);
    }
    ybar
}

/// Value and first two derivatives of the cumulant function at θ.
#[derive(Debug, Clone)]
pub struct Cumulant {
    /// ψ(θ) = −½ log|K(θ)|.
    pub psi: f64,
    /// Gradient μ_r = −½ tr(δ_r Σ).
    pub mu: DVector<f64>,
    /// Fisher information F_rs = ½ tr(δ_r Σ δ_s Σ); symmetric positive
    /// definite on the cone.
    pub fisher: DMatrix<f64>,
}

/// Evaluates ψ, μ and F at a cone point.
///
/// Errors with `OutsideCone` when K(θ) has no Cholesky factorization.
pub fn cumulant(spec: &RconSpec, theta: &DVector<f64>) -> Result<Cumulant> {
    let k = k_of_theta(spec, theta)?;
    let chol = linalg::cholesky(k, "K(theta) in cumulant").map_err(|_| Error::OutsideCone {
        context: "cumulant evaluated off the cone".into(),
    })?;
    let psi = -0.5 * linalg::log_det(&chol);
    let sigma = chol.inverse();

    let mut mu = DVector::zeros(spec.n_params());
    for (r, class) in spec.classes().iter().enumerate() {
        let mut tr = 0.0;
        for &(i, j) in &class.positions {
            tr += if i == j { sigma[(i, i)] } else { 2.0 * sigma[(i, j)] };
        }
        mu[r] = -0.5 * tr;
    }

    // F_rs = ½ tr(δ_r Σ δ_s Σ) = ½ Σ_{(a,b)∈δ_r} Σ_{(c,d)∈δ_s} Σ_bc Σ_da,
    // where the sums run over all nonzero positions of the indicators (both
    // triangles). Enumerating entry pairs keeps the cost proportional to
    // (Σ_r τ_r)² rather than m²p².
    let mirrored: Vec<Vec<(usize, usize)>> = spec
        .classes()
        .iter()
        .map(|class| {
            let mut entries = Vec::with_capacity(2 * class.positions.len());
            for &(i, j) in &class.positions {
                entries.push((i, j));
                if i != j {
                    entries.push((j, i));
                }
            }
            entries
        })
        .collect();
    let m = spec.n_params();
    let mut fisher = DMatrix::zeros(m, m);
    for r in 0..m {
        for s in r..m {
            let mut acc = 0.0;
            for &(a, b) in &mirrored[r] {
                for &(c, d) in &mirrored[s] {
                    acc += sigma[(b, c)] * sigma[(d, a)];
                }
            }
            fisher[(r, s)] = 0.5 * acc;
            fisher[(s, r)] = 0.5 * acc;
        }
    }

    Ok(Cumulant { psi, mu, fisher })
}

/// Draws n i.i.d. rows from N(0, K^{-1}), deterministically in `seed`.
///
/// With K = L·Lᵗ the rows are x = L^{-ᵗ} z, z ~ N(0, I): then
/// Cov(x) = L^{-ᵗ} L^{-1} = K^{-1}.
pub fn simulate_data(k: &DMatrix<f64>, n: usize, seed: u64) -> Result<DMatrix<f64>> {
    if k.nrows() != k.ncols() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            got: format!("{}×{}", k.nrows(), k.ncols()),
        });
    }
    let p = k.nrows();
    let chol = linalg::cholesky(k.clone(), "K in simulate_data")?;
    let l = chol.l();
    let mut rng = rng_from_seed(seed);
    let mut data = DMatrix::zeros(n, p);
    let mut z = vec![0.0f64; p];
    let mut x = vec![0.0f64; p];
    for row in 0..n {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        // Back substitution for Lᵗ x = z (Lᵗ is upper triangular with
        // (Lᵗ)_{kj} = L_{jk}).
        for kk in (0..p).rev() {
            let mut acc = z[kk];
            for j in (kk + 1)..p {
                acc -= l[(j, kk)] * x[j];
            }
            x[kk] = acc / l[(kk, kk)];
        }
        for (col, &v) in x.iter().enumerate() {
            data[(row, col)] = v;
        }
    }
    Ok(data)
}
