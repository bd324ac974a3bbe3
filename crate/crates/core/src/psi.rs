//! The Ψ (Cholesky) sampler for the coloured G-Wishart distribution.
//!
//! Factor D^{-1} = QᵗQ with Q upper triangular and K = ΦᵗΦ, and set
//! Ψ = Φ·Q^{-1} (also upper triangular). In these coordinates the density
//! simplifies dramatically:
//!
//! ```text
//! tr(K·D)  = Σ_{i≤j} ψ_ij²,        log|K| = 2 Σ_i ln ψ_ii + const,
//! ```
//!
//! so the coloured G-Wishart becomes a product of near-independent terms —
//! *except* that the colour and zero constraints couple the entries of K.
//! The sampler therefore splits the upper triangle of Ψ into
//!
//! * **free** entries — one per colour class, at the class's first position
//!   in row-major order — which a proposal chooses directly, and
//! * **completed** entries — everything else — solved row by row so that
//!   K = Qᵗ(ΨᵗΨ)Q hits its target exactly: 0 at non-edges, the class
//!   representative's value at every other constrained position.
//!
//! Completion walks the upper triangle in row-major order maintaining
//! Φ = ΨQ incrementally. A diagonal entry requires K_jj − Σ_{k<j} φ_kj² > 0;
//! when that fails the proposal is outside the representable region and the
//! step counts as a *completion failure* (rejected, flagged).
//!
//! The map u ↦ θ from free entries to class values is triangular in
//! row-major order, which gives the change-of-variables Jacobian in closed
//! form: log|∂θ/∂u| = Σ_i r_i·ln ψ_ii + const, where r_i counts the free
//! entries in row i (the constant depends only on Q and cancels from
//! Metropolis–Hastings ratios).
//!
//! Proposals are Bartlett-style: free off-diagonals ~ N(0,1), a free
//! diagonal in row i ~ χ_{δ+ν_i} (ν_i = free off-diagonals in row i). On a
//! complete graph with all-singleton colouring this proposal *is* the
//! target, so every step is accepted and the chain draws i.i.d. — the
//! acceptance ratio degrades gracefully as colour ties and zeros bind.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rcon::{k_of_theta, RconSpec};
use crate::sampler::CgwParams;

/// Role of one upper-triangular position in the completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EntryKind {
    /// Class representative: the proposal supplies ψ here.
    Free { class: usize },
    /// Completed so K equals the class representative's value.
    Follow { class: usize },
    /// Completed so K = 0 (non-edge).
    Zero,
}

#[derive(Debug, Clone, Copy)]
struct PlanEntry {
    i: usize,
    j: usize,
    kind: EntryKind,
}

/// Static completion schedule for one model: which entries are free, the
/// Jacobian row exponents, and the proposal degrees of freedom.
#[derive(Debug, Clone)]
pub struct CompletionPlan {
    p: usize,
    n_classes: usize,
    /// Upper triangle in row-major order.
    entries: Vec<PlanEntry>,
    /// r_i: free entries in row i (diagonal counted once, off-diagonals each).
    row_exponents: Vec<f64>,
    /// ν_i: free off-diagonals in row i (χ degrees of freedom are δ + ν_i).
    free_offdiag_in_row: Vec<f64>,
    n_free: usize,
}

impl CompletionPlan {
    pub fn new(spec: &RconSpec) -> Self {
        let p = spec.p();
        let mut entries = Vec::with_capacity(p * (p + 1) / 2);
        let mut row_exponents = vec![0.0; p];
        let mut free_offdiag_in_row = vec![0.0; p];
        let mut n_free = 0;
        for i in 0..p {
            for j in i..p {
                let kind = match spec.class_of_position(i, j) {
                    None => EntryKind::Zero,
                    Some(class) => {
                        let rep = spec.classes()[class].positions[0];
                        if rep == (i, j) {
                            n_free += 1;
                            row_exponents[i] += 1.0;
                            if i != j {
                                free_offdiag_in_row[i] += 1.0;
                            }
                            EntryKind::Free { class }
                        } else {
                            EntryKind::Follow { class }
                        }
                    }
                };
                entries.push(PlanEntry { i, j, kind });
            }
        }
        debug_assert_eq!(n_free, spec.n_params());
        Self {
            p,
            n_classes: spec.n_params(),
            entries,
            row_exponents,
            free_offdiag_in_row,
            n_free,
        }
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }
}

/// Mutable buffers for one completed configuration.
#[derive(Debug, Clone)]
struct Workspace {
    /// Ψ, upper triangular.
    psi: DMatrix<f64>,
    /// Φ = ΨQ, upper triangular.
    phi: DMatrix<f64>,
    /// K value at each class representative — equivalently θ of this draw.
    rep_k: Vec<f64>,
}

impl Workspace {
    fn zeros(p: usize, n_classes: usize) -> Self {
        Self {
            psi: DMatrix::zeros(p, p),
            phi: DMatrix::zeros(p, p),
            rep_k: vec![0.0; n_classes],
        }
    }
}

/// Fills `ws` from the free values (row-major representative order).
/// Returns false when a diagonal residual is non-positive, i.e. no
/// positive-definite completion exists for these free values.
fn complete(plan: &CompletionPlan, q: &DMatrix<f64>, free: &[f64], ws: &mut Workspace) -> bool {
    debug_assert_eq!(free.len(), plan.n_free);
    let psi = &mut ws.psi;
    let phi = &mut ws.phi;
    let mut next_free = 0;
    for e in &plan.entries {
        let (i, j) = (e.i, e.j);
        // Contribution of rows above i to K_ij.
        let mut base = 0.0;
        for k in 0..i {
            base += phi[(k, i)] * phi[(k, j)];
        }
        if i == j {
            match e.kind {
                EntryKind::Free { class } => {
                    let u = free[next_free];
                    next_free += 1;
                    psi[(j, j)] = u;
                    phi[(j, j)] = u * q[(j, j)];
                    ws.rep_k[class] = base + phi[(j, j)] * phi[(j, j)];
                }
                EntryKind::Follow { class } => {
                    let disc = ws.rep_k[class] - base;
                    if disc <= 0.0 {
                        return false;
                    }
                    phi[(j, j)] = disc.sqrt();
                    psi[(j, j)] = phi[(j, j)] / q[(j, j)];
                }
                EntryKind::Zero => unreachable!("diagonal positions always carry a vertex class"),
            }
        } else {
            match e.kind {
                EntryKind::Free { class } => {
                    let u = free[next_free];
                    next_free += 1;
                    psi[(i, j)] = u;
                    let mut f = 0.0;
                    for l in i..=j {
                        f += psi[(i, l)] * q[(l, j)];
                    }
                    phi[(i, j)] = f;
                    ws.rep_k[class] = base + phi[(i, i)] * phi[(i, j)];
                }
                EntryKind::Follow { .. } | EntryKind::Zero => {
                    let target = match e.kind {
                        EntryKind::Follow { class } => ws.rep_k[class],
                        _ => 0.0,
                    };
                    let f = (target - base) / phi[(i, i)];
                    phi[(i, j)] = f;
                    let mut partial = 0.0;
                    for l in i..j {
                        partial += psi[(i, l)] * q[(l, j)];
                    }
                    psi[(i, j)] = (f - partial) / q[(j, j)];
                }
            }
        }
    }
    true
}

/// Outcome of one Ψ proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    Rejected,
    /// Rejected because no positive-definite completion existed.
    CompletionFailed,
}

/// Persistent state of a Ψ chain: the plan, the factor Q, the current
/// completed configuration, and a spare workspace for proposals.
pub struct PsiState {
    plan: CompletionPlan,
    q: DMatrix<f64>,
    delta: f64,
    cur: Workspace,
    prop: Workspace,
    free_buf: Vec<f64>,
    log_target: f64,
}

impl PsiState {
    /// Builds the chain state at K(θ0), which must lie in the cone.
    pub fn new(spec: &RconSpec, params: &CgwParams, theta0: &DVector<f64>) -> Result<Self> {
        let p = spec.p();
        let plan = CompletionPlan::new(spec);

        // D^{-1} = QᵗQ with Q upper triangular, positive diagonal.
        let d_inv = linalg::spd_inverse(params.d_mat(), "D in PsiState")?;
        let q = linalg::cholesky(d_inv, "D^{-1} in PsiState")?.l().transpose();

        // Ψ0 from K0: W = Q^{-ᵗ} K0 Q^{-1}, Ψ0 = (lower Cholesky of W)ᵗ.
        let k0 = k_of_theta(spec, theta0)?;
        let qt = q.transpose();
        let y = qt
            .solve_lower_triangular(&k0)
            .ok_or_else(|| Error::NotPositiveDefinite { context: "Q in PsiState".into() })?;
        let w = qt
            .solve_lower_triangular(&y.transpose())
            .ok_or_else(|| Error::NotPositiveDefinite { context: "Q in PsiState".into() })?
            .transpose();
        // Symmetrize before factoring; the solves leave ~1e-16 asymmetry.
        let w = (&w + w.transpose()) * 0.5;
        let psi0 = linalg::cholesky(w, "initial K outside the cone")?.l().transpose();

        // Route the start through the standard completion so every cached
        // quantity comes from one code path.
        let mut free = Vec::with_capacity(plan.n_free);
        for e in &plan.entries {
            if let EntryKind::Free { .. } = e.kind {
                free.push(psi0[(e.i, e.j)]);
            }
        }
        let mut cur = Workspace::zeros(p, plan.n_classes);
        if !complete(&plan, &q, &free, &mut cur) {
            return Err(Error::OutsideCone { context: "initial Ψ completion".into() });
        }
        debug_assert!((&cur.psi - &psi0).amax() < 1e-8, "completion must reproduce Ψ0");

        let delta = params.delta();
        let log_target = log_target_of(&plan, delta, &cur.psi);
        let prop = cur.clone();
        Ok(Self {
            plan,
            q,
            delta,
            cur,
            prop,
            free_buf: free,
            log_target,
        })
    }

    /// Draws a full Bartlett proposal, completes it, and runs the MH
    /// accept/reject against the current configuration.
    pub fn propose_and_accept(&mut self, rng: &mut ChaCha8Rng) -> StepOutcome {
        self.free_buf.clear();
        for e in &self.plan.entries {
            if let EntryKind::Free { .. } = e.kind {
                if e.i == e.j {
                    let df = self.delta + self.plan.free_offdiag_in_row[e.i];
                    let chi2 = ChiSquared::new(df).expect("df > 0");
                    self.free_buf.push(chi2.sample(rng).sqrt());
                } else {
                    self.free_buf.push(rng.sample(StandardNormal));
                }
            }
        }
        if !complete(&self.plan, &self.q, &self.free_buf, &mut self.prop) {
            return StepOutcome::CompletionFailed;
        }
        let cand = log_target_of(&self.plan, self.delta, &self.prop.psi);
        let log_ratio = cand - self.log_target;
        // A NaN ratio (overflowed completion) compares false, hence rejects.
        let u: f64 = rng.random();
        if u < log_ratio.exp().min(1.0) {
            std::mem::swap(&mut self.cur, &mut self.prop);
            self.log_target = cand;
            StepOutcome::Accepted
        } else {
            StepOutcome::Rejected
        }
    }

    /// θ of the current configuration (class representative K values).
    pub fn theta(&self) -> DVector<f64> {
        DVector::from_vec(self.cur.rep_k.clone())
    }

    /// Cached working log density (target × Jacobian ÷ proposal, constants
    /// dropped).
    pub fn log_target(&self) -> f64 {
        self.log_target
    }

    /// Re-derives the working log density from the current Ψ.
    pub fn recompute_log_target(&self) -> f64 {
        log_target_of(&self.plan, self.delta, &self.cur.psi)
    }

    /// Current K, reconstructed as Qᵗ(ΨᵗΨ)Q. Used by tests and diagnostics;
    /// estimation paths read θ instead.
    pub fn current_k(&self) -> DMatrix<f64> {
        let phi = &self.cur.phi;
        phi.transpose() * phi
    }
}

/// log target − log proposal at Ψ, all Ψ-independent constants dropped:
///
/// ```text
///   Σ_i (δ − 2 + r_i) ln ψ_ii − ½ Σ_{i≤j} ψ_ij²          (target × Jacobian)
/// − Σ_{free diag i} [(δ + ν_i − 1) ln ψ_ii − ½ ψ_ii²]
/// − Σ_{free offdiag (i,j)} [−½ ψ_ij²]                     (proposal)
/// ```
fn log_target_of(plan: &CompletionPlan, delta: f64, psi: &DMatrix<f64>) -> f64 {
    let mut val = 0.0;
    for i in 0..plan.p {
        val += (delta - 2.0 + plan.row_exponents[i]) * psi[(i, i)].ln();
        for j in i..plan.p {
            val -= 0.5 * psi[(i, j)] * psi[(i, j)];
        }
    }
    for e in &plan.entries {
        if let EntryKind::Free { .. } = e.kind {
            let x = psi[(e.i, e.j)];
            if e.i == e.j {
                let df = delta + plan.free_offdiag_in_row[e.i];
                val -= (df - 1.0) * x.ln() - 0.5 * x * x;
            } else {
                val += 0.5 * x * x;
            }
        }
    }
    val
}
