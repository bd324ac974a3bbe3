//! Maximum-likelihood estimation for RCON models by Fisher scoring.
//!
//! The model is a natural exponential family with canonical parameter θ,
//! sufficient statistic Ȳ (see [`crate::rcon::suff_stats`]) and cumulant
//! ψ(θ) = −½log|K(θ)|, so the average log-likelihood is
//!
//! ```text
//! ℓ(θ)/n = θᵗȲ − ψ(θ),    ∇ℓ/n = Ȳ − μ(θ),    ∇²ℓ/n = −F(θ),
//! ```
//!
//! and the MLE solves the moment-matching equations μ(θ̂) = Ȳ. Fisher
//! scoring iterates θ ← θ + F(θ)^{-1}(Ȳ − μ(θ)); because a full step can
//! leave the positive-definite cone (or overshoot), each step is halved —
//! at most [`MAX_HALVINGS`] times — until K(θ) stays in the cone *and* the
//! log-likelihood does not decrease. Non-convergence (e.g. local relaxed
//! models with big buffer blocks and few observations, where the MLE may
//! not exist) is reported through the `converged` flag, not an error; a
//! singular information matrix is an error.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::rcon::{cumulant, k_of_theta, RconSpec, SampleStats};
use crate::sampler::initial_theta;

/// Default convergence tolerance on ‖Ȳ − μ(θ)‖∞.
pub const MLE_TOL: f64 = 1e-8;
/// Default iteration cap.
pub const MLE_MAX_ITER: usize = 200;
/// Step-halving cap per scoring iteration.
const MAX_HALVINGS: u32 = 30;

/// Outcome of a Fisher-scoring fit.
#[derive(Debug, Clone)]
pub struct MleResult {
    pub theta_hat: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// ‖Ȳ − μ(θ̂)‖∞ at the returned point.
    pub final_gradient_norm: f64,
}

/// Average log-likelihood (up to an additive constant) if K(θ) is in the
/// cone.
pub fn avg_loglik(spec: &RconSpec, theta: &DVector<f64>, ybar: &DVector<f64>) -> Option<f64> {
    let k = k_of_theta(spec, theta).ok()?;
    let chol = nalgebra::Cholesky::new(k)?;
    Some(theta.dot(ybar) + 0.5 * crate::linalg::log_det(&chol))
}

/// Fits the RCON MLE by Fisher scoring with cone-guarding step halving.
///
/// `theta_init` defaults to the diagonal-dominant start (vertex classes 1,
/// edge classes 0) and must lie in the cone.
pub fn fit_mle(
    spec: &RconSpec,
    stats: &SampleStats,
    theta_init: Option<&DVector<f64>>,
    tol: f64,
    max_iter: usize,
) -> Result<MleResult> {
    if stats.ybar.len() != spec.n_params() {
        return Err(Error::DimensionMismatch {
            expected: format!("ybar of length {}", spec.n_params()),
            got: format!("{}", stats.ybar.len()),
        });
    }
    let mut theta = match theta_init {
        Some(t) => t.clone(),
        None => initial_theta(spec),
    };
    let ybar = &stats.ybar;
    let mut loglik = avg_loglik(spec, &theta, ybar)
        .ok_or_else(|| Error::OutsideCone { context: "MLE initial point".into() })?;

    let mut grad_norm = f64::INFINITY;
    for it in 0..max_iter {
        let c = cumulant(spec, &theta)?;
        let grad = ybar - &c.mu;
        grad_norm = grad.amax();
        if grad_norm <= tol {
            return Ok(MleResult {
                theta_hat: theta,
                iterations: it,
                converged: true,
                final_gradient_norm: grad_norm,
            });
        }
        let chol = nalgebra::Cholesky::new(c.fisher.clone()).ok_or_else(|| {
            Error::SingularInformation { context: format!("Fisher scoring iteration {it}") }
        })?;
        let direction = chol.solve(&grad);

        // Halve until the step stays in the cone and does not lose
        // likelihood (tiny slack absorbs rounding near the optimum).
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let candidate = &theta + &direction * lambda;
            if let Some(ll) = avg_loglik(spec, &candidate, ybar) {
                if ll >= loglik - 1e-12 {
                    theta = candidate;
                    loglik = ll;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // No usable step remains: report the best point found.
            return Ok(MleResult {
                theta_hat: theta,
                iterations: it,
                converged: false,
                final_gradient_norm: grad_norm,
            });
        }
    }

    // Re-evaluate the gradient at the final point for honest reporting.
    if let Ok(c) = cumulant(spec, &theta) {
        grad_norm = (ybar - &c.mu).amax();
    }
    Ok(MleResult {
        theta_hat: theta,
        iterations: max_iter,
        converged: grad_norm <= tol,
        final_gradient_norm: grad_norm,
    })
}
