//! Asymptotic covariance of the distributed Bayesian estimator.
//!
//! As n → ∞ each local posterior mean behaves like the local MLE:
//! √n(θ̃^i − θ0^i) = (F^i)^{-1}·√n(Ȳ^i − μ^i) + o_P(1), where F^i is the
//! local Fisher information at the local truth θ0^i. Stacking all vertices,
//! the sufficient statistics are quadratic forms of the *same* Gaussian
//! sample, so every cross-covariance reduces via Isserlis' theorem to traces
//! against the global Σ0 = K(θ0)^{-1}:
//!
//! ```text
//! Cov(Y^i_q, Y^k_m) = ½·tr(δ̃^i_q Σ0 δ̃^k_m Σ0) =: C^{ik}_{qm},
//! ```
//!
//! with δ̃ the local indicator embedded at global coordinates. The block
//! covariance of the stacked √n(θ̄ − θ̄0) is Ḡ^{ik} = (F^i)^{-1}C^{ik}(F^k)^{-1}
//! — whose diagonal blocks collapse to (F^i)^{-1}, since restricting Σ0 to
//! N_i×N_i gives exactly the local model's covariance, making C^{ii} = F^i.
//! The combiner is linear with constant weights J, and g(θ̄0) = θ0 because
//! preserved entries of the marginal precision equal the global ones, so
//!
//! ```text
//! √n(θ̃ − θ0) → N(0, A),    A = J·Ḡ·Jᵗ.
//! ```
//!
//! Everything here is computed from Σ0 alone — no simulation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimator::{build_combine_plan, CombineMode, CombinePlan};
use crate::graph::{local_model, ColouredGraph, LocalModel};
use crate::linalg;
use crate::rcon::{build_spec, cumulant, k_of_theta, theta_of_k, RconSpec};

/// The Theorem-1 covariance and its ingredients.
#[derive(Debug, Clone)]
pub struct AsymptoticCov {
    /// Covariance of the stacked local estimates, blocks (i,k).
    pub gbar: DMatrix<f64>,
    /// Constant combiner weights: rows = global classes, columns = stacked
    /// local parameters.
    pub jac: DMatrix<f64>,
    /// A = jac · gbar · jacᵗ.
    pub a: DMatrix<f64>,
    /// Column offset of each vertex's block in the stacked parameter vector.
    pub offsets: Vec<usize>,
}

/// Per-vertex ingredients kept while assembling Ḡ.
struct LocalPieces {
    model: LocalModel,
    spec: RconSpec,
    /// (F^i)^{-1}.
    fisher_inv: DMatrix<f64>,
    /// Mirrored global positions of each local class: off-diagonals appear
    /// in both orders, matching the indicator matrix δ̃.
    positions: Vec<Vec<(usize, usize)>>,
}

/// Computes A for the distributed estimator with the given neighbourhood
/// radius and combining mode, at the true parameter θ0.
pub fn asymptotic_cov(
    g: &ColouredGraph,
    theta0: &DVector<f64>,
    hops: u8,
    mode: CombineMode,
) -> Result<AsymptoticCov> {
    let spec = build_spec(g);
    let k0 = k_of_theta(&spec, theta0)?;
    let sigma0 = linalg::spd_inverse(&k0, "K(theta0) in asymptotic_cov")
        .map_err(|_| Error::OutsideCone { context: "theta0 in asymptotic_cov".into() })?;

    // Local truths, Fisher informations, and embedded class positions.
    let mut pieces = Vec::with_capacity(g.p());
    let mut offsets = Vec::with_capacity(g.p());
    let mut total = 0usize;
    for i in 0..g.p() {
        let model = local_model(g, i, hops)?;
        let lspec = build_spec(&model.local_graph);
        // Local truth: θ of the exact marginal precision 𝒦^i.
        let sigma_local = sigma0.select_rows(model.vertices.iter()).select_columns(model.vertices.iter());
        let k_local = linalg::spd_inverse(&sigma_local, "marginal precision")?;
        let theta0_local = theta_of_k(&lspec, &k_local, 1e-6)?.theta;
        let c = cumulant(&lspec, &theta0_local)?;
        let fisher_inv = linalg::spd_inverse(&c.fisher, "local Fisher information")
            .map_err(|_| Error::SingularInformation { context: format!("vertex {i}") })?;

        let positions: Vec<Vec<(usize, usize)>> = lspec
            .classes()
            .iter()
            .map(|class| {
                let mut mirrored = Vec::with_capacity(2 * class.positions.len());
                for &(a, b) in &class.positions {
                    let (ga, gb) = (model.vertices[a], model.vertices[b]);
                    mirrored.push((ga, gb));
                    if ga != gb {
                        mirrored.push((gb, ga));
                    }
                }
                mirrored
            })
            .collect();

        offsets.push(total);
        total += lspec.n_params();
        pieces.push(LocalPieces { model, spec: lspec, fisher_inv, positions });
    }

    // C blocks, then Ḡ^{ik} = (F^i)^{-1} C^{ik} (F^k)^{-1}.
    let mut gbar = DMatrix::zeros(total, total);
    for i in 0..g.p() {
        for k in i..g.p() {
            let (pi, pk) = (&pieces[i], &pieces[k]);
            let (si, sk) = (pi.spec.n_params(), pk.spec.n_params());
            let mut c_block = DMatrix::zeros(si, sk);
            for q in 0..si {
                for m in 0..sk {
                    let mut acc = 0.0;
                    for &(a, b) in &pi.positions[q] {
                        for &(c, d) in &pk.positions[m] {
                            acc += sigma0[(b, c)] * sigma0[(d, a)];
                        }
                    }
                    c_block[(q, m)] = 0.5 * acc;
                }
            }
            let block = &pi.fisher_inv * c_block * &pk.fisher_inv;
            gbar.view_mut((offsets[i], offsets[k]), (si, sk)).copy_from(&block);
            if k > i {
                gbar.view_mut((offsets[k], offsets[i]), (sk, si))
                    .copy_from(&block.transpose());
            }
        }
    }

    // Combiner weights as a constant linear map.
    let models: Vec<&LocalModel> = pieces.iter().map(|p| &p.model).collect();
    let plan: CombinePlan = build_combine_plan(g, &models);
    let mut jac = DMatrix::zeros(spec.n_params(), total);
    for (class, terms) in plan.contributors.iter().enumerate() {
        let denom = match mode {
            CombineMode::Paper => plan.paper_denoms[class],
            CombineMode::SelfNormalizing => terms.len() as f64,
        };
        for &(i, q) in terms {
            jac[(class, offsets[i] + q)] += 1.0 / denom;
        }
    }

    let a = &jac * &gbar * jac.transpose();
    Ok(AsymptoticCov { gbar, jac, a, offsets })
}
