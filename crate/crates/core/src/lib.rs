//! Estimation of coloured graphical Gaussian (RCON) precision matrices.
//!
//! An RCON model constrains a Gaussian precision matrix K in two ways: K_ij
//! is zero whenever (i, j) is not an edge of a given graph, and entries are
//! equal within vertex colour classes (diagonal) and edge colour classes
//! (off-diagonal). The admissible set is the open cone of positive-definite
//! matrices satisfying both constraint families, parameterized linearly by
//! one value per colour class: θ ∈ R^{T+S} with K(θ) = Σ_r θ_r δ_r.
//!
//! The crate implements a distributed Bayesian estimator of K: every vertex
//! samples the coloured G-Wishart posterior of a small relaxed model over its
//! one-hop or two-hop neighbourhood, and the local posterior means are
//! averaged class-by-class into a global estimate. Global Bayesian and
//! (distributed) maximum-likelihood baselines, the asymptotic covariance of
//! the combined estimator, and a simulation benchmark harness round out the
//! toolkit.
//!
//! Module map:
//!
//! * [`graph`] — coloured graphs, validation, neighbourhoods, buffer split,
//!   relaxed local models;
//! * [`rcon`] — θ ↔ K bijection, cone membership, sufficient statistics,
//!   cumulant function and derivatives, Gaussian simulation;
//! * [`sampler`] — coloured G-Wishart Metropolis–Hastings samplers (θ-space
//!   random walk and the Cholesky/Ψ sampler in [`psi`]);
//! * [`mle`] — Fisher scoring for RCON maximum likelihood;
//! * [`estimator`] — local estimation, the combination map, distributed and
//!   global estimators;
//! * [`asymptotic`] — asymptotic covariance of the combined estimator;
//! * [`bench`] — scenarios, NMSE, experiment runner, normality check,
//!   conditioning diagnostics.

pub mod asymptotic;
pub mod bench;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod linalg;
pub mod mle;
pub mod psi;
pub mod rcon;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
