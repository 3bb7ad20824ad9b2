//! Spectral statistics laboratory for Wigner random matrices.
//!
//! The crate generates real symmetric Wigner ensembles, evaluates
//! semicircle-law reference quantities (density, distribution, Stieltjes
//! transform, classical quantiles), checks exact resolvent identities, and
//! runs reproducible Monte Carlo campaigns measuring how fast empirical
//! spectral statistics approach their limits: Kolmogorov distances,
//! local-law fluctuations, eigenvalue rigidity, and eigenvector
//! delocalization.
//!
//! Entry points:
//! - [`ensemble::sample_wigner`] draws one matrix,
//! - [`spectral::eigendecompose`] and friends compute resolvent data,
//! - [`lawcheck`] holds the statistical verdicts,
//! - [`harness::run_campaign`] runs deterministic parallel campaigns.

pub mod ensemble;
pub mod error;
pub mod harness;
pub mod lawcheck;
pub mod plot;
pub mod quadrature;
pub mod rng;
pub mod semicircle;
pub mod spectral;

pub use error::{Error, Result};
