//! Inverse-probability-weighted estimation and Monte Carlo evidence
//! estimation, with a reproducible benchmark harness.
//!
//! The crate has three layers:
//!
//! * **Survey estimators** ([`ipw`]): Horvitz-Thompson, Hajek, the
//!   Trotter-Tukey mixture, adaptive normalization, and the
//!   auxiliary-information ratio estimator, all over a validated
//!   [`ipw::WeightedSample`].
//! * **Simulation models and evidence estimators**: the high-dimensional
//!   missing-data model and its posterior-mean / binned-smoothed
//!   estimators ([`wasserman`]), importance-sampling and Riemann/vertical
//!   quadrature rules ([`evidence`]), and the semiparametric
//!   normalizing-constant solver ([`semiparam`]).
//! * **Benchmarks** ([`harness`]): seeded, replicate-parallel experiments
//!   that emit tidy CSV and reproduce the estimator comparisons and
//!   convergence-rate studies, byte-identically across reruns and worker
//!   counts.
//!
//! Randomness always flows through [`stream::RandomStream`], a
//! counter-based generator addressed by `(seed, stream_id)`, so replicate
//! `r` can be given stream `r` no matter which thread runs it.
//!
//! ## Quick taste
//!
//! ```
//! use ipwmc::ipw::{hajek, horvitz_thompson, Estimand, WeightedSample};
//!
//! let s = WeightedSample::fully_observed(vec![1.0, 0.0], vec![0.5, 0.5])?;
//! assert_eq!(horvitz_thompson(&s, Estimand::Mean)?.estimate, 1.0);
//! assert_eq!(hajek(&s, Estimand::Mean)?.estimate, 0.5);
//! # Ok::<(), ipwmc::ipw::IpwError>(())
//! ```
//!
//! The `examples/` directory holds one runnable program per capability:
//!
//! * `basu_circus` - the skewed one-draw design and the ratio-estimator fix
//! * `wasserman_mse` - the four-estimator mean-squared-error comparison
//! * `importance_sampling` - plain/self-normalized/regression/difference
//!   estimators and their variances
//! * `riemann_rates` - variance-decay slopes of the quadrature schemes
//! * `nested_quadrature` - vertical-likelihood integration on the built-in
//!   problems
//! * `normalizing_constants` - the iterative-scaling solver
//! * `replicate_streams` - seeded streams and mergeable summaries
//!
//! A thin `ipwmc` binary exposes the same experiments as subcommands; see
//! the README for flags and file formats.

pub mod evidence;
pub mod harness;
pub mod ipw;
pub mod semiparam;
pub mod stream;
pub mod summary;
pub mod wasserman;

pub use stream::RandomStream;
pub use summary::SummaryAccumulator;
