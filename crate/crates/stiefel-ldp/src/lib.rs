//! Numerical large-deviation machinery for multi-dimensional random
//! projections of high-dimensional measures.
//!
//! The crate provides four layers, mirrored by its modules:
//!
//! * [`samplers`] — exact random generation: Haar frames on the Stiefel
//!   manifold via the Bartlett decomposition, generalized p-normal scalars,
//!   cone and ball measures on scaled lp spheres, and the projection map.
//! * [`measures`] — empirical measures of frame rows, the covariance map,
//!   the Gram–Schmidt/Cholesky map Γ, Wasserstein convergence diagnostics,
//!   and the entropy functionals on Gaussian measures.
//! * [`ratefn`] — log moment-generating functions, numerical Legendre
//!   conjugation, the quenched and annealed rate functions, and the
//!   variational formula linking them through the entropy functional.
//! * [`mcverify`] — seeded Monte Carlo experiments confronting sampled
//!   systems with the analytic rates: tail-rate estimation with exponential
//!   tilting, the strong law for row-empirical measures, finite-n log-mgf
//!   estimates, and chi-moment checks.
//!
//! The [`cli`] module wires JSON experiment specs to these layers; the
//! `stiefel-ldp` binary is a thin front end over it. Runnable walkthroughs
//! of each capability live in the crate's `examples/` directory.
//!
//! Everything is deterministic under a fixed 64-bit seed: samplers take
//! explicit [`rng::Stream`]s, and parallel reductions are ordered.

pub mod cli;
pub mod error;
pub mod family;
pub mod mcverify;
pub mod measures;
pub mod quad;
pub mod ratefn;
pub mod rng;
pub mod samplers;
pub mod selftest;
pub mod special;

pub use error::{Error, Result};
pub use family::MeasureFamily;
