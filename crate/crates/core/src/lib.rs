//! Riesz weighted-mean summability laboratory.
//!
//! The crate models the normed spaces `X` and `Y` as `R^d` with p-norms and
//! works with series of bounded operators `T_k : X -> Y`. On top of that it
//! offers:
//!
//! * [`summability`] -- Riesz, Cesàro and window-mean transforms, regularity
//!   checks and finite-depth limit verdicts.
//! * [`multiplier`] -- operator series, multiplier sequences, membership in
//!   the multiplier spaces `M`, `M_f`, `M_C`, `M_R`, `CM`, `CM_R`, `M_wR`, the
//!   `H` bound and multiplier probes.
//! * [`summing`] -- the summing operator `x -> R-sum T_k x_k`, its norm,
//!   continuity witness and tail-decay profile.
//! * [`orlicz_pettis`] -- weak versus strong comparison and the
//!   Antosik–Mikusiński test matrix.
//! * [`oracle`] -- brute-force reference implementations.
//! * [`experiments`] -- scenario configuration, built-in suite and reports.
//!
//! Every verdict is finite-depth evidence and carries the depth and residual
//! it was computed at.

pub mod compensated;
pub mod error;
pub mod experiments;
pub mod multiplier;
pub mod oracle;
pub mod orlicz_pettis;
pub mod rng;
pub mod space;
pub mod summability;
pub mod summing;

pub use error::{LabError, Result};
pub use space::{FiniteVector, Functional, LinearOperator, NormKind};
pub use summability::{ConvergenceVerdict, RieszWeights, TruncationSchedule, VerdictKind};
