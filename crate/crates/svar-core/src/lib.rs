//! Cumulants of the Bessel-corrected sample variance for general (dependent,
//! non-identically-distributed) processes, plus truncated Gram-Charlier A and
//! Edgeworth approximations of its distribution.
//!
//! The crate is organised around a single joint-moment oracle
//! ([`process::ProcessModel`]) from which everything else is computed:
//!
//! * [`symmetric`] — symmetric moment estimators `(mu'_...)_k`, averages of
//!   joint moments over distinct-index tuples,
//! * [`algebra`] — exact expansion of `E[(s_n^2)^m]` (m = 1..4) into those
//!   estimators, derived from first principles in integer arithmetic,
//! * [`cumulants`] — the two cumulant engines (moment route and coefficient-
//!   table route) and their residual diagnostics,
//! * [`expansion`] — Hermite/Bell machinery and the truncated density/CDF
//!   series,
//! * [`oracles`] — independent ground truth: exact enumeration for finite
//!   supports, a Monte Carlo AR(1) simulator, and the chi-squared/Gamma
//!   closed form for i.i.d. normal samples,
//! * [`checks`] — the oracle-equivalence validation suite used by the CLI.
//!
//! The crate is `no_std` (with `alloc`); all transcendental math goes through
//! `libm` so results are bit-identical regardless of the host `std`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algebra;
pub mod checks;
pub mod cumulants;
pub mod error;
pub mod expansion;
pub mod numeric;
pub mod oracles;
pub mod pattern;
pub mod process;
pub mod symmetric;
pub mod tables;

pub use cumulants::{chisq_exactness_check, CumulantSet, Engine, MomentSet, Residuals};
pub use error::Error;
pub use expansion::{ExpansionKind, ExpansionSpec};
pub use oracles::{ExactLaw, McSummary};
pub use pattern::ExponentPattern;
pub use process::ProcessModel;
pub use symmetric::SymmetricMomentTable;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
