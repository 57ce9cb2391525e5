//! Distribution estimation for alternating Markov chains.
//!
//! A repetition channel copies every symbol of an i.i.d. source a random
//! number of times. Collapsing runs removes the channel's effect and leaves an
//! *alternating* sequence, a Markov chain that never repeats a symbol. This
//! crate provides:
//!
//! - [`combinatorics`]: runs, patterns, profiles, partition counts and the
//!   class sizes `L(ψ)` that drive the estimators;
//! - [`prob`]: sequence and pattern probabilities under i.i.d. sources, exact
//!   or in floating point, and a numeric search for the best-case pattern
//!   probability;
//! - [`estimators`]: the block estimator and its horizon-dependent and
//!   doubling-trick sequential versions;
//! - [`channel`]: source and channel simulation, run-count concentration;
//! - [`recovery`]: transition estimation and inversion back to the source
//!   distribution;
//! - [`redundancy`]: Shtarkov sums, measured redundancy and the analytic
//!   bounds.

pub mod channel;
pub mod codec;
pub mod combinatorics;
pub mod error;
pub mod estimators;
pub mod guard;
pub mod prob;
pub mod recovery;
pub mod redundancy;

pub use error::{Error, Result};
pub use guard::Guard;

/// Version tag embedded in machine-readable output.
pub const SCHEMA_VERSION: &str = "altchain/1";
