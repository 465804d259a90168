//! Sequential-measurement statistics for small quantum systems.
//!
//! The crate treats a two-observable joint probability as the statistics of
//! an *ordered* pair of measurements — project, renormalize, measure again —
//! and follows that reading through four layers:
//!
//! - [`hilbert`]: dense complex matrices, state vectors, and spectral
//!   projectors for dimensions up to 16;
//! - [`sequential`]: Born probabilities, projective collapse, conditional
//!   probabilities, ordered joint tables, and the order-symmetry gap;
//! - [`eprbohm`]: the two-qubit singlet, angle-parameterized ±1 observables
//!   per tensor leg, correlations, and Bell/CHSH inequality reports;
//! - [`eventsim`]: an event-by-event coincidence simulation with click-time
//!   jitter, a time window Δ, detector losses, and a locality-respecting
//!   branch sampler;
//! - [`kolmogorov`]: LP feasibility of extending a family of pairwise ±1
//!   distributions to a single joint probability measure.

#![allow(clippy::needless_range_loop)]

pub mod eprbohm;
pub mod error;
pub mod eventsim;
pub mod hilbert;
pub mod kolmogorov;
pub mod sequential;

pub use error::{Error, Result};
