//! Energy-efficiency optimization for a single-antenna user whose antenna can
//! be repositioned along a line segment.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: field-response channel model, closed-form gain expansion,
//!   analytic derivatives and the curvature bound used by the Taylor surrogates.
//! - [`ee`]: SNR, movement energy, throughput and energy efficiency under a
//!   maximum-ratio transmit beamformer, plus the movement-free upper bound.
//! - [`solver`]: Dinkelbach outer loop with successive convex approximation
//!   steps for the antenna position.
//! - [`bench`]: grid-search oracle and the comparison schemes.
//! - [`harness`]: configuration, seeded Monte-Carlo sweeps and CSV output.
//! - [`cli`]: the `maee` command-line front end.

pub mod bench;
pub mod channel;
pub mod check;
pub mod cli;

pub mod ee;
pub mod error;
pub mod harness;
pub mod instance;

pub mod params;
pub mod search;
pub mod solver;

pub use channel::{GainExpansion, PathAngles, PathResponseMatrix};
pub use ee::EeBreakdown;
pub use error::{Error, Result};
pub use params::SystemParams;
pub use solver::{SolverOptions, SolverReport, SolverState, SolverStatus};
