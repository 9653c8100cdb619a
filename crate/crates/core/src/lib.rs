//! Classical simulation of Shor's factoring algorithm.
//!
//! The crate runs the full classical/quantum factoring loop for desk-scale
//! moduli. The period-finding step is simulated exactly on a sparse
//! two-register state and cross-checked against the analytic outcome
//! distribution. Periods are recovered from continued-fraction convergents.

pub mod bounds;
pub mod cli;
pub mod continued_fraction;
pub mod engine;
pub mod error;
pub mod montecarlo;
pub mod number_theory;
pub mod pipeline;
pub mod replicate;
pub mod serialize;

pub use error::{Error, Result};
