//! Stabilizer simulation: a symbolic tableau for reference outcomes, a
//! Pauli-frame sampler for Monte Carlo, and detector error model extraction.

mod dem;
mod frame;
mod tableau;

pub use dem::{extract_dem, DetectorErrorModel, FaultMechanism};
pub use frame::{sample, Sampler, ShotMatrix, BATCH_SHOTS};
pub use tableau::{simulate_tableau, TableauOutcome};

pub(crate) use dem::xor_prob;
