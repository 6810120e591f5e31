//! Trivariate bicycle (TB) quantum LDPC codes with weight-4 checks.
//!
//! The crate builds TB codes from monomial specifications, computes their
//! parameters and logical operators, generates syndrome-extraction memory
//! circuits, samples them under circuit-level depolarizing noise and decodes
//! the X and Z matching graphs with minimum-weight perfect matching.
//!
//! Numeric types that carry probabilities or weights are generic over
//! [`Real`] (`f32` or `f64`); the aliases at the crate root fix them to `f64`.

pub mod circuits;
pub mod codes;
pub mod decode;
pub mod error;
pub mod f2la;
pub mod harness;
pub mod logicals;
mod rng;
mod scalar;
pub mod sim;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use f2la::BitMatrix;
pub use scalar::Real;

pub use codes::{StabilizerCode, TBCodeSpec};
pub use logicals::{LogicalBasis, PauliOp};

pub type DetectorErrorModel = sim::DetectorErrorModel<f64>;
pub type FaultMechanism = sim::FaultMechanism<f64>;
pub type MatchingGraph = decode::MatchingGraph<f64>;
pub type MatchingDecoder = decode::MatchingDecoder<f64>;
pub type ExperimentResult = harness::ExperimentResult<f64>;
pub type RateFit = harness::RateFit<f64>;

/// Pauli type of a check, logical operator or measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub fn other(self) -> Basis {
        match self {
            Basis::X => Basis::Z,
            Basis::Z => Basis::X,
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Basis::X),
            "z" | "Z" => Ok(Basis::Z),
            _ => Err(Error::validation(format!("unknown basis '{s}'"))),
        }
    }
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Basis::X => "X",
            Basis::Z => "Z",
        })
    }
}
