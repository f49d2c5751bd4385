//! Local search for submodular maximization under k-parity constraints.
//!
//! The combinatorial layer (`matroid`, `kparity`, `exchange`) is scalar-free.
//! Everything that handles values is generic over [`Scalar`], with `f64` and
//! `f32` aliases below.

pub mod analysis;
pub mod bench;
pub mod error;
pub mod exchange;
pub mod kparity;
pub mod matroid;
pub mod nonmonotone;
pub mod objective;
pub mod scalar;
pub mod sets;
pub mod solver;

pub use error::{Error, Result};
pub use kparity::KParityConstraint;
pub use matroid::{ConcreteMatroid, MatroidOracle};
pub use objective::{ConcreteObjective, ObjectiveClass, ValueOracle};
pub use scalar::Scalar;
pub use solver::{RunMode, SolverConfig};

pub type Objective64 = objective::ConcreteObjective<f64>;
pub type Objective32 = objective::ConcreteObjective<f32>;
pub type RunTrace64 = solver::RunTrace<f64>;
pub type RunTrace32 = solver::RunTrace<f32>;
pub type ChargingReport64 = analysis::ChargingReport<f64>;
pub type ChargingReport32 = analysis::ChargingReport<f32>;
pub type InstanceSpec64 = bench::InstanceSpec<f64>;
pub type InstanceSpec32 = bench::InstanceSpec<f32>;
pub type Instance64 = bench::Instance<f64>;
pub type Instance32 = bench::Instance<f32>;
