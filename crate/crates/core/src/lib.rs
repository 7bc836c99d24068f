//! Exact multiphoton interference through linear-optical networks, Haar-ensemble
//! averages via the unitary Weingarten calculus, and a photonic Maxwell demon
//! built on top of them.
//!
//! The crate is organised bottom-up:
//!
//! * [`haar_unitary`]: unitary matrices, Haar sampling and unitary algebra.
//! * [`symmetric_group`]: partitions, permutations, characters and Weingarten values.
//! * [`interference`]: outcome probabilities for a fixed interferometer.
//! * [`haar_average`]: analytic and empirical Haar-averaged outcome laws.
//! * [`demon`]: photon-number imbalance, temperatures and bias-mitigation protocols.
//! * [`ensemble`]: finite-ensemble Monte Carlo with detector miscalibration.
//! * [`io`] and [`cli`]: file formats and the command-line front end.

pub mod cli;
pub mod demon;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod haar_average;
pub mod haar_unitary;
pub mod interference;
pub mod io;
pub mod symmetric_group;

pub use error::{Error, Result};
pub use exec::Execution;
pub use haar_unitary::{RandomSeed, UnitaryMatrix};
pub use interference::{
    DistinguishabilityModel, InputConfiguration, OccupationVector, OutcomeDistribution,
    PhotonStatistics,
};
