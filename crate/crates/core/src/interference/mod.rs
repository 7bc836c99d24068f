//! Exact outcome probabilities for a fixed interferometer.
//!
//! Three routes are provided: the general double permutation sum over a Gram
//! matrix of internal-state overlaps, and the permanent-based specialisations
//! for fully indistinguishable and fully distinguishable photons. The
//! specialisations must agree with the general sum at the corresponding Gram
//! matrices; tests and the acceptance suite check that they do.

mod distinguishability;
mod distribution;
mod occupation;
mod permanent;
mod probability;

pub use distinguishability::{DistinguishabilityModel, GramFile, PhotonStatistics, GRAM_TOL};
pub use distribution::{
    full_distribution, marginal_mode_distribution, mean_photon_numbers, OutcomeDistribution,
};
pub use occupation::{binomial, enumerate_outcomes, symmetry_factor, InputConfiguration, OccupationVector};
pub use permanent::{permanent, permanent_brute_force, MAX_PERMANENT_SIZE};
pub use probability::{
    hom_visibility_bound, outcome_probability, outcome_probability_dist,
    outcome_probability_general, outcome_probability_indist, transfer_matrix, MAX_GENERAL_PHOTONS,
};
