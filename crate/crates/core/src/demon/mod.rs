//! The Maxwell-demon layer.
//!
//! The output modes are split into halves `A` and `B` and one mode of each is
//! measured. A passive demon only records `Delta n = n_A - n_B`; an active demon
//! first relabels the halves so that `A` holds at least as many photons as `B`.
//! This module also converts photon numbers to effective temperatures and
//! implements the mode-randomisation and configuration-sweep protocols used to
//! separate detector bias from the demon's effect.

mod config;
mod delta_n;
mod protocols;
mod temperature;

pub use config::{DemonMode, ModeConfiguration};
pub use delta_n::{
    aggregate_delta_n, delta_n_active, delta_n_distribution, delta_n_exact, delta_n_of,
    delta_n_passive, DeltaNDistribution, SubsetMeans, WeightedCounts,
};
pub use protocols::{
    configuration_sweep, equilibration_analytic, equilibration_ensemble, equilibration_pipeline,
    randomized_partition_estimate, subset_temperatures, EquilibrationSummary, MarginalSummary,
    RandomizedEstimate, SubsetDensity, SweepRow,
};
pub use temperature::{
    effective_temperature, fit_temperature, photon_energy_from_wavelength_nm, thermal_marginal,
    FitBounds, TemperatureFit, TemperatureReport, BOLTZMANN, DEFAULT_WAVELENGTH_NM, PLANCK,
    SPEED_OF_LIGHT,
};
