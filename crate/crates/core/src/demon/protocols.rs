use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::delta_n::WeightedCounts;
use super::temperature::{effective_temperature, TemperatureReport};
use super::{DemonMode, ModeConfiguration};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::haar_average::haar_average_analytic;
use crate::haar_unitary::{compose, embed_unitary, sample_haar, RandomSeed, UnitaryMatrix};
use crate::interference::{
    full_distribution, marginal_mode_distribution, InputConfiguration, PhotonStatistics,
};
use crate::symmetric_group::WeingartenCache;

pub const ROUND_STREAM_BIT: u64 = 1 << 62;

/// Which photon number feeds a subset's temperature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetDensity {
    /// Mean photon total of the subset divided by its number of modes.
    #[default]
    SubsetTotal,
    /// Mean photon number of the subset's measured mode.
    MeasuredMode,
}

/// Temperatures of subsets `A` and `B`, after the demon's feedback when `mode` is active.
pub fn subset_temperatures(
    counts: &WeightedCounts,
    config: &ModeConfiguration,
    photon_energy: f64,
    mode: DemonMode,
    density: SubsetDensity,
) -> Result<(TemperatureReport, TemperatureReport)> {
    let means = counts.subset_means(config, mode)?;
    let half = config.subset_a().len() as f64;
    let (da, db) = match density {
        SubsetDensity::SubsetTotal => (means.total_a / half, means.total_b / half),
        SubsetDensity::MeasuredMode => (means.measured_a, means.measured_b),
    };
    Ok((
        effective_temperature(da.max(0.0), photon_energy)?,
        effective_temperature(db.max(0.0), photon_energy)?,
    ))
}

fn check_sources(sources: &[WeightedCounts]) -> Result<usize> {
    let first = sources
        .first()
        .ok_or_else(|| Error::invalid("no per-unitary distributions supplied"))?;
    let m = first.modes();
    if let Some(bad) = sources.iter().find(|s| s.modes() != m || s.photons() != first.photons()) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: bad.modes(),
        });
    }
    Ok(m)
}

/// `<Delta n>` of every unitary under every configuration: `table[unitary][config]`.
fn mean_table(
    sources: &[WeightedCounts],
    configs: &[ModeConfiguration],
    mode: DemonMode,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    exec.try_map(sources.len(), |i| {
        configs
            .iter()
            .map(|c| sources[i].mean_delta_n(c, mode))
            .collect::<Result<Vec<f64>>>()
    })
}

fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomizedEstimate {
    /// Mean over rounds of the ensemble-averaged `<Delta n>`.
    pub mean: f64,
    /// Standard deviation of the per-round ensemble averages.
    pub std_dev: f64,
    pub rounds: usize,
    pub unitaries: usize,
}

/// Mode-randomisation protocol: every round draws, for each unitary, a uniformly
/// random configuration and averages `<Delta n>` over the unitaries.
///
/// Round `r` draws from stream `r | ROUND_STREAM_BIT` of `seed`, clear of the
/// streams used for ensemble unitaries and trials.
pub fn randomized_partition_estimate(
    sources: &[WeightedCounts],
    rounds: usize,
    mode: DemonMode,
    seed: RandomSeed,
    exec: Execution,
) -> Result<RandomizedEstimate> {
    let m = check_sources(sources)?;
    if rounds == 0 {
        return Err(Error::invalid("at least one randomisation round is required"));
    }
    let configs = ModeConfiguration::all(m)?;
    let table = mean_table(sources, &configs, mode, exec)?;
    let round_means = exec.map(rounds, |r| {
        let mut rng = seed.with_stream(r as u64 | ROUND_STREAM_BIT).rng();
        let total: f64 = table
            .iter()
            .map(|row| row[rng.random_range(0..configs.len())])
            .sum();
        total / table.len() as f64
    });
    let (mean, std_dev) = mean_and_sd(&round_means);
    Ok(RandomizedEstimate {
        mean,
        std_dev,
        rounds,
        unitaries: sources.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub config: ModeConfiguration,
    pub mean: f64,
    /// Standard error of the mean across unitaries.
    pub std_error: f64,
}

/// `<Delta n>` averaged over the unitaries for every configuration of [`ModeConfiguration::all`].
pub fn configuration_sweep(
    sources: &[WeightedCounts],
    mode: DemonMode,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    let m = check_sources(sources)?;
    let configs = ModeConfiguration::all(m)?;
    let table = mean_table(sources, &configs, mode, exec)?;
    let k = sources.len() as f64;
    Ok(configs
        .into_iter()
        .enumerate()
        .map(|(c, config)| {
            let column: Vec<f64> = table.iter().map(|row| row[c]).collect();
            let (mean, sd) = mean_and_sd(&column);
            SweepRow {
                config,
                mean,
                std_error: sd / k.sqrt(),
            }
        })
        .collect())
}

/// Mode-0 photon-number laws of the two-stage equilibration experiment.
///
/// Three photons enter modes 0, 1, 2. The first law follows `u3` alone on the
/// three-mode system; the second follows `u3` (extended by a vacuum mode 3) and
/// then `u4`.
pub fn equilibration_pipeline(
    u3: &UnitaryMatrix,
    u4: &UnitaryMatrix,
    statistics: &PhotonStatistics,
) -> Result<(BTreeMap<usize, f64>, BTreeMap<usize, f64>)> {
    if u3.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: u3.dim(),
        });
    }
    if u4.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: u4.dim(),
        });
    }
    let input = InputConfiguration::first(3);
    let first = full_distribution(u3, &input, statistics)?;
    let both = compose(&embed_unitary(u3, 4, 0)?, u4)?;
    let second = full_distribution(&both, &input, statistics)?;
    Ok((
        marginal_mode_distribution(&first, 0)?,
        marginal_mode_distribution(&second, 0)?,
    ))
}

/// Haar-averaged counterpart of [`equilibration_pipeline`]: the mode-0
/// marginals of the `(M, N) = (3, 3)` and `(4, 3)` averages.
pub fn equilibration_analytic(
    statistics: &PhotonStatistics,
    cache: &WeingartenCache,
) -> Result<(BTreeMap<usize, f64>, BTreeMap<usize, f64>)> {
    let first = haar_average_analytic(3, 3, statistics, cache)?;
    let second = haar_average_analytic(4, 3, statistics, cache)?;
    Ok((first.marginal(0)?, second.marginal(0)?))
}

/// Mean and standard deviation across unitaries of `P(n)`, per `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalSummary {
    pub mean: BTreeMap<usize, f64>,
    pub std_dev: BTreeMap<usize, f64>,
}

impl MarginalSummary {
    fn from_samples(samples: &[BTreeMap<usize, f64>]) -> Self {
        let mut mean = BTreeMap::new();
        let mut std_dev = BTreeMap::new();
        for &n in samples[0].keys() {
            let column: Vec<f64> = samples.iter().map(|s| s[&n]).collect();
            let (m, sd) = mean_and_sd(&column);
            mean.insert(n, m);
            std_dev.insert(n, sd);
        }
        MarginalSummary { mean, std_dev }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibrationSummary {
    pub unitaries: usize,
    pub first_stage: MarginalSummary,
    pub second_stage: MarginalSummary,
}

/// Runs [`equilibration_pipeline`] over `k` Haar-random pairs. Pair `i` draws
/// `u3` from stream `2i` and `u4` from stream `2i + 1`.
pub fn equilibration_ensemble(
    k: usize,
    statistics: &PhotonStatistics,
    seed: RandomSeed,
    exec: Execution,
) -> Result<EquilibrationSummary> {
    if k == 0 {
        return Err(Error::invalid("at least one unitary pair is required"));
    }
    let runs = exec.try_map(k, |i| {
        let u3 = sample_haar(3, seed.with_stream(2 * i as u64))?;
        let u4 = sample_haar(4, seed.with_stream(2 * i as u64 + 1))?;
        equilibration_pipeline(&u3, &u4, statistics)
    })?;
    let (first, second): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok(EquilibrationSummary {
        unitaries: k,
        first_stage: MarginalSummary::from_samples(&first),
        second_stage: MarginalSummary::from_samples(&second),
    })
}
