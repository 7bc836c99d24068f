//! Finite-ensemble Monte Carlo: Haar-random unitaries, optional finite trial
//! counts, and a multiplicative detector-miscalibration model.
//!
//! Unitary `i` of an ensemble is drawn from stream `i` of the ensemble seed;
//! its trials, when sampled, come from stream `i | 2^63`.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::demon::{
    delta_n_distribution, DeltaNDistribution, DemonMode, ModeConfiguration, WeightedCounts,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::haar_unitary::{sample_haar, RandomSeed, UnitaryMatrix};
use crate::interference::{
    full_distribution, InputConfiguration, OccupationVector, OutcomeDistribution, PhotonStatistics,
};

const TRIAL_STREAM_BIT: u64 = 1 << 63;
/// Slack on the single-mode bound `n_j <= 1` when counting violations.
pub const FLUX_BOUND_TOL: f64 = 1e-10;

/// Per-mode multiplicative scaling of recorded photon counts; all ones is ideal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DetectorModel {
    factors: Vec<f64>,
}

impl DetectorModel {
    pub fn new(factors: Vec<f64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(f) = factors.iter().find(|f| !(**f > 0.0) || !f.is_finite()) {
            return Err(Error::invalid(format!("detector factor {f} must be positive")));
        }
        Ok(DetectorModel { factors })
    }

    pub fn ideal(modes: usize) -> Self {
        DetectorModel {
            factors: vec![1.0; modes],
        }
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn modes(&self) -> usize {
        self.factors.len()
    }

    pub fn is_ideal(&self) -> bool {
        self.factors.iter().all(|&f| f == 1.0)
    }
}

impl TryFrom<Vec<f64>> for DetectorModel {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DetectorModel> for Vec<f64> {
    fn from(d: DetectorModel) -> Self {
        d.factors
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub unitary_index: usize,
    pub outcome: OccupationVector,
}

/// `trials` i.i.d. outcomes drawn from `dist`.
pub fn sample_trials(
    dist: &OutcomeDistribution,
    trials: usize,
    unitary_index: usize,
    seed: RandomSeed,
) -> Result<Vec<TrialRecord>> {
    let sampler = WeightedIndex::new(dist.probabilities())
        .map_err(|e| Error::NumericalConsistency(format!("cannot sample distribution: {e}")))?;
    let mut rng = seed.rng();
    Ok((0..trials)
        .map(|_| TrialRecord {
            unitary_index,
            outcome: dist.entries()[sampler.sample(&mut rng)].0.clone(),
        })
        .collect())
}

/// Relative frequencies of sampled outcomes over all `C(M+N-1, N)` patterns.
pub fn empirical_distribution(
    records: &[TrialRecord],
    modes: usize,
    photons: usize,
) -> Result<OutcomeDistribution> {
    if records.is_empty() {
        return Err(Error::invalid("no trials to tabulate"));
    }
    let mut counts: BTreeMap<&OccupationVector, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(&r.outcome).or_default() += 1;
    }
    let n = records.len() as f64;
    let entries = crate::interference::enumerate_outcomes(modes, photons)
        .into_iter()
        .map(|s| {
            let p = counts.get(&s).copied().unwrap_or(0) as f64 / n;
            (s, p)
        })
        .collect();
    OutcomeDistribution::new(modes, photons, entries)
}

/// Scales the counts of every outcome by the detector factors.
pub fn apply_detector_bias(
    dist: &OutcomeDistribution,
    model: &DetectorModel,
) -> Result<WeightedCounts> {
    WeightedCounts::from(dist).scaled(model.factors())
}

/// Scales per-mode mean photon numbers by the detector factors.
pub fn bias_mean_counts(means: &[f64], model: &DetectorModel) -> Result<Vec<f64>> {
    if means.len() != model.modes() {
        return Err(Error::DimensionMismatch {
            expected: model.modes(),
            found: means.len(),
        });
    }
    Ok(means.iter().zip(model.factors()).map(|(n, f)| n * f).collect())
}

/// Everything that determines a simulated experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub modes: usize,
    pub photons: usize,
    pub unitaries: usize,
    pub statistics: PhotonStatistics,
    pub detector: DetectorModel,
    /// `None` uses each unitary's exact distribution.
    pub trials_per_unitary: Option<usize>,
    pub seed: RandomSeed,
}

impl EnsembleSpec {
    /// Ideal detectors, exact per-unitary distributions, photons in modes `0..N`.
    pub fn new(
        modes: usize,
        photons: usize,
        unitaries: usize,
        statistics: PhotonStatistics,
        seed: RandomSeed,
    ) -> Self {
        EnsembleSpec {
            modes,
            photons,
            unitaries,
            statistics,
            detector: DetectorModel::ideal(modes),
            trials_per_unitary: None,
            seed,
        }
    }

    pub fn with_detector(mut self, detector: DetectorModel) -> Self {
        self.detector = detector;
        self
    }

    pub fn with_trials(mut self, trials: Option<usize>) -> Self {
        self.trials_per_unitary = trials;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.unitaries == 0 {
            return Err(Error::invalid("the ensemble needs at least one unitary"));
        }
        if self.modes == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if self.photons > self.modes {
            return Err(Error::InvalidConfiguration(format!(
                "{} photons do not fit one per input mode in {} modes",
                self.photons, self.modes
            )));
        }
        if self.detector.modes() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: self.detector.modes(),
            });
        }
        if self.trials_per_unitary == Some(0) {
            return Err(Error::invalid("trials per unitary must be positive"));
        }
        Ok(())
    }

    pub fn input(&self) -> InputConfiguration {
        InputConfiguration::first(self.photons)
    }

    pub fn unitary(&self, index: usize) -> Result<UnitaryMatrix> {
        sample_haar(self.modes, self.seed.with_stream(index as u64))
    }

    pub fn sample_unitaries(&self, exec: Execution) -> Result<Vec<UnitaryMatrix>> {
        self.validate()?;
        exec.try_map(self.unitaries, |i| self.unitary(i))
    }

    fn distribution_of(&self, index: usize, u: &UnitaryMatrix) -> Result<OutcomeDistribution> {
        let exact = full_distribution(u, &self.input(), &self.statistics)?;
        match self.trials_per_unitary {
            None => Ok(exact),
            Some(t) => {
                let seed = self.seed.with_stream(index as u64 | TRIAL_STREAM_BIT);
                let records = sample_trials(&exact, t, index, seed)?;
                empirical_distribution(&records, self.modes, self.photons)
            }
        }
    }

    /// Per-unitary outcome laws before detector bias: exact, or trial frequencies.
    pub fn distributions(&self, exec: Execution) -> Result<Vec<OutcomeDistribution>> {
        self.validate()?;
        exec.try_map(self.unitaries, |i| self.distribution_of(i, &self.unitary(i)?))
    }

    /// Distributions for a caller-supplied ensemble (e.g. read from a file).
    pub fn distributions_for(
        &self,
        unitaries: &[UnitaryMatrix],
        exec: Execution,
    ) -> Result<Vec<OutcomeDistribution>> {
        exec.try_map(unitaries.len(), |i| self.distribution_of(i, &unitaries[i]))
    }

    /// Per-unitary recorded counts after detector bias.
    pub fn counts(&self, exec: Execution) -> Result<Vec<WeightedCounts>> {
        self.bias(&self.distributions(exec)?)
    }

    pub fn bias(&self, dists: &[OutcomeDistribution]) -> Result<Vec<WeightedCounts>> {
        dists
            .iter()
            .map(|d| apply_detector_bias(d, &self.detector))
            .collect()
    }
}

/// Mean of per-unitary values and its standard error `sd / sqrt(K)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean: f64,
    pub std_error: f64,
    pub k: usize,
    pub trials_per_unitary: Option<usize>,
}

impl EnsembleStats {
    pub fn from_values(values: &[f64], trials_per_unitary: Option<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("no values to average"));
        }
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let std_error = if values.len() < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        };
        Ok(EnsembleStats {
            mean,
            std_error,
            k: values.len(),
            trials_per_unitary,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDeltaN {
    pub stats: EnsembleStats,
    /// Ensemble-averaged `Delta n` law. Absent under biased detectors, whose
    /// scaled counts are no longer integers.
    pub distribution: Option<DeltaNDistribution>,
    pub per_unitary_means: Vec<f64>,
}

/// `<Delta n>` for every unitary of the ensemble, aggregated.
pub fn ensemble_delta_n(
    spec: &EnsembleSpec,
    mode: DemonMode,
    config: &ModeConfiguration,
    exec: Execution,
) -> Result<EnsembleDeltaN> {
    let dists = spec.distributions(exec)?;
    delta_n_from_distributions(spec, &dists, mode, config)
}

/// As [`ensemble_delta_n`] for precomputed per-unitary distributions.
pub fn delta_n_from_distributions(
    spec: &EnsembleSpec,
    dists: &[OutcomeDistribution],
    mode: DemonMode,
    config: &ModeConfiguration,
) -> Result<EnsembleDeltaN> {
    let counts = spec.bias(dists)?;
    let per_unitary_means = counts
        .iter()
        .map(|c| c.mean_delta_n(config, mode))
        .collect::<Result<Vec<f64>>>()?;
    let stats = EnsembleStats::from_values(&per_unitary_means, spec.trials_per_unitary)?;
    let distribution = if spec.detector.is_ideal() {
        let laws = dists
            .iter()
            .map(|d| delta_n_distribution(d, config, mode))
            .collect::<Result<Vec<_>>>()?;
        let mut probs: BTreeMap<i64, f64> = BTreeMap::new();
        for law in &laws {
            for (&k, &p) in &law.probs {
                *probs.entry(k).or_default() += p / laws.len() as f64;
            }
        }
        let mut avg = DeltaNDistribution::new(spec.photons, probs, stats.std_error)?;
        avg.mean = stats.mean;
        Some(avg)
    } else {
        None
    };
    Ok(EnsembleDeltaN {
        stats,
        distribution,
        per_unitary_means,
    })
}

/// Histogram bins for per-mode mean photon numbers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxBins {
    pub width: f64,
    pub count: usize,
}

impl Default for FluxBins {
    fn default() -> Self {
        FluxBins {
            width: 0.05,
            count: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxHistogram {
    pub bin_edges: Vec<f64>,
    /// `counts[mode][bin]`; values past the last edge land in the last bin.
    pub counts: Vec<Vec<usize>>,
    /// `per_unitary[unitary][mode]`, the recorded mean photon number.
    pub per_unitary: Vec<Vec<f64>>,
    pub means: Vec<EnsembleStats>,
    /// Number of unitaries whose recorded mean exceeds one photon, per mode.
    pub above_bound: Vec<usize>,
}

/// Per-unitary, per-mode mean photon numbers `n_j` with histograms and ensemble means.
pub fn mode_flux_histogram(
    spec: &EnsembleSpec,
    bins: FluxBins,
    exec: Execution,
) -> Result<FluxHistogram> {
    if !(bins.width > 0.0) || bins.count == 0 {
        return Err(Error::invalid("histogram needs a positive bin width and count"));
    }
    let per_unitary: Vec<Vec<f64>> = spec
        .counts(exec)?
        .iter()
        .map(WeightedCounts::mean_counts)
        .collect();
    let m = spec.modes;
    let bin_edges = (0..=bins.count).map(|b| b as f64 * bins.width).collect();
    let mut counts = vec![vec![0usize; bins.count]; m];
    let mut above_bound = vec![0usize; m];
    for row in &per_unitary {
        for (j, &n) in row.iter().enumerate() {
            let b = ((n / bins.width).floor().max(0.0) as usize).min(bins.count - 1);
            counts[j][b] += 1;
            if n > 1.0 + FLUX_BOUND_TOL {
                above_bound[j] += 1;
            }
        }
    }
    let means = (0..m)
        .map(|j| {
            let column: Vec<f64> = per_unitary.iter().map(|r| r[j]).collect();
            EnsembleStats::from_values(&column, spec.trials_per_unitary)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FluxHistogram {
        bin_edges,
        counts,
        per_unitary,
        means,
        above_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k: usize, stats: PhotonStatistics) -> EnsembleSpec {
        EnsembleSpec::new(4, 3, k, stats, RandomSeed::new(2024))
    }

    #[test]
    fn point_mass_trials_are_constant() {
        let s = OccupationVector::new(vec![1, 0, 2]);
        let d = OutcomeDistribution::point_mass(&s);
        let t = sample_trials(&d, 100, 7, RandomSeed::new(1)).unwrap();
        assert!(t.iter().all(|r| r.outcome == s && r.unitary_index == 7));
        assert_eq!(empirical_distribution(&t, 3, 3).unwrap().get(&s), 1.0);
    }

    #[test]
    fn trials_deterministic() {
        let u = sample_haar(4, RandomSeed::new(9)).unwrap();
        let d = full_distribution(&u, &InputConfiguration::first(3), &PhotonStatistics::Indistinguishable)
            .unwrap();
        let a = sample_trials(&d, 500, 0, RandomSeed::new(4)).unwrap();
        let b = sample_trials(&d, 500, 0, RandomSeed::new(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_trials(&d, 500, 0, RandomSeed::new(5)).unwrap());
    }

    #[test]
    fn detector_bias_arithmetic() {
        let model = DetectorModel::new(vec![1.0, 1.0, 1.0, 1.15]).unwrap();
        let biased = bias_mean_counts(&[0.7, 0.6, 0.75, 0.95], &model).unwrap();
        assert!((biased[3] - 1.0925).abs() < 1e-12);
        assert!(DetectorModel::new(vec![1.0, 0.0]).is_err());
        assert!(DetectorModel::ideal(4).is_ideal());

        let d = full_distribution(
            &sample_haar(4, RandomSeed::new(1)).unwrap(),
            &InputConfiguration::first(3),
            &PhotonStatistics::Distinguishable,
        )
        .unwrap();
        let ideal = apply_detector_bias(&d, &DetectorModel::ideal(4)).unwrap();
        assert_eq!(ideal, WeightedCounts::from(&d));
    }

    #[test]
    fn bias_breaks_passive_symmetry() {
        let cfg = ModeConfiguration::canonical(4).unwrap();
        let avg = crate::haar_average::haar_average_indist(4, 3).unwrap();
        let model = DetectorModel::new(vec![1.1, 1.0, 1.0, 1.0]).unwrap();
        let w = apply_detector_bias(&avg.distribution, &model).unwrap();
        let mean = w.mean_delta_n(&cfg, DemonMode::Passive).unwrap();
        assert!((mean - 0.075).abs() < 1e-12);
    }

    #[test]
    fn ideal_flux_conserves_photons() {
        let h = mode_flux_histogram(
            &spec(200, PhotonStatistics::Indistinguishable),
            FluxBins::default(),
            Execution::default(),
        )
        .unwrap();
        for row in &h.per_unitary {
            assert!((row.iter().sum::<f64>() - 3.0).abs() < 1e-9);
        }
        assert!(h.above_bound.iter().all(|&c| c == 0));
        assert_eq!(h.counts.iter().map(|c| c.iter().sum::<usize>()).sum::<usize>(), 800);

        let biased = spec(200, PhotonStatistics::Indistinguishable)
            .with_detector(DetectorModel::new(vec![1.0, 1.0, 1.0, 1.3]).unwrap());
        let h = mode_flux_histogram(&biased, FluxBins::default(), Execution::default()).unwrap();
        assert!(h.above_bound[3] > 0);
        assert_eq!(h.above_bound[..3], [0, 0, 0]);
    }

    #[test]
    fn ensemble_delta_n_shapes() {
        let cfg = ModeConfiguration::canonical(4).unwrap();
        let r = ensemble_delta_n(
            &spec(20, PhotonStatistics::Indistinguishable),
            DemonMode::Active,
            &cfg,
            Execution::default(),
        )
        .unwrap();
        let dist = r.distribution.unwrap();
        assert!((dist.mean - r.stats.mean).abs() < 1e-12);
        assert_eq!(r.per_unitary_means.len(), 20);
        assert!(r.stats.std_error > 0.0);

        let biased = spec(20, PhotonStatistics::Indistinguishable)
            .with_detector(DetectorModel::new(vec![1.1, 1.0, 1.0, 1.0]).unwrap());
        let r = ensemble_delta_n(&biased, DemonMode::Passive, &cfg, Execution::default()).unwrap();
        assert!(r.distribution.is_none());
        assert!(ensemble_delta_n(
            &spec(0, PhotonStatistics::Indistinguishable),
            DemonMode::Active,
            &cfg,
            Execution::default()
        )
        .is_err());
    }

    #[test]
    fn finite_trials_are_reproducible() {
        let cfg = ModeConfiguration::canonical(4).unwrap();
        let s = spec(10, PhotonStatistics::Distinguishable).with_trials(Some(300));
        let a = ensemble_delta_n(&s, DemonMode::Active, &cfg, Execution::default()).unwrap();
        let b = ensemble_delta_n(&s, DemonMode::Active, &cfg, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.stats.trials_per_unitary, Some(300));
    }
}
