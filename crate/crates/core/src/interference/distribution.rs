use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{enumerate_outcomes, outcome_probability, InputConfiguration, OccupationVector, PhotonStatistics};
use crate::error::{Error, Result};
use crate::haar_unitary::UnitaryMatrix;

/// Normalisation tolerance of a stored distribution.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// A computed distribution further than this from unit mass is rejected.
const NORMALIZATION_FAIL: f64 = 1e-6;

/// Probabilities over all `C(M+N-1, N)` outcomes of `N` photons in `M` modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    modes: usize,
    photons: usize,
    entries: Vec<(OccupationVector, f64)>,
}

impl OutcomeDistribution {
    /// Validates shapes and normalisation. Entries in `[-1e-12, 0)` are clamped to zero.
    pub fn new(modes: usize, photons: usize, entries: Vec<(OccupationVector, f64)>) -> Result<Self> {
        let mut clean = Vec::with_capacity(entries.len());
        for (s, p) in entries {
            if s.modes() != modes {
                return Err(Error::DimensionMismatch {
                    expected: modes,
                    found: s.modes(),
                });
            }
            if s.total() != photons {
                return Err(Error::PhotonCountMismatch {
                    expected: photons,
                    found: s.total(),
                });
            }
            let p = if (-1e-12..0.0).contains(&p) { 0.0 } else { p };
            if !(p >= 0.0) {
                return Err(Error::NumericalConsistency(format!(
                    "probability {p} for outcome {s} is negative or not a number"
                )));
            }
            clean.push((s, p));
        }
        let total: f64 = clean.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NumericalConsistency(format!(
                "distribution sums to {total}, not 1"
            )));
        }
        Ok(OutcomeDistribution {
            modes,
            photons,
            entries: clean,
        })
    }

    pub(crate) fn from_parts_unchecked(
        modes: usize,
        photons: usize,
        entries: Vec<(OccupationVector, f64)>,
    ) -> Self {
        OutcomeDistribution {
            modes,
            photons,
            entries,
        }
    }

    /// All mass on one outcome; every other outcome is listed with probability zero.
    pub fn point_mass(s: &OccupationVector) -> Self {
        let entries = enumerate_outcomes(s.modes(), s.total())
            .into_iter()
            .map(|t| {
                let p = if &t == s { 1.0 } else { 0.0 };
                (t, p)
            })
            .collect();
        OutcomeDistribution {
            modes: s.modes(),
            photons: s.total(),
            entries,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(OccupationVector, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, f64)> {
        self.entries.iter().map(|(s, p)| (s, *p))
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(_, p)| *p)
    }

    pub fn get(&self, s: &OccupationVector) -> f64 {
        self.entries
            .iter()
            .find(|(t, _)| t == s)
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.probabilities().sum()
    }

    /// `E[s_j]` for every mode.
    pub fn mean_counts(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.modes];
        for (s, p) in self.iter() {
            for (j, &c) in s.counts().iter().enumerate() {
                out[j] += c as f64 * p;
            }
        }
        out
    }

    /// Total variation distance `(1/2) sum |p - q|` over the union of supports.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        let mut map: BTreeMap<&OccupationVector, f64> = BTreeMap::new();
        for (s, p) in self.iter() {
            *map.entry(s).or_default() += p;
        }
        for (s, p) in other.iter() {
            *map.entry(s).or_default() -= p;
        }
        0.5 * map.values().map(|d| d.abs()).sum::<f64>()
    }
}

impl AsRef<OutcomeDistribution> for OutcomeDistribution {
    fn as_ref(&self) -> &OutcomeDistribution {
        self
    }
}

/// Every outcome probability for a fixed interferometer.
pub fn full_distribution(
    u: &UnitaryMatrix,
    input: &InputConfiguration,
    statistics: &PhotonStatistics,
) -> Result<OutcomeDistribution> {
    let m = u.dim();
    let n = input.photons();
    input.check_modes(m)?;
    let entries = enumerate_outcomes(m, n)
        .into_iter()
        .map(|s| {
            let p = outcome_probability(u, input, &s, statistics)?;
            Ok((s, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = entries.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > NORMALIZATION_FAIL {
        return Err(Error::NumericalConsistency(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    let entries = entries.into_iter().map(|(s, p)| (s, p / total)).collect();
    Ok(OutcomeDistribution::from_parts_unchecked(m, n, entries))
}

/// `n_j = sum_{i in input} |U_ji|^2`, the mean photon number of output mode `j`.
pub fn mean_photon_numbers(u: &UnitaryMatrix, input: &InputConfiguration) -> Result<Vec<f64>> {
    input.check_modes(u.dim())?;
    Ok((0..u.dim())
        .map(|j| input.modes().iter().map(|&i| u[(j, i)].norm_sqr()).sum())
        .collect())
}

/// `P(n) = sum_{s : s_mode = n} p(s)` for `n = 0..=N`.
pub fn marginal_mode_distribution(
    dist: &OutcomeDistribution,
    mode: usize,
) -> Result<BTreeMap<usize, f64>> {
    if mode >= dist.modes() {
        return Err(Error::invalid(format!(
            "mode {mode} out of range for M = {}",
            dist.modes()
        )));
    }
    let mut out: BTreeMap<usize, f64> = (0..=dist.photons()).map(|n| (n, 0.0)).collect();
    for (s, p) in dist.iter() {
        *out.get_mut(&s.get(mode)).expect("count <= N") += p;
    }
    Ok(out)
}
