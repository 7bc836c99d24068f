//! Haar-averaged outcome distributions: exact (infinite-ensemble) laws from
//! the Weingarten calculus and finite-ensemble empirical averages.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::haar_unitary::UnitaryMatrix;
use crate::interference::{
    enumerate_outcomes, full_distribution, marginal_mode_distribution, symmetry_factor, InputConfiguration, OccupationVector,
    OutcomeDistribution, PhotonStatistics, MAX_GENERAL_PHOTONS,
};
use crate::symmetric_group::{rational_to_f64, Permutation, Rational, WeingartenCache};

const ANALYTIC_NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsLabel {
    Distinguishable,
    Indistinguishable,
    Partial,
}

impl From<&PhotonStatistics> for StatisticsLabel {
    fn from(s: &PhotonStatistics) -> Self {
        match s {
            PhotonStatistics::Distinguishable => StatisticsLabel::Distinguishable,
            PhotonStatistics::Indistinguishable => StatisticsLabel::Indistinguishable,
            PhotonStatistics::Partial(_) => StatisticsLabel::Partial,
        }
    }
}

impl fmt::Display for StatisticsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatisticsLabel::Distinguishable => "distinguishable",
            StatisticsLabel::Indistinguishable => "indistinguishable",
            StatisticsLabel::Partial => "partial",
        })
    }
}

/// A Haar-averaged outcome law.
///
/// Analytic averages carry exact rational probabilities; empirical averages
/// carry per-outcome standard errors and the ensemble size.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarAveragedDistribution {
    pub label: StatisticsLabel,
    pub distribution: OutcomeDistribution,
    pub exact: Option<Vec<Rational>>,
    pub std_errors: Option<Vec<f64>>,
    pub samples: usize,
}

impl HaarAveragedDistribution {
    pub fn modes(&self) -> usize {
        self.distribution.modes()
    }

    pub fn photons(&self) -> usize {
        self.distribution.photons()
    }

    /// `(outcome, exact probability)` pairs for analytic averages.
    pub fn exact_entries(&self) -> Option<impl Iterator<Item = (&OccupationVector, Rational)>> {
        let exact = self.exact.as_ref()?;
        Some(
            self.distribution
                .entries()
                .iter()
                .zip(exact)
                .map(|((s, _), q)| (s, *q)),
        )
    }
}

impl HaarAveragedDistribution {
    /// Mode marginal `P(n)`, summed in exact arithmetic when exact values are present.
    pub fn marginal(&self, mode: usize) -> Result<BTreeMap<usize, f64>> {
        match self.exact_marginal(mode)? {
            Some(exact) => Ok(exact.into_iter().map(|(n, q)| (n, rational_to_f64(q))).collect()),
            None => marginal_mode_distribution(&self.distribution, mode),
        }
    }

    pub fn exact_marginal(&self, mode: usize) -> Result<Option<BTreeMap<usize, Rational>>> {
        if mode >= self.modes() {
            return Err(Error::invalid(format!(
                "mode {mode} out of range for M = {}",
                self.modes()
            )));
        }
        let Some(entries) = self.exact_entries() else {
            return Ok(None);
        };
        let mut out: BTreeMap<usize, Rational> =
            (0..=self.photons()).map(|n| (n, Rational::zero())).collect();
        for (s, q) in entries {
            *out.get_mut(&s.get(mode)).expect("count <= N") += q;
        }
        Ok(Some(out))
    }
}

impl AsRef<OutcomeDistribution> for HaarAveragedDistribution {
    fn as_ref(&self) -> &OutcomeDistribution {
        &self.distribution
    }
}

/// `N! / (M (M+1) ... (M+N-1))`, the probability of every outcome when indistinguishable
/// photons are averaged over `U(M)`.
pub fn indist_closed_form(m: usize, n: usize) -> Result<Rational> {
    if m == 0 {
        return Err(Error::InvalidDimension(m));
    }
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for k in 0..n {
        num = num
            .checked_mul((k + 1) as i128)
            .ok_or_else(|| Error::NumericalConsistency("closed form overflow".into()))?;
        den = den
            .checked_mul((m + k) as i128)
            .ok_or_else(|| Error::NumericalConsistency("closed form overflow".into()))?;
    }
    Ok(Rational::new(num, den))
}

fn from_exact(
    m: usize,
    n: usize,
    label: StatisticsLabel,
    entries: Vec<(OccupationVector, Rational)>,
) -> Result<HaarAveragedDistribution> {
    let total = entries
        .iter()
        .fold(Rational::zero(), |acc, (_, q)| acc + q);
    let float_entries: Vec<(OccupationVector, f64)> = entries
        .iter()
        .map(|(s, q)| (s.clone(), rational_to_f64(*q)))
        .collect();
    let float_total: f64 = float_entries.iter().map(|(_, p)| p).sum();
    if !total.is_one() || (float_total - 1.0).abs() > ANALYTIC_NORMALIZATION_TOL {
        return Err(Error::NumericalConsistency(format!(
            "Haar average sums to {total} ({float_total})"
        )));
    }
    Ok(HaarAveragedDistribution {
        label,
        distribution: OutcomeDistribution::new(m, n, float_entries)?,
        exact: Some(entries.into_iter().map(|(_, q)| q).collect()),
        std_errors: None,
        samples: 0,
    })
}

/// Uniform law over the `C(M+N-1, N)` occupancy patterns.
pub fn haar_average_indist(m: usize, n: usize) -> Result<HaarAveragedDistribution> {
    let p = indist_closed_form(m, n)?;
    let entries = enumerate_outcomes(m, n).into_iter().map(|s| (s, p)).collect();
    from_exact(m, n, StatisticsLabel::Indistinguishable, entries)
}

/// Haar average of the distinguishable-photon law:
///
/// `E p(s) = (1/mu(s)) sum_{pi, sigma in S_N} prod_k [o_pi(k) = o_pi(sigma(k))] Wg_{M,N}(sigma^-1)`.
///
/// The double sum is tallied by cycle type of `sigma^-1` and evaluated once per
/// occupancy type, since outcomes related by a relabelling of modes share it.
pub fn haar_average_dist(
    m: usize,
    n: usize,
    cache: &WeingartenCache,
) -> Result<HaarAveragedDistribution> {
    if m == 0 {
        return Err(Error::InvalidDimension(m));
    }
    if n > m {
        return Err(Error::InvalidConfiguration(format!(
            "{n} photons cannot enter {m} modes one per mode"
        )));
    }
    if n > MAX_GENERAL_PHOTONS {
        return Err(Error::TooLarge {
            what: "distinguishable Haar average (photons)",
            size: n,
            max: MAX_GENERAL_PHOTONS,
        });
    }
    let outcomes = enumerate_outcomes(m, n);
    if n == 0 {
        let entries = outcomes.into_iter().map(|s| (s, Rational::one())).collect();
        return from_exact(m, n, StatisticsLabel::Distinguishable, entries);
    }
    let table = cache.table(m, n)?;
    let perms = Permutation::all(n);
    let mut by_type: HashMap<Vec<usize>, Rational> = HashMap::new();
    let mut entries = Vec::with_capacity(outcomes.len());
    for s in outcomes {
        let key = s.occupancy_type();
        let value = match by_type.get(&key) {
            Some(v) => *v,
            None => {
                let o = s.multiset();
                let mut tally: HashMap<crate::symmetric_group::Partition, i128> = HashMap::new();
                for pi in &perms {
                    for sigma in &perms {
                        let fixed = (0..n).all(|k| o[pi.apply(k)] == o[pi.apply(sigma.apply(k))]);
                        if fixed {
                            *tally.entry(sigma.inverse().cycle_type()).or_default() += 1;
                        }
                    }
                }
                let sum = tally
                    .into_iter()
                    .map(|(ct, c)| table.exact(&ct).expect("tabulated") * Rational::from_integer(c))
                    .fold(Rational::zero(), |a, b| a + b);
                let v = sum / Rational::from_integer(symmetry_factor(&s) as i128);
                by_type.insert(key, v);
                v
            }
        };
        entries.push((s, value));
    }
    from_exact(m, n, StatisticsLabel::Distinguishable, entries)
}

/// Analytic Haar average for either endpoint statistics.
pub fn haar_average_analytic(
    m: usize,
    n: usize,
    statistics: &PhotonStatistics,
    cache: &WeingartenCache,
) -> Result<HaarAveragedDistribution> {
    match statistics {
        PhotonStatistics::Indistinguishable => haar_average_indist(m, n),
        PhotonStatistics::Distinguishable => haar_average_dist(m, n, cache),
        PhotonStatistics::Partial(_) => Err(Error::invalid(
            "analytic Haar averages exist only for distinguishable or indistinguishable photons",
        )),
    }
}

/// Arithmetic mean of per-unitary distributions, with standard errors of the mean.
pub fn haar_average_empirical(
    ensemble: &[UnitaryMatrix],
    input: &InputConfiguration,
    statistics: &PhotonStatistics,
    exec: Execution,
) -> Result<HaarAveragedDistribution> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::invalid("empty unitary ensemble"))?;
    let m = first.dim();
    if let Some(bad) = ensemble.iter().find(|u| u.dim() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: bad.dim(),
        });
    }
    let dists = exec.try_map(ensemble.len(), |k| {
        full_distribution(&ensemble[k], input, statistics)
    })?;
    average_distributions(&dists, statistics.into())
}

/// Mean and standard error per outcome across distributions of equal shape.
pub fn average_distributions(
    dists: &[OutcomeDistribution],
    label: StatisticsLabel,
) -> Result<HaarAveragedDistribution> {
    let first = dists
        .first()
        .ok_or_else(|| Error::invalid("no distributions to average"))?;
    let k = dists.len() as f64;
    let len = first.len();
    let mut sums = vec![0.0; len];
    let mut sq = vec![0.0; len];
    for d in dists {
        if d.modes() != first.modes() || d.photons() != first.photons() || d.len() != len {
            return Err(Error::DimensionMismatch {
                expected: first.modes(),
                found: d.modes(),
            });
        }
        for (i, p) in d.probabilities().enumerate() {
            sums[i] += p;
            sq[i] += p * p;
        }
    }
    let means: Vec<f64> = sums.iter().map(|s| s / k).collect();
    let std_errors = means
        .iter()
        .zip(&sq)
        .map(|(mean, sq)| {
            if dists.len() < 2 {
                0.0
            } else {
                let var = ((sq - k * mean * mean) / (k - 1.0)).max(0.0);
                (var / k).sqrt()
            }
        })
        .collect();
    let entries = first
        .entries()
        .iter()
        .zip(&means)
        .map(|((s, _), p)| (s.clone(), *p))
        .collect();
    Ok(HaarAveragedDistribution {
        label,
        distribution: OutcomeDistribution::new(first.modes(), first.photons(), entries)?,
        exact: None,
        std_errors: Some(std_errors),
        samples: dists.len(),
    })
}
