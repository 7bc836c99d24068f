use std::collections::BTreeMap;
use std::ops::AddAssign;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{DemonMode, ModeConfiguration};
use crate::error::{Error, Result};
use crate::haar_average::HaarAveragedDistribution;
use crate::interference::{OccupationVector, OutcomeDistribution};
use crate::symmetric_group::Rational;

const DELTA_NORMALIZATION_TOL: f64 = 1e-9;

/// Law of the photon-number difference `n_A - n_B` between the two measured modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaNDistribution {
    pub probs: BTreeMap<i64, f64>,
    pub mean: f64,
    /// Standard error of `mean`; zero for exact or analytic inputs.
    pub std_error: f64,
}

impl DeltaNDistribution {
    /// Builds the law from probabilities on `-N..=N`; missing values count as zero.
    pub fn new(photons: usize, mut probs: BTreeMap<i64, f64>, std_error: f64) -> Result<Self> {
        let n = photons as i64;
        if let Some((&k, _)) = probs.iter().find(|(&k, _)| k < -n || k > n) {
            return Err(Error::invalid(format!("delta n = {k} outside [-{n}, {n}]")));
        }
        for k in -n..=n {
            probs.entry(k).or_insert(0.0);
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > DELTA_NORMALIZATION_TOL {
            return Err(Error::NumericalConsistency(format!(
                "delta n distribution sums to {total}"
            )));
        }
        let mean = probs.iter().map(|(&k, &p)| k as f64 * p).sum();
        Ok(DeltaNDistribution {
            probs,
            mean,
            std_error,
        })
    }

    pub fn get(&self, delta: i64) -> f64 {
        self.probs.get(&delta).copied().unwrap_or(0.0)
    }
}

/// Which side ends up labelled `A` after the demon acts on outcome `counts`.
///
/// The active demon exchanges `A` and `B` exactly when `B` holds strictly more
/// photons; ties leave the labels alone.
pub(crate) fn is_switched<T: PartialOrd + Copy + Zero + AddAssign>(
    counts: &[T],
    config: &ModeConfiguration,
    mode: DemonMode,
) -> bool {
    match mode {
        DemonMode::Passive => false,
        DemonMode::Active => {
            let sum = |set: &[usize]| {
                let mut t = T::zero();
                for &j in set {
                    t += counts[j];
                }
                t
            };
            sum(config.subset_a()) < sum(config.subset_b())
        }
    }
}

/// `Delta n` of a single integer outcome.
pub fn delta_n_of(s: &OccupationVector, config: &ModeConfiguration, mode: DemonMode) -> i64 {
    let counts = s.counts();
    let a = counts[config.measured_a()] as i64;
    let b = counts[config.measured_b()] as i64;
    if is_switched(counts, config, mode) {
        b - a
    } else {
        a - b
    }
}

/// Sums outcome weights per `Delta n` value, for any additive weight type.
pub fn aggregate_delta_n<'a, W, I>(
    entries: I,
    config: &ModeConfiguration,
    mode: DemonMode,
) -> BTreeMap<i64, W>
where
    W: Zero + AddAssign + Copy,
    I: IntoIterator<Item = (&'a OccupationVector, W)>,
{
    let mut out = BTreeMap::new();
    for (s, w) in entries {
        *out.entry(delta_n_of(s, config, mode)).or_insert_with(W::zero) += w;
    }
    out
}

fn delta_n<D: AsRef<OutcomeDistribution>>(
    dist: &D,
    config: &ModeConfiguration,
    mode: DemonMode,
) -> Result<DeltaNDistribution> {
    let dist = dist.as_ref();
    config.check_modes(dist.modes())?;
    let probs = aggregate_delta_n(dist.iter(), config, mode);
    DeltaNDistribution::new(dist.photons(), probs, 0.0)
}

/// `Delta n = s[measured_A] - s[measured_B]` with no feedback.
pub fn delta_n_passive<D: AsRef<OutcomeDistribution>>(
    dist: &D,
    config: &ModeConfiguration,
) -> Result<DeltaNDistribution> {
    delta_n(dist, config, DemonMode::Passive)
}

/// `Delta n` after the demon exchanges the subsets whenever `B` holds more photons.
pub fn delta_n_active<D: AsRef<OutcomeDistribution>>(
    dist: &D,
    config: &ModeConfiguration,
) -> Result<DeltaNDistribution> {
    delta_n(dist, config, DemonMode::Active)
}

pub fn delta_n_distribution<D: AsRef<OutcomeDistribution>>(
    dist: &D,
    config: &ModeConfiguration,
    mode: DemonMode,
) -> Result<DeltaNDistribution> {
    delta_n(dist, config, mode)
}

/// Exact rational `Delta n` law and mean of an analytic Haar average.
pub fn delta_n_exact(
    avg: &HaarAveragedDistribution,
    config: &ModeConfiguration,
    mode: DemonMode,
) -> Result<(BTreeMap<i64, Rational>, Rational)> {
    config.check_modes(avg.modes())?;
    let entries = avg
        .exact_entries()
        .ok_or_else(|| Error::invalid("distribution carries no exact probabilities"))?;
    let probs = aggregate_delta_n(entries, config, mode);
    let mean = probs
        .iter()
        .fold(Rational::zero(), |acc, (&k, &p)| acc + p * Rational::from_integer(k as i128));
    Ok((probs, mean))
}

/// Outcomes with real-valued per-mode counts, e.g. after detector miscalibration.
///
/// An ideal [`OutcomeDistribution`] converts losslessly; scaled counts no
/// longer take integer values, so only means and subset totals are available.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedCounts {
    modes: usize,
    photons: usize,
    rows: Vec<(Vec<f64>, f64)>,
}

impl WeightedCounts {
    pub fn new(modes: usize, photons: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if let Some((c, _)) = rows.iter().find(|(c, _)| c.len() != modes) {
            return Err(Error::DimensionMismatch {
                expected: modes,
                found: c.len(),
            });
        }
        let total: f64 = rows.iter().map(|(_, p)| p).sum();
        if rows.iter().any(|(_, p)| !(*p >= 0.0)) || (total - 1.0).abs() > DELTA_NORMALIZATION_TOL {
            return Err(Error::NumericalConsistency(format!(
                "weights must be nonnegative and sum to 1, got total {total}"
            )));
        }
        Ok(WeightedCounts {
            modes,
            photons,
            rows,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Photon number of the underlying ideal outcomes.
    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }

    /// Scales the counts of every mode `j` by `factors[j]`.
    pub fn scaled(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: factors.len(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|(c, p)| (c.iter().zip(factors).map(|(x, f)| x * f).collect(), *p))
            .collect();
        Ok(WeightedCounts { rows, ..*self })
    }

    /// Expected count per mode.
    pub fn mean_counts(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.modes];
        for (c, p) in &self.rows {
            for (o, x) in out.iter_mut().zip(c) {
                *o += p * x;
            }
        }
        out
    }

    /// `<Delta n>` under `config` and `mode`.
    pub fn mean_delta_n(&self, config: &ModeConfiguration, mode: DemonMode) -> Result<f64> {
        config.check_modes(self.modes)?;
        Ok(self
            .rows
            .iter()
            .map(|(c, p)| {
                let d = c[config.measured_a()] - c[config.measured_b()];
                if is_switched(c, config, mode) {
                    -p * d
                } else {
                    p * d
                }
            })
            .sum())
    }

    /// Expected totals of subsets `A` and `B` and of their measured modes, after feedback.
    pub fn subset_means(&self, config: &ModeConfiguration, mode: DemonMode) -> Result<SubsetMeans> {
        config.check_modes(self.modes)?;
        let mut out = SubsetMeans::default();
        for (c, p) in &self.rows {
            let (a, b, ma, mb) = if is_switched(c, config, mode) {
                (config.subset_b(), config.subset_a(), config.measured_b(), config.measured_a())
            } else {
                (config.subset_a(), config.subset_b(), config.measured_a(), config.measured_b())
            };
            out.total_a += p * a.iter().map(|&j| c[j]).sum::<f64>();
            out.total_b += p * b.iter().map(|&j| c[j]).sum::<f64>();
            out.measured_a += p * c[ma];
            out.measured_b += p * c[mb];
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubsetMeans {
    pub total_a: f64,
    pub total_b: f64,
    pub measured_a: f64,
    pub measured_b: f64,
}

impl From<&OutcomeDistribution> for WeightedCounts {
    fn from(dist: &OutcomeDistribution) -> Self {
        let rows = dist
            .iter()
            .map(|(s, p)| (s.counts().iter().map(|&c| c as f64).collect(), p))
            .collect();
        WeightedCounts {
            modes: dist.modes(),
            photons: dist.photons(),
            rows,
        }
    }
}

impl From<&HaarAveragedDistribution> for WeightedCounts {
    fn from(avg: &HaarAveragedDistribution) -> Self {
        Self::from(&avg.distribution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar_average::{haar_average_dist, haar_average_indist};
    use crate::symmetric_group::WeingartenCache;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn canonical() -> ModeConfiguration {
        ModeConfiguration::canonical(4).unwrap()
    }

    #[test]
    fn indist_passive_and_active_exact() {
        let avg = haar_average_indist(4, 3).unwrap();
        let (p, mean) = delta_n_exact(&avg, &canonical(), DemonMode::Passive).unwrap();
        let expect = [(-3, q(1, 20)), (-2, q(1, 10)), (-1, q(1, 5)), (0, q(3, 10))];
        for (k, v) in expect {
            assert_eq!(p[&k], v);
            assert_eq!(p[&-k], v);
        }
        assert_eq!(mean, q(0, 1));

        let (p, mean) = delta_n_exact(&avg, &canonical(), DemonMode::Active).unwrap();
        let expect = [(-1, q(1, 10)), (0, q(3, 10)), (1, q(3, 10)), (2, q(1, 5)), (3, q(1, 10))];
        assert_eq!(p.len(), expect.len());
        for (k, v) in expect {
            assert_eq!(p[&k], v, "delta n = {k}");
        }
        assert_eq!(mean, q(9, 10));
    }

    #[test]
    fn dist_active_exact() {
        let avg = haar_average_dist(4, 3, &WeingartenCache::new()).unwrap();
        let (p, mean) = delta_n_exact(&avg, &canonical(), DemonMode::Passive).unwrap();
        assert_eq!(mean, q(0, 1));
        assert_eq!(p[&3], q(1, 120));
        assert_eq!(p[&0], q(1, 3));
        let (_, mean) = delta_n_exact(&avg, &canonical(), DemonMode::Active).unwrap();
        assert_eq!(mean, q(7, 10));
    }

    #[test]
    fn point_masses() {
        let c = canonical();
        let d = OutcomeDistribution::point_mass(&OccupationVector::new(vec![1, 1, 1, 0]));
        assert_eq!(delta_n_passive(&d, &c).unwrap().get(0), 1.0);
        let d = OutcomeDistribution::point_mass(&OccupationVector::new(vec![0, 0, 3, 0]));
        assert_eq!(delta_n_passive(&d, &c).unwrap().get(-3), 1.0);
        let active = delta_n_active(&d, &c).unwrap();
        assert_eq!(active.get(3), 1.0);
        assert_eq!(active.mean, 3.0);
        assert_eq!(active.probs.len(), 7);
    }

    #[test]
    fn weighted_counts_agree_with_integer_path() {
        let avg = haar_average_indist(4, 3).unwrap();
        let w = WeightedCounts::from(&avg);
        for c in ModeConfiguration::all(4).unwrap() {
            for mode in [DemonMode::Passive, DemonMode::Active] {
                let exact = delta_n_distribution(&avg, &c, mode).unwrap().mean;
                assert!((w.mean_delta_n(&c, mode).unwrap() - exact).abs() < 1e-12);
            }
        }
        let m = w.subset_means(&canonical(), DemonMode::Active).unwrap();
        assert!(m.total_a > m.total_b);
        assert!((m.total_a + m.total_b - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_config_rejected() {
        let avg = haar_average_indist(6, 2).unwrap();
        assert!(delta_n_passive(&avg, &canonical()).is_err());
        assert!(DeltaNDistribution::new(2, BTreeMap::from([(3, 1.0)]), 0.0).is_err());
        assert!(DeltaNDistribution::new(2, BTreeMap::from([(1, 0.5)]), 0.0).is_err());
    }
}
