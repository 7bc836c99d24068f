use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interference::binomial;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const DEFAULT_WAVELENGTH_NM: f64 = 1550.0;

const FIT_NORMALIZATION_TOL: f64 = 1e-6;

/// `E = h c / lambda`.
pub fn photon_energy_from_wavelength_nm(wavelength_nm: f64) -> Result<f64> {
    if !(wavelength_nm > 0.0) || !wavelength_nm.is_finite() {
        return Err(Error::invalid(format!(
            "wavelength must be positive, got {wavelength_nm} nm"
        )));
    }
    Ok(PLANCK * SPEED_OF_LIGHT / (wavelength_nm * 1e-9))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureReport {
    /// Mean photon number per mode, `N / M`.
    pub photon_density: f64,
    /// Kelvin.
    pub temperature: f64,
    /// Joules.
    pub photon_energy: f64,
}

/// Temperature of a thermal mode with mean occupation `density`:
/// `T = (E / k_B) / ln(1 + 1/density)`, and `T = 0` at zero density.
pub fn effective_temperature(density: f64, photon_energy: f64) -> Result<TemperatureReport> {
    if !(density >= 0.0) || !density.is_finite() {
        return Err(Error::invalid(format!(
            "photon density must be nonnegative, got {density}"
        )));
    }
    if !(photon_energy > 0.0) || !photon_energy.is_finite() {
        return Err(Error::invalid(format!(
            "photon energy must be positive, got {photon_energy}"
        )));
    }
    let temperature = if density == 0.0 {
        0.0
    } else {
        photon_energy / BOLTZMANN / (1.0 / density).ln_1p()
    };
    Ok(TemperatureReport {
        photon_density: density,
        temperature,
        photon_energy,
    })
}

/// Grid for [`fit_temperature`]: `1 <= N <= max_photons`, `2 <= M <= max_modes`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitBounds {
    pub max_photons: usize,
    pub max_modes: usize,
}

impl Default for FitBounds {
    fn default() -> Self {
        FitBounds {
            max_photons: 20,
            max_modes: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureFit {
    pub photons: usize,
    pub modes: usize,
    pub total_variation: f64,
    pub report: TemperatureReport,
}

/// Single-mode marginal of the uniform law of `N` photons over `M` modes:
/// `P(n) = C(N - n + M - 2, M - 2) / C(N + M - 1, N)` for `n = 0..=N`.
pub fn thermal_marginal(photons: usize, modes: usize) -> Result<Vec<f64>> {
    if modes < 2 {
        return Err(Error::InvalidDimension(modes));
    }
    let total = binomial(photons + modes - 1, photons) as f64;
    Ok((0..=photons)
        .map(|n| binomial(photons - n + modes - 2, modes - 2) as f64 / total)
        .collect())
}

fn total_variation(observed: &BTreeMap<usize, f64>, family: &[f64]) -> f64 {
    let mut tv = 0.0;
    for (n, q) in family.iter().enumerate() {
        tv += (observed.get(&n).copied().unwrap_or(0.0) - q).abs();
    }
    tv += observed.range(family.len()..).map(|(_, p)| p).sum::<f64>();
    tv / 2.0
}

/// Grid search for the `(N, M)` whose thermal marginal is closest in total
/// variation to `observed`; ties go to smaller `M`, then smaller `N`.
pub fn fit_temperature(
    observed: &BTreeMap<usize, f64>,
    photon_energy: f64,
    bounds: FitBounds,
) -> Result<TemperatureFit> {
    let total: f64 = observed.values().sum();
    if observed.values().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > FIT_NORMALIZATION_TOL {
        return Err(Error::invalid(format!(
            "observed distribution must be nonnegative and normalised, sums to {total}"
        )));
    }
    if bounds.max_photons < 1 || bounds.max_modes < 2 {
        return Err(Error::invalid("fit grid is empty"));
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for m in 2..=bounds.max_modes {
        for n in 1..=bounds.max_photons {
            let tv = total_variation(observed, &thermal_marginal(n, m)?);
            if best.is_none_or(|(b, _, _)| tv < b) {
                best = Some((tv, n, m));
            }
        }
    }
    let (tv, n, m) = best.expect("nonempty grid");
    Ok(TemperatureFit {
        photons: n,
        modes: m,
        total_variation: tv,
        report: effective_temperature(n as f64 / m as f64, photon_energy)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1550() -> f64 {
        photon_energy_from_wavelength_nm(1550.0).unwrap()
    }

    #[test]
    fn reference_temperatures() {
        let t1 = effective_temperature(1.0, e1550()).unwrap().temperature;
        assert!((t1 / 13_390.0 - 1.0).abs() < 5e-3, "{t1}");
        let t34 = effective_temperature(0.75, e1550()).unwrap().temperature;
        assert!((t34 / 10_960.0 - 1.0).abs() < 5e-3, "{t34}");
        assert_eq!(effective_temperature(0.0, e1550()).unwrap().temperature, 0.0);
        assert!(effective_temperature(-0.1, e1550()).is_err());
        assert!(effective_temperature(1.0, 0.0).is_err());
    }

    #[test]
    fn monotone_and_linear_in_energy() {
        let e = e1550();
        let mut prev = 0.0;
        for k in 1..200 {
            let t = effective_temperature(k as f64 * 0.05, e).unwrap().temperature;
            assert!(t > prev);
            prev = t;
        }
        let a = effective_temperature(0.6, e).unwrap().temperature;
        let b = effective_temperature(0.6, 2.5 * e).unwrap().temperature;
        assert!((b / a - 2.5).abs() < 1e-12);
    }

    #[test]
    fn marginal_family_examples() {
        assert_eq!(thermal_marginal(3, 3).unwrap(), vec![0.4, 0.3, 0.2, 0.1]);
        assert_eq!(thermal_marginal(3, 4).unwrap(), vec![0.5, 0.3, 0.15, 0.05]);
        for n in 1..8 {
            for m in 2..8 {
                let s: f64 = thermal_marginal(n, m).unwrap().iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fit_round_trips_family_members() {
        let e = e1550();
        let obs: BTreeMap<usize, f64> = [0.4, 0.3, 0.2, 0.1].into_iter().enumerate().collect();
        let fit = fit_temperature(&obs, e, FitBounds::default()).unwrap();
        assert_eq!((fit.photons, fit.modes, fit.total_variation), (3, 3, 0.0));
        let obs: BTreeMap<usize, f64> = [0.5, 0.3, 0.15, 0.05].into_iter().enumerate().collect();
        let fit = fit_temperature(&obs, e, FitBounds::default()).unwrap();
        assert_eq!((fit.photons, fit.modes, fit.total_variation), (3, 4, 0.0));
        assert!((fit.report.temperature / 10_960.0 - 1.0).abs() < 5e-3);

        for n in 1..=6 {
            for m in 2..=6 {
                let obs = thermal_marginal(n, m).unwrap().into_iter().enumerate().collect();
                let fit = fit_temperature(&obs, e, FitBounds::default()).unwrap();
                assert_eq!(fit.total_variation, 0.0);
                assert_eq!(fit.photons as f64 / fit.modes as f64, n as f64 / m as f64);
            }
        }
    }

    #[test]
    fn fit_rejects_unnormalised() {
        let obs = BTreeMap::from([(0, 0.5), (1, 0.3)]);
        assert!(fit_temperature(&obs, e1550(), FitBounds::default()).is_err());
    }
}
