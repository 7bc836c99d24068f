use photon_demon::demon::{DemonMode, ModeConfiguration};
use photon_demon::ensemble::{
    empirical_distribution, ensemble_delta_n, sample_trials, EnsembleSpec,
};
use photon_demon::haar_average::{haar_average_analytic, haar_average_empirical};
use photon_demon::haar_unitary::{sample_haar, RandomSeed};
use photon_demon::interference::{full_distribution, InputConfiguration, PhotonStatistics};
use photon_demon::symmetric_group::WeingartenCache;
use photon_demon::Execution;

fn ensemble(m: usize, k: usize, seed: u64) -> Vec<photon_demon::UnitaryMatrix> {
    Execution::default().map(k, |i| sample_haar(m, RandomSeed::new(seed).with_stream(i as u64)).unwrap())
}

#[test]
fn distinguishable_average_matches_monte_carlo_per_outcome() {
    let cache = WeingartenCache::new();
    let input = InputConfiguration::first(3);
    let k = 20_000;
    for m in [3, 4, 5] {
        let analytic = haar_average_analytic(m, 3, &PhotonStatistics::Distinguishable, &cache).unwrap();
        let mc = haar_average_empirical(&ensemble(m, k, 5), &input, &PhotonStatistics::Distinguishable, Execution::default())
            .unwrap();
        let se = mc.std_errors.as_ref().unwrap();
        for (i, ((s, p), (_, q))) in analytic.distribution.iter().zip(mc.distribution.iter()).enumerate() {
            assert!((p - q).abs() <= 5.0 * se[i], "M={m} {s}: analytic {p}, sampled {q} +- {}", se[i]);
        }
    }
}

#[test]
fn large_ensembles_converge_in_total_variation() {
    let cache = WeingartenCache::new();
    let input = InputConfiguration::first(3);
    let us = ensemble(4, 100_000, 6);
    for stats in [PhotonStatistics::Indistinguishable, PhotonStatistics::Distinguishable] {
        let analytic = haar_average_analytic(4, 3, &stats, &cache).unwrap();
        let mc = haar_average_empirical(&us, &input, &stats, Execution::default()).unwrap();
        let tv = analytic.distribution.total_variation(&mc.distribution);
        assert!(tv < 0.01, "{stats}: TV {tv}");
    }
}

#[test]
fn ensemble_standard_error_scales_as_inverse_root_k() {
    let config = ModeConfiguration::canonical(4).unwrap();
    let stats = PhotonStatistics::Indistinguishable;
    let run = |k, seed| {
        let spec = EnsembleSpec::new(4, 3, k, stats.clone(), RandomSeed::new(seed));
        ensemble_delta_n(&spec, DemonMode::Active, &config, Execution::default()).unwrap().stats
    };
    let small = run(100, 21);
    let large = run(400, 22);
    let ratio = small.std_error / large.std_error;
    assert!((ratio / 2.0 - 1.0).abs() < 0.3, "SE ratio {ratio}");
}

#[test]
fn sampled_trials_follow_the_outcome_law() {
    let u = sample_haar(4, RandomSeed::new(8)).unwrap();
    let dist = full_distribution(&u, &InputConfiguration::first(3), &PhotonStatistics::Indistinguishable).unwrap();
    let n = 1_000_000;
    let trials = sample_trials(&dist, n, 0, RandomSeed::new(9)).unwrap();
    let freq = empirical_distribution(&trials, 4, 3).unwrap();
    for ((s, p), (_, f)) in dist.iter().zip(freq.iter()) {
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((p - f).abs() <= 5.0 * se + 1e-12, "{s}: {p} vs {f}");
    }
    assert_eq!(trials, sample_trials(&dist, n, 0, RandomSeed::new(9)).unwrap());
}

#[test]
fn sequential_and_parallel_execution_agree_exactly() {
    let spec = EnsembleSpec::new(4, 3, 64, PhotonStatistics::Distinguishable, RandomSeed::new(4)).with_trials(Some(500));
    let config = ModeConfiguration::canonical(4).unwrap();
    let a = ensemble_delta_n(&spec, DemonMode::Active, &config, Execution::Sequential).unwrap();
    let b = ensemble_delta_n(&spec, DemonMode::Active, &config, Execution::default()).unwrap();
    assert_eq!(a, b);
}
