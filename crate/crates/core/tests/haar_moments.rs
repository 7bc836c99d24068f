use num_complex::Complex64;
use photon_demon::haar_unitary::{compose, sample_haar, RandomSeed, UnitaryMatrix};
use photon_demon::symmetric_group::{haar_moment, WeingartenCache};
use photon_demon::Execution;
use proptest::prelude::*;

/// Sample mean and standard error of `f(U)` over `k` Haar unitaries.
fn sampled(d: usize, k: usize, seed: u64, f: impl Fn(&UnitaryMatrix) -> f64 + Sync + Send) -> (f64, f64) {
    let values = Execution::default().map(k, |i| {
        f(&sample_haar(d, RandomSeed::new(seed).with_stream(i as u64)).unwrap())
    });
    let n = k as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn assert_within(label: &str, (mean, se): (f64, f64), want: f64, z: f64) {
    assert!(
        (mean - want).abs() <= z * se,
        "{label}: sampled {mean} +- {se}, expected {want}"
    );
}

#[test]
fn first_moment_of_entry_modulus() {
    let cache = WeingartenCache::new();
    let exact = haar_moment(&[0], &[0], &[0], &[0], 4, &cache).unwrap();
    assert_eq!(exact, 0.25);
    let est = sampled(4, 100_000, 11, |u| u[(0, 0)].norm_sqr());
    assert_within("E|U11|^2", est, exact, 5.0);
}

#[test]
fn second_moments_in_two_dimensions() {
    let cache = WeingartenCache::new();
    // |U11|^2 is uniform on [0, 1] for d = 2, so E|U11|^4 = 1/3.
    let fourth = haar_moment(&[0, 0], &[0, 0], &[0, 0], &[0, 0], 2, &cache).unwrap();
    assert!((fourth - 1.0 / 3.0).abs() < 1e-15);
    // E[U11 U22 conj(U12 U21)] = Wg(transposition) = -1 / (d (d^2 - 1)).
    let cross = haar_moment(&[0, 1], &[0, 1], &[0, 1], &[1, 0], 2, &cache).unwrap();
    assert!((cross + 1.0 / 6.0).abs() < 1e-15);

    let k = 1_000_000;
    assert_within("E|U11|^4", sampled(2, k, 12, |u| u[(0, 0)].norm_sqr().powi(2)), fourth, 5.0);
    let est = sampled(2, k, 13, |u| (u[(0, 0)] * u[(1, 1)] * (u[(0, 1)] * u[(1, 0)]).conj()).re);
    assert_within("E[U11 U22 conj(U12 U21)]", est, cross, 5.0);
}

#[test]
fn left_and_right_invariance() {
    let cache = WeingartenCache::new();
    let v = sample_haar(3, RandomSeed::new(99)).unwrap();
    let want = haar_moment(&[0, 0], &[1, 1], &[0, 0], &[1, 1], 3, &cache).unwrap();
    assert!((want - 1.0 / 6.0).abs() < 1e-15);
    let left = sampled(3, 200_000, 14, |u| compose(u, &v).unwrap()[(0, 1)].norm_sqr().powi(2));
    let right = sampled(3, 200_000, 14, |u| compose(&v, u).unwrap()[(0, 1)].norm_sqr().powi(2));
    assert_within("left-translated", left, want, 5.0);
    assert_within("right-translated", right, want, 5.0);
}

#[test]
fn phases_are_uniform() {
    // A biased phase convention shows up as a nonzero mean of U11 itself.
    let re = sampled(3, 100_000, 15, |u| u[(0, 0)].re);
    let im = sampled(3, 100_000, 15, |u| u[(0, 0)].im);
    assert_within("E Re U11", re, 0.0, 5.0);
    assert_within("E Im U11", im, 0.0, 5.0);
    let diag = sampled(3, 100_000, 16, |u| {
        let z: Complex64 = u[(0, 0)] * u[(0, 0)];
        z.re
    });
    assert_within("E Re U11^2", diag, 0.0, 5.0);
}

proptest! {
    #[test]
    fn samples_are_unitary(d in 1usize..9, seed in any::<u64>(), stream in any::<u64>()) {
        let u = sample_haar(d, RandomSeed::new(seed).with_stream(stream)).unwrap();
        prop_assert!(u.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn sampling_is_reproducible(d in 1usize..7, seed in any::<u64>()) {
        let s = RandomSeed::new(seed).with_stream(3);
        prop_assert_eq!(sample_haar(d, s).unwrap(), sample_haar(d, s).unwrap());
    }
}
