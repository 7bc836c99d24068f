use num_complex::Complex64;
use photon_demon::haar_unitary::{sample_haar, RandomSeed, UnitaryMatrix};
use photon_demon::interference::{
    enumerate_outcomes, outcome_probability, outcome_probability_general, DistinguishabilityModel,
    InputConfiguration, OccupationVector, PhotonStatistics,
};
use proptest::prelude::*;

fn haar(d: usize, seed: u64) -> UnitaryMatrix {
    sample_haar(d, RandomSeed::new(seed)).unwrap()
}

/// Photons `0..k` share one internal state and the rest another, orthogonal one.
fn two_groups(n: usize, k: usize) -> DistinguishabilityModel {
    let states: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            if j < k {
                vec![Complex64::ONE, Complex64::ZERO]
            } else {
                vec![Complex64::ZERO, Complex64::ONE]
            }
        })
        .collect();
    DistinguishabilityModel::from_states(&states).unwrap()
}

/// Orthogonal groups never interfere with each other, so the outcome law is the
/// convolution of each group's indistinguishable law.
fn grouped_oracle(u: &UnitaryMatrix, input: &[usize], k: usize, s: &OccupationVector) -> f64 {
    let m = u.dim();
    let (a, b) = input.split_at(k);
    let ia = InputConfiguration::new(a.to_vec()).unwrap();
    let ib = InputConfiguration::new(b.to_vec()).unwrap();
    let mut total = 0.0;
    for sa in enumerate_outcomes(m, a.len()) {
        if sa.counts().iter().zip(s.counts()).any(|(x, y)| x > y) {
            continue;
        }
        let sb = OccupationVector::new(s.counts().iter().zip(sa.counts()).map(|(y, x)| y - x).collect());
        let pa = outcome_probability(u, &ia, &sa, &PhotonStatistics::Indistinguishable).unwrap();
        let pb = outcome_probability(u, &ib, &sb, &PhotonStatistics::Indistinguishable).unwrap();
        total += pa * pb;
    }
    total
}

#[test]
fn hong_ou_mandel_dip() {
    let bs = UnitaryMatrix::beamsplitter();
    let input = InputConfiguration::first(2);
    let coincidence = OccupationVector::new(vec![1, 1]);
    for k in 0..=10 {
        let x = k as f64 / 10.0;
        let model = DistinguishabilityModel::uniform_overlap(2, x).unwrap();
        let p = outcome_probability_general(&bs, &input, &coincidence, &model).unwrap();
        assert!((p - (1.0 - x * x) / 2.0).abs() < 1e-14, "overlap {x}: {p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orthogonal_groups_factorise(seed in any::<u64>(), m in 3usize..6, k in 1usize..3) {
        let n = 3;
        let u = haar(m, seed);
        let input: Vec<usize> = (0..n).collect();
        let model = PhotonStatistics::Partial(two_groups(n, k));
        let inp = InputConfiguration::new(input.clone()).unwrap();
        for s in enumerate_outcomes(m, n) {
            let p = outcome_probability(&u, &inp, &s, &model).unwrap();
            let q = grouped_oracle(&u, &input, k, &s);
            prop_assert!((p - q).abs() < 1e-12, "{s}: {p} vs {q}");
        }
    }

    #[test]
    fn output_relabelling_is_covariant(seed in any::<u64>(), rho in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle()) {
        let u = haar(4, seed);
        let permuted = u.permute_rows(&rho).unwrap();
        let input = InputConfiguration::first(3);
        let partial = PhotonStatistics::Partial(DistinguishabilityModel::uniform_overlap(3, 0.7).unwrap());
        for stats in [PhotonStatistics::Indistinguishable, PhotonStatistics::Distinguishable, partial] {
            for s in enumerate_outcomes(4, 3) {
                let p = outcome_probability(&u, &input, &s, &stats).unwrap();
                let q = outcome_probability(&permuted, &input, &s.relabel(&rho), &stats).unwrap();
                prop_assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_bunching_is_monotone_in_overlap(seed in any::<u64>(), x in 0.0f64..1.0) {
        // p(3,0,0,0) = prod_k |U_0k|^2 perm(G), and perm(G) = 1 + 3x^2 + 2x^3.
        let u = haar(4, seed);
        let input = InputConfiguration::first(3);
        let s = OccupationVector::new(vec![3, 0, 0, 0]);
        let p = |stats: &PhotonStatistics| outcome_probability(&u, &input, &s, stats).unwrap();
        let lo = p(&PhotonStatistics::Distinguishable);
        let hi = p(&PhotonStatistics::Indistinguishable);
        let mid = p(&PhotonStatistics::Partial(DistinguishabilityModel::uniform_overlap(3, x).unwrap()));
        prop_assert!(mid >= lo - 1e-12 && mid <= hi + 1e-12, "{lo} <= {mid} <= {hi}");
        prop_assert!((mid - lo * (1.0 + 3.0 * x * x + 2.0 * x * x * x)).abs() < 1e-12);
    }
}
