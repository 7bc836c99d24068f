use std::ops::Neg;

use itertools::Itertools;
use num_traits::Num;

use crate::error::{Error, Result};

/// Largest matrix accepted by [`permanent`]; Ryser costs `O(2^n n)`.
pub const MAX_PERMANENT_SIZE: usize = 24;

/// Permanent of the `n x n` row-major `matrix` via Ryser's formula in Gray-code order.
///
/// `perm(A) = (-1)^n sum_{S != {}} (-1)^{|S|} prod_i sum_{j in S} A_ij`. Walking the
/// subsets in Gray-code order changes one column per step, so the row sums
/// are updated in `O(n)` instead of being recomputed.
pub fn permanent<T>(matrix: &[T], n: usize) -> Result<T>
where
    T: Copy + Num + Neg<Output = T>,
{
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: matrix.len(),
        });
    }
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::TooLarge {
            what: "permanent",
            size: n,
            max: MAX_PERMANENT_SIZE,
        });
    }
    if n == 0 {
        return Ok(T::one());
    }
    let mut row_sums = vec![T::zero(); n];
    let mut total = T::zero();
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let col = k.trailing_zeros() as usize;
        let bit = 1u64 << col;
        gray ^= bit;
        if gray & bit != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s = *s + matrix[i * n + col];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s = *s - matrix[i * n + col];
            }
        }
        let prod = row_sums.iter().fold(T::one(), |acc, &s| acc * s);
        // (-1)^(n - |S|)
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            total = total + prod;
        } else {
            total = total - prod;
        }
    }
    Ok(total)
}

/// `sum_{pi in S_n} prod_i A_{i, pi(i)}`; the definition, for testing small cases.
pub fn permanent_brute_force<T>(matrix: &[T], n: usize) -> T
where
    T: Copy + Num,
{
    (0..n)
        .permutations(n)
        .map(|pi| (0..n).fold(T::one(), |acc, i| acc * matrix[i * n + pi[i]]))
        .fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn small_cases() {
        assert_eq!(permanent::<f64>(&[], 0).unwrap(), 1.0);
        assert_eq!(permanent(&[3.0], 1).unwrap(), 3.0);
        assert_eq!(permanent(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(), 10.0);
        // All-ones n x n has permanent n!.
        assert_eq!(permanent(&[1.0; 25], 5).unwrap(), 120.0);
        assert_eq!(permanent(&[1i64; 36], 6).unwrap(), 720);
        assert!(permanent(&[1.0; 3], 2).is_err());
    }

    #[test]
    fn complex_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for n in 1..=7 {
            let a: Vec<Complex64> = (0..n * n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let fast = permanent(&a, n).unwrap();
            let slow = permanent_brute_force(&a, n);
            assert!((fast - slow).norm() < 1e-10, "n = {n}: {fast} vs {slow}");
        }
    }

    proptest! {
        #[test]
        fn integer_matrices_agree(n in 1usize..=6, entries in proptest::collection::vec(-3i64..=3, 36)) {
            let a = &entries[..n * n];
            prop_assert_eq!(permanent(a, n).unwrap(), permanent_brute_force(a, n));
        }

        #[test]
        fn invariant_under_row_swaps(entries in proptest::collection::vec(-5i64..=5, 16), i in 0usize..4, j in 0usize..4) {
            let mut b = entries.clone();
            for c in 0..4 {
                b.swap(i * 4 + c, j * 4 + c);
            }
            prop_assert_eq!(permanent(&entries, 4).unwrap(), permanent(&b, 4).unwrap());
        }
    }
}
