//! Symmetric-group combinatorics needed for Haar integrals over `U(R)`:
//! integer partitions, permutations and their cycle types, irreducible
//! characters via Murnaghan-Nakayama, and the unitary Weingarten function.

mod character;
mod partition;
mod permutation;
mod weingarten;

pub use character::{character, CharacterTable};
pub use partition::{enumerate_partitions, shifted_content_product, Partition};
pub use permutation::{factorial, Permutation};
pub use weingarten::{
    haar_moment, haar_moment_exact, rational_to_f64, weingarten, Rational, WeingartenCache, WeingartenTable,
    MAX_WEINGARTEN_DEGREE,
};
