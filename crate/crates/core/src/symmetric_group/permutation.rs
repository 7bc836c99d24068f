use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::Partition;
use crate::error::{Error, Result};

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// A bijection on `{0, ..., d - 1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(Error::invalid(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(d: usize) -> Self {
        Permutation {
            images: (0..d).collect(),
        }
    }

    /// Every permutation of `d` symbols in lexicographic order of image lists.
    pub fn all(d: usize) -> Vec<Permutation> {
        (0..d)
            .permutations(d)
            .map(|images| Permutation { images })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len(), "permutation degree mismatch");
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn cycle_type(&self) -> Partition {
        cycle_type_of(&self.images)
    }

    pub fn sign(&self) -> i64 {
        let ct = self.cycle_type();
        if (self.len() - ct.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

pub(crate) fn cycle_type_of(images: &[usize]) -> Partition {
    let d = images.len();
    let mut seen = vec![false; d];
    let mut lengths = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = images[i];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    Partition::from_sorted_unchecked(lengths)
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}
