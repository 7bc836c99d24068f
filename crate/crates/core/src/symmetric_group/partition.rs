use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer partition in canonical (weakly decreasing) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Accepts parts in any order; zeros are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::invalid("partition parts must be positive"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub(crate) fn from_sorted_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        Partition { parts }
    }

    /// The partition `(1, 1, ..., 1)` of `d`: cycle type of the identity.
    pub fn ones(d: usize) -> Self {
        Partition { parts: vec![1; d] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The integer being partitioned.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of rows of the Young diagram.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of permutations in `S_d` whose cycle type is `self`: `d! / z_lambda`.
    pub fn class_size(&self) -> u128 {
        let d = self.size();
        let mut z: u128 = 1;
        let mut i = 0;
        while i < self.parts.len() {
            let p = self.parts[i];
            let mut mult = 0;
            while i < self.parts.len() && self.parts[i] == p {
                mult += 1;
                i += 1;
            }
            z *= (p as u128).pow(mult as u32) * super::factorial(mult);
        }
        super::factorial(d) / z
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All partitions of `d`, in reverse lexicographic order: `(d)` first, `(1^d)` last.
pub fn enumerate_partitions(d: usize) -> Result<Vec<Partition>> {
    if d == 0 {
        return Err(Error::invalid("cannot enumerate partitions of 0"));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(d, d, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition::from_sorted_unchecked(current.clone()));
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part);
        fill(remaining - part, part, current, out);
        current.pop();
    }
}

/// `C_lambda(R) = prod over boxes (i, j) of (R + j - i)`, exact.
pub fn shifted_content_product(lambda: &Partition, r: usize) -> i128 {
    let r = r as i128;
    let mut acc: i128 = 1;
    for (row, &len) in lambda.parts.iter().enumerate() {
        for col in 0..len {
            acc *= r + col as i128 - row as i128;
            if acc == 0 {
                return 0;
            }
        }
    }
    acc
}
