use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photon counts per output mode; the outcome `s = (s_1, ..., s_M)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector {
    counts: Vec<usize>,
}

impl OccupationVector {
    pub fn new(counts: Vec<usize>) -> Self {
        OccupationVector { counts }
    }

    /// Builds the occupation vector of a multiset of output modes.
    pub fn from_multiset(modes: usize, multiset: &[usize]) -> Result<Self> {
        let mut counts = vec![0; modes];
        for &o in multiset {
            if o >= modes {
                return Err(Error::invalid(format!("mode {o} out of range for M = {modes}")));
            }
            counts[o] += 1;
        }
        Ok(OccupationVector { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn modes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn get(&self, mode: usize) -> usize {
        self.counts[mode]
    }

    /// The multiset `O`: mode `j` repeated `s_j` times, ascending.
    pub fn multiset(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| std::iter::repeat_n(j, c))
            .collect()
    }

    /// Nonzero counts in decreasing order; outcomes of equal type are
    /// related by a relabelling of modes.
    pub fn occupancy_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.counts.iter().copied().filter(|&c| c > 0).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Outcome after sending mode `j` to mode `rho[j]`.
    pub fn relabel(&self, rho: &[usize]) -> Self {
        let mut counts = vec![0; self.counts.len()];
        for (j, &c) in self.counts.iter().enumerate() {
            counts[rho[j]] = c;
        }
        OccupationVector { counts }
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// `mu(s) = prod_j s_j!`.
pub fn symmetry_factor(s: &OccupationVector) -> u128 {
    s.counts
        .iter()
        .map(|&c| crate::symmetric_group::factorial(c))
        .product()
}

/// Input modes `i_1 < ... < i_N`, one photon each.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct InputConfiguration {
    modes: Vec<usize>,
}

impl InputConfiguration {
    /// Sorts the modes; duplicates are rejected because each mode holds at most one photon.
    pub fn new(mut modes: Vec<usize>) -> Result<Self> {
        modes.sort_unstable();
        if modes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "input modes {modes:?} repeat a mode; each mode holds at most one photon"
            )));
        }
        Ok(InputConfiguration { modes })
    }

    /// Photons in modes `0..n`.
    pub fn first(n: usize) -> Self {
        InputConfiguration {
            modes: (0..n).collect(),
        }
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn photons(&self) -> usize {
        self.modes.len()
    }

    pub fn check_modes(&self, m: usize) -> Result<()> {
        match self.modes.last() {
            Some(&last) if last >= m => Err(Error::invalid(format!(
                "input mode {last} out of range for M = {m}"
            ))),
            _ => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for InputConfiguration {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        InputConfiguration::new(v)
    }
}

impl From<InputConfiguration> for Vec<usize> {
    fn from(c: InputConfiguration) -> Self {
        c.modes
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All weak compositions of `n` into `m` parts, in lexicographic order of the
/// count vectors with the first mode most significant and largest first:
/// `(n, 0, ..., 0)` comes first and `(0, ..., 0, n)` last.
pub fn enumerate_outcomes(m: usize, n: usize) -> Vec<OccupationVector> {
    let mut out = Vec::with_capacity(binomial(m + n - 1, n).min(1 << 20) as usize);
    if m == 0 {
        return out;
    }
    let mut current = vec![0; m];
    fill(0, n, &mut current, &mut out);
    out
}

fn fill(mode: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<OccupationVector>) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(OccupationVector::new(current.clone()));
        return;
    }
    for c in (0..=remaining).rev() {
        current[mode] = c;
        fill(mode + 1, remaining - c, current, out);
    }
    current[mode] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: every vector in {0..n}^m with the right total.
    fn brute(m: usize, n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let total = (n + 1).pow(m as u32);
        for mut code in 0..total {
            let mut v = Vec::with_capacity(m);
            for _ in 0..m {
                v.push(code % (n + 1));
                code /= n + 1;
            }
            if v.iter().sum::<usize>() == n {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn outcome_counts() {
        assert_eq!(enumerate_outcomes(4, 3).len(), 20);
        assert_eq!(enumerate_outcomes(3, 3).len(), 10);
        assert_eq!(
            enumerate_outcomes(1, 5),
            vec![OccupationVector::new(vec![5])]
        );
        assert_eq!(enumerate_outcomes(3, 0), vec![OccupationVector::new(vec![0, 0, 0])]);
        for m in 1..=5 {
            for n in 0..=5 {
                let got = enumerate_outcomes(m, n);
                assert_eq!(got.len() as u128, binomial(m + n - 1, n));
                let mut want = brute(m, n);
                want.sort();
                want.reverse();
                let got: Vec<Vec<usize>> = got.iter().map(|s| s.counts().to_vec()).collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn symmetry_factors() {
        let s = |v: &[usize]| symmetry_factor(&OccupationVector::new(v.to_vec()));
        assert_eq!(s(&[1, 1, 1, 0]), 1);
        assert_eq!(s(&[3, 0, 0, 0]), 6);
        assert_eq!(s(&[2, 0, 1, 0]), 2);
    }

    #[test]
    fn multiset_round_trip() {
        let s = OccupationVector::new(vec![2, 0, 0, 1]);
        assert_eq!(s.multiset(), vec![0, 0, 3]);
        assert_eq!(OccupationVector::from_multiset(4, &[3, 0, 0]).unwrap(), s);
        assert!(OccupationVector::from_multiset(2, &[3]).is_err());
        assert_eq!(s.occupancy_type(), vec![2, 1]);
        assert_eq!(s.relabel(&[3, 1, 2, 0]).counts(), &[1, 0, 0, 2]);
    }

    #[test]
    fn input_configuration_validation() {
        assert!(InputConfiguration::new(vec![0, 0]).is_err());
        let c = InputConfiguration::new(vec![2, 0, 1]).unwrap();
        assert_eq!(c.modes(), &[0, 1, 2]);
        assert!(c.check_modes(3).is_ok());
        assert!(c.check_modes(2).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }
}
