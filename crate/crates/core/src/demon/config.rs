use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Split of the output modes into two equal halves `A` and `B`, with one
/// measured mode in each.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeConfiguration {
    subset_a: Vec<usize>,
    subset_b: Vec<usize>,
    measured_a: usize,
    measured_b: usize,
}

impl ModeConfiguration {
    pub fn new(
        mut subset_a: Vec<usize>,
        mut subset_b: Vec<usize>,
        measured_a: usize,
        measured_b: usize,
    ) -> Result<Self> {
        subset_a.sort_unstable();
        subset_b.sort_unstable();
        let m = subset_a.len() + subset_b.len();
        if m == 0 || subset_a.len() != subset_b.len() {
            return Err(Error::InvalidConfiguration(format!(
                "subsets must be nonempty and of equal size, got {} and {}",
                subset_a.len(),
                subset_b.len()
            )));
        }
        let mut seen = vec![false; m];
        for &j in subset_a.iter().chain(&subset_b) {
            if j >= m || seen[j] {
                return Err(Error::InvalidConfiguration(format!(
                    "subsets {subset_a:?} and {subset_b:?} do not partition 0..{m}"
                )));
            }
            seen[j] = true;
        }
        if !subset_a.contains(&measured_a) || !subset_b.contains(&measured_b) {
            return Err(Error::InvalidConfiguration(format!(
                "measured modes ({measured_a}, {measured_b}) must lie in their subsets"
            )));
        }
        Ok(ModeConfiguration {
            subset_a,
            subset_b,
            measured_a,
            measured_b,
        })
    }

    /// `A` = the first `M/2` modes, `B` = the rest, measuring the first mode of each.
    pub fn canonical(m: usize) -> Result<Self> {
        check_even(m)?;
        let h = m / 2;
        Self::new((0..h).collect(), (h..m).collect(), 0, h)
    }

    /// All `C(M, M/2) * (M/2)^2` configurations, ordered by subset `A`
    /// (lexicographically), then by the measured modes. For `M = 4` there are 24.
    pub fn all(m: usize) -> Result<Vec<Self>> {
        check_even(m)?;
        let mut out = Vec::new();
        for a in (0..m).combinations(m / 2) {
            let b: Vec<usize> = (0..m).filter(|j| !a.contains(j)).collect();
            for &ma in &a {
                for &mb in &b {
                    out.push(ModeConfiguration {
                        subset_a: a.clone(),
                        subset_b: b.clone(),
                        measured_a: ma,
                        measured_b: mb,
                    });
                }
            }
        }
        Ok(out)
    }

    /// The same configuration with the roles of `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        ModeConfiguration {
            subset_a: self.subset_b.clone(),
            subset_b: self.subset_a.clone(),
            measured_a: self.measured_b,
            measured_b: self.measured_a,
        }
    }

    pub fn modes(&self) -> usize {
        self.subset_a.len() * 2
    }

    pub fn subset_a(&self) -> &[usize] {
        &self.subset_a
    }

    pub fn subset_b(&self) -> &[usize] {
        &self.subset_b
    }

    pub fn measured_a(&self) -> usize {
        self.measured_a
    }

    pub fn measured_b(&self) -> usize {
        self.measured_b
    }

    pub(crate) fn check_modes(&self, m: usize) -> Result<()> {
        if self.modes() != m {
            return Err(Error::InvalidConfiguration(format!(
                "configuration covers {} modes but the distribution has {m}",
                self.modes()
            )));
        }
        Ok(())
    }
}

fn check_even(m: usize) -> Result<()> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::InvalidConfiguration(format!(
            "the demon needs a positive even number of modes, got {m}"
        )));
    }
    Ok(())
}

impl fmt::Display for ModeConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|j| j.to_string()).join(" ");
        write!(
            f,
            "A={{{}}} B={{{}}} a={} b={}",
            join(&self.subset_a),
            join(&self.subset_b),
            self.measured_a,
            self.measured_b
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemonMode {
    #[default]
    Passive,
    Active,
}

impl std::str::FromStr for DemonMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "passive" => Ok(DemonMode::Passive),
            "active" => Ok(DemonMode::Active),
            other => Err(Error::invalid(format!(
                "unknown demon mode {other:?}, expected passive or active"
            ))),
        }
    }
}

impl fmt::Display for DemonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DemonMode::Passive => "passive",
            DemonMode::Active => "active",
        })
    }
}
