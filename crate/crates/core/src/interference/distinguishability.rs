use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack for Hermiticity, unit diagonal and the smallest Gram eigenvalue.
pub const GRAM_TOL: f64 = 1e-10;

/// `N x N` Gram matrix of internal states, `gram[j][k] = <psi_j | psi_k>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GramFile", into = "GramFile")]
pub struct DistinguishabilityModel {
    n: usize,
    gram: Vec<Complex64>,
}

impl DistinguishabilityModel {
    /// Validates Hermiticity, unit diagonal and positive semidefiniteness.
    pub fn new(n: usize, gram: Vec<Complex64>) -> Result<Self> {
        if gram.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: gram.len(),
            });
        }
        for j in 0..n {
            let d = gram[j * n + j];
            if (d - Complex64::ONE).norm() > GRAM_TOL {
                return Err(Error::InvalidGram(format!(
                    "diagonal entry {j} is {d}, expected 1"
                )));
            }
            for k in 0..j {
                let a = gram[j * n + k];
                let b = gram[k * n + j];
                if (a - b.conj()).norm() > GRAM_TOL {
                    return Err(Error::InvalidGram(format!(
                        "entries ({j},{k}) and ({k},{j}) are not conjugate"
                    )));
                }
            }
        }
        if n > 0 {
            let m = DMatrix::from_fn(n, n, |r, c| gram[r * n + c]);
            let eig = SymmetricEigen::new(m);
            let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            if min < -GRAM_TOL {
                return Err(Error::InvalidGram(format!(
                    "not positive semidefinite: smallest eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(DistinguishabilityModel { n, gram })
    }

    /// All overlaps equal to one.
    pub fn indistinguishable(n: usize) -> Self {
        DistinguishabilityModel {
            n,
            gram: vec![Complex64::ONE; n * n],
        }
    }

    /// Orthogonal internal states.
    pub fn distinguishable(n: usize) -> Self {
        let gram = (0..n * n)
            .map(|k| if k / n == k % n { Complex64::ONE } else { Complex64::ZERO })
            .collect();
        DistinguishabilityModel { n, gram }
    }

    /// Every pair of photons has the same real overlap `x`.
    pub fn uniform_overlap(n: usize, x: f64) -> Result<Self> {
        let gram = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Complex64::ONE
                } else {
                    Complex64::new(x, 0.0)
                }
            })
            .collect();
        Self::new(n, gram)
    }

    /// Gram matrix of explicit internal-state vectors (normalised here).
    pub fn from_states(states: &[Vec<Complex64>]) -> Result<Self> {
        let normed: Vec<Vec<Complex64>> = states
            .iter()
            .map(|v| {
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::InvalidGram("zero internal state".into()));
                }
                Ok(v.iter().map(|z| z / norm).collect())
            })
            .collect::<Result<_>>()?;
        let n = normed.len();
        let mut gram = Vec::with_capacity(n * n);
        for a in &normed {
            for b in &normed {
                if a.len() != b.len() {
                    return Err(Error::InvalidGram("internal states differ in dimension".into()));
                }
                gram.push(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum());
            }
        }
        Self::new(n, gram)
    }

    pub fn photons(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.gram
    }

    /// `<psi_j | psi_k>`.
    pub fn overlap(&self, j: usize, k: usize) -> Complex64 {
        self.gram[j * self.n + k]
    }
}

/// Photon statistics: one of the two endpoints or an explicit Gram matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhotonStatistics {
    Distinguishable,
    Indistinguishable,
    Partial(DistinguishabilityModel),
}

impl PhotonStatistics {
    pub fn label(&self) -> &'static str {
        match self {
            PhotonStatistics::Distinguishable => "dist",
            PhotonStatistics::Indistinguishable => "indist",
            PhotonStatistics::Partial(_) => "partial",
        }
    }

    /// Gram matrix for `n` photons.
    pub fn gram(&self, n: usize) -> Result<DistinguishabilityModel> {
        match self {
            PhotonStatistics::Distinguishable => Ok(DistinguishabilityModel::distinguishable(n)),
            PhotonStatistics::Indistinguishable => {
                Ok(DistinguishabilityModel::indistinguishable(n))
            }
            PhotonStatistics::Partial(g) if g.photons() == n => Ok(g.clone()),
            PhotonStatistics::Partial(g) => Err(Error::PhotonCountMismatch {
                expected: n,
                found: g.photons(),
            }),
        }
    }
}

impl fmt::Display for PhotonStatistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// File form of a Gram matrix: `{ "dim": N, "entries": [[re, im], ...] }`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<DistinguishabilityModel> for GramFile {
    fn from(m: DistinguishabilityModel) -> Self {
        GramFile::from(&m)
    }
}

impl From<&DistinguishabilityModel> for GramFile {
    fn from(m: &DistinguishabilityModel) -> Self {
        GramFile {
            dim: m.n,
            entries: m.gram.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<GramFile> for DistinguishabilityModel {
    type Error = Error;

    fn try_from(f: GramFile) -> Result<Self> {
        let gram = f.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        DistinguishabilityModel::new(f.dim, gram)
    }
}
