//! Unitary matrices, Haar-random sampling and unitary-comparison metrics.

use std::fmt;
use std::ops::Index;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Max-entry tolerance on `U^dagger U - I`.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Seed plus stream id for a ChaCha8 generator.
///
/// Every Monte Carlo task in the crate draws from its own `(seed, stream)`
/// pair, so results do not depend on how work is scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSeed {
    pub const fn new(seed: u64) -> Self {
        RandomSeed { seed, stream: 0 }
    }

    pub const fn with_stream(self, stream: u64) -> Self {
        RandomSeed {
            seed: self.seed,
            stream,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// An `M x M` complex matrix stored row-major, unitary within [`UNITARITY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    /// Builds a unitary from row-major entries, checking unitarity.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let u = UnitaryMatrix { dim, entries };
        let deviation = u.unitarity_deviation();
        if !(deviation <= UNITARITY_TOL) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |r, c| if r == c { Complex64::ONE } else { Complex64::ZERO })
    }

    /// Permutation matrix sending input mode `c` to output mode `perm[c]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let dim = perm.len();
        Self::from_fn(dim, |r, c| {
            if perm[c] == r {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        })
    }

    /// The balanced two-mode beamsplitter `[[1, 1], [1, -1]] / sqrt(2)`.
    pub fn beamsplitter() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        UnitaryMatrix {
            dim: 2,
            entries: vec![
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        UnitaryMatrix {
            dim: d,
            entries: (0..d * d).map(|k| self[(k % d, k / d)].conj()).collect(),
        }
    }

    /// Returns the matrix whose row `rho[r]` is row `r` of `self`.
    pub fn permute_rows(&self, rho: &[usize]) -> Result<Self> {
        if rho.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.len(),
            });
        }
        let mut entries = vec![Complex64::ZERO; self.entries.len()];
        for (r, &target) in rho.iter().enumerate() {
            let d = self.dim;
            entries[target * d..(target + 1) * d].copy_from_slice(self.row(r));
        }
        UnitaryMatrix::new(self.dim, entries)
    }

    /// Max-entry norm of `U^dagger U - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let mut acc = Complex64::ZERO;
                for r in 0..d {
                    acc += self[(r, a)].conj() * self[(r, b)];
                }
                if a == b {
                    acc -= Complex64::ONE;
                }
                let n = acc.norm();
                if n.is_nan() {
                    return f64::NAN;
                }
                worst = worst.max(n);
            }
        }
        worst
    }

    fn mul(&self, rhs: &UnitaryMatrix) -> Vec<Complex64> {
        let d = self.dim;
        let mut out = vec![Complex64::ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self[(r, k)];
                for c in 0..d {
                    out[r * d + c] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for UnitaryMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.dim + c]
    }
}

impl fmt::Display for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Draws a Haar-random unitary of dimension `dim` from a seeded stream.
pub fn sample_haar(dim: usize, seed: RandomSeed) -> Result<UnitaryMatrix> {
    sample_haar_with(dim, &mut seed.rng())
}

/// Haar sampling from a caller-supplied generator.
///
/// A complex Ginibre matrix is QR-factorised and column `j` of `Q` is multiplied
/// by `R_jj / |R_jj|`. The rephasing makes the factorisation unique (positive
/// diagonal of `R`); without it the law of `Q` depends on the QR routine's
/// phase convention and is not Haar.
pub fn sample_haar_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    let ginibre = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let qr = ginibre.qr();
    let (q, r) = qr.unpack();
    let phases: Vec<Complex64> = (0..dim)
        .map(|j| {
            let rjj = r[(j, j)];
            let n = rjj.norm();
            if n > 0.0 {
                rjj / n
            } else {
                Complex64::ONE
            }
        })
        .collect();
    UnitaryMatrix::from_fn(dim, |row, col| q[(row, col)] * phases[col])
}

/// `(1/M) sum_{k,j} |target_kj| |actual_kj|`, the trace form `(1/M) Tr(|U_tar^dagger| |U_exp|)`.
pub fn amplitude_fidelity(target: &UnitaryMatrix, actual: &UnitaryMatrix) -> Result<f64> {
    if target.dim != actual.dim {
        return Err(Error::DimensionMismatch {
            expected: target.dim,
            found: actual.dim,
        });
    }
    let s: f64 = target
        .entries
        .iter()
        .zip(&actual.entries)
        .map(|(a, b)| a.norm() * b.norm())
        .sum();
    Ok(s / target.dim as f64)
}

/// Direct sum placing `inner` on modes `[mode_offset, mode_offset + inner.dim())`
/// and the identity on every other mode.
pub fn embed_unitary(
    inner: &UnitaryMatrix,
    total_dim: usize,
    mode_offset: usize,
) -> Result<UnitaryMatrix> {
    let end = mode_offset + inner.dim;
    if end > total_dim {
        return Err(Error::DimensionMismatch {
            expected: total_dim,
            found: end,
        });
    }
    let block = mode_offset..end;
    UnitaryMatrix::from_fn(total_dim, |r, c| {
        if block.contains(&r) && block.contains(&c) {
            inner[(r - mode_offset, c - mode_offset)]
        } else if r == c {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// Sequential interferometers: `first` is applied first, so the result is `second * first`.
pub fn compose(first: &UnitaryMatrix, second: &UnitaryMatrix) -> Result<UnitaryMatrix> {
    if first.dim != second.dim {
        return Err(Error::DimensionMismatch {
            expected: first.dim,
            found: second.dim,
        });
    }
    UnitaryMatrix::new(first.dim, second.mul(first))
}
