use num_complex::Complex64;

use super::{permanent, symmetry_factor, DistinguishabilityModel, InputConfiguration, OccupationVector, PhotonStatistics};
use crate::error::{Error, Result};
use crate::haar_unitary::UnitaryMatrix;
use crate::symmetric_group::Permutation;

/// Photon-number limit of the `O((N!)^2)` general formula.
pub const MAX_GENERAL_PHOTONS: usize = 6;

const IMAG_TOL: f64 = 1e-8;
const CLAMP_TOL: f64 = 1e-12;

fn check_shapes(u: &UnitaryMatrix, input: &InputConfiguration, s: &OccupationVector) -> Result<()> {
    if s.modes() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: s.modes(),
        });
    }
    input.check_modes(u.dim())?;
    if s.total() != input.photons() {
        return Err(Error::PhotonCountMismatch {
            expected: input.photons(),
            found: s.total(),
        });
    }
    Ok(())
}

/// The `N x N` submatrix `A_rc = U[o_r, i_c]`: rows follow the output multiset
/// (modes ascending, repeats adjacent), columns the input modes.
pub fn transfer_matrix(
    u: &UnitaryMatrix,
    input: &InputConfiguration,
    s: &OccupationVector,
) -> Result<Vec<Complex64>> {
    check_shapes(u, input, s)?;
    let rows = s.multiset();
    Ok(rows
        .iter()
        .flat_map(|&o| input.modes().iter().map(move |&i| u[(o, i)]))
        .collect())
}

fn clamp(p: f64) -> Result<f64> {
    if p >= 0.0 {
        Ok(p)
    } else if p >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::NumericalConsistency(format!(
            "negative probability {p:.3e}; the Gram matrix is probably invalid"
        )))
    }
}

/// Outcome probability for arbitrary internal-state overlaps.
///
/// Photon `k` enters mode `i_k`; an assignment `pi` sends it to output slot
/// `pi(k)` of the multiset `O`. Two assignments interfere with weight
/// `prod_k <psi_{pi'^-1(pi(k))} | psi_k>`, the overlap of the internal states
/// that end up in the same slot:
///
/// `p = (1/mu(s)) sum_{pi, pi'} prod_k A[pi(k)][k] conj(A[pi'(k)][k]) gram[pi'^-1(pi(k))][k]`.
pub fn outcome_probability_general(
    u: &UnitaryMatrix,
    input: &InputConfiguration,
    s: &OccupationVector,
    model: &DistinguishabilityModel,
) -> Result<f64> {
    let a = transfer_matrix(u, input, s)?;
    let n = input.photons();
    if model.photons() != n {
        return Err(Error::PhotonCountMismatch {
            expected: n,
            found: model.photons(),
        });
    }
    if n > MAX_GENERAL_PHOTONS {
        return Err(Error::TooLarge {
            what: "general permutation sum (photons)",
            size: n,
            max: MAX_GENERAL_PHOTONS,
        });
    }
    let perms = Permutation::all(n);
    let amps: Vec<Complex64> = perms
        .iter()
        .map(|p| (0..n).map(|k| a[p.apply(k) * n + k]).product())
        .collect();
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();

    let mut total = Complex64::ZERO;
    for (pi, amp) in perms.iter().zip(&amps) {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        for (pi_prime_inv, amp_prime) in inverses.iter().zip(&amps) {
            let overlap: Complex64 = (0..n)
                .map(|k| model.overlap(pi_prime_inv.apply(pi.apply(k)), k))
                .product();
            total += amp * amp_prime.conj() * overlap;
        }
    }
    let mu = symmetry_factor(s) as f64;
    let p = total / mu;
    if p.im.abs() > IMAG_TOL {
        return Err(Error::NumericalConsistency(format!(
            "outcome probability has imaginary part {:.3e}",
            p.im
        )));
    }
    clamp(p.re)
}

/// Indistinguishable photons: `|perm(A)|^2 / mu(s)`.
pub fn outcome_probability_indist(
    u: &UnitaryMatrix,
    input: &InputConfiguration,
    s: &OccupationVector,
) -> Result<f64> {
    let a = transfer_matrix(u, input, s)?;
    let perm = permanent(&a, input.photons())?;
    clamp(perm.norm_sqr() / symmetry_factor(s) as f64)
}

/// Distinguishable photons: `perm(|A|^2) / mu(s)` with the modulus squared taken entrywise.
pub fn outcome_probability_dist(
    u: &UnitaryMatrix,
    input: &InputConfiguration,
    s: &OccupationVector,
) -> Result<f64> {
    let a = transfer_matrix(u, input, s)?;
    let b: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    let perm = permanent(&b, input.photons())?;
    clamp(perm / symmetry_factor(s) as f64)
}

/// Dispatches to the permanent routes for the two endpoints and to the general
/// sum for an explicit Gram matrix.
pub fn outcome_probability(
    u: &UnitaryMatrix,
    input: &InputConfiguration,
    s: &OccupationVector,
    statistics: &PhotonStatistics,
) -> Result<f64> {
    match statistics {
        PhotonStatistics::Indistinguishable => outcome_probability_indist(u, input, s),
        PhotonStatistics::Distinguishable => outcome_probability_dist(u, input, s),
        PhotonStatistics::Partial(g) => outcome_probability_general(u, input, s, g),
    }
}

/// Lower bound `sqrt(V)` on the overlap of two photons whose HOM dip has visibility `V`.
pub fn hom_visibility_bound(visibility: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::invalid(format!(
            "HOM visibility {visibility} outside [0, 1]"
        )));
    }
    Ok(visibility.sqrt())
}
