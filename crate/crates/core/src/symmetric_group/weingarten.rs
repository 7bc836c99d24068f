use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, ToPrimitive, Zero};

use super::permutation::cycle_type_of;
use super::{factorial, shifted_content_product, CharacterTable, Partition, Permutation};
use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Largest degree for which Weingarten values are tabulated. The double
/// permutation sums that consume them are `O((d!)^2)` anyway.
pub const MAX_WEINGARTEN_DEGREE: usize = 8;

/// Exact values of `Wg_{R,d}` on every cycle type of `S_d`.
///
/// `Wg(sigma) = (1/d!) sum_{lambda |- d, C_lambda(R) != 0} chi^lambda(id) chi^lambda(sigma) / C_lambda(R)`.
#[derive(Clone, Debug)]
pub struct WeingartenTable {
    r: usize,
    d: usize,
    values: BTreeMap<Partition, Rational>,
}

impl WeingartenTable {
    pub fn new(r: usize, d: usize) -> Result<Self> {
        if r == 0 || d == 0 {
            return Err(Error::invalid(format!(
                "Weingarten function needs R >= 1 and d >= 1 (got R = {r}, d = {d})"
            )));
        }
        if d > MAX_WEINGARTEN_DEGREE {
            return Err(Error::TooLarge {
                what: "Weingarten degree",
                size: d,
                max: MAX_WEINGARTEN_DEGREE,
            });
        }
        let chars = CharacterTable::new(d)?;
        let d_fact = factorial(d) as i128;
        let overflow = || Error::NumericalConsistency("Weingarten rational overflow".into());

        let mut values = BTreeMap::new();
        for sigma in chars.partitions() {
            let mut acc = Rational::zero();
            for lambda in chars.partitions() {
                let c = shifted_content_product(lambda, r);
                if c == 0 {
                    continue;
                }
                let dim = chars.dimension(lambda).expect("lambda in table") as i128;
                let chi = chars.get(lambda, sigma).expect("sigma in table") as i128;
                let term = Rational::new(dim * chi, c);
                acc = acc.checked_add(&term).ok_or_else(overflow)?;
            }
            let value = acc
                .checked_mul(&Rational::new(1, d_fact))
                .ok_or_else(overflow)?;
            values.insert(sigma.clone(), value);
        }
        Ok(WeingartenTable { r, d, values })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn exact(&self, cycle_type: &Partition) -> Option<Rational> {
        self.values.get(cycle_type).copied()
    }

    pub fn get(&self, cycle_type: &Partition) -> Option<f64> {
        self.exact(cycle_type).map(rational_to_f64)
    }

    pub fn of_permutation(&self, sigma: &Permutation) -> Option<Rational> {
        self.exact(&sigma.cycle_type())
    }

    /// `(cycle type, exact value)` pairs in partition order.
    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.values.iter()
    }

    /// `sum_{sigma in S_d} Wg(sigma)`, weighting each class by its size.
    pub fn class_weighted_sum(&self) -> Rational {
        self.values
            .iter()
            .map(|(ct, v)| v * Rational::from_integer(ct.class_size() as i128))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

pub fn rational_to_f64(r: Rational) -> f64 {
    // Ratio::to_f64 rounds correctly for i128 components.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Read-mostly, thread-safe store of [`WeingartenTable`]s keyed by `(R, d)`.
#[derive(Debug, Default)]
pub struct WeingartenCache {
    tables: RwLock<HashMap<(usize, usize), Arc<WeingartenTable>>>,
}

impl WeingartenCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache.
    pub fn global() -> &'static WeingartenCache {
        static GLOBAL: OnceLock<WeingartenCache> = OnceLock::new();
        GLOBAL.get_or_init(WeingartenCache::new)
    }

    pub fn table(&self, r: usize, d: usize) -> Result<Arc<WeingartenTable>> {
        if let Some(t) = self.tables.read().expect("cache lock").get(&(r, d)) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(WeingartenTable::new(r, d)?);
        let mut guard = self.tables.write().expect("cache lock");
        Ok(Arc::clone(guard.entry((r, d)).or_insert(table)))
    }
}

/// `Wg_{R,d}` on the class with the given cycle type.
pub fn weingarten(
    sigma_cycle_type: &Partition,
    r: usize,
    d: usize,
    cache: &WeingartenCache,
) -> Result<f64> {
    if sigma_cycle_type.size() != d {
        return Err(Error::invalid(format!(
            "cycle type {sigma_cycle_type} is not a partition of {d}"
        )));
    }
    let table = cache.table(r, d)?;
    Ok(table.get(sigma_cycle_type).expect("every partition is tabulated"))
}

/// Haar integral over `U(R)` of `U_{i1 j1} ... U_{id jd} conj(U_{i'1 j'1} ... U_{i'd j'd})`, exact.
///
/// Evaluated as the double permutation sum
/// `sum_{sigma, tau} prod_k [i_k = i'_sigma(k)] [j_k = j'_tau(k)] Wg(tau sigma^-1)`.
pub fn haar_moment_exact(
    rows: &[usize],
    cols: &[usize],
    conj_rows: &[usize],
    conj_cols: &[usize],
    r: usize,
    cache: &WeingartenCache,
) -> Result<Rational> {
    let d = rows.len();
    for (name, idx) in [("cols", cols), ("conj_rows", conj_rows), ("conj_cols", conj_cols)] {
        if idx.len() != d {
            return Err(Error::invalid(format!(
                "{name} has length {} but rows has length {d}",
                idx.len()
            )));
        }
    }
    if let Some(&bad) = rows
        .iter()
        .chain(cols)
        .chain(conj_rows)
        .chain(conj_cols)
        .find(|&&i| i >= r)
    {
        return Err(Error::invalid(format!("index {bad} out of range for U({r})")));
    }
    if d == 0 {
        return Ok(Rational::from_integer(1));
    }
    let table = cache.table(r, d)?;
    let perms = Permutation::all(d);
    let matches = |a: &[usize], b: &[usize], p: &Permutation| {
        (0..d).all(|k| a[k] == b[p.apply(k)])
    };
    let sigmas: Vec<&Permutation> = perms.iter().filter(|s| matches(rows, conj_rows, s)).collect();
    let taus: Vec<&Permutation> = perms.iter().filter(|t| matches(cols, conj_cols, t)).collect();

    let mut counts: BTreeMap<Partition, i128> = BTreeMap::new();
    for sigma in &sigmas {
        let sigma_inv = sigma.inverse();
        for tau in &taus {
            let prod = tau.compose(&sigma_inv);
            *counts.entry(cycle_type_of(prod.images())).or_default() += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|(ct, n)| table.exact(&ct).expect("tabulated") * Rational::from_integer(n))
        .fold(Rational::zero(), |a, b| a + b))
}

/// Floating-point value of [`haar_moment_exact`].
pub fn haar_moment(
    rows: &[usize],
    cols: &[usize],
    conj_rows: &[usize],
    conj_cols: &[usize],
    r: usize,
    cache: &WeingartenCache,
) -> Result<f64> {
    haar_moment_exact(rows, cols, conj_rows, conj_cols, r, cache).map(rational_to_f64)
}
