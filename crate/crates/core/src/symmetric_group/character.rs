use std::collections::HashMap;

use super::{enumerate_partitions, Partition};
use crate::error::{Error, Result};

/// Irreducible character `chi^lambda` evaluated on the class of cycle type `cycle_type`.
///
/// Murnaghan-Nakayama rule on the beta-set (abacus) representation: removing a
/// rim hook of length `r` moves one bead from position `b` to an empty position
/// `b - r`, with sign `(-1)^(beads strictly between)`.
pub fn character(lambda: &Partition, cycle_type: &Partition) -> Result<i64> {
    if lambda.size() != cycle_type.size() {
        return Err(Error::invalid(format!(
            "character degree mismatch: lambda {lambda} vs cycle type {cycle_type}"
        )));
    }
    let mut memo = HashMap::new();
    Ok(mn(lambda.parts(), cycle_type.parts(), &mut memo))
}

type Memo = HashMap<(Vec<usize>, Vec<usize>), i64>;

fn mn(lambda: &[usize], mu: &[usize], memo: &mut Memo) -> i64 {
    if mu.is_empty() {
        return if lambda.is_empty() { 1 } else { 0 };
    }
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let r = mu[0];
    let rest = &mu[1..];
    let len = lambda.len();
    let beta: Vec<usize> = lambda
        .iter()
        .enumerate()
        .map(|(i, &part)| part + len - 1 - i)
        .collect();
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < r {
            continue;
        }
        let target = b - r;
        if beta.contains(&target) {
            continue;
        }
        let between = beta.iter().filter(|&&c| c > target && c < b).count();
        let mut moved = beta.clone();
        moved[idx] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let shape: Vec<usize> = moved
            .iter()
            .enumerate()
            .map(|(i, &c)| c - (len - 1 - i))
            .filter(|&part| part > 0)
            .collect();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        total += sign * mn(&shape, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// Full character table of `S_d`: rows are irreps, columns cycle types,
/// both in [`enumerate_partitions`] order.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    partitions: Vec<Partition>,
    values: Vec<Vec<i64>>,
}

impl CharacterTable {
    pub fn new(d: usize) -> Result<Self> {
        let partitions = enumerate_partitions(d)?;
        let mut memo = HashMap::new();
        let values = partitions
            .iter()
            .map(|lambda| {
                partitions
                    .iter()
                    .map(|mu| mn(lambda.parts(), mu.parts(), &mut memo))
                    .collect()
            })
            .collect();
        Ok(CharacterTable { partitions, values })
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    fn index(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }

    pub fn get(&self, lambda: &Partition, cycle_type: &Partition) -> Option<i64> {
        Some(self.values[self.index(lambda)?][self.index(cycle_type)?])
    }

    /// `chi^lambda(id)`, the dimension of the irrep.
    pub fn dimension(&self, lambda: &Partition) -> Option<i64> {
        let id = Partition::ones(lambda.size());
        self.get(lambda, &id)
    }
}
