//! Small helpers for sets of ids represented as sorted, deduplicated vectors.

use std::collections::BTreeSet;

pub fn normalize(ids: &[usize]) -> Vec<usize> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    let b: BTreeSet<usize> = b.iter().copied().collect();
    let mut v: Vec<usize> = a.iter().copied().filter(|x| !b.contains(x)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let b: BTreeSet<usize> = b.iter().copied().collect();
    let mut v: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Elements of `ground` selected by the bits of `mask`.
pub fn from_mask(ground: &[usize], mask: u64) -> Vec<usize> {
    ground
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &x)| x)
        .collect()
}

/// All subsets of `ground`, in mask order.
pub fn subsets(ground: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    assert!(ground.len() < 64);
    (0u64..1 << ground.len()).map(move |m| from_mask(ground, m))
}
