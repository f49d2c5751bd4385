//! Matroid independence oracles.
//!
//! A matroid is accessed only through [`MatroidOracle::independent`]. Vertices
//! are dense ids `0..ground_size()`. Derived views ([`Restriction`],
//! [`Contraction`], [`Truncation`]) re-index their ground set densely and keep
//! a map back to the ids of the base matroid.

use std::collections::HashSet;
use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::sets;

/// Independence-query interface over the vertex ground set `0..ground_size()`.
pub trait MatroidOracle: Debug + Send + Sync {
    fn ground_size(&self) -> usize;

    /// Answers whether `set` is independent. `set` must hold distinct,
    /// in-range ids; use [`MatroidOracle::is_independent`] for untrusted input.
    fn independent(&self, set: &[usize]) -> bool;

    fn is_independent(&self, set: &[usize]) -> Result<bool> {
        validate_ids(self.ground_size(), set)?;
        Ok(self.independent(set))
    }

    /// Size of the largest independent subset of `set`.
    fn rank(&self, set: &[usize]) -> Result<usize> {
        validate_ids(self.ground_size(), set)?;
        Ok(self.max_independent_subset(set).len())
    }

    /// Greedy maximal independent subset of `set`, scanning ids in ascending order.
    /// The matroid axioms make this a maximum-size subset.
    fn max_independent_subset(&self, set: &[usize]) -> Vec<usize> {
        let mut acc = Vec::new();
        for v in sets::normalize(set) {
            acc.push(v);
            if !self.independent(&acc) {
                acc.pop();
            }
        }
        acc
    }

    fn full_rank(&self) -> usize {
        let all: Vec<usize> = (0..self.ground_size()).collect();
        self.max_independent_subset(&all).len()
    }
}

impl<M: MatroidOracle + ?Sized> MatroidOracle for &M {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn independent(&self, set: &[usize]) -> bool {
        (**self).independent(set)
    }
}

impl<M: MatroidOracle + ?Sized> MatroidOracle for Box<M> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn independent(&self, set: &[usize]) -> bool {
        (**self).independent(set)
    }
}

impl<M: MatroidOracle + ?Sized> MatroidOracle for Arc<M> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn independent(&self, set: &[usize]) -> bool {
        (**self).independent(set)
    }
}

pub(crate) fn validate_ids(ground: usize, set: &[usize]) -> Result<()> {
    let mut seen = HashSet::with_capacity(set.len());
    for &v in set {
        if v >= ground {
            return input(format!("vertex {v} outside ground set of size {ground}"));
        }
        if !seen.insert(v) {
            return input(format!("vertex {v} repeated"));
        }
    }
    Ok(())
}

/// Concrete matroid families used as test instances and loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcreteMatroid {
    Uniform {
        n: usize,
        r: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
        #[serde(skip)]
        block_of: Vec<usize>,
    },
    /// Vertices of the matroid are the edges of an undirected multigraph.
    Graphic {
        nodes: usize,
        edges: Vec<(usize, usize)>,
    },
    Explicit {
        n: usize,
        independent: Vec<Vec<usize>>,
        #[serde(skip)]
        masks: HashSet<u32>,
    },
}

/// Largest ground set accepted by [`ConcreteMatroid::explicit`].
pub const EXPLICIT_MAX_GROUND: usize = 20;

impl ConcreteMatroid {
    pub fn uniform(n: usize, r: usize) -> Self {
        ConcreteMatroid::Uniform { n, r }
    }

    /// Blocks must be disjoint and cover `0..n` where `n` is the total block size.
    pub fn partition(blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return input("one capacity per block required");
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                if v >= n {
                    return input(format!("partition blocks do not cover 0..{n} (found {v})"));
                }
                if block_of[v] != usize::MAX {
                    return input(format!("vertex {v} in two partition blocks"));
                }
                block_of[v] = b;
            }
        }
        Ok(ConcreteMatroid::Partition { blocks, capacities, block_of })
    }

    pub fn graphic(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= nodes || v >= nodes) {
            return input(format!("graph edge ({u},{v}) references a node >= {nodes}"));
        }
        Ok(ConcreteMatroid::Graphic { nodes, edges })
    }

    /// Matroid given by the list of all its independent sets. The list is
    /// checked against the matroid axioms.
    pub fn explicit(n: usize, independent: Vec<Vec<usize>>) -> Result<Self> {
        let system = SetSystem::new(n, &independent)?;
        let report = exhaustive_axiom_check(&system);
        if !report.passed() {
            return input(format!("explicit set family is not a matroid: {report:?}"));
        }
        Ok(ConcreteMatroid::Explicit { n, independent, masks: system.masks })
    }

    /// Rebuilds the lookup tables skipped by serde.
    pub fn revalidated(self) -> Result<Self> {
        match self {
            ConcreteMatroid::Uniform { n, r } => Ok(Self::uniform(n, r)),
            ConcreteMatroid::Partition { blocks, capacities, .. } => {
                Self::partition(blocks, capacities)
            }
            ConcreteMatroid::Graphic { nodes, edges } => Self::graphic(nodes, edges),
            ConcreteMatroid::Explicit { n, independent, .. } => Self::explicit(n, independent),
        }
    }
}

impl MatroidOracle for ConcreteMatroid {
    fn ground_size(&self) -> usize {
        match self {
            ConcreteMatroid::Uniform { n, .. } => *n,
            ConcreteMatroid::Partition { block_of, .. } => block_of.len(),
            ConcreteMatroid::Graphic { edges, .. } => edges.len(),
            ConcreteMatroid::Explicit { n, .. } => *n,
        }
    }

    fn independent(&self, set: &[usize]) -> bool {
        match self {
            ConcreteMatroid::Uniform { r, .. } => set.len() <= *r,
            ConcreteMatroid::Partition { capacities, block_of, .. } => {
                let mut used = vec![0usize; capacities.len()];
                set.iter().all(|&v| {
                    let b = block_of[v];
                    used[b] += 1;
                    used[b] <= capacities[b]
                })
            }
            ConcreteMatroid::Graphic { nodes, edges } => {
                let mut uf = UnionFind::new(*nodes);
                set.iter().all(|&e| {
                    let (u, v) = edges[e];
                    uf.union(u, v)
                })
            }
            ConcreteMatroid::Explicit { masks, .. } => masks.contains(&to_mask(set)),
        }
    }
}

fn to_mask(set: &[usize]) -> u32 {
    set.iter().fold(0u32, |m, &v| m | 1 << v)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `u` and `v` were already connected (the edge closes a cycle).
    fn union(&mut self, u: usize, v: usize) -> bool {
        let (a, b) = (self.find(u), self.find(v));
        if a == b {
            return false;
        }
        self.parent[a] = b;
        true
    }
}

/// An explicit family of sets with no axiom validation. Useful for exercising
/// [`axiom_check`] on families that are not matroids.
#[derive(Debug, Clone)]
pub struct SetSystem {
    n: usize,
    masks: HashSet<u32>,
}

impl SetSystem {
    pub fn new(n: usize, family: &[Vec<usize>]) -> Result<Self> {
        if n > EXPLICIT_MAX_GROUND {
            return Err(Error::TooLarge(format!(
                "explicit families limited to {EXPLICIT_MAX_GROUND} elements, got {n}"
            )));
        }
        let mut masks = HashSet::with_capacity(family.len());
        for set in family {
            validate_ids(n, set)?;
            masks.insert(to_mask(set));
        }
        Ok(SetSystem { n, masks })
    }
}

impl MatroidOracle for SetSystem {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn independent(&self, set: &[usize]) -> bool {
        self.masks.contains(&to_mask(set))
    }
}

/// `M|S`: the matroid over `S` whose independent sets are those of `M` inside `S`.
/// Local vertex `i` is base vertex `ground()[i]`.
#[derive(Debug, Clone)]
pub struct Restriction<M> {
    base: M,
    ground: Vec<usize>,
}

pub fn restrict<M: MatroidOracle>(base: M, subset: &[usize]) -> Result<Restriction<M>> {
    validate_ids(base.ground_size(), subset)?;
    Ok(Restriction { ground: sets::normalize(subset), base })
}

impl<M> Restriction<M> {
    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn to_base(&self, local: usize) -> usize {
        self.ground[local]
    }

    pub fn from_base(&self, base_id: usize) -> Option<usize> {
        self.ground.binary_search(&base_id).ok()
    }
}

impl<M: MatroidOracle> MatroidOracle for Restriction<M> {
    fn ground_size(&self) -> usize {
        self.ground.len()
    }
    fn independent(&self, set: &[usize]) -> bool {
        let mapped: Vec<usize> = set.iter().map(|&v| self.ground[v]).collect();
        self.base.independent(&mapped)
    }
}

/// `M/S` over `V \ S`: `T` is independent iff `T ∪ B` is independent in `M`,
/// where `B` is a maximal independent subset of `S` chosen greedily by id.
#[derive(Debug, Clone)]
pub struct Contraction<M> {
    base: M,
    ground: Vec<usize>,
    basis: Vec<usize>,
}

pub fn contract<M: MatroidOracle>(base: M, subset: &[usize]) -> Result<Contraction<M>> {
    validate_ids(base.ground_size(), subset)?;
    let basis = base.max_independent_subset(subset);
    let removed: HashSet<usize> = subset.iter().copied().collect();
    let ground = (0..base.ground_size()).filter(|v| !removed.contains(v)).collect();
    Ok(Contraction { base, ground, basis })
}

/// Like [`contract`], but with a caller-chosen maximal independent subset `basis` of `subset`.
pub fn contract_with_basis<M: MatroidOracle>(
    base: M,
    subset: &[usize],
    basis: &[usize],
) -> Result<Contraction<M>> {
    validate_ids(base.ground_size(), subset)?;
    validate_ids(base.ground_size(), basis)?;
    let subset = sets::normalize(subset);
    let basis = sets::normalize(basis);
    if !sets::minus(&basis, &subset).is_empty() {
        return input("basis must lie inside the contracted set");
    }
    if !base.independent(&basis) {
        return input("basis must be independent");
    }
    if basis.len() != base.max_independent_subset(&subset).len() {
        return input("basis must be a maximal independent subset");
    }
    let removed: HashSet<usize> = subset.iter().copied().collect();
    let ground = (0..base.ground_size()).filter(|v| !removed.contains(v)).collect();
    Ok(Contraction { base, ground, basis })
}

impl<M> Contraction<M> {
    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn to_base(&self, local: usize) -> usize {
        self.ground[local]
    }

    pub fn from_base(&self, base_id: usize) -> Option<usize> {
        self.ground.binary_search(&base_id).ok()
    }
}

impl<M: MatroidOracle> MatroidOracle for Contraction<M> {
    fn ground_size(&self) -> usize {
        self.ground.len()
    }
    fn independent(&self, set: &[usize]) -> bool {
        let mut mapped: Vec<usize> = set.iter().map(|&v| self.ground[v]).collect();
        mapped.extend_from_slice(&self.basis);
        self.base.independent(&mapped)
    }
}

/// `trunc(M, r)`: independent iff independent in `M` and of size at most `r`.
#[derive(Debug, Clone)]
pub struct Truncation<M> {
    base: M,
    rank: usize,
}

pub fn truncate<M: MatroidOracle>(base: M, rank: usize) -> Result<Truncation<M>> {
    let full = base.full_rank();
    if rank > full {
        return input(format!("truncation rank {rank} exceeds matroid rank {full}"));
    }
    Ok(Truncation { base, rank })
}

impl<M: MatroidOracle> MatroidOracle for Truncation<M> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }
    fn independent(&self, set: &[usize]) -> bool {
        set.len() <= self.rank && self.base.independent(set)
    }
}

/// Outcome of an exhaustive check of the matroid axioms.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    pub ground_size: usize,
    pub empty_independent: bool,
    /// `(independent set, dependent subset)` pairs.
    pub down_closed_violations: Vec<(Vec<usize>, Vec<usize>)>,
    /// `(S, T)` with `|S| < |T|`, both independent, and no `e ∈ T \ S` with `S + e` independent.
    pub augmentation_violations: Vec<(Vec<usize>, Vec<usize>)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.empty_independent
            && self.down_closed_violations.is_empty()
            && self.augmentation_violations.is_empty()
    }
}

pub const AXIOM_CHECK_MAX_GROUND: usize = 16;
const MAX_WITNESSES: usize = 16;

/// Exhaustively verifies non-emptiness, down-closedness and augmentation.
pub fn axiom_check<M: MatroidOracle + ?Sized>(m: &M) -> Result<AxiomReport> {
    if m.ground_size() > AXIOM_CHECK_MAX_GROUND {
        return Err(Error::TooLarge(format!(
            "axiom check is exhaustive and limited to {AXIOM_CHECK_MAX_GROUND} elements, got {}",
            m.ground_size()
        )));
    }
    Ok(exhaustive_axiom_check(m))
}

fn exhaustive_axiom_check<M: MatroidOracle + ?Sized>(m: &M) -> AxiomReport {
    let n = m.ground_size();
    let ground: Vec<usize> = (0..n).collect();
    let total = 1usize << n;
    let ind: Vec<bool> = (0..total as u64)
        .map(|mask| m.independent(&sets::from_mask(&ground, mask)))
        .collect();
    let to_set = |mask: usize| sets::from_mask(&ground, mask as u64);

    let mut report = AxiomReport { ground_size: n, empty_independent: ind[0], ..Default::default() };

    for mask in 0..total {
        if !ind[mask] {
            continue;
        }
        for v in 0..n {
            if mask >> v & 1 == 1 && !ind[mask ^ 1 << v] {
                if report.down_closed_violations.len() < MAX_WITNESSES {
                    report.down_closed_violations.push((to_set(mask), to_set(mask ^ 1 << v)));
                }
            }
        }
    }

    // best[x]: a largest independent subset of x.
    let mut best = vec![0usize; total];
    for x in 0..total {
        if ind[x] {
            best[x] = x;
        } else {
            best[x] = (0..n)
                .filter(|v| x >> v & 1 == 1)
                .map(|v| best[x ^ 1 << v])
                .max_by_key(|s| s.count_ones())
                .unwrap_or(0);
        }
    }
    // Augmentation fails for S iff some independent T inside S ∪ {e : S + e dependent}
    // is larger than S.
    for s in 0..total {
        if !ind[s] {
            continue;
        }
        let blocked = (0..n)
            .filter(|&v| s >> v & 1 == 0 && !ind[s | 1 << v])
            .fold(0usize, |acc, v| acc | 1 << v);
        let t = best[s | blocked];
        if t.count_ones() > s.count_ones() && report.augmentation_violations.len() < MAX_WITNESSES {
            report.augmentation_violations.push((to_set(s), to_set(t)));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ConcreteMatroid {
        ConcreteMatroid::graphic(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn all_subsets(n: usize) -> Vec<Vec<usize>> {
        let g: Vec<usize> = (0..n).collect();
        sets::subsets(&g).collect()
    }

    #[test]
    fn uniform_independence() {
        let m = ConcreteMatroid::uniform(4, 2);
        assert!(m.is_independent(&[0, 1]).unwrap());
        assert!(!m.is_independent(&[0, 1, 2]).unwrap());
        assert_eq!(m.rank(&[0, 1, 2]).unwrap(), 2);
        assert_eq!(m.rank(&[]).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_ids() {
        let m = ConcreteMatroid::uniform(4, 2);
        assert!(matches!(m.is_independent(&[4]), Err(Error::Input(_))));
        assert!(matches!(m.is_independent(&[1, 1]), Err(Error::Input(_))));
    }

    #[test]
    fn triangle_is_dependent() {
        let m = triangle();
        assert!(!m.is_independent(&[0, 1, 2]).unwrap());
        assert!(m.is_independent(&[0, 2]).unwrap());
        assert_eq!(m.full_rank(), 2);
    }

    #[test]
    fn partition_rank_matches_brute_force() {
        let m = ConcreteMatroid::partition(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        let s = [0, 1, 2];
        let brute = sets::subsets(&s)
            .filter(|t| m.independent(t))
            .map(|t| t.len())
            .max()
            .unwrap();
        assert_eq!(brute, 2);
        assert_eq!(m.rank(&s).unwrap(), 2);
    }

    #[test]
    fn partition_rejects_overlap() {
        assert!(ConcreteMatroid::partition(vec![vec![0, 1], vec![1]], vec![1, 1]).is_err());
        assert!(ConcreteMatroid::partition(vec![vec![0, 5]], vec![1]).is_err());
    }

    #[test]
    fn restriction_behaves_like_smaller_uniform() {
        let r = restrict(ConcreteMatroid::uniform(4, 2), &[0, 1]).unwrap();
        let u = ConcreteMatroid::uniform(2, 2);
        for s in all_subsets(2) {
            assert_eq!(r.independent(&s), u.independent(&s));
        }
        // local id 2 does not exist in a restriction to two elements
        assert!(r.is_independent(&[0, 2]).is_err());
    }

    #[test]
    fn restriction_of_triangle() {
        let r = restrict(triangle(), &[0, 1]).unwrap();
        assert!(r.is_independent(&[0, 1]).unwrap());
    }

    #[test]
    fn contraction_of_uniform() {
        let c = contract(ConcreteMatroid::uniform(4, 2), &[0]).unwrap();
        assert_eq!(c.ground(), &[1, 2, 3]);
        // definition: T ⊆ {1,2,3} independent iff T + 0 independent in U(4,2)
        let base = ConcreteMatroid::uniform(4, 2);
        for t in all_subsets(3) {
            let mut full: Vec<usize> = t.iter().map(|&v| c.to_base(v)).collect();
            full.push(0);
            assert_eq!(c.independent(&t), base.independent(&full));
        }
        assert_eq!(c.full_rank(), 1);
    }

    #[test]
    fn contraction_by_empty_set_is_identity() {
        let m = triangle();
        let c = contract(&m, &[]).unwrap();
        for s in all_subsets(3) {
            assert_eq!(c.independent(&s), m.independent(&s));
        }
    }

    #[test]
    fn contraction_of_path() {
        // path a-b-c: graph edges 0 = a-b, 1 = b-c
        let m = ConcreteMatroid::graphic(3, vec![(0, 1), (1, 2)]).unwrap();
        let c = contract(&m, &[0]).unwrap();
        let local = c.from_base(1).unwrap();
        assert!(c.is_independent(&[local]).unwrap());
    }

    #[test]
    fn truncation() {
        let t = truncate(ConcreteMatroid::uniform(4, 3), 2).unwrap();
        let u = ConcreteMatroid::uniform(4, 2);
        for s in all_subsets(4) {
            assert_eq!(t.independent(&s), u.independent(&s));
        }
        let m = triangle();
        let full = truncate(&m, 2).unwrap();
        for s in all_subsets(3) {
            assert_eq!(full.independent(&s), m.independent(&s));
        }
        let p = ConcreteMatroid::partition(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        let tp = truncate(&p, 1).unwrap();
        assert!(!tp.independent(&[0, 2]));
        assert!(truncate(&p, 3).is_err());
    }

    #[test]
    fn axiom_check_examples() {
        assert!(axiom_check(&ConcreteMatroid::uniform(4, 2)).unwrap().passed());

        let sys = SetSystem::new(2, &[vec![], vec![0], vec![1]]).unwrap();
        assert!(axiom_check(&sys).unwrap().passed());

        let sys = SetSystem::new(2, &[vec![], vec![0, 1]]).unwrap();
        let report = axiom_check(&sys).unwrap();
        assert!(!report.passed());
        assert!(!report.down_closed_violations.is_empty());

        // {0,1} and {2} both maximal: augmentation fails for S={2}, T={0,1}
        let sys = SetSystem::new(3, &[vec![], vec![0], vec![1], vec![2], vec![0, 1]]).unwrap();
        let report = axiom_check(&sys).unwrap();
        assert!(report.down_closed_violations.is_empty());
        assert!(report.augmentation_violations.contains(&(vec![2], vec![0, 1])));

        assert!(matches!(
            axiom_check(&ConcreteMatroid::uniform(17, 3)),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn explicit_validation() {
        assert!(ConcreteMatroid::explicit(2, vec![vec![], vec![0, 1]]).is_err());
        let m = ConcreteMatroid::explicit(2, vec![vec![], vec![0], vec![1]]).unwrap();
        assert!(!m.independent(&[0, 1]));
        assert!(ConcreteMatroid::explicit(21, vec![vec![]]).is_err());
    }

    #[test]
    fn serde_roundtrip_rebuilds_tables() {
        let p = ConcreteMatroid::partition(vec![vec![0, 2], vec![1]], vec![1, 1]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: ConcreteMatroid = serde_json::from_str::<ConcreteMatroid>(&json)
            .unwrap()
            .revalidated()
            .unwrap();
        assert_eq!(back, p);
        assert!(!back.independent(&[0, 2]));
    }
}
