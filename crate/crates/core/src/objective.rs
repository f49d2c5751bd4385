//! Set-function value oracles over edge ids.

use std::marker::PhantomData;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::scalar::Scalar;
use crate::sets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveClass {
    /// Modular: `f(S) = w0 + Σ w_e`. Marginals do not depend on `S`.
    Linear,
    MonotoneSubmodular,
    Submodular,
}

/// Value oracle for a set function over edge ids.
///
/// `value` receives a set of distinct ids; order is irrelevant.
pub trait ValueOracle<T: Scalar>: Send + Sync {
    fn value(&self, set: &[usize]) -> T;

    fn class(&self) -> ObjectiveClass;

    /// `f(e | S) = f(S + e) − f(S)`.
    fn marginal(&self, e: usize, set: &[usize]) -> T {
        if set.contains(&e) {
            return T::zero();
        }
        let mut with = set.to_vec();
        with.push(e);
        self.value(&with) - self.value(set)
    }

    /// `f(T | S) = f(S ∪ T) − f(S)`.
    fn marginal_set(&self, add: &[usize], set: &[usize]) -> T {
        self.value(&sets::union(set, add)) - self.value(set)
    }
}

impl<T: Scalar, F: ValueOracle<T> + ?Sized> ValueOracle<T> for &F {
    fn value(&self, set: &[usize]) -> T {
        (**self).value(set)
    }
    fn class(&self) -> ObjectiveClass {
        (**self).class()
    }
}

impl<T: Scalar, F: ValueOracle<T> + ?Sized> ValueOracle<T> for Box<F> {
    fn value(&self, set: &[usize]) -> T {
        (**self).value(set)
    }
    fn class(&self) -> ObjectiveClass {
        (**self).class()
    }
}

impl<T: Scalar, F: ValueOracle<T> + ?Sized> ValueOracle<T> for Arc<F> {
    fn value(&self, set: &[usize]) -> T {
        (**self).value(set)
    }
    fn class(&self) -> ObjectiveClass {
        (**self).class()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularObjective<T> {
    pub w0: T,
    /// Indexed by edge id.
    pub weights: Vec<T>,
}

impl<T: Scalar> ModularObjective<T> {
    pub fn new(w0: T, weights: Vec<T>) -> Self {
        ModularObjective { w0, weights }
    }

    pub fn linear(weights: Vec<T>) -> Self {
        Self::new(T::zero(), weights)
    }
}

impl<T: Scalar> ValueOracle<T> for ModularObjective<T> {
    fn value(&self, set: &[usize]) -> T {
        set.iter().fold(self.w0, |acc, &e| acc + self.weights[e])
    }

    fn class(&self) -> ObjectiveClass {
        ObjectiveClass::Linear
    }

    fn marginal(&self, e: usize, set: &[usize]) -> T {
        if set.contains(&e) {
            T::zero()
        } else {
            self.weights[e]
        }
    }
}

/// Weighted coverage: `f(S)` is the total weight of items covered by some edge of `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageObjective<T> {
    pub item_weights: Vec<T>,
    /// Items covered by each edge, indexed by edge id.
    pub edge_items: Vec<Vec<usize>>,
}

impl<T: Scalar> CoverageObjective<T> {
    pub fn new(item_weights: Vec<T>, edge_items: Vec<Vec<usize>>) -> Result<Self> {
        if item_weights.iter().any(|w| *w < T::zero()) {
            return input("coverage item weights must be non-negative");
        }
        if let Some(bad) = edge_items.iter().flatten().find(|&&i| i >= item_weights.len()) {
            return input(format!("coverage item {bad} out of range"));
        }
        Ok(CoverageObjective { item_weights, edge_items })
    }
}

impl<T: Scalar> ValueOracle<T> for CoverageObjective<T> {
    fn value(&self, set: &[usize]) -> T {
        let mut covered = vec![false; self.item_weights.len()];
        for &e in set {
            for &i in &self.edge_items[e] {
                covered[i] = true;
            }
        }
        covered
            .iter()
            .zip(&self.item_weights)
            .filter(|(c, _)| **c)
            .map(|(_, &w)| w)
            .sum()
    }

    fn class(&self) -> ObjectiveClass {
        ObjectiveClass::MonotoneSubmodular
    }
}

/// Weighted cut function of an undirected graph whose nodes are edge ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutObjective<T> {
    pub nodes: usize,
    pub edges: Vec<(usize, usize, T)>,
}

impl<T: Scalar> CutObjective<T> {
    pub fn new(nodes: usize, edges: Vec<(usize, usize, T)>) -> Result<Self> {
        for &(u, v, w) in &edges {
            if u >= nodes || v >= nodes {
                return input(format!("cut edge ({u},{v}) out of range"));
            }
            if w < T::zero() {
                return input("cut weights must be non-negative");
            }
        }
        Ok(CutObjective { nodes, edges })
    }
}

impl<T: Scalar> ValueOracle<T> for CutObjective<T> {
    fn value(&self, set: &[usize]) -> T {
        let mut inside = vec![false; self.nodes];
        for &e in set {
            inside[e] = true;
        }
        self.edges
            .iter()
            .filter(|(u, v, _)| inside[*u] != inside[*v])
            .map(|&(_, _, w)| w)
            .sum()
    }

    fn class(&self) -> ObjectiveClass {
        ObjectiveClass::Submodular
    }
}

/// Objective families loadable from instance JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcreteObjective<T> {
    Modular(ModularObjective<T>),
    Coverage(CoverageObjective<T>),
    Cut(CutObjective<T>),
}

impl<T: Scalar> ConcreteObjective<T> {
    /// Checks that the objective is defined for every id below `id_bound`.
    pub fn validate(&self, id_bound: usize) -> Result<()> {
        let covered = match self {
            ConcreteObjective::Modular(m) => m.weights.len(),
            ConcreteObjective::Coverage(c) => {
                CoverageObjective::new(c.item_weights.clone(), c.edge_items.clone())?;
                c.edge_items.len()
            }
            ConcreteObjective::Cut(c) => {
                CutObjective::new(c.nodes, c.edges.clone())?;
                c.nodes
            }
        };
        if covered < id_bound {
            return Err(Error::Input(format!(
                "objective defined on {covered} edges but the constraint has ids up to {}",
                id_bound - 1
            )));
        }
        Ok(())
    }

    /// Converts the weights to another scalar type.
    pub fn cast<U: Scalar>(&self) -> ConcreteObjective<U> {
        let c = |x: T| U::lit(x.as_f64());
        match self {
            ConcreteObjective::Modular(m) => ConcreteObjective::Modular(ModularObjective {
                w0: c(m.w0),
                weights: m.weights.iter().map(|&w| c(w)).collect(),
            }),
            ConcreteObjective::Coverage(cv) => ConcreteObjective::Coverage(CoverageObjective {
                item_weights: cv.item_weights.iter().map(|&w| c(w)).collect(),
                edge_items: cv.edge_items.clone(),
            }),
            ConcreteObjective::Cut(cut) => ConcreteObjective::Cut(CutObjective {
                nodes: cut.nodes,
                edges: cut.edges.iter().map(|&(u, v, w)| (u, v, c(w))).collect(),
            }),
        }
    }
}

impl<T: Scalar> ValueOracle<T> for ConcreteObjective<T> {
    fn value(&self, set: &[usize]) -> T {
        match self {
            ConcreteObjective::Modular(m) => m.value(set),
            ConcreteObjective::Coverage(c) => c.value(set),
            ConcreteObjective::Cut(c) => c.value(set),
        }
    }

    fn class(&self) -> ObjectiveClass {
        match self {
            ConcreteObjective::Modular(m) => m.class(),
            ConcreteObjective::Coverage(c) => c.class(),
            ConcreteObjective::Cut(c) => c.class(),
        }
    }

    fn marginal(&self, e: usize, set: &[usize]) -> T {
        match self {
            ConcreteObjective::Modular(m) => m.marginal(e, set),
            ConcreteObjective::Coverage(c) => c.marginal(e, set),
            ConcreteObjective::Cut(c) => c.marginal(e, set),
        }
    }
}

/// Set function backed by a closure.
pub struct FnObjective<T, F> {
    f: F,
    class: ObjectiveClass,
    _t: PhantomData<fn() -> T>,
}

impl<T: Scalar, F: Fn(&[usize]) -> T + Send + Sync> FnObjective<T, F> {
    pub fn new(class: ObjectiveClass, f: F) -> Self {
        FnObjective { f, class, _t: PhantomData }
    }
}

impl<T: Scalar, F: Fn(&[usize]) -> T + Send + Sync> ValueOracle<T> for FnObjective<T, F> {
    fn value(&self, set: &[usize]) -> T {
        (self.f)(set)
    }
    fn class(&self) -> ObjectiveClass {
        self.class
    }
}

/// Wraps an oracle and counts `value` calls.
pub struct CountingOracle<F> {
    inner: F,
    calls: AtomicU64,
}

impl<F> CountingOracle<F> {
    pub fn new(inner: F) -> Self {
        CountingOracle { inner, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<T: Scalar, F: ValueOracle<T>> ValueOracle<T> for CountingOracle<F> {
    fn value(&self, set: &[usize]) -> T {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.value(set)
    }
    fn class(&self) -> ObjectiveClass {
        self.inner.class()
    }
}

pub const CHECK_MAX_GROUND: usize = 14;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PropertyReport {
    /// Witnesses `(S, T, e)`. For submodularity `S ⊆ T`, `e ∉ T` and
    /// `f(e|S) < f(e|T)`; for monotonicity `S = T` and `f(e|S) < 0`.
    pub violations: Vec<(Vec<usize>, Vec<usize>, usize)>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn value_table<T: Scalar, F: ValueOracle<T> + ?Sized>(f: &F, ground: &[usize]) -> Result<Vec<T>> {
    if ground.len() > CHECK_MAX_GROUND {
        return Err(Error::TooLarge(format!(
            "exhaustive checks limited to {CHECK_MAX_GROUND} elements, got {}",
            ground.len()
        )));
    }
    Ok(sets::subsets(ground).map(|s| f.value(&s)).collect())
}

const MAX_WITNESSES: usize = 16;

/// Exhaustive submodularity check over all subsets of `ground`.
///
/// Uses the equivalent local form `f(e|S) ≥ f(e|S+x)` for all `S` and distinct
/// `e, x ∉ S`; any violation of the general `S ⊆ T` form implies one of these.
/// `tol` absorbs rounding in non-integral weights.
pub fn check_submodular<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    ground: &[usize],
    tol: T,
) -> Result<PropertyReport> {
    let ground = sets::normalize(ground);
    let table = value_table(f, &ground)?;
    let n = ground.len();
    let mut report = PropertyReport::default();
    for s in 0..1usize << n {
        for e in (0..n).filter(|e| s >> e & 1 == 0) {
            let gain_s = table[s | 1 << e] - table[s];
            for x in (0..n).filter(|&x| x != e && s >> x & 1 == 0) {
                let t = s | 1 << x;
                let gain_t = table[t | 1 << e] - table[t];
                if gain_s + tol < gain_t && report.violations.len() < MAX_WITNESSES {
                    report.violations.push((
                        sets::from_mask(&ground, s as u64),
                        sets::from_mask(&ground, t as u64),
                        ground[e],
                    ));
                }
            }
        }
    }
    Ok(report)
}

pub fn check_monotone<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    ground: &[usize],
    tol: T,
) -> Result<PropertyReport> {
    let ground = sets::normalize(ground);
    let table = value_table(f, &ground)?;
    let n = ground.len();
    let mut report = PropertyReport::default();
    for s in 0..1usize << n {
        for e in (0..n).filter(|e| s >> e & 1 == 0) {
            if table[s | 1 << e] - table[s] + tol < T::zero()
                && report.violations.len() < MAX_WITNESSES
            {
                let set = sets::from_mask(&ground, s as u64);
                report.violations.push((set.clone(), set, ground[e]));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_marginals() {
        let f = ModularObjective::linear(vec![3.0, 5.0, -1.0]);
        assert_eq!(f.marginal(1, &[0]), 5.0);
        assert_eq!(f.value(&[0, 1, 2]), 7.0);
        assert_eq!(f.marginal(1, &[1]), 0.0);
        assert_eq!(f.marginal_set(&[1, 2], &[0]), 4.0);
    }

    #[test]
    fn coverage_excludes_shared_item() {
        // item 0 (weight 4) in both edges, item 1 (weight 1) only in edge 1
        let f = CoverageObjective::new(vec![4.0, 1.0], vec![vec![0], vec![0, 1]]).unwrap();
        assert_eq!(f.value(&[0]), 4.0);
        assert_eq!(f.marginal(1, &[0]), 1.0);
        assert_eq!(f.marginal(1, &[]), 5.0);
    }

    #[test]
    fn cut_single_edge() {
        let f = CutObjective::new(2, vec![(0, 1, 1.0)]).unwrap();
        assert_eq!(f.value(&[]), 0.0);
        assert_eq!(f.value(&[0]), 1.0);
        assert_eq!(f.value(&[0, 1]), 0.0);
    }

    #[test]
    fn modular_checks() {
        let f = ModularObjective::linear(vec![3.0, 5.0, -1.0]);
        assert!(check_submodular(&f, &[0, 1, 2], 0.0).unwrap().passed());
        assert!(!check_monotone(&f, &[0, 1, 2], 0.0).unwrap().passed());
        let g = ModularObjective::new(1.0, vec![3.0, 0.0, 2.0]);
        assert!(check_monotone(&g, &[0, 1, 2], 0.0).unwrap().passed());
    }

    #[test]
    fn cut_triangle_is_submodular_not_monotone() {
        let f = CutObjective::new(3, vec![(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)]).unwrap();
        assert!(check_submodular(&f, &[0, 1, 2], 0.0).unwrap().passed());
        assert!(!check_monotone(&f, &[0, 1, 2], 0.0).unwrap().passed());
    }

    #[test]
    fn supermodular_function_detected() {
        let f = FnObjective::new(ObjectiveClass::Submodular, |s: &[usize]| (s.len() * s.len()) as f64);
        let report = check_submodular(&f, &[0, 1, 2], 0.0).unwrap();
        assert!(!report.passed());
        let (s, t, e) = &report.violations[0];
        assert!(s.len() < t.len() && !t.contains(e));
    }

    #[test]
    fn check_refuses_large_ground() {
        let f = ModularObjective::linear(vec![1.0; 15]);
        let ground: Vec<usize> = (0..15).collect();
        assert!(matches!(check_submodular(&f, &ground, 0.0), Err(Error::TooLarge(_))));
    }

    #[test]
    fn counting_oracle_counts() {
        let f = CountingOracle::new(ModularObjective::linear(vec![1.0f32, 2.0]));
        f.value(&[0]);
        f.marginal(1, &[0]);
        assert_eq!(f.calls(), 3);
    }

    #[test]
    fn concrete_json_shape() {
        let f: ConcreteObjective<f64> =
            serde_json::from_str(r#"{"cut": {"nodes": 2, "edges": [[0, 1, 1.5]]}}"#).unwrap();
        assert_eq!(f.value(&[1]), 1.5);
        assert_eq!(f.class(), ObjectiveClass::Submodular);
        assert!(f.validate(2).is_ok());
        assert!(f.validate(3).is_err());
        let g: ConcreteObjective<f32> = f.cast();
        assert_eq!(g.value(&[0]), 1.5f32);
    }
}
