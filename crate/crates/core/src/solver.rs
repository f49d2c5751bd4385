//! Greedy/local-search hybrid for submodular maximization under a k-parity
//! constraint.
//!
//! [`run_reference`] performs every iteration `i = 1, 2, ...` literally,
//! including iterations that add nothing. [`run_efficient`] jumps straight to
//! the next iteration that can add an element. With the same `alpha` and the
//! same improvement scan both return the same set.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::kparity::KParityConstraint;
use crate::objective::ValueOracle;
use crate::scalar::Scalar;
use crate::sets;

/// `m_i = W τ 2^{-i}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds<T> {
    #[serde(rename = "W")]
    pub w_max: T,
    pub alpha: T,
    pub tau: T,
}

impl<T: Scalar> Thresholds<T> {
    pub fn new(w_max: T, alpha: T) -> Self {
        Thresholds { w_max, alpha, tau: alpha.exp2() }
    }

    /// `m_i`, computed as `(W τ) · 2^{-i}` so that `m_{i-1} = 2 m_i` holds exactly.
    pub fn m(&self, i: i64) -> T {
        threshold(self.w_max, self.tau, i)
    }
}

pub fn threshold<T: Scalar>(w_max: T, tau: T, i: i64) -> T {
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let base = w_max * tau;
    if i >= 0 {
        base * half.powi(i as i32)
    } else {
        base * two.powi((-i) as i32)
    }
}

/// Index of the first iteration whose threshold does not exceed `w`: the
/// unique `i` with `m_i <= w < m_{i-1}`.
pub fn fast_forward<T: Scalar>(w_max: T, tau: T, w: T) -> Result<i64> {
    if !(w > T::zero()) {
        return input("fast-forward needs a positive marginal");
    }
    let m0 = threshold(w_max, tau, 0);
    if !(w < m0) {
        return input("fast-forward needs w < W·tau");
    }
    let mut i = ((w_max * tau).log2() - w.log2()).ceil().to_i64().unwrap_or(1).max(1);
    while threshold(w_max, tau, i) > w {
        i += 1;
    }
    while i > 1 && threshold(w_max, tau, i - 1) <= w {
        i -= 1;
    }
    Ok(i)
}

/// `max_e f(e | ∅)` over every edge of the constraint, feasible or not.
/// `None` when there are no edges.
pub fn compute_w<T: Scalar, F: ValueOracle<T> + ?Sized>(f: &F, c: &KParityConstraint) -> Option<T> {
    let empty = f.value(&[]);
    c.edges().map(|e| f.value(&[e.id]) - empty).reduce(T::max)
}

/// `alpha = 1 - U` for a uniform `U` in `[0, 1)`, so `alpha ∈ (0, 1]`.
pub fn alpha_from_uniform(u: f64) -> f64 {
    1.0 - u
}

/// First draw of the seeded generator mapped into `(0, 1]`.
pub fn alpha_from_rng<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    alpha_from_uniform(rng.gen::<f64>())
}

/// `(alpha, tau)` from a fresh `ChaCha8Rng` seeded with `seed`.
pub fn sample_alpha(seed: u64) -> (f64, f64) {
    let alpha = alpha_from_rng(&mut ChaCha8Rng::seed_from_u64(seed));
    (alpha, alpha.exp2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Improvement {
    /// `S = {x}`, `N = ∅`.
    Add { x: usize },
    /// `S = {x}`, `N = {y}`.
    Swap { x: usize, y: usize },
    /// `S = {x1, x2}`, `N = {y}`, labelled so that `f(x1|A) >= θ` and `f(x2|A+x1) >= θ`.
    Pair { x1: usize, x2: usize, y: usize },
}

impl Improvement {
    pub fn kind(&self) -> u8 {
        match self {
            Improvement::Add { .. } => 1,
            Improvement::Swap { .. } => 2,
            Improvement::Pair { .. } => 3,
        }
    }

    /// `S`, in insertion order.
    pub fn added(&self) -> Vec<usize> {
        match *self {
            Improvement::Add { x } | Improvement::Swap { x, .. } => vec![x],
            Improvement::Pair { x1, x2, .. } => vec![x1, x2],
        }
    }

    pub fn removed(&self) -> Option<usize> {
        match *self {
            Improvement::Add { .. } => None,
            Improvement::Swap { y, .. } | Improvement::Pair { y, .. } => Some(y),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImprovementPolicy {
    /// Kinds in order 1, 2, 3; candidates in ascending id order; the first hit wins.
    #[default]
    FirstImprovement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default)]
    pub policy: ImprovementPolicy,
}

impl SolverConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        SolverConfig { epsilon, seed, policy: ImprovementPolicy::FirstImprovement }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return input(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Reference,
    Efficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord<T> {
    pub index: i64,
    pub threshold: T,
    pub improvements: Vec<Improvement>,
    /// `A_i` at the end of the iteration, ascending.
    pub final_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace<T> {
    pub mode: RunMode,
    #[serde(rename = "W")]
    pub w_max: T,
    pub alpha: T,
    pub tau: T,
    pub epsilon: T,
    pub iterations: Vec<IterationRecord<T>>,
    /// `a_1, a_2, ...`: the output in the order elements were last added.
    pub insertion_order: Vec<usize>,
    /// `A_{<=L}`, ascending.
    pub output: Vec<usize>,
    pub value_calls: u64,
    pub feasibility_calls: u64,
    pub improvements_applied: u64,
}

impl<T: Scalar> RunTrace<T> {
    pub fn thresholds(&self) -> Thresholds<T> {
        Thresholds { w_max: self.w_max, alpha: self.alpha, tau: self.tau }
    }

    /// Iterations that added at least one element.
    pub fn nonempty_iterations(&self) -> impl Iterator<Item = &IterationRecord<T>> {
        self.iterations.iter().filter(|it| !it.final_set.is_empty())
    }

    /// The iteration index `i` with `a ∈ A_i`, if any.
    pub fn iteration_of(&self, a: usize) -> Option<&IterationRecord<T>> {
        self.iterations.iter().find(|it| it.final_set.contains(&a))
    }
}

struct Ctx<'a, T, F: ?Sized> {
    f: &'a F,
    c: &'a KParityConstraint,
    value_calls: Cell<u64>,
    feasibility_calls: Cell<u64>,
    _t: std::marker::PhantomData<T>,
}

impl<'a, T: Scalar, F: ValueOracle<T> + ?Sized> Ctx<'a, T, F> {
    fn new(f: &'a F, c: &'a KParityConstraint) -> Self {
        Ctx {
            f,
            c,
            value_calls: Cell::new(0),
            feasibility_calls: Cell::new(0),
            _t: std::marker::PhantomData,
        }
    }

    fn value(&self, set: &[usize]) -> T {
        self.value_calls.set(self.value_calls.get() + 1);
        self.f.value(set)
    }

    fn feasible(&self, set: &[usize]) -> bool {
        self.feasibility_calls.set(self.feasibility_calls.get() + 1);
        self.c.is_feasible(set)
    }

    fn with(set: &[usize], extra: &[usize]) -> Vec<usize> {
        let mut v = set.to_vec();
        v.extend_from_slice(extra);
        v
    }

    /// Feasible `e ∉ A` paired with `f(e | A)`, ascending by id.
    fn feasible_marginals(&self, a: &[usize]) -> Vec<(usize, T)> {
        let base = self.value(a);
        let mut out = Vec::new();
        for e in self.c.edge_ids() {
            if a.contains(&e) || !self.feasible(&Self::with(a, &[e])) {
                continue;
            }
            out.push((e, self.value(&Self::with(a, &[e])) - base));
        }
        out
    }

    fn find(&self, prev: &[usize], cur: &[usize], theta: T, eps: T) -> Option<Improvement> {
        let a = sets::union(prev, cur);
        let fa = self.value(&a);
        let outside: Vec<usize> = self.c.edge_ids().into_iter().filter(|e| !a.contains(e)).collect();
        let gains: Vec<T> = outside.iter().map(|&x| self.value(&Self::with(&a, &[x])) - fa).collect();

        for (&x, &g) in outside.iter().zip(&gains) {
            if g >= theta && self.feasible(&Self::with(&a, &[x])) {
                return Some(Improvement::Add { x });
            }
        }

        let target = fa + eps * theta;
        for (&x, &g) in outside.iter().zip(&gains) {
            if g < theta {
                continue;
            }
            for &y in cur {
                let swapped: Vec<usize> = a.iter().copied().filter(|&e| e != y).chain([x]).collect();
                if self.value(&swapped) >= target && self.feasible(&swapped) {
                    return Some(Improvement::Swap { x, y });
                }
            }
        }

        if cur.is_empty() {
            return None;
        }
        for (pi, &p) in outside.iter().enumerate() {
            for (qi, &q) in outside.iter().enumerate().skip(pi + 1) {
                let (gp, gq) = (gains[pi], gains[qi]);
                if gp < theta && gq < theta {
                    continue;
                }
                let both = self.value(&Self::with(&a, &[p, q]));
                let (x1, x2) = if gp >= theta && both - (fa + gp) >= theta {
                    (p, q)
                } else if gq >= theta && both - (fa + gq) >= theta {
                    (q, p)
                } else {
                    continue;
                };
                for &y in cur {
                    let swapped: Vec<usize> =
                        a.iter().copied().filter(|&e| e != y).chain([p, q]).collect();
                    if self.feasible(&swapped) {
                        return Some(Improvement::Pair { x1, x2, y });
                    }
                }
            }
        }
        None
    }
}

/// First `(θ, ε)`-improvement for `A = prev ∪ cur` with `N ⊆ cur`, in the
/// deterministic scan order of [`ImprovementPolicy::FirstImprovement`].
pub fn find_improvement<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    c: &KParityConstraint,
    prev: &[usize],
    cur: &[usize],
    theta: T,
    epsilon: T,
) -> Result<Option<Improvement>> {
    let all = sets::union(prev, cur);
    if all.len() != prev.len() + cur.len() {
        return input("A_prev and A_i overlap");
    }
    if !c.feasible(&all)? {
        return input("A_prev ∪ A_i is not feasible");
    }
    let cur = sets::normalize(cur);
    Ok(Ctx::new(f, c).find(prev, &cur, theta, epsilon))
}

struct Run<T> {
    iterations: Vec<IterationRecord<T>>,
    stamps: Vec<u64>,
    clock: u64,
    applied: u64,
}

impl<T: Scalar> Run<T> {
    /// Runs the inner loop of iteration `index` on top of the finalized `prev`.
    fn iterate<F: ValueOracle<T> + ?Sized>(
        &mut self,
        ctx: &Ctx<'_, T, F>,
        prev: &[usize],
        index: i64,
        theta: T,
        eps: T,
    ) -> Vec<usize> {
        let mut cur: Vec<usize> = Vec::new();
        let mut applied = Vec::new();
        while let Some(imp) = ctx.find(prev, &cur, theta, eps) {
            if let Some(y) = imp.removed() {
                cur.retain(|&e| e != y);
            }
            for x in imp.added() {
                self.stamps[x] = self.clock;
                self.clock += 1;
                cur.push(x);
            }
            cur.sort_unstable();
            applied.push(imp);
        }
        self.applied += applied.len() as u64;
        self.iterations.push(IterationRecord {
            index,
            threshold: theta,
            improvements: applied,
            final_set: cur.clone(),
        });
        cur
    }
}

fn run<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    c: &KParityConstraint,
    epsilon: f64,
    alpha: f64,
    mode: RunMode,
) -> Result<RunTrace<T>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return input(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return input(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    let ctx = Ctx::new(f, c);
    let eps = T::lit(epsilon);
    let w_max = compute_w(f, c).unwrap_or(T::zero());
    ctx.value_calls.set(c.len() as u64 + 1);
    let th = Thresholds::new(w_max, T::lit(alpha));
    let mut state = Run { iterations: Vec::new(), stamps: vec![0; c.id_bound()], clock: 0, applied: 0 };
    let mut done: Vec<usize> = Vec::new();

    if w_max > T::zero() {
        match mode {
            RunMode::Reference => {
                let mut i = 0i64;
                let mut delta_min: Option<T> = None;
                loop {
                    let positive: Vec<T> = ctx
                        .feasible_marginals(&done)
                        .into_iter()
                        .map(|(_, g)| g)
                        .filter(|&g| g > T::zero())
                        .collect();
                    let Some(lo) = positive.iter().copied().reduce(T::min) else { break };
                    let lo = delta_min.map_or(lo, |d| d.min(lo));
                    delta_min = Some(lo);
                    let cap = (w_max.log2() - lo.log2()).ceil().to_i64().unwrap_or(i64::MAX) + 2;
                    i += 1;
                    if i > cap {
                        return Err(Error::Internal(format!(
                            "iteration {i} exceeds the bound {cap}; the objective is not submodular"
                        )));
                    }
                    let cur = state.iterate(&ctx, &done, i, th.m(i), eps);
                    done = sets::union(&done, &cur);
                }
            }
            RunMode::Efficient => {
                let mut i = 0i64;
                loop {
                    let w = ctx
                        .feasible_marginals(&done)
                        .into_iter()
                        .map(|(_, g)| g)
                        .reduce(T::max);
                    let Some(w) = w.filter(|&w| w > T::zero()) else { break };
                    let next = fast_forward(w_max, th.tau, w).map_err(|_| {
                        Error::Internal(format!("marginal {w} exceeds W = {w_max}"))
                    })?;
                    if next <= i {
                        return Err(Error::Internal(format!(
                            "fast-forward moved from iteration {i} to {next}"
                        )));
                    }
                    i = next;
                    let cur = state.iterate(&ctx, &done, i, th.m(i), eps);
                    if cur.is_empty() {
                        return Err(Error::Internal(format!("iteration {i} added nothing")));
                    }
                    done = sets::union(&done, &cur);
                }
                let bound = (1.0 + 2.0 / epsilon) * c.len() as f64;
                if state.applied as f64 > bound {
                    return Err(Error::Internal(format!(
                        "{} improvements exceed the bound {bound}",
                        state.applied
                    )));
                }
            }
        }
    }

    let mut order = done.clone();
    order.sort_by_key(|&e| state.stamps[e]);
    Ok(RunTrace {
        mode,
        w_max,
        alpha: th.alpha,
        tau: th.tau,
        epsilon: eps,
        iterations: state.iterations,
        insertion_order: order,
        output: done,
        value_calls: ctx.value_calls.get(),
        feasibility_calls: ctx.feasibility_calls.get(),
        improvements_applied: state.applied,
    })
}

/// Literal simulation: every iteration index is visited, empty ones included.
pub fn run_reference<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    c: &KParityConstraint,
    config: &SolverConfig,
) -> Result<RunTrace<T>> {
    config.validate()?;
    run(f, c, config.epsilon, sample_alpha(config.seed).0, RunMode::Reference)
}

/// Fast-forward simulation: skips iterations that cannot add an element.
pub fn run_efficient<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    c: &KParityConstraint,
    config: &SolverConfig,
) -> Result<RunTrace<T>> {
    config.validate()?;
    run(f, c, config.epsilon, sample_alpha(config.seed).0, RunMode::Efficient)
}

/// Either simulation with a caller-chosen `alpha ∈ (0, 1]`.
pub fn run_with_alpha<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    c: &KParityConstraint,
    epsilon: f64,
    alpha: f64,
    mode: RunMode,
) -> Result<RunTrace<T>> {
    run(f, c, epsilon, alpha, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::ConcreteMatroid;
    use crate::objective::{CoverageObjective, ModularObjective};
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn singletons(m: ConcreteMatroid) -> KParityConstraint {
        let n = crate::matroid::MatroidOracle::ground_size(&m);
        KParityConstraint::new(Arc::new(m), (0..n).map(|v| vec![v]).collect(), 1).unwrap()
    }

    /// Every `(θ, ε)`-improvement for `prev ∪ cur` with `N ⊆ cur`, straight from the definition.
    fn all_improvements(
        f: &ModularObjective<f64>,
        c: &KParityConstraint,
        prev: &[usize],
        cur: &[usize],
        theta: f64,
        eps: f64,
    ) -> BTreeSet<(Vec<usize>, Option<usize>)> {
        let a = sets::union(prev, cur);
        let outside = sets::minus(&c.edge_ids(), &a);
        let fa = f.value(&a);
        let g = |x: usize, s: &[usize]| f.value(&sets::union(s, &[x])) - f.value(s);
        let mut out = BTreeSet::new();
        let ns: Vec<Option<usize>> = std::iter::once(None).chain(cur.iter().map(|&y| Some(y))).collect();
        for s in sets::subsets(&outside).filter(|s| (1..=2).contains(&s.len())) {
            for &n in &ns {
                let after = sets::minus(&sets::union(&a, &s), &n.map_or(vec![], |y| vec![y]));
                if !c.feasible(&after).unwrap() {
                    continue;
                }
                let ok = match (s.len(), n) {
                    (1, None) => g(s[0], &a) >= theta,
                    (1, Some(_)) => g(s[0], &a) >= theta && f.value(&after) >= fa + eps * theta,
                    (2, Some(_)) => {
                        let lab = |x1: usize, x2: usize| {
                            g(x1, &a) >= theta && g(x2, &sets::union(&a, &[x1])) >= theta
                        };
                        lab(s[0], s[1]) || lab(s[1], s[0])
                    }
                    _ => false,
                };
                if ok {
                    out.insert((s.clone(), n));
                }
            }
        }
        out
    }

    /// Terminal sets of the literal algorithm over every possible sequence of improvements.
    fn terminal_sets(
        f: &ModularObjective<f64>,
        c: &KParityConstraint,
        alpha: f64,
        eps: f64,
    ) -> BTreeSet<Vec<usize>> {
        fn inner(
            f: &ModularObjective<f64>,
            c: &KParityConstraint,
            th: &Thresholds<f64>,
            eps: f64,
            done: Vec<usize>,
            i: i64,
            cur: Vec<usize>,
            out: &mut BTreeSet<Vec<usize>>,
        ) {
            let imps = all_improvements(f, c, &done, &cur, th.m(i), eps);
            if imps.is_empty() {
                let done = sets::union(&done, &cur);
                let more = sets::minus(&c.edge_ids(), &done).into_iter().any(|e| {
                    c.feasible(&sets::union(&done, &[e])).unwrap()
                        && f.value(&sets::union(&done, &[e])) > f.value(&done)
                });
                if more {
                    inner(f, c, th, eps, done, i + 1, vec![], out);
                } else {
                    out.insert(done);
                }
                return;
            }
            for (s, n) in imps {
                let next = sets::minus(&sets::union(&cur, &s), &n.map_or(vec![], |y| vec![y]));
                inner(f, c, th, eps, done.clone(), i, next, out);
            }
        }
        let w = compute_w(f, c).unwrap();
        let th = Thresholds::new(w, alpha);
        let mut out = BTreeSet::new();
        inner(f, c, &th, eps, vec![], 1, vec![], &mut out);
        out
    }

    #[test]
    fn thresholds_formula() {
        let th = Thresholds::new(1.0f64, 1.0);
        assert_eq!((th.m(0), th.m(1), th.m(2)), (2.0, 1.0, 0.5));
        let th = Thresholds::new(5.0f64, 0.5);
        assert!((th.m(1) - 5.0 * 2f64.powf(-0.5)).abs() < 1e-12);
        for i in 1..=60 {
            assert_eq!(th.m(i - 1), 2.0 * th.m(i));
        }
    }

    #[test]
    fn alpha_sampling() {
        assert_eq!(alpha_from_uniform(0.0), 1.0);
        assert_eq!(alpha_from_uniform(0.5), 0.5);
        let (a, t) = sample_alpha(7);
        assert!(a > 0.0 && a <= 1.0);
        assert_eq!(t, a.exp2());
        assert_eq!(sample_alpha(7), sample_alpha(7));
    }

    #[test]
    fn alpha_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut xs: Vec<f64> = (0..100_000).map(|_| alpha_from_rng(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(j, &x)| (x - j as f64 / n).abs().max((x - (j + 1) as f64 / n).abs()))
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "{ks}");
        assert!(xs[0] > 0.0 && xs[xs.len() - 1] <= 1.0);
    }

    fn bracket(w_max: f64, tau: f64, w: f64) -> i64 {
        (1..2000).find(|&i| threshold(w_max, tau, i) <= w && w < threshold(w_max, tau, i - 1)).unwrap()
    }

    #[test]
    fn fast_forward_examples() {
        assert_eq!(fast_forward(1.0, 2.0, 1.0).unwrap(), 1);
        assert_eq!(fast_forward(1.0, 2.0, 0.3).unwrap(), 3);
        assert_eq!(fast_forward(1.0, 2.0, 0.5).unwrap(), 2);
        assert_eq!(bracket(1.0, 2.0, 0.3), 3);
        assert!(fast_forward(1.0, 2.0, 0.0).is_err());
        assert!(fast_forward(1.0, 2.0, -1.0).is_err());
        for &(w_max, tau, w) in &[(5.0, 1.3, 0.77), (3.0, 2f64.sqrt(), 3.0 / 1024.0), (1e6, 1.9, 1e-3)] {
            assert_eq!(fast_forward(w_max, tau, w).unwrap(), bracket(w_max, tau, w));
        }
    }

    #[test]
    fn compute_w_examples() {
        let c = singletons(ConcreteMatroid::uniform(3, 1));
        let f = ModularObjective::linear(vec![3.0, 5.0, -1.0]);
        assert_eq!(compute_w(&f, &c), Some(5.0));
        let cov = CoverageObjective::new(vec![1.0, 2.0, 4.0], vec![vec![0, 1], vec![2], vec![0]]).unwrap();
        let direct = (0..3).map(|e| cov.value(&[e])).fold(f64::MIN, f64::max);
        assert_eq!(compute_w(&cov, &c), Some(direct));
        let none = c.restrict_ground(&[]).unwrap();
        assert_eq!(compute_w(&f, &none), None);
    }

    #[test]
    fn kind_one_from_empty() {
        let c = singletons(ConcreteMatroid::uniform(2, 1));
        let f = ModularObjective::linear(vec![2.0, 0.5]);
        let imp = find_improvement(&f, &c, &[], &[], 1.0, 0.1).unwrap();
        assert_eq!(imp, Some(Improvement::Add { x: 0 }));
    }

    #[test]
    fn kind_two_swap() {
        let c = singletons(ConcreteMatroid::uniform(2, 1));
        let f = ModularObjective::linear(vec![1.0, 1.2]);
        let imp = find_improvement(&f, &c, &[], &[0], 1.0, 0.1).unwrap();
        assert_eq!(imp, Some(Improvement::Swap { x: 1, y: 0 }));
        let oracle = all_improvements(&f, &c, &[], &[0], 1.0, 0.1);
        assert_eq!(oracle.into_iter().collect::<Vec<_>>(), vec![(vec![1], Some(0))]);
    }

    #[test]
    fn kind_three_pair() {
        let m = ConcreteMatroid::partition(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        let c = KParityConstraint::new(Arc::new(m), vec![vec![0, 2], vec![1], vec![3]], 2).unwrap();
        let f = ModularObjective::linear(vec![5.0, 3.0, 3.0]);
        // from {0}: swapping in one of 1, 2 gains < ε θ; the pair {1, 2} replacing 0 qualifies
        let imp = find_improvement(&f, &c, &[], &[0], 3.0, 0.9).unwrap();
        assert_eq!(imp, Some(Improvement::Pair { x1: 1, x2: 2, y: 0 }));
        let oracle = all_improvements(&f, &c, &[], &[0], 3.0, 0.9);
        assert!(oracle.contains(&(vec![1, 2], Some(0))));
    }

    #[test]
    fn local_optimum_has_no_improvement() {
        let c = singletons(ConcreteMatroid::uniform(3, 2));
        let f = ModularObjective::linear(vec![5.0, 3.0, 1.0]);
        assert_eq!(find_improvement(&f, &c, &[], &[0, 1], 1.0, 0.1).unwrap(), None);
        assert!(find_improvement(&f, &c, &[0], &[0], 1.0, 0.1).is_err());
    }

    #[test]
    fn uniform_531_example() {
        let c = singletons(ConcreteMatroid::uniform(3, 2));
        let f = ModularObjective::linear(vec![5.0, 3.0, 1.0]);
        for &alpha in &[1.0, 0.73, 0.5, 0.21, 0.01] {
            assert_eq!(terminal_sets(&f, &c, alpha, 0.1), BTreeSet::from([vec![0, 1]]));
            for mode in [RunMode::Reference, RunMode::Efficient] {
                let t: RunTrace<f64> = run_with_alpha(&f, &c, 0.1, alpha, mode).unwrap();
                assert_eq!(t.output, vec![0, 1]);
                assert_eq!(f.value(&t.output), 8.0);
            }
        }
    }

    #[test]
    fn nonpositive_objectives_return_empty() {
        let c = singletons(ConcreteMatroid::uniform(3, 2));
        let f = ModularObjective::linear(vec![-1.0, -2.0, 0.0]);
        for seed in 0..3 {
            let cfg = SolverConfig::new(0.1, seed);
            let r: RunTrace<f64> = run_reference(&f, &c, &cfg).unwrap();
            let e: RunTrace<f64> = run_efficient(&f, &c, &cfg).unwrap();
            assert!(r.output.is_empty() && e.output.is_empty());
            assert!(r.iterations.is_empty() && e.iterations.is_empty());
        }
    }

    #[test]
    fn reference_visits_empty_iterations() {
        let c = singletons(ConcreteMatroid::uniform(2, 2));
        let f = ModularObjective::linear(vec![64.0, 1.0]);
        let r: RunTrace<f64> = run_with_alpha(&f, &c, 0.1, 0.5, RunMode::Reference).unwrap();
        let e: RunTrace<f64> = run_with_alpha(&f, &c, 0.1, 0.5, RunMode::Efficient).unwrap();
        assert_eq!(r.output, e.output);
        assert!(r.iterations.iter().any(|it| it.final_set.is_empty()));
        let r_idx: Vec<i64> = r.nonempty_iterations().map(|it| it.index).collect();
        let e_idx: Vec<i64> = e.iterations.iter().map(|it| it.index).collect();
        assert_eq!(r_idx, e_idx);
        assert_eq!(r.insertion_order, vec![0, 1]);
    }

    #[test]
    fn invalid_config() {
        let c = singletons(ConcreteMatroid::uniform(2, 1));
        let f = ModularObjective::linear(vec![1.0, 1.0]);
        assert!(run_efficient::<f64, _>(&f, &c, &SolverConfig::new(1.0, 0)).is_err());
        assert!(run_efficient::<f64, _>(&f, &c, &SolverConfig::new(0.0, 0)).is_err());
        assert!(run_with_alpha::<f64, _>(&f, &c, 0.5, 0.0, RunMode::Efficient).is_err());
    }

    #[test]
    fn trace_json_roundtrip() {
        let c = singletons(ConcreteMatroid::uniform(3, 2));
        let f = ModularObjective::linear(vec![5.0, 3.0, 1.0]);
        let t: RunTrace<f64> = run_efficient(&f, &c, &SolverConfig::new(0.2, 3)).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"W\":5.0"));
        let back: RunTrace<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn f32_instantiation() {
        let c = singletons(ConcreteMatroid::uniform(3, 2));
        let f = ModularObjective::linear(vec![5.0f32, 3.0, 1.0]);
        let t: RunTrace<f32> = run_efficient(&f, &c, &SolverConfig::new(0.1, 11)).unwrap();
        assert_eq!(t.output, vec![0, 1]);
    }
}
