//! Charging-argument verifier.
//!
//! Given a finished run and a strictly down-monotone feasible set `O`, this
//! module rebuilds the partition `O_1, O_2, ...`, the blame sets `N_o`, the
//! weights `w`, `ow` and `u`, and checks every deterministic inequality the
//! approximation argument relies on. A failed check carries witnesses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::exchange::{check_exchange_claims, exchange_structure};
use crate::kparity::KParityConstraint;
use crate::objective::{ObjectiveClass, ValueOracle};
use crate::scalar::{approx_eq, approx_le, Scalar};
use crate::sets;
use crate::solver::{RunTrace, Thresholds};

/// Removes, smallest id first, any `x` with `f(x | O - x) <= 0` until none is left.
pub fn prune_down_monotone<T: Scalar, F: ValueOracle<T> + ?Sized>(f: &F, o: &[usize]) -> Vec<usize> {
    let mut o = sets::normalize(o);
    loop {
        let drop = o.iter().copied().find(|&x| {
            let rest: Vec<usize> = o.iter().copied().filter(|&y| y != x).collect();
            f.marginal(x, &rest) <= T::zero()
        });
        match drop {
            Some(x) => o.retain(|&y| y != x),
            None => return o,
        }
    }
}

pub fn is_strictly_down_monotone<T: Scalar, F: ValueOracle<T> + ?Sized>(f: &F, o: &[usize]) -> bool {
    o.iter().all(|&x| {
        let rest: Vec<usize> = o.iter().copied().filter(|&y| y != x).collect();
        f.marginal(x, &rest) > T::zero()
    })
}

/// `w(a_j) = f(a_j | {a_1, ..., a_{j-1}})` along `order`.
pub fn weights_w<T: Scalar, F: ValueOracle<T> + ?Sized>(f: &F, order: &[usize]) -> BTreeMap<usize, T> {
    let mut out = BTreeMap::new();
    let mut prefix = Vec::with_capacity(order.len());
    let mut before = f.value(&prefix);
    for &a in order {
        prefix.push(a);
        let after = f.value(&prefix);
        out.insert(a, after - before);
        before = after;
    }
    out
}

/// `ow(o_j) = max{0, f(o_j | (A - o_j) ∪ {o_1, ..., o_{j-1}})}` with `O` in ascending id order.
pub fn weights_ow<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    a: &[usize],
    o: &[usize],
) -> BTreeMap<usize, T> {
    let o = sets::normalize(o);
    o.iter()
        .enumerate()
        .map(|(j, &oj)| {
            let base = sets::minus(&sets::union(a, &o[..j]), &[oj]);
            (oj, f.marginal(oj, &base).max(T::zero()))
        })
        .collect()
}

/// `u(o_j) = f(o_j | {o_1, ..., o_{j-1}})` with `O` in ascending id order.
pub fn weights_u<T: Scalar, F: ValueOracle<T> + ?Sized>(f: &F, o: &[usize]) -> BTreeMap<usize, T> {
    weights_w(f, &sets::normalize(o))
}

/// `(m^(o), r_o, ρ_{o,d})` where `m^(o)` is the smallest threshold at least `u`.
pub fn r_and_rho<T: Scalar>(u: T, th: &Thresholds<T>, d: T, linear: bool) -> Result<(T, T, T)> {
    if !(u > T::zero()) {
        return input("r_o needs u(o) > 0");
    }
    if th.m(0) < u {
        return input("u(o) exceeds m_0");
    }
    let mut i = 0;
    while th.m(i + 1) >= u {
        i += 1;
    }
    let m_o = th.m(i);
    let r = m_o / u;
    Ok((m_o, r, rho(r, d, linear)))
}

/// `ρ_{o,d}` as a function of `r_o`.
pub fn rho<T: Scalar>(r: T, d: T, linear: bool) -> T {
    if linear {
        return r;
    }
    let one = T::one();
    let q = one - one / d;
    r.min((one - T::lit(0.5) * q) / (one - q / r))
}

/// `β` with `r_o = 2^β`, as a function of the sampled `alpha`.
pub fn beta_of_alpha<T: Scalar>(w_max: T, u: T, alpha: T) -> T {
    let gap = w_max.log2() - u.log2();
    let i_star = gap.floor() + T::one();
    let alpha_star = i_star - gap;
    if alpha < alpha_star {
        alpha - alpha_star + T::one()
    } else {
        alpha - alpha_star
    }
}

/// `(1 - 1/d) / (2 ln 2) + (d + 1) / (2d)`, the expectation of `ρ_{o,d}` over `alpha`.
pub fn expected_rho(d: f64) -> f64 {
    (1.0 - 1.0 / d) / (2.0 * std::f64::consts::LN_2) + (d + 1.0) / (2.0 * d)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OPartition {
    /// `(i, O_i)` for every iteration with a non-empty `A_i`.
    pub parts: Vec<(i64, Vec<usize>)>,
    /// `N_o` for every `o ∈ O_{<=L}`.
    pub blame: BTreeMap<usize, Vec<usize>>,
    /// Violations found while building the partition.
    pub violations: Vec<String>,
}

impl OPartition {
    pub fn covered(&self) -> Vec<usize> {
        sets::normalize(&self.parts.iter().flat_map(|(_, p)| p.clone()).collect::<Vec<_>>())
    }

    pub fn part_of(&self, o: usize) -> Option<i64> {
        self.parts.iter().find(|(_, p)| p.contains(&o)).map(|(i, _)| *i)
    }
}

/// Builds `O_1, ..., O_L` and `N_o` by applying the exchange structure to
/// `A_{<=i}` and `A_{<=i-1} ∪ (O \ O_{<=i-1})` for each iteration. Iterations
/// with an empty `A_i` contribute an empty `O_i` and are skipped.
pub fn partition_o<T: Scalar>(trace: &RunTrace<T>, c: &KParityConstraint, o: &[usize]) -> Result<OPartition> {
    let o = sets::normalize(o);
    let mut out = OPartition::default();
    let mut a_prev: Vec<usize> = Vec::new();
    let mut left = o.clone();
    for it in trace.nonempty_iterations() {
        let a_le = sets::union(&a_prev, &it.final_set);
        let b = sets::union(&a_prev, &left);
        if !c.feasible(&b)? || !sets::intersect(&a_prev, &left).is_empty() {
            out.violations.push(format!(
                "iteration {}: A_<=i-1 ∪ (O \\ O_<=i-1) = {b:?} infeasible or overlapping",
                it.index
            ));
            return Ok(out);
        }
        let n = exchange_structure(c, &a_le, &b)?;
        for msg in check_exchange_claims(c, &a_le, &b, &n)? {
            out.violations.push(format!("iteration {}: {msg}", it.index));
        }
        let part: Vec<usize> = left.iter().copied().filter(|&x| !n.get(x).is_empty()).collect();
        for &x in &part {
            out.blame.insert(x, n.get(x).to_vec());
        }
        left = sets::minus(&left, &part);
        out.parts.push((it.index, part));
        a_prev = a_le;
    }
    if !c.feasible(&sets::union(&a_prev, &left))? {
        out.violations.push(format!("A_<=L ∪ (O \\ O_<=L) with O \\ O_<=L = {left:?} infeasible"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingReport<T> {
    pub o: Vec<usize>,
    pub partition: OPartition,
    /// `O^(s)`.
    pub o_s: Vec<usize>,
    pub w: BTreeMap<usize, T>,
    pub ow: BTreeMap<usize, T>,
    pub u: BTreeMap<usize, T>,
    pub r: BTreeMap<usize, T>,
    pub rho: BTreeMap<usize, T>,
    pub d: T,
    /// The six sides of the charging chain, each expected to be at most the next.
    pub chain: Vec<T>,
    pub checks: Vec<Check>,
}

impl<T> ChargingReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn record(&mut self, name: &str, witnesses: Vec<String>) {
        self.0.push(Check { name: name.into(), passed: witnesses.is_empty(), witnesses });
    }
}

/// Default `d = 2√k`.
pub fn default_d(k: usize) -> f64 {
    2.0 * (k as f64).sqrt()
}

/// Rebuilds the charging artifacts for `trace` against `o` and checks every
/// per-run inequality. `o` must be feasible and strictly down-monotone; `d >= 2`.
pub fn verify_run<T: Scalar, F: ValueOracle<T> + ?Sized>(
    trace: &RunTrace<T>,
    f: &F,
    c: &KParityConstraint,
    o: &[usize],
    d: T,
) -> Result<ChargingReport<T>> {
    let o = sets::normalize(o);
    if !c.feasible(&o)? {
        return input("reference set O is not feasible");
    }
    if !is_strictly_down_monotone(f, &o) {
        return input("reference set O is not strictly down-monotone; prune it first");
    }
    if !(d >= T::lit(2.0)) {
        return input("d must be at least 2");
    }
    let a = sets::normalize(&trace.output);
    if sets::normalize(&trace.insertion_order) != a {
        return input("trace insertion order does not match its output");
    }
    let th = trace.thresholds();
    let eps = trace.epsilon;
    let linear = f.class() == ObjectiveClass::Linear;
    let one = T::one();
    let two = T::lit(2.0);

    let w = weights_w(f, &trace.insertion_order);
    let ow = weights_ow(f, &a, &o);
    let u = weights_u(f, &o);
    let partition = partition_o(trace, c, &o)?;
    let covered = partition.covered();
    let n_of = |x: usize| partition.blame.get(&x).map_or(&[][..], Vec::as_slice);
    let w_of = |set: &[usize]| set.iter().map(|x| w[x]).fold(T::zero(), |s, v| s + v);

    let mut checks = Checks::default();
    checks.record("partition", partition.violations.clone());

    let mut bad = Vec::new();
    let mut done: Vec<usize> = Vec::new();
    for it in trace.nonempty_iterations() {
        done = sets::union(&done, &it.final_set);
        for e in sets::minus(&c.edge_ids(), &done) {
            let plus = sets::union(&done, &[e]);
            if c.feasible(&plus)? && f.marginal(e, &done) >= th.m(it.index) {
                bad.push(format!("iteration {}: f({e} | A_<=i) >= m_i", it.index));
            }
        }
    }
    checks.record("local-optimality", bad);

    let bad = sets::minus(&c.edge_ids(), &a)
        .into_iter()
        .filter(|&e| c.feasible(&sets::union(&a, &[e])).unwrap_or(false) && f.marginal(e, &a) > T::zero())
        .map(|e| format!("f({e} | A) > 0 with A + {e} feasible"))
        .collect();
    checks.record("termination", bad);

    let mut bad = Vec::new();
    for it in trace.nonempty_iterations() {
        let (lo, hi) = (th.m(it.index), th.m(it.index - 1));
        for &x in &it.final_set {
            let wx = w[&x];
            if !(lo > T::zero() && approx_le(lo, wx) && approx_le(wx, hi)) {
                bad.push(format!("a={x} in A_{}: w={wx} outside [{lo}, {hi}]", it.index));
            }
        }
    }
    checks.record("weight-bracket", bad);

    let mut bad = Vec::new();
    for (i, part) in &partition.parts {
        for &x in part {
            if !approx_le(ow[&x], th.m(i - 1)) {
                bad.push(format!("o={x} in O_{i}: ow={} > m_(i-1)={}", ow[&x], th.m(i - 1)));
            }
        }
    }
    checks.record("ow-below-previous-threshold", bad);

    let leftover = sets::minus(&o, &covered);
    let bad = leftover
        .iter()
        .filter(|x| !approx_le(ow[x], T::zero()))
        .map(|x| format!("o={x} outside O_<=L has ow={}", ow[x]))
        .collect();
    checks.record("leftover-ow-zero", bad);

    let bad = sets::intersect(&o, &a)
        .iter()
        .filter(|x| !approx_le(ow[x], w[x]))
        .map(|x| format!("o={x}: ow={} > w={}", ow[x], w[x]))
        .collect();
    checks.record("shared-ow-below-w", bad);

    let mut bad = Vec::new();
    for &x in &o {
        if !(u[&x] > T::zero()) || !approx_le(ow[&x], u[&x]) || (linear && !approx_eq(ow[&x], u[&x])) {
            bad.push(format!("o={x}: u={} ow={}", u[&x], ow[&x]));
        }
    }
    checks.record("u-dominates-ow", bad);

    let gap_total: T = o.iter().map(|x| u[x] - ow[x]).fold(T::zero(), |s, v| s + v);
    let fa = f.value(&a);
    let fo = f.value(&o);
    let rhs = fa - (f.value(&sets::union(&a, &o)) - fo);
    let bad = if approx_le(gap_total, rhs) {
        vec![]
    } else {
        vec![format!("Σ(u - ow) = {gap_total} > f(A) - f(A | O) = {rhs}")]
    };
    checks.record("alternative-bound", bad);

    let o_s: Vec<usize> = covered
        .iter()
        .copied()
        .filter(|&x| {
            let i = partition.part_of(x).expect("covered");
            ow[&x] > th.m(i) && n_of(x).len() == 1
        })
        .collect();

    let bad = o_s
        .iter()
        .filter(|&&x| !approx_le(ow[&x], (one + eps) * w_of(n_of(x))))
        .map(|&x| format!("o={x}: ow={} > (1+ε)·w(N_o)={}", ow[&x], (one + eps) * w_of(n_of(x))))
        .collect();
    checks.record("singleton-charge", bad);

    let mut bad = Vec::new();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in &o_s {
        for &y in n_of(x) {
            if let Some(prev) = owner.insert(y, x) {
                bad.push(format!("N_{prev} and N_{x} share {y}"));
            }
        }
    }
    checks.record("singleton-disjoint", bad);

    let mut load: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in &covered {
        for &y in n_of(x) {
            *load.entry(y).or_default() += 1;
        }
    }
    let bad = load
        .iter()
        .filter(|(_, &l)| l > c.k())
        .map(|(y, l)| format!("a={y} blamed by {l} > k elements"))
        .collect();
    checks.record("blame-load", bad);

    let f_gain = fa - f.value(&[]);
    let s_total = o_s.iter().map(|&x| w_of(n_of(x))).fold(T::zero(), |s, v| s + v);
    let mut bad: Vec<String> = o_s
        .iter()
        .filter(|&&x| !approx_le(u[&x], (one + eps) * w_of(n_of(x)) + (u[&x] - ow[&x])))
        .map(|&x| format!("o={x}: u exceeds (1+ε)·w(N_o) + (u - ow)"))
        .collect();
    if !approx_le(s_total, f_gain) {
        bad.push(format!("Σ_(O^s) w(N_o) = {s_total} > f(A | ∅) = {f_gain}"));
    }
    checks.record("singleton-total", bad);

    let mut r = BTreeMap::new();
    let mut rho_map = BTreeMap::new();
    let mut bad = Vec::new();
    for &x in &o {
        match r_and_rho(u[&x], &th, d, linear) {
            Ok((_, rx, px)) => {
                r.insert(x, rx);
                rho_map.insert(x, px);
            }
            Err(e) => bad.push(format!("o={x}: {e}")),
        }
    }
    checks.record("ratio-defined", bad);
    if r.len() != o.len() {
        return Ok(ChargingReport {
            o,
            partition,
            o_s,
            w,
            ow,
            u,
            r,
            rho: rho_map,
            d,
            chain: Vec::new(),
            checks: checks.0,
        });
    }

    let other = sets::minus(&covered, &o_s);
    let bad = other
        .iter()
        .filter(|&&x| !approx_le(rho_map[&x] * u[&x], w_of(n_of(x)) + d * (u[&x] - ow[&x])))
        .map(|&x| {
            format!(
                "o={x}: ρ·u = {} > w(N_o) + d(u - ow) = {}",
                rho_map[&x] * u[&x],
                w_of(n_of(x)) + d * (u[&x] - ow[&x])
            )
        })
        .collect();
    checks.record("ratio-charge", bad);

    let sum = |xs: &[usize], g: &dyn Fn(usize) -> T| xs.iter().map(|&x| g(x)).fold(T::zero(), |s, v| s + v);
    let gap = |x: usize| u[&x] - ow[&x];
    let c0 = sum(&o, &|x| rho_map[&x] * u[&x]);
    let c1 = sum(&o_s, &|x| two * u[&x]) + sum(&leftover, &|x| two * u[&x]) + sum(&other, &|x| rho_map[&x] * u[&x]);
    let c2 = two * sum(&o_s, &|x| (one + eps) * w_of(n_of(x)) + gap(x))
        + two * sum(&leftover, &gap)
        + sum(&other, &|x| w_of(n_of(x)) + d * gap(x));
    let c3 = sum(&covered, &|x| w_of(n_of(x)))
        + (one + two * eps) * s_total
        + d * gap_total;
    let c4 = T::lit(c.k() as f64) * sum(&a, &|x| w[&x]) + (one + two * eps) * s_total + d * gap_total;
    let c5 = (T::lit(c.k() as f64) + one + two * eps) * f_gain + d * gap_total;
    let chain = vec![c0, c1, c2, c3, c4, c5];
    let bad = chain
        .windows(2)
        .enumerate()
        .filter(|(_, p)| !approx_le(p[0], p[1]))
        .map(|(j, p)| format!("step {j}: {} > {}", p[0], p[1]))
        .collect();
    checks.record("chain", bad);

    Ok(ChargingReport { o, partition, o_s, w, ow, u, r, rho: rho_map, d, chain, checks: checks.0 })
}

/// Per-element statistics used by Monte-Carlo experiments over `alpha`.
pub fn r_samples<T: Scalar>(w_max: T, u: T, alphas: &[T]) -> Result<Vec<T>> {
    alphas
        .iter()
        .map(|&alpha| r_and_rho(u, &Thresholds::new(w_max, alpha), T::lit(2.0), true).map(|(_, r, _)| r))
        .collect()
}
