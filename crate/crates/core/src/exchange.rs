//! Base partitions and blame collections between feasible sets, at desk scale.
//!
//! [`greene_magnanti`] finds, by exhaustive search, a partition of a base `T`
//! matching a given partition of a base `S` so that every part can be swapped
//! in. [`exchange_structure`] builds, for two feasible edge sets `A` and `B`
//! of a k-parity constraint, the sets `N_b ⊆ A` blamed by each `b ∈ B`, by
//! padding, contracting and truncating down to two bases and applying
//! [`greene_magnanti`]. Neither is used by the solver; the charging verifier
//! in `analysis` relies on them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::kparity::KParityConstraint;
use crate::matroid::{contract, restrict, truncate, validate_ids, MatroidOracle};
use crate::sets;

/// Largest base accepted by [`greene_magnanti`].
pub const GM_MAX_BASE: usize = 12;
/// Largest number of parts accepted by [`greene_magnanti`].
pub const GM_MAX_PARTS: usize = 12;
/// Largest `|v(A \ B)| + |v(B \ A)|` accepted by [`exchange_structure`].
pub const EXCHANGE_MAX_SUPPORT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePartition {
    /// `parts[i]` is `T_i`, matched with the `i`-th part of `S`.
    pub parts: Vec<Vec<usize>>,
}

/// For bases `s`, `t` and a partition of `s`, returns the lexicographically
/// first assignment of `t`'s elements (in ascending order) to part indices
/// such that `(S \ S_i) ∪ T_i` is a base for every `i`.
pub fn greene_magnanti<M: MatroidOracle + ?Sized>(
    m: &M,
    s: &[usize],
    t: &[usize],
    s_parts: &[Vec<usize>],
) -> Result<BasePartition> {
    validate_ids(m.ground_size(), s)?;
    validate_ids(m.ground_size(), t)?;
    let s = sets::normalize(s);
    let t = sets::normalize(t);
    if t.len() > GM_MAX_BASE || s_parts.len() > GM_MAX_PARTS {
        return Err(Error::TooLarge(format!(
            "base partition search limited to |T| <= {GM_MAX_BASE} and {GM_MAX_PARTS} parts"
        )));
    }
    let rank = m.full_rank();
    if s.len() != rank || !m.independent(&s) {
        return input("S is not a base");
    }
    if t.len() != rank || !m.independent(&t) {
        return input("T is not a base");
    }
    let mut covered: Vec<usize> = s_parts.iter().flatten().copied().collect();
    covered.sort_unstable();
    if covered != s {
        return input("S_parts must partition S");
    }

    let rest: Vec<Vec<usize>> = s_parts.iter().map(|p| sets::minus(&s, p)).collect();
    let need: Vec<usize> = s_parts.iter().map(Vec::len).collect();
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); s_parts.len()];
    if assign(m, &t, 0, &rest, &need, &mut parts) {
        Ok(BasePartition { parts })
    } else {
        Err(Error::Internal(
            "no exchange partition exists; the oracle violates the matroid axioms".into(),
        ))
    }
}

fn assign<M: MatroidOracle + ?Sized>(
    m: &M,
    t: &[usize],
    j: usize,
    rest: &[Vec<usize>],
    need: &[usize],
    parts: &mut [Vec<usize>],
) -> bool {
    if j == t.len() {
        return true;
    }
    for i in 0..parts.len() {
        if parts[i].len() == need[i] || rest[i].contains(&t[j]) {
            continue;
        }
        let mut candidate = rest[i].clone();
        candidate.extend_from_slice(&parts[i]);
        candidate.push(t[j]);
        if !m.independent(&candidate) {
            continue;
        }
        parts[i].push(t[j]);
        if assign(m, t, j + 1, rest, need, parts) {
            return true;
        }
        parts[i].pop();
    }
    false
}

/// The collection `{N_b ⊆ A | b ∈ B}`, keyed by `b`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeStructure {
    pub blame: BTreeMap<usize, Vec<usize>>,
}

impl ExchangeStructure {
    pub fn get(&self, b: usize) -> &[usize] {
        self.blame.get(&b).map_or(&[], Vec::as_slice)
    }
}

pub fn exchange_structure(
    c: &KParityConstraint,
    a: &[usize],
    b: &[usize],
) -> Result<ExchangeStructure> {
    let a = sets::normalize(a);
    let b = sets::normalize(b);
    if !c.feasible(&a)? {
        return input("A is not feasible");
    }
    if !c.feasible(&b)? {
        return input("B is not feasible");
    }
    let common = sets::intersect(&a, &b);
    let a_only = sets::minus(&a, &b);
    let b_only = sets::minus(&b, &a);

    let mut out = ExchangeStructure::default();
    for &x in &common {
        out.blame.insert(x, vec![x]);
    }
    if b_only.is_empty() {
        return Ok(out);
    }
    let support = c.vertices_of(&a_only)?.len() + c.vertices_of(&b_only)?.len();
    if support > EXCHANGE_MAX_SUPPORT {
        return Err(Error::TooLarge(format!(
            "exchange structure limited to {EXCHANGE_MAX_SUPPORT} vertices outside A ∩ B, got {support}"
        )));
    }

    // Shared edges are handled by contracting their vertices and recursing on
    // the disjoint remainder.
    let shared = c.vertices_of(&common)?;
    let m = contract(c.matroid().as_ref(), &shared)?;
    let localize = |ids: &[usize]| -> Vec<(usize, Vec<usize>)> {
        ids.iter()
            .map(|&id| {
                let vs = c.edge(id).expect("edge id validated").vertices.iter();
                (id, vs.map(|&v| m.from_base(v).expect("vertex outside contraction")).collect())
            })
            .collect()
    };
    let blame = disjoint_exchange(&m, &localize(&a_only), &localize(&b_only))?;
    out.blame.extend(blame);
    Ok(out)
}

type LocalEdges = [(usize, Vec<usize>)];

fn disjoint_exchange<M: MatroidOracle + ?Sized>(
    m: &M,
    a: &LocalEdges,
    b: &LocalEdges,
) -> Result<BTreeMap<usize, Vec<usize>>> {
    let va = sets::normalize(&a.iter().flat_map(|(_, v)| v.clone()).collect::<Vec<_>>());
    let vb = sets::normalize(&b.iter().flat_map(|(_, v)| v.clone()).collect::<Vec<_>>());

    // Pad the smaller side with elements of the larger one so both reach the same size.
    let (small, large) = if va.len() <= vb.len() { (&va, &vb) } else { (&vb, &va) };
    let need = large.len() - small.len();
    let mut grown = small.clone();
    let mut pad = Vec::with_capacity(need);
    for &v in large.iter() {
        if pad.len() == need {
            break;
        }
        grown.push(v);
        if m.independent(&grown) {
            pad.push(v);
        } else {
            grown.pop();
        }
    }
    if pad.len() < need {
        return Err(Error::Internal("augmentation failed while padding".into()));
    }

    let support = sets::union(&va, &vb);
    let restricted = restrict(m, &support)?;
    let local = |v: usize| restricted.from_base(v).expect("vertex in support");
    let pad_local: Vec<usize> = pad.iter().map(|&v| local(v)).collect();
    let contracted = contract(&restricted, &pad_local)?;
    let rank = sets::minus(&va, &pad).len();
    let bar = truncate(&contracted, rank)?;

    // v̄(e) = v(e) \ pad, in the ids of the truncated matroid.
    let bar_v = |vs: &[usize]| -> Vec<usize> {
        let mut out: Vec<usize> = vs
            .iter()
            .filter(|v| !pad.contains(v))
            .map(|&v| contracted.from_base(local(v)).expect("vertex survives contraction"))
            .collect();
        out.sort_unstable();
        out
    };
    let a_bar: Vec<(usize, Vec<usize>)> = a.iter().map(|(id, vs)| (*id, bar_v(vs))).collect();
    let b_bar: Vec<(usize, Vec<usize>)> = b.iter().map(|(id, vs)| (*id, bar_v(vs))).collect();

    let nonempty: Vec<&(usize, Vec<usize>)> = a_bar.iter().filter(|(_, v)| !v.is_empty()).collect();
    let s: Vec<usize> = nonempty.iter().flat_map(|(_, v)| v.clone()).collect();
    let t: Vec<usize> = b_bar.iter().flat_map(|(_, v)| v.clone()).collect();
    let s_parts: Vec<Vec<usize>> = nonempty.iter().map(|(_, v)| v.clone()).collect();
    let pi = greene_magnanti(&bar, &s, &t, &s_parts)?;

    let mut blame = BTreeMap::new();
    for (b_id, vb) in &b_bar {
        let hit: Vec<usize> = nonempty
            .iter()
            .zip(&pi.parts)
            .filter(|(_, part)| part.iter().any(|x| vb.contains(x)))
            .map(|((a_id, _), _)| *a_id)
            .collect();
        blame.insert(*b_id, hit);
    }
    Ok(blame)
}

/// Checks the four exchange claims for `n` against `A` and `B`; returns one
/// message per violation.
pub fn check_exchange_claims(
    c: &KParityConstraint,
    a: &[usize],
    b: &[usize],
    n: &ExchangeStructure,
) -> Result<Vec<String>> {
    let a = sets::normalize(a);
    let b = sets::normalize(b);
    let a_only = sets::minus(&a, &b);
    let mut bad = Vec::new();

    for &x in &b {
        let Some(nb) = n.blame.get(&x) else {
            bad.push(format!("no set recorded for b={x}"));
            continue;
        };
        if a.contains(&x) {
            if nb != &vec![x] {
                bad.push(format!("claim 1: b={x} in A ∩ B but N_b={nb:?}"));
            }
        } else if !sets::minus(nb, &a_only).is_empty() {
            bad.push(format!("claim 1: N_{x}={nb:?} not inside A \\ B"));
        }
    }

    let unblamed: Vec<usize> = b.iter().copied().filter(|&x| n.get(x).is_empty()).collect();
    if !c.feasible(&sets::union(&a, &unblamed))? {
        bad.push(format!("claim 2: A ∪ {unblamed:?} infeasible"));
    }

    for &x in &a {
        let only_x: Vec<usize> = b.iter().copied().filter(|&y| n.get(y) == [x]).collect();
        let swapped = sets::union(&sets::minus(&a, &[x]), &only_x);
        if !c.feasible(&swapped)? {
            bad.push(format!("claim 3: (A - {x}) ∪ {only_x:?} infeasible"));
        }
        let load = b.iter().filter(|&&y| n.get(y).contains(&x)).count();
        if load > c.k() {
            bad.push(format!("claim 4: a={x} blamed by {load} > k={} elements", c.k()));
        }
    }
    Ok(bad)
}
