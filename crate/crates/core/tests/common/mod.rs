#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_kparity::bench::{generate_instance, BaseMatroidKind, GenParams, GeneratorKind, Instance, ObjectiveFamily};
use submod_kparity::solver::{Improvement, RunTrace};
use submod_kparity::{sets, KParityConstraint, ValueOracle};

pub const KINDS: [GeneratorKind; 3] =
    [GeneratorKind::PartitionIntersection, GeneratorKind::SetPacking, GeneratorKind::RandomParity];
pub const BASES: [BaseMatroidKind; 3] = [BaseMatroidKind::Uniform, BaseMatroidKind::Partition, BaseMatroidKind::Graphic];
pub const FAMILIES: [ObjectiveFamily; 3] = [ObjectiveFamily::Modular, ObjectiveFamily::Coverage, ObjectiveFamily::Cut];

/// Seeded random instance with `k ∈ {1,2,3}` and at most `max_edges` edges.
pub fn desk_instance(seed: u64, family: Option<ObjectiveFamily>, max_edges: usize) -> Instance<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let kind = KINDS[rng.gen_range(0..3)];
    let params = GenParams {
        k: rng.gen_range(1..=3),
        n_edges: rng.gen_range(0..=max_edges),
        base: BASES[rng.gen_range(0..3)],
        objective: family.unwrap_or(FAMILIES[rng.gen_range(0..3)]),
        max_weight: 10,
        ..GenParams::default()
    };
    generate_instance(kind, &params, seed).unwrap().build().unwrap()
}

pub fn instance_of(kind: GeneratorKind, k: usize, n: usize, family: ObjectiveFamily, seed: u64) -> Instance<f64> {
    let params = GenParams { k, n_edges: n, objective: family, ..GenParams::default() };
    generate_instance(kind, &params, seed).unwrap().build().unwrap()
}

/// A random feasible set: edges in shuffled order, each kept with probability `p` if it stays feasible.
pub fn random_feasible(c: &KParityConstraint, rng: &mut impl Rng, p: f64) -> Vec<usize> {
    let mut ids = c.edge_ids();
    ids.shuffle(rng);
    let mut s = Vec::new();
    for e in ids {
        if rng.gen_bool(p) {
            let t = sets::union(&s, &[e]);
            if c.feasible(&t).unwrap() {
                s = t;
            }
        }
    }
    s
}

pub fn marginal<F: ValueOracle<f64>>(f: &F, e: usize, a: &[usize]) -> f64 {
    f.value(&sets::union(a, &[e])) - f.value(a)
}

/// Independent re-check of a trace against the solver's defining properties.
/// Returns one message per violation.
pub fn trace_violations<F: ValueOracle<f64>>(tr: &RunTrace<f64>, f: &F, c: &KParityConstraint, check_potentials: bool) -> Vec<String> {
    let mut bad = Vec::new();
    let th = tr.thresholds();
    let eps = tr.epsilon;
    let mut before: Vec<usize> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for it in &tr.iterations {
        let m = th.m(it.index);
        let mut ai: Vec<usize> = Vec::new();
        for imp in &it.improvements {
            let cur = sets::union(&before, &ai);
            let (size0, val0) = (ai.len(), f.value(&cur));
            if let Some(y) = imp.removed() {
                if !ai.contains(&y) {
                    bad.push(format!("iteration {}: {imp:?} removes {y} outside A_i", it.index));
                }
            }
            let mut next: Vec<usize> = ai.iter().copied().filter(|&v| Some(v) != imp.removed()).collect();
            next = sets::union(&next, &imp.added());
            let after = sets::union(&before, &next);
            if !c.feasible(&after).unwrap() {
                bad.push(format!("iteration {}: infeasible after {imp:?}", it.index));
            }
            if check_potentials {
                let gain = f.value(&after) - val0;
                let ok = match imp {
                    Improvement::Add { .. } | Improvement::Pair { .. } => next.len() == size0 + 1,
                    Improvement::Swap { .. } => next.len() == size0 && gain >= eps * m,
                };
                if !ok {
                    bad.push(format!("iteration {}: {imp:?} does not raise a potential", it.index));
                }
            }
            ai = next;
        }
        if ai != it.final_set {
            bad.push(format!("iteration {}: replay gives {ai:?}, trace says {:?}", it.index, it.final_set));
        }
        if !sets::intersect(&seen, &ai).is_empty() {
            bad.push(format!("iteration {}: A_i meets an earlier A_j", it.index));
        }
        seen = sets::union(&seen, &ai);
        before = sets::union(&before, &ai);
        for e in sets::minus(&c.edge_ids(), &before) {
            let t = sets::union(&before, &[e]);
            if c.feasible(&t).unwrap() && !(marginal(f, e, &before) < m) {
                bad.push(format!("iteration {}: f({e} | A_<=i) >= m_i", it.index));
            }
        }
    }
    if before != tr.output {
        bad.push("output differs from the union of the A_i".into());
    }
    if !c.feasible(&tr.output).unwrap() {
        bad.push("output infeasible".into());
    }
    for e in sets::minus(&c.edge_ids(), &tr.output) {
        if c.feasible(&sets::union(&tr.output, &[e])).unwrap() && marginal(f, e, &tr.output) > 0.0 {
            bad.push(format!("termination: f({e} | A) > 0"));
        }
    }
    let budget = (1.0 + 2.0 / eps) * c.len() as f64;
    if tr.improvements_applied as f64 > budget {
        bad.push(format!("{} improvements exceed budget {budget}", tr.improvements_applied));
    }
    bad
}

pub fn applied(tr: &RunTrace<f64>) -> Vec<Improvement> {
    tr.iterations.iter().flat_map(|it| it.improvements.iter().copied()).collect()
}

/// Mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let (m, _, se) = submod_kparity::bench::mean_std(xs);
    (m, se)
}
