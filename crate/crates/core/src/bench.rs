//! Baselines, exhaustive optimum, seeded instance generators and the experiment runner.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::kparity::KParityConstraint;
use crate::matroid::{ConcreteMatroid, MatroidOracle};
use crate::nonmonotone::{repetitions, RepetitionsConfig};
use crate::objective::{
    ConcreteObjective, CountingOracle, CoverageObjective, CutObjective, ModularObjective, ValueOracle,
};
use crate::scalar::Scalar;
use crate::solver::{run_efficient, run_reference, RunTrace, SolverConfig};

/// Instance file contents: either a matroid with explicit edges, or an
/// intersection of matroids over a common ground set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matroid: Option<ConcreteMatroid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<Vec<ConcreteMatroid>>,
    pub objective: ConcreteObjective<T>,
}

#[derive(Debug, Clone)]
pub struct Instance<T> {
    pub id: String,
    pub constraint: KParityConstraint,
    pub objective: ConcreteObjective<T>,
}

impl<T: Scalar> InstanceSpec<T> {
    pub fn build(&self) -> Result<Instance<T>> {
        let constraint = match (&self.matroid, &self.edges, &self.intersection) {
            (Some(m), Some(edges), None) => {
                let m = m.clone().revalidated()?;
                let k = match self.k {
                    Some(k) => k,
                    None => edges.iter().map(Vec::len).max().unwrap_or(1),
                };
                KParityConstraint::new(Arc::new(m), edges.clone(), k)?
            }
            (None, None, Some(ms)) => {
                let ms = ms
                    .iter()
                    .map(|m| m.clone().revalidated().map(|m| Arc::new(m) as Arc<dyn MatroidOracle>))
                    .collect::<Result<Vec<_>>>()?;
                let c = KParityConstraint::from_intersection(ms)?;
                if self.k.is_some_and(|k| k != c.k()) {
                    return input("k does not match the number of intersected matroids");
                }
                c
            }
            _ => return input("instance needs either `matroid` and `edges`, or `intersection`"),
        };
        self.objective.validate(constraint.id_bound())?;
        Ok(Instance {
            id: self.id.clone().unwrap_or_else(|| "instance".into()),
            constraint,
            objective: self.objective.clone(),
        })
    }

    pub fn cast<U: Scalar>(&self) -> InstanceSpec<U> {
        InstanceSpec {
            id: self.id.clone(),
            k: self.k,
            matroid: self.matroid.clone(),
            edges: self.edges.clone(),
            intersection: self.intersection.clone(),
            objective: self.objective.cast(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Repeatedly adds the feasible edge with the largest positive marginal (ties to the smaller id).
pub fn greedy_baseline<T: Scalar, F: ValueOracle<T> + ?Sized>(f: &F, c: &KParityConstraint) -> Vec<usize> {
    let mut a: Vec<usize> = Vec::new();
    loop {
        let base = f.value(&a);
        let mut best: Option<(usize, T)> = None;
        for e in c.edge_ids() {
            if a.contains(&e) {
                continue;
            }
            let mut with = a.clone();
            with.push(e);
            if !c.is_feasible(&with) {
                continue;
            }
            let g = f.value(&with) - base;
            if g > T::zero() && best.map_or(true, |(_, b)| g > b) {
                best = Some((e, g));
            }
        }
        match best {
            Some((e, _)) => a.push(e),
            None => break,
        }
    }
    a.sort_unstable();
    a
}

/// Largest edge count accepted by [`brute_force_opt`].
pub const OPT_MAX_EDGES: usize = 20;

/// Maximum of `f` over all feasible sets; among equal values the
/// lexicographically smallest sorted set wins.
pub fn brute_force_opt<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    c: &KParityConstraint,
) -> Result<(Vec<usize>, T)> {
    if c.len() > OPT_MAX_EDGES {
        return Err(Error::TooLarge(format!("exhaustive optimum limited to {OPT_MAX_EDGES} edges")));
    }
    let ids = c.edge_ids();
    let mut best = (Vec::new(), f.value(&[]));
    let mut cur = Vec::new();
    // Depth-first in lexicographic order of sorted sets, pruned by down-closure.
    fn go<T: Scalar, F: ValueOracle<T> + ?Sized>(
        f: &F,
        c: &KParityConstraint,
        ids: &[usize],
        from: usize,
        cur: &mut Vec<usize>,
        best: &mut (Vec<usize>, T),
    ) {
        for j in from..ids.len() {
            cur.push(ids[j]);
            if c.is_feasible(cur) {
                let v = f.value(cur);
                if v > best.1 || (v == best.1 && *cur < best.0) {
                    *best = (cur.clone(), v);
                }
                go(f, c, ids, j + 1, cur, best);
            }
            cur.pop();
        }
    }
    go(f, c, &ids, 0, &mut cur, &mut best);
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// `k` partition matroids over distinct cells of `[side]^k`, one per coordinate, capacity 1.
    PartitionIntersection,
    /// Hyperedges of size `k` over a universe; feasible iff pairwise disjoint.
    SetPacking,
    /// Random grouping of `k · n` vertices into `n` edges of size `k` over a random base matroid.
    RandomParity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseMatroidKind {
    Uniform,
    Partition,
    Graphic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveFamily {
    Modular,
    Coverage,
    Cut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub k: usize,
    pub n_edges: usize,
    /// Grid side for partition intersections; defaults to the smallest side with room for `n_edges` cells, plus one.
    pub side: Option<usize>,
    /// Universe size for set packing; defaults to `2k + n_edges`.
    pub universe: Option<usize>,
    pub base: BaseMatroidKind,
    pub objective: ObjectiveFamily,
    /// Weights are integers in `1..=max_weight`.
    pub max_weight: u32,
    /// Item count for coverage objectives; defaults to `2 · n_edges`.
    pub items: Option<usize>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            k: 2,
            n_edges: 8,
            side: None,
            universe: None,
            base: BaseMatroidKind::Uniform,
            objective: ObjectiveFamily::Modular,
            max_weight: 10,
            items: None,
        }
    }
}

/// Deterministic per `(kind, params, seed)`.
pub fn generate_instance(kind: GeneratorKind, params: &GenParams, seed: u64) -> Result<InstanceSpec<f64>> {
    let (k, n) = (params.k, params.n_edges);
    if k == 0 {
        return input("k must be positive");
    }
    if params.max_weight == 0 {
        return input("max_weight must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = match kind {
        GeneratorKind::PartitionIntersection => {
            let side = params.side.unwrap_or_else(|| {
                let mut s = 1usize;
                while s.checked_pow(k as u32).map_or(false, |c| c < n) {
                    s += 1;
                }
                s.max(2)
            });
            let cells_total = side.checked_pow(k as u32).filter(|&c| c <= 1 << 20);
            let Some(total) = cells_total else { return input("grid too large") };
            if n > total {
                return input(format!("{n} distinct cells do not fit in [{side}]^{k}"));
            }
            let mut cells: Vec<usize> = (0..total).collect();
            if n < total {
                cells.shuffle(&mut rng);
                cells.truncate(n);
                cells.sort_unstable();
            }
            let coord = |cell: usize, j: usize| cell / side.pow(j as u32) % side;
            let matroids = (0..k)
                .map(|j| {
                    let mut blocks = vec![Vec::new(); side];
                    for (x, &cell) in cells.iter().enumerate() {
                        blocks[coord(cell, j)].push(x);
                    }
                    blocks.retain(|b| !b.is_empty());
                    let caps = vec![1; blocks.len()];
                    ConcreteMatroid::partition(blocks, caps)
                })
                .collect::<Result<Vec<_>>>()?;
            InstanceSpec {
                id: None,
                k: Some(k),
                matroid: None,
                edges: None,
                intersection: Some(matroids),
                objective: placeholder(),
            }
        }
        GeneratorKind::SetPacking => {
            let universe = params.universe.unwrap_or(2 * k + n);
            if universe < k {
                return input("universe smaller than k");
            }
            let elems: Vec<usize> = (0..universe).collect();
            let mut owners = vec![Vec::new(); universe];
            let mut edges = Vec::with_capacity(n);
            for h in 0..n {
                let mut picked: Vec<usize> = elems.choose_multiple(&mut rng, k).copied().collect();
                picked.sort_unstable();
                for (j, &x) in picked.iter().enumerate() {
                    owners[x].push(h * k + j);
                }
                edges.push((0..k).map(|j| h * k + j).collect());
            }
            owners.retain(|b| !b.is_empty());
            let caps = vec![1; owners.len()];
            InstanceSpec {
                id: None,
                k: Some(k),
                matroid: Some(ConcreteMatroid::partition(owners, caps)?),
                edges: Some(edges),
                intersection: None,
                objective: placeholder(),
            }
        }
        GeneratorKind::RandomParity => {
            let v = n * k;
            let mut verts: Vec<usize> = (0..v).collect();
            verts.shuffle(&mut rng);
            let edges: Vec<Vec<usize>> = verts
                .chunks(k)
                .map(|ch| {
                    let mut e = ch.to_vec();
                    e.sort_unstable();
                    e
                })
                .collect();
            let matroid = match params.base {
                BaseMatroidKind::Uniform => {
                    let r = if v == 0 { 0 } else { rng.gen_range(k.min(v)..=v) };
                    ConcreteMatroid::uniform(v, r)
                }
                BaseMatroidKind::Partition => {
                    let nb = if v == 0 { 0 } else { rng.gen_range(1..=v.div_ceil(2)) };
                    let mut blocks = vec![Vec::new(); nb];
                    for x in 0..v {
                        blocks[rng.gen_range(0..nb)].push(x);
                    }
                    blocks.retain(|b| !b.is_empty());
                    let caps = blocks.iter().map(|b| rng.gen_range(1..=b.len())).collect();
                    ConcreteMatroid::partition(blocks, caps)?
                }
                BaseMatroidKind::Graphic => {
                    let nodes = (v / 2).max(2);
                    let ends = (0..v)
                        .map(|_| {
                            let a = rng.gen_range(0..nodes);
                            let mut b = rng.gen_range(0..nodes - 1);
                            if b >= a {
                                b += 1;
                            }
                            (a, b)
                        })
                        .collect();
                    ConcreteMatroid::graphic(nodes, ends)?
                }
            };
            InstanceSpec {
                id: None,
                k: Some(k),
                matroid: Some(matroid),
                edges: Some(edges),
                intersection: None,
                objective: placeholder(),
            }
        }
    };
    spec.objective = random_objective(params, n, &mut rng)?;
    spec.id = Some(format!("{}-k{k}-n{n}-s{seed}", kind_name(kind)));
    spec.build()?;
    Ok(spec)
}

fn placeholder() -> ConcreteObjective<f64> {
    ConcreteObjective::Modular(ModularObjective::linear(Vec::new()))
}

fn kind_name(kind: GeneratorKind) -> &'static str {
    match kind {
        GeneratorKind::PartitionIntersection => "pi",
        GeneratorKind::SetPacking => "sp",
        GeneratorKind::RandomParity => "rp",
    }
}

fn random_objective(params: &GenParams, n: usize, rng: &mut ChaCha8Rng) -> Result<ConcreteObjective<f64>> {
    let mut weight = || rng.gen_range(1..=params.max_weight) as f64;
    Ok(match params.objective {
        ObjectiveFamily::Modular => {
            ConcreteObjective::Modular(ModularObjective::linear((0..n).map(|_| weight()).collect()))
        }
        ObjectiveFamily::Coverage => {
            let items = params.items.unwrap_or(2 * n).max(1);
            let item_weights: Vec<f64> = (0..items).map(|_| weight()).collect();
            let edge_items = (0..n)
                .map(|_| {
                    let size = rng.gen_range(1..=items.min(3));
                    let mut its: Vec<usize> = (0..items).collect::<Vec<_>>().choose_multiple(rng, size).copied().collect();
                    its.sort_unstable();
                    its
                })
                .collect();
            ConcreteObjective::Coverage(CoverageObjective::new(item_weights, edge_items)?)
        }
        ObjectiveFamily::Cut => {
            let mut graph = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        graph.push((u, v, rng.gen_range(1..=params.max_weight) as f64));
                    }
                }
            }
            ConcreteObjective::Cut(CutObjective::new(n, graph)?)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMode {
    Greedy,
    Hybrid,
    HybridReference,
    Nonmonotone,
}

impl SolverMode {
    pub fn name(&self) -> &'static str {
        match self {
            SolverMode::Greedy => "greedy",
            SolverMode::Hybrid => "hybrid",
            SolverMode::HybridReference => "hybrid-reference",
            SolverMode::Nonmonotone => "nonmonotone",
        }
    }
}

impl std::str::FromStr for SolverMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(SolverMode::Greedy),
            "hybrid" => Ok(SolverMode::Hybrid),
            "hybrid-reference" => Ok(SolverMode::HybridReference),
            "nonmonotone" => Ok(SolverMode::Nonmonotone),
            _ => input(format!("unknown solver mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec<T> {
    pub instances: Vec<Instance<T>>,
    pub modes: Vec<SolverMode>,
    pub trials: usize,
    pub epsilon: f64,
    /// Trial `t` uses seed `seed + t`.
    pub seed: u64,
    /// Rounds for the non-monotone mode; defaults per instance `k`.
    pub ell: Option<usize>,
    /// Compute the exhaustive optimum for instances within [`OPT_MAX_EDGES`].
    pub compute_opt: bool,
    /// Record wall time; off gives byte-identical reruns.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub solver: String,
    pub k: usize,
    pub n_edges: usize,
    pub value: f64,
    pub opt_value: Option<f64>,
    pub ratio: Option<f64>,
    pub improvements: u64,
    pub oracle_calls: u64,
    pub millis: u64,
}

pub const CSV_HEADER: [&str; 12] = [
    "instance_id",
    "seed",
    "alpha",
    "solver",
    "k",
    "n_edges",
    "value",
    "opt_value",
    "ratio",
    "improvements",
    "oracle_calls",
    "millis",
];

/// `opt / value`; `None` when the value is not positive but the optimum is.
pub fn ratio(opt: f64, value: f64) -> Option<f64> {
    if value > 0.0 {
        Some(opt / value)
    } else if opt <= 0.0 {
        Some(1.0)
    } else {
        None
    }
}

struct Outcome {
    set: Vec<usize>,
    alpha: Option<f64>,
    improvements: u64,
}

fn solve_once<T: Scalar, F: ValueOracle<T>>(
    f: &F,
    c: &KParityConstraint,
    mode: SolverMode,
    epsilon: f64,
    seed: u64,
    ell: Option<usize>,
) -> Result<Outcome> {
    let from_trace = |t: RunTrace<T>| Outcome {
        set: t.output,
        alpha: Some(t.alpha.as_f64()),
        improvements: t.improvements_applied,
    };
    Ok(match mode {
        SolverMode::Greedy => Outcome { set: greedy_baseline(f, c), alpha: None, improvements: 0 },
        SolverMode::Hybrid => from_trace(run_efficient(f, c, &SolverConfig::new(epsilon, seed))?),
        SolverMode::HybridReference => from_trace(run_reference(f, c, &SolverConfig::new(epsilon, seed))?),
        SolverMode::Nonmonotone => {
            let mut cfg = RepetitionsConfig::for_k(c.k(), seed);
            cfg.epsilon = epsilon;
            if let Some(ell) = ell {
                cfg.ell = ell;
            }
            let r = repetitions::<T, _>(f, c, &cfg)?;
            Outcome {
                set: r.best,
                alpha: r.rounds.first().map(|x| x.trace.alpha.as_f64()),
                improvements: r.rounds.iter().map(|x| x.trace.improvements_applied).sum(),
            }
        }
    })
}

/// Runs every `(instance, mode, trial)` in parallel; rows come back ordered by
/// instance, then mode, then trial.
pub fn run_experiment<T: Scalar>(spec: &ExperimentSpec<T>) -> Result<Vec<ResultRow>> {
    if spec.trials == 0 {
        return input("trials must be at least 1");
    }
    let opts: Vec<Option<f64>> = spec
        .instances
        .par_iter()
        .map(|inst| {
            if spec.compute_opt && inst.constraint.len() <= OPT_MAX_EDGES {
                brute_force_opt(&inst.objective, &inst.constraint).map(|(_, v)| Some(v.as_f64()))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, SolverMode, usize)> = (0..spec.instances.len())
        .flat_map(|i| spec.modes.iter().flat_map(move |&m| (0..spec.trials).map(move |t| (i, m, t))))
        .collect();
    jobs.par_iter()
        .map(|&(i, mode, t)| {
            let inst = &spec.instances[i];
            let seed = spec.seed.wrapping_add(t as u64);
            let f = CountingOracle::new(&inst.objective);
            let start = Instant::now();
            let out = solve_once(&f, &inst.constraint, mode, spec.epsilon, seed, spec.ell)?;
            let millis = if spec.timing { start.elapsed().as_millis() as u64 } else { 0 };
            if !inst.constraint.feasible(&out.set)? {
                return Err(Error::Internal(format!("{} returned an infeasible set", mode.name())));
            }
            let value = inst.objective.value(&out.set).as_f64();
            Ok(ResultRow {
                instance_id: inst.id.clone(),
                seed,
                alpha: out.alpha,
                solver: mode.name().into(),
                k: inst.constraint.k(),
                n_edges: inst.constraint.len(),
                value,
                opt_value: opts[i],
                ratio: opts[i].and_then(|o| ratio(o, value)),
                improvements: out.improvements,
                oracle_calls: f.calls(),
                millis,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance_id: String,
    pub solver: String,
    pub trials: usize,
    pub mean_value: f64,
    pub std_value: f64,
    pub stderr_value: f64,
    pub opt_value: Option<f64>,
    /// `opt / mean_value`.
    pub ratio_of_mean: Option<f64>,
}

/// Mean, sample standard deviation and standard error of `xs`.
pub fn mean_std(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt(), (var / n).sqrt())
}

/// Groups rows by `(instance_id, solver)` in first-appearance order.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows {
        let key = (r.instance_id.clone(), r.solver.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(id, solver)| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.instance_id == id && r.solver == solver).collect();
            let values: Vec<f64> = group.iter().map(|r| r.value).collect();
            let (mean, std, se) = mean_std(&values);
            let opt = group[0].opt_value;
            SummaryRow {
                instance_id: id,
                solver,
                trials: group.len(),
                mean_value: mean,
                std_value: std,
                stderr_value: se,
                opt_value: opt,
                ratio_of_mean: opt.and_then(|o| ratio(o, mean)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

pub fn write_json<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let report = ExperimentReport { rows: rows.to_vec(), summary: summarize(rows) };
    serde_json::to_writer_pretty(out, &report)?;
    Ok(())
}
