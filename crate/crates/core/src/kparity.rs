//! Matroid k-parity constraints.
//!
//! Edges are pairwise-disjoint groups of at most `k` vertices of an
//! underlying matroid. A set of edges is feasible when the union of their
//! vertices is independent. Edge ids are stable: restricting the ground set
//! keeps the original ids, so objectives can stay indexed by edge id.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::matroid::MatroidOracle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone)]
pub struct KParityConstraint {
    matroid: Arc<dyn MatroidOracle>,
    edges: BTreeMap<usize, Edge>,
    k: usize,
}

impl fmt::Debug for KParityConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KParityConstraint")
            .field("k", &self.k)
            .field("edges", &self.edges.values().collect::<Vec<_>>())
            .field("matroid", &self.matroid)
            .finish()
    }
}

impl KParityConstraint {
    /// Edges get ids `0..edges.len()` in the given order.
    pub fn new(matroid: Arc<dyn MatroidOracle>, edges: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(id, vertices)| Edge { id, vertices })
            .collect();
        Self::with_edges(matroid, edges, k)
    }

    pub fn with_edges(matroid: Arc<dyn MatroidOracle>, edges: Vec<Edge>, k: usize) -> Result<Self> {
        if k == 0 {
            return input("k must be positive");
        }
        let n = matroid.ground_size();
        let mut seen = HashSet::new();
        let mut map = BTreeMap::new();
        for mut e in edges {
            if e.vertices.is_empty() || e.vertices.len() > k {
                return input(format!(
                    "edge {} has {} vertices, expected 1..={k}",
                    e.id,
                    e.vertices.len()
                ));
            }
            e.vertices.sort_unstable();
            for &v in &e.vertices {
                if v >= n {
                    return input(format!("edge {} uses vertex {v} outside 0..{n}", e.id));
                }
                if !seen.insert(v) {
                    return input(format!("vertex {v} appears in more than one edge"));
                }
            }
            if map.insert(e.id, e).is_some() {
                return input("duplicate edge id");
            }
        }
        Ok(KParityConstraint { matroid, edges: map, k })
    }

    /// Reduces the intersection of `k` matroids over a common ground `X` to a
    /// k-parity constraint: edge `x` has vertices `(x, i)` encoded as `x * k + i`.
    pub fn from_intersection(matroids: Vec<Arc<dyn MatroidOracle>>) -> Result<Self> {
        let k = matroids.len();
        if k == 0 {
            return input("intersection of zero matroids");
        }
        let n = matroids[0].ground_size();
        if matroids.iter().any(|m| m.ground_size() != n) {
            return input("matroids in an intersection must share the ground set size");
        }
        let edges = (0..n).map(|x| (0..k).map(|i| x * k + i).collect()).collect();
        let product = ProductMatroid { parts: matroids, n };
        Self::new(Arc::new(product), edges, k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matroid(&self) -> &Arc<dyn MatroidOracle> {
        &self.matroid
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    /// Edge ids in ascending order.
    pub fn edge_ids(&self) -> Vec<usize> {
        self.edges.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn edge(&self, id: usize) -> Option<&Edge> {
        self.edges.get(&id)
    }

    /// One past the largest edge id (0 when there are no edges).
    pub fn id_bound(&self) -> usize {
        self.edges.keys().next_back().map_or(0, |&m| m + 1)
    }

    /// `v(S)`, the union of the vertex sets of the edges in `set`.
    pub fn vertices_of(&self, set: &[usize]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for &id in set {
            let e = self
                .edges
                .get(&id)
                .ok_or_else(|| Error::Input(format!("unknown edge id {id}")))?;
            out.extend_from_slice(&e.vertices);
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn feasible(&self, set: &[usize]) -> Result<bool> {
        let mut ids = set.to_vec();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return input("edge set contains duplicates");
        }
        let vertices = self.vertices_of(&ids)?;
        Ok(self.matroid.independent(&vertices))
    }

    /// Feasibility for trusted input: distinct, known edge ids.
    pub(crate) fn is_feasible(&self, set: &[usize]) -> bool {
        let mut vertices = Vec::with_capacity(set.len() * self.k);
        for id in set {
            vertices.extend_from_slice(&self.edges[id].vertices);
        }
        self.matroid.independent(&vertices)
    }

    /// The same matroid with only the edges in `subset` (the restricted
    /// constraint is again a k-parity constraint).
    pub fn restrict_ground(&self, subset: &[usize]) -> Result<Self> {
        let mut edges = BTreeMap::new();
        for &id in subset {
            let e = self
                .edges
                .get(&id)
                .ok_or_else(|| Error::Input(format!("unknown edge id {id}")))?;
            edges.insert(id, e.clone());
        }
        Ok(KParityConstraint { matroid: self.matroid.clone(), edges, k: self.k })
    }
}

/// Product matroid over `X × [k]` used by the intersection reduction.
#[derive(Debug, Clone)]
pub struct ProductMatroid {
    parts: Vec<Arc<dyn MatroidOracle>>,
    n: usize,
}

impl MatroidOracle for ProductMatroid {
    fn ground_size(&self) -> usize {
        self.n * self.parts.len()
    }

    fn independent(&self, set: &[usize]) -> bool {
        let k = self.parts.len();
        let mut per: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &v in set {
            per[v % k].push(v / k);
        }
        per.iter().zip(&self.parts).all(|(s, m)| m.independent(s))
    }
}
