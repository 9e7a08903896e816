//! Weighted hypergraphs, cut and min-cut functions, minimal-cut counting,
//! and symmetry/submodularity checks for set functions on the terminals.
//!
//! Vertex subsets are bitmasks over the vertex order; terminal subsets are
//! bitmasks over the terminal order. Min-cuts are found by a single
//! exhaustive sweep over all `2^|V|` subsets, which also yields the exact
//! number `k(A)` of minimizing cuts per terminal subset `A`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on `|V|` for exhaustive min-cut enumeration.
pub const DEFAULT_ENUM_BOUND: usize = 24;

/// Maximum supported terminal count (entropy tables are `2^|T|` wide).
pub const MAX_TERMINALS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Sorted vertex indices, |e| ≥ 2.
    pub vertices: Vec<usize>,
    pub mask: u64,
    pub weight: u64,
}

/// A hypergraph with positive integer edge weights and a nonempty terminal
/// set. Duplicate edges are merged on construction (two identical edges
/// count as one edge of doubled weight), giving a canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedHypergraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    /// Sorted vertex indices of the terminals.
    terminals: Vec<usize>,
}

/// On-disk hypergraph format:
/// `{"vertices": [...], "edges": [{"vertices": [...], "weight": w}], "terminals": [...]}`
#[derive(Serialize, Deserialize)]
struct HypergraphFile {
    vertices: Vec<String>,
    edges: Vec<EdgeFile>,
    terminals: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    vertices: Vec<String>,
    weight: u64,
}

impl WeightedHypergraph {
    /// Build from vertex names, edges given as (vertex names, weight), and
    /// terminal names. Validates all invariants and canonicalizes.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(Vec<String>, u64)>,
        terminals: Vec<String>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Input("empty vertex set".into()));
        }
        if vertices.len() > 64 {
            return Err(Error::Capacity(format!("{} vertices exceed 64", vertices.len())));
        }
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate vertex id {v:?}")));
            }
        }
        let lookup = |name: &str| -> Result<usize> {
            index.get(name).copied().ok_or_else(|| Error::Input(format!("unknown vertex id {name:?}")))
        };
        // Merge duplicate edges by vertex set.
        let mut merged: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for (everts, w) in edges {
            if w == 0 {
                return Err(Error::Input("edge weight must be ≥ 1".into()));
            }
            let mut idxs: Vec<usize> = everts.iter().map(|v| lookup(v)).collect::<Result<_>>()?;
            idxs.sort_unstable();
            if idxs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Input("edge contains a repeated vertex".into()));
            }
            if idxs.len() < 2 {
                return Err(Error::Input("edge must contain at least two vertices".into()));
            }
            *merged.entry(idxs).or_insert(0) += w;
        }
        let edges = merged
            .into_iter()
            .map(|(vertices, weight)| {
                let mask = vertices.iter().fold(0u64, |m, &i| m | (1 << i));
                Edge { vertices, mask, weight }
            })
            .collect();
        let mut term_idx: Vec<usize> =
            terminals.iter().map(|t| lookup(t)).collect::<Result<_>>()?;
        term_idx.sort_unstable();
        term_idx.dedup();
        if term_idx.is_empty() {
            return Err(Error::Input("terminal set must be nonempty".into()));
        }
        Ok(Self { names: vertices, edges, terminals: term_idx })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: HypergraphFile = serde_json::from_str(s)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        Self::new(
            f.vertices,
            f.edges.into_iter().map(|e| (e.vertices, e.weight)).collect(),
            f.terminals,
        )
    }

    pub fn to_json(&self) -> String {
        let f = HypergraphFile {
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeFile {
                    vertices: e.vertices.iter().map(|&i| self.names[i].clone()).collect(),
                    weight: e.weight,
                })
                .collect(),
            terminals: self.terminals.iter().map(|&i| self.names[i].clone()).collect(),
        };
        serde_json::to_string_pretty(&f).expect("serializable")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted vertex indices of the terminal set.
    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn terminal_names(&self) -> Vec<&str> {
        self.terminals.iter().map(|&i| self.names[i].as_str()).collect()
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminals.contains(&v)
    }

    /// Vertex-subset bitmask from names.
    pub fn subset_mask(&self, names: &[&str]) -> Result<u64> {
        let mut mask = 0u64;
        for n in names {
            let i = self
                .names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::Input(format!("unknown vertex id {n:?}")))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    fn full_mask(&self) -> u64 {
        if self.names.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.names.len()) - 1
        }
    }

    /// Cut value `c(S)`: total weight of hyperedges with vertices on both
    /// sides of the bipartition `(S, V\S)`.
    pub fn cut_value(&self, subset: u64) -> Result<u64> {
        if subset & !self.full_mask() != 0 {
            return Err(Error::Input("subset contains unknown vertex bits".into()));
        }
        Ok(self
            .edges
            .iter()
            .filter(|e| e.mask & subset != 0 && e.mask & !subset != 0)
            .map(|e| e.weight)
            .sum())
    }

    /// Terminal-subset mask `S ∩ T` (bits in terminal order) of a vertex subset.
    pub fn terminal_trace(&self, subset: u64) -> u64 {
        self.terminals
            .iter()
            .enumerate()
            .filter(|&(_, &v)| subset & (1 << v) != 0)
            .fold(0u64, |m, (t, _)| m | (1 << t))
    }

    /// Connected components under hyperedge adjacency, as vertex masks.
    /// Isolated vertices form singleton components.
    pub fn components(&self) -> Vec<u64> {
        let n = self.names.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for e in &self.edges {
            let r = find(&mut parent, e.vertices[0]);
            for &v in &e.vertices[1..] {
                let rv = find(&mut parent, v);
                parent[rv] = r;
            }
        }
        let mut comps: BTreeMap<usize, u64> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            *comps.entry(r).or_insert(0) |= 1 << i;
        }
        comps.into_values().collect()
    }

    /// Remove every connected component containing no terminal. The min-cut
    /// table is unaffected.
    pub fn prune_floating_components(&self) -> Self {
        let tmask: u64 = self.terminals.iter().fold(0, |m, &v| m | (1 << v));
        let keep: u64 =
            self.components().into_iter().filter(|c| c & tmask != 0).fold(0, |m, c| m | c);
        if keep == self.full_mask() {
            return self.clone();
        }
        let kept: Vec<usize> = (0..self.names.len()).filter(|&i| keep & (1 << i) != 0).collect();
        let names: Vec<String> = kept.iter().map(|&i| self.names[i].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| e.mask & keep == e.mask)
            .map(|e| {
                (
                    e.vertices.iter().map(|&v| self.names[v].clone()).collect::<Vec<_>>(),
                    e.weight,
                )
            })
            .collect();
        let terminals = self.terminals.iter().map(|&t| self.names[t].clone()).collect();
        Self::new(names, edges, terminals).expect("pruned hypergraph stays valid")
    }

    /// Whether every connected component touches the terminal set.
    pub fn is_pruned(&self) -> bool {
        let tmask: u64 = self.terminals.iter().fold(0, |m, &v| m | (1 << v));
        self.components().iter().all(|c| c & tmask != 0)
    }

    /// Min-cut table over all terminal subsets, by one sweep over all
    /// `2^|V|` vertex subsets bucketed by `S ∩ T`.
    pub fn mincut_table(&self) -> Result<MinCutTable> {
        self.mincut_table_bounded(DEFAULT_ENUM_BOUND)
    }

    pub fn mincut_table_bounded(&self, enum_bound: usize) -> Result<MinCutTable> {
        let n = self.names.len();
        if n > enum_bound {
            return Err(Error::Capacity(format!(
                "{n} vertices exceed the enumeration bound {enum_bound}"
            )));
        }
        if !self.is_pruned() {
            return Err(Error::Input(
                "hypergraph has components not touching the terminals; prune first".into(),
            ));
        }
        let t = self.terminals.len();
        if t > MAX_TERMINALS {
            return Err(Error::Capacity(format!("{t} terminals exceed {MAX_TERMINALS}")));
        }
        let mut m = vec![u64::MAX; 1 << t];
        let mut k = vec![0u64; 1 << t];
        for subset in 0..(1u64 << n) {
            let c = self.cut_value(subset)?;
            let a = self.terminal_trace(subset) as usize;
            if c < m[a] {
                m[a] = c;
                k[a] = 1;
            } else if c == m[a] {
                k[a] += 1;
            }
        }
        Ok(MinCutTable { terminal_names: self.terminal_names().iter().map(|s| s.to_string()).collect(), m, k })
    }
}

/// Min-cut weights `m(A)` and minimal-cut counts `k(A)` for every subset
/// `A` of the terminals, indexed by terminal-subset mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinCutTable {
    pub terminal_names: Vec<String>,
    pub m: Vec<u64>,
    pub k: Vec<u64>,
}

impl MinCutTable {
    pub fn terminal_count(&self) -> usize {
        self.terminal_names.len()
    }

    pub fn min_cut(&self, a: u64) -> u64 {
        self.m[a as usize]
    }

    pub fn count(&self, a: u64) -> u64 {
        self.k[a as usize]
    }

    /// Render a terminal-subset mask as `{a,b}` with sorted vertex ids.
    pub fn subset_label(&self, a: u64) -> String {
        subset_label(a, &self.terminal_names)
    }
}

pub fn subset_label(mask: u64, names: &[String]) -> String {
    let parts: Vec<&str> = names
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask & (1 << i) != 0)
        .map(|(_, n)| n.as_str())
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// A violation found by [`check_symmetric_submodular`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Violation {
    /// `|f(A) − f(T\A)|` exceeded the tolerance.
    Symmetry { a: u64, gap: f64 },
    /// `f(A) + f(B) < f(A∪B) + f(A∩B)` beyond the tolerance.
    Submodularity { a: u64, b: u64, gap: f64 },
}

/// Check symmetry `f(A) = f(T\A)` and submodularity
/// `f(A) + f(B) ≥ f(A∪B) + f(A∩B)` of a set function given as a slice of
/// length `2^|T|` indexed by terminal-subset mask. An empty return value
/// means the vector passes. Use `tol = 0.0` for exact integer data.
pub fn check_symmetric_submodular(f: &[f64], tol: f64) -> Result<Vec<Violation>> {
    let size = f.len();
    if size == 0 || size & (size - 1) != 0 {
        return Err(Error::Input(format!("set function table length {size} is not a power of two")));
    }
    let full = size - 1;
    let mut violations = Vec::new();
    for a in 0..size {
        let gap = (f[a] - f[full ^ a]).abs();
        if gap > tol {
            violations.push(Violation::Symmetry { a: a as u64, gap });
        }
    }
    for a in 0..size {
        for b in 0..size {
            let lhs = f[a] + f[b];
            let rhs = f[a | b] + f[a & b];
            if lhs + tol < rhs {
                violations.push(Violation::Submodularity { a: a as u64, b: b as u64, gap: rhs - lhs });
            }
        }
    }
    Ok(violations)
}

/// Random hypergraph helper for tests and cross-checks: `nv` vertices,
/// terminals are a random nonempty subset of size ≤ `max_t`, edge weights
/// in `1..=max_w`. The result is pruned.
pub fn random_instance<R: rand::Rng + ?Sized>(
    rng: &mut R,
    nv: usize,
    max_t: usize,
    max_w: u64,
) -> WeightedHypergraph {
    assert!(nv >= 2);
    let names: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let ne = rng.gen_range(1..=nv + 2);
    let mut edges = Vec::new();
    for _ in 0..ne {
        let size = rng.gen_range(2..=3.min(nv));
        let mut verts: Vec<usize> = (0..nv).collect();
        // partial shuffle
        for i in 0..size {
            let j = rng.gen_range(i..nv);
            verts.swap(i, j);
        }
        let ev: Vec<String> = verts[..size].iter().map(|&i| names[i].clone()).collect();
        edges.push((ev, rng.gen_range(1..=max_w)));
    }
    let t = rng.gen_range(1..=max_t.min(nv));
    let mut verts: Vec<usize> = (0..nv).collect();
    for i in 0..t {
        let j = rng.gen_range(i..nv);
        verts.swap(i, j);
    }
    let terminals: Vec<String> = verts[..t].iter().map(|&i| names[i].clone()).collect();
    WeightedHypergraph::new(names, edges, terminals)
        .expect("random instance valid")
        .prune_floating_components()
}

/// The running example: V = {a,b,c,o}, edges {a,b,o} and {o,c} of weight 1,
/// terminals {a,b,c}.
pub fn example_h1() -> WeightedHypergraph {
    WeightedHypergraph::new(
        vec!["a".into(), "b".into(), "c".into(), "o".into()],
        vec![
            (vec!["a".into(), "b".into(), "o".into()], 1),
            (vec!["o".into(), "c".into()], 1),
        ],
        vec!["a".into(), "b".into(), "c".into()],
    )
    .expect("H1 is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single_edge() -> WeightedHypergraph {
        WeightedHypergraph::new(
            vec!["a".into(), "b".into()],
            vec![(vec!["a".into(), "b".into()], 1)],
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn cut_value_examples() {
        let h = single_edge();
        assert_eq!(h.cut_value(h.subset_mask(&["a"]).unwrap()).unwrap(), 1);
        assert_eq!(h.cut_value(0).unwrap(), 0);
        let h1 = example_h1();
        // S = {a,c} splits both edges.
        assert_eq!(h1.cut_value(h1.subset_mask(&["a", "c"]).unwrap()).unwrap(), 2);
        assert!(h1.subset_mask(&["nope"]).is_err());
        assert!(h1.cut_value(1 << 60).is_err());
    }

    #[test]
    fn cut_is_symmetric() {
        let h1 = example_h1();
        let full = (1u64 << h1.vertex_count()) - 1;
        for s in 0..=full {
            assert_eq!(h1.cut_value(s).unwrap(), h1.cut_value(full ^ s).unwrap());
        }
    }

    /// Independent oracle: per-A minimization over the free (non-terminal)
    /// part of S only.
    fn brute_mincut(h: &WeightedHypergraph, a_mask: u64) -> (u64, u64) {
        let n = h.vertex_count();
        let free: Vec<usize> = (0..n).filter(|&v| !h.is_terminal(v)).collect();
        let base: u64 = h
            .terminals()
            .iter()
            .enumerate()
            .filter(|&(t, _)| a_mask & (1 << t) != 0)
            .fold(0, |m, (_, &v)| m | (1 << v));
        let mut best = u64::MAX;
        let mut count = 0;
        for choice in 0..(1u64 << free.len()) {
            let mut s = base;
            for (i, &v) in free.iter().enumerate() {
                if choice & (1 << i) != 0 {
                    s |= 1 << v;
                }
            }
            let c = h.cut_value(s).unwrap();
            if c < best {
                best = c;
                count = 1;
            } else if c == best {
                count += 1;
            }
        }
        (best, count)
    }

    #[test]
    fn mincut_table_h1() {
        let h1 = example_h1();
        let table = h1.mincut_table().unwrap();
        // terminal order a, b, c → masks 1=a, 2=b, 4=c
        assert_eq!(table.min_cut(0), 0);
        assert_eq!(table.count(0), 1);
        assert_eq!(table.min_cut(1), 1);
        assert_eq!(table.count(1), 1);
        assert_eq!(table.min_cut(4), 1);
        assert_eq!(table.count(4), 2); // S = {c} and S = {c,o}
        assert_eq!(table.min_cut(7), 0);
        for a in 0..8u64 {
            let (m, k) = brute_mincut(&h1, a);
            assert_eq!(table.min_cut(a), m);
            assert_eq!(table.count(a), k);
            assert_eq!(table.min_cut(a), table.min_cut(7 ^ a));
            assert_eq!(table.count(a), table.count(7 ^ a));
        }
    }

    #[test]
    fn mincut_matches_bruteforce_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let nv = rng.gen_range(2..=10);
            let h = random_instance(&mut rng, nv, 4, 3);
            let table = h.mincut_table().unwrap();
            let t = h.terminals().len();
            for a in 0..(1u64 << t) {
                let (m, k) = brute_mincut(&h, a);
                assert_eq!(table.min_cut(a), m, "m mismatch on {}", h.to_json());
                assert_eq!(table.count(a), k, "k mismatch on {}", h.to_json());
            }
            let f: Vec<f64> = table.m.iter().map(|&x| x as f64).collect();
            assert!(check_symmetric_submodular(&f, 0.0).unwrap().is_empty());
        }
    }

    #[test]
    fn cut_function_is_submodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let nv = rng.gen_range(2..=8);
            let h = random_instance(&mut rng, nv, 4, 3);
            let n = h.vertex_count();
            for s1 in 0..(1u64 << n) {
                for s2 in 0..(1u64 << n) {
                    let lhs = h.cut_value(s1).unwrap() + h.cut_value(s2).unwrap();
                    let rhs = h.cut_value(s1 | s2).unwrap() + h.cut_value(s1 & s2).unwrap();
                    assert!(lhs >= rhs);
                }
            }
        }
    }

    #[test]
    fn prune_examples() {
        // Isolated non-terminal vertex disappears.
        let h = WeightedHypergraph::new(
            vec!["a".into(), "b".into(), "x".into()],
            vec![(vec!["a".into(), "b".into()], 1)],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let pruned = h.prune_floating_components();
        assert_eq!(pruned.vertex_count(), 2);
        // H1 is already pruned.
        let h1 = example_h1();
        assert_eq!(h1.prune_floating_components(), h1);
        // H1 plus a floating edge prunes back to H1.
        let big = WeightedHypergraph::new(
            vec!["a".into(), "b".into(), "c".into(), "o".into(), "u".into(), "v".into()],
            vec![
                (vec!["a".into(), "b".into(), "o".into()], 1),
                (vec!["o".into(), "c".into()], 1),
                (vec!["u".into(), "v".into()], 3),
            ],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        assert!(!big.is_pruned());
        assert!(big.mincut_table().is_err());
        let pruned = big.prune_floating_components();
        assert_eq!(pruned, h1);
        assert_eq!(pruned.mincut_table().unwrap(), h1.mincut_table().unwrap());
    }

    #[test]
    fn duplicate_edges_merge() {
        let h = WeightedHypergraph::new(
            vec!["a".into(), "b".into()],
            vec![
                (vec!["a".into(), "b".into()], 1),
                (vec!["b".into(), "a".into()], 2),
            ],
            vec!["a".into()],
        )
        .unwrap();
        assert_eq!(h.edges().len(), 1);
        assert_eq!(h.edges()[0].weight, 3);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(WeightedHypergraph::new(vec!["a".into()], vec![], vec![]).is_err());
        assert!(WeightedHypergraph::new(
            vec!["a".into(), "b".into()],
            vec![(vec!["a".into()], 1)],
            vec!["a".into()],
        )
        .is_err());
        assert!(WeightedHypergraph::new(
            vec!["a".into(), "b".into()],
            vec![(vec!["a".into(), "b".into()], 0)],
            vec!["a".into()],
        )
        .is_err());
        assert!(WeightedHypergraph::new(
            vec!["a".into(), "b".into()],
            vec![(vec!["a".into(), "b".into()], 1)],
            vec!["zz".into()],
        )
        .is_err());
    }

    #[test]
    fn check_passes_known_functions() {
        let h1 = example_h1();
        let table = h1.mincut_table().unwrap();
        let f: Vec<f64> = table.m.iter().map(|&x| x as f64).collect();
        assert!(check_symmetric_submodular(&f, 0.0).unwrap().is_empty());
        // f(A) = |A|·|T\A| on |T| = 3 is symmetric and submodular.
        let g: Vec<f64> = (0..8u32)
            .map(|a| (a.count_ones() * (3 - a.count_ones())) as f64)
            .collect();
        assert!(check_symmetric_submodular(&g, 0.0).unwrap().is_empty());
    }

    #[test]
    fn check_detects_violations() {
        // f({1}) = f({2}) = 0 but f({1,2}) = 1, symmetric completion on |T|=3:
        // violates subadditivity (take A={1}, B={2}).
        let mut f = vec![0.0; 8];
        f[3] = 1.0; // {1,2}
        f[4] = 1.0; // symmetric partner {3}
        let violations = check_symmetric_submodular(&f, 1e-9).unwrap();
        assert!(!violations.is_empty());
        assert!(check_symmetric_submodular(&[0.0; 7], 0.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let h1 = example_h1();
        let parsed = WeightedHypergraph::from_json(&h1.to_json()).unwrap();
        assert_eq!(parsed, h1);
        assert!(WeightedHypergraph::from_json("{not json").is_err());
        let bad = r#"{"vertices": ["a","b"], "edges": [{"vertices": ["a","b"], "weight": 1}], "terminals": ["q"]}"#;
        assert!(WeightedHypergraph::from_json(bad).is_err());
    }
}
