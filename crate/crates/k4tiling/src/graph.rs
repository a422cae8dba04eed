//! Bitset graphs on at most 64 vertices.
//!
//! Every vertex set is a single `u64`, so intersections, unions and
//! popcounts are one instruction each. Vertices are `0..n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

pub const MAX_VERTICES: usize = 64;

/// A set of vertices stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    /// Contiguous range `lo..hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        VertexSet(Self::full(hi).0 & !Self::full(lo).0)
    }

    pub fn from_slice(vs: &[usize]) -> Self {
        vs.iter().copied().collect()
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        v < 64 && (self.0 >> v) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    #[inline]
    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest vertex, if any.
    #[inline]
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let vs = Vec::<usize>::deserialize(d)?;
        if let Some(&v) = vs.iter().find(|&&v| v >= MAX_VERTICES) {
            return Err(serde::de::Error::custom(format!("vertex {v} out of range")));
        }
        Ok(VertexSet::from_slice(&vs))
    }
}

/// Ascending iterator over the members of a [`VertexSet`].
pub struct VertexIter(u64);

impl Iterator for VertexIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for VertexIter {}

/// Undirected simple graph with bitset adjacency rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return input(format!("vertex count {n} outside 1..={MAX_VERTICES}"));
        }
        Ok(Graph { n, adj: vec![0; n] })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        let all = VertexSet::full(n).0;
        for v in 0..n {
            g.adj[v] = all & !(1u64 << v);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return input(format!("edge ({u},{v}) has an endpoint outside 0..{n}"));
            }
            if u == v {
                return input(format!("loop at vertex {u}"));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet(self.adj[v])
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.adj[u] >> v) & 1 == 1
    }

    /// Adds `uv`; callers guarantee `u != v` and both are in range.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        self.adj[u] |= 1u64 << v;
        self.adj[v] |= 1u64 << u;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !(1u64 << v);
        self.adj[v] &= !(1u64 << u);
    }

    /// Joins every vertex of `s` to every vertex of `t` (shared vertices are skipped).
    pub fn join(&mut self, s: VertexSet, t: VertexSet) {
        for u in s.iter() {
            self.adj[u] |= t.0 & !(1u64 << u);
        }
        for v in t.iter() {
            self.adj[v] |= s.0 & !(1u64 << v);
        }
    }

    /// Makes `s` a clique.
    pub fn make_clique(&mut self, s: VertexSet) {
        self.join(s, s);
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Edge count of the induced subgraph `G[s]`.
    pub fn e_within(&self, s: VertexSet) -> usize {
        s.iter()
            .map(|v| (self.adj[v] & s.0).count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Number of edges with one endpoint in `s` and the other in `t`.
    pub fn e_between(&self, s: VertexSet, t: VertexSet) -> Result<usize> {
        if !s.is_disjoint(t) {
            return input("e_between requires disjoint vertex sets");
        }
        Ok(self.e_cross(s, t))
    }

    /// `e_between` without the disjointness check.
    #[inline]
    pub(crate) fn e_cross(&self, s: VertexSet, t: VertexSet) -> usize {
        s.iter()
            .map(|v| (self.adj[v] & t.0).count_ones() as usize)
            .sum()
    }

    pub fn is_clique(&self, s: VertexSet) -> bool {
        s.iter().all(|v| s.0 & !(1u64 << v) & !self.adj[v] == 0)
    }

    pub fn complement(&self) -> Graph {
        let all = VertexSet::full(self.n).0;
        Graph {
            n: self.n,
            adj: (0..self.n)
                .map(|v| all & !self.adj[v] & !(1u64 << v))
                .collect(),
        }
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in VertexSet(self.adj[u] & !VertexSet::full(u + 1).0).iter() {
                out.push((u, v));
            }
        }
        out
    }

    /// Induced subgraph on `s`, relabelled to `0..|s|` in increasing order.
    pub fn induced(&self, s: VertexSet) -> Result<Graph> {
        let vs = s.to_vec();
        let mut h = Graph::empty(vs.len())?;
        for (i, &u) in vs.iter().enumerate() {
            for (j, &v) in vs.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    h.add_edge(i, j);
                }
            }
        }
        Ok(h)
    }

    /// All `r`-sets inducing `K_r`, each once, in lexicographic order.
    pub fn enumerate_cliques(&self, r: usize) -> Vec<VertexSet> {
        self.cliques_within(r, self.vertices())
    }

    /// All `K_r` contained in `within`, in lexicographic order.
    pub fn cliques_within(&self, r: usize, within: VertexSet) -> Vec<VertexSet> {
        let mut out = Vec::new();
        if r == 0 || r > within.len() {
            return out;
        }
        self.extend_clique(VertexSet::EMPTY, within.0, r, &mut out);
        out
    }

    fn extend_clique(&self, cur: VertexSet, mut cand: u64, left: usize, out: &mut Vec<VertexSet>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        while cand.count_ones() as usize >= left {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let next = cand & self.adj[v];
            let mut grown = cur;
            grown.insert(v);
            self.extend_clique(grown, next, left - 1, out);
        }
    }

    /// Whether `G[within]` contains a `K_r`; stops at the first one.
    pub fn has_clique_within(&self, r: usize, within: VertexSet) -> bool {
        fn go(g: &Graph, mut cand: u64, left: usize) -> bool {
            if left == 0 {
                return true;
            }
            while cand.count_ones() as usize >= left {
                let v = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                if go(g, cand & g.adj[v], left - 1) {
                    return true;
                }
            }
            false
        }
        r == 0 || go(self, within.0, r)
    }

    pub fn to_graph6(&self) -> String {
        crate::io::to_graph6(self)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Graph(n={}, m={}, {})",
            self.n,
            self.edge_count(),
            self.to_graph6()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn from_edges_basics() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.edge_count(), 6);
        assert_eq!(Graph::from_edges(3, &[]).unwrap().edge_count(), 0);
        let p = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 0)]).unwrap();
        assert_eq!(p.edge_count(), 2);
        assert!(matches!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(crate::Error::Input(_))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(1, 1)]),
            Err(crate::Error::Input(_))
        ));
        assert!(Graph::empty(0).is_err());
        assert!(Graph::empty(65).is_err());
        assert_eq!(Graph::complete(64).unwrap().edge_count(), 64 * 63 / 2);
    }

    #[test]
    fn counts_on_small_graphs() {
        let k8 = Graph::complete(8).unwrap();
        assert_eq!(k8.edge_count(), 28);
        assert_eq!(k8.e_within(VertexSet::from_slice(&[1, 3, 5, 7])), 6);
        let mut kb = Graph::empty(5).unwrap();
        kb.join(VertexSet::range(0, 2), VertexSet::range(2, 5));
        assert_eq!(kb.edge_count(), 6);
        assert_eq!(
            kb.e_between(VertexSet::range(0, 2), VertexSet::range(2, 5))
                .unwrap(),
            6
        );
        assert_eq!(
            kb.e_between(VertexSet::range(0, 2), VertexSet::EMPTY)
                .unwrap(),
            0
        );
        assert!(kb
            .e_between(VertexSet::range(0, 3), VertexSet::range(2, 5))
            .is_err());
        assert_eq!(Graph::empty(6).unwrap().e_within(VertexSet::full(6)), 0);
    }

    #[test]
    fn cliques_of_k5_and_c5() {
        let k5 = Graph::complete(5).unwrap();
        let c = k5.enumerate_cliques(4);
        assert_eq!(c.len(), 5);
        assert!(c.windows(2).all(|w| w[0].to_vec() < w[1].to_vec()));
        assert!(cycle(5).enumerate_cliques(3).is_empty());
        assert_eq!(cycle(5).enumerate_cliques(2).len(), 5);
        assert_eq!(cycle(5).enumerate_cliques(1).len(), 5);
        assert!(k5.has_clique_within(5, k5.vertices()));
        assert!(!cycle(5).has_clique_within(3, VertexSet::full(5)));
    }

    #[test]
    fn complement_and_clique_test() {
        let k4 = Graph::complete(4).unwrap();
        assert!(k4.is_clique(k4.vertices()));
        let c5 = cycle(5);
        let co = c5.complement();
        assert_eq!(co.edge_count(), 5);
        assert_eq!(co.complement(), c5);
        assert!(c5.is_clique(VertexSet::EMPTY));
        assert!(c5.is_clique(VertexSet::singleton(3)));
    }

    #[test]
    fn induced_relabels() {
        let c5 = cycle(5);
        let p = c5.induced(VertexSet::from_slice(&[0, 1, 2])).unwrap();
        assert_eq!(p.n(), 3);
        assert_eq!(p.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn vertex_set_ops() {
        let s = VertexSet::from_slice(&[63, 0, 5]);
        assert_eq!(s.to_vec(), vec![0, 5, 63]);
        assert_eq!(s.first(), Some(0));
        assert_eq!(VertexSet::range(2, 5).to_vec(), vec![2, 3, 4]);
        assert_eq!(VertexSet::full(64).len(), 64);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, "[0,5,63]");
        let back: VertexSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<VertexSet>("[64]").is_err());
    }
}
