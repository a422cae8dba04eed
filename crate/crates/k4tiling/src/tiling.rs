//! Exact clique-tiling numbers, maximum-tiling enumeration, a bounded
//! swap heuristic, and the brute-force extremal-number oracle.
//!
//! All searches branch on the lowest free vertex `v`: either `v` stays
//! uncovered, or some clique whose smallest vertex is `v` is taken. This
//! visits each tiling once and in lexicographic order.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, resource, Result};
use crate::graph::{Graph, VertexSet};

/// Vertex-disjoint cliques of equal size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tiling {
    pub r: usize,
    pub members: Vec<VertexSet>,
}

impl Tiling {
    pub fn new(r: usize, members: Vec<VertexSet>) -> Self {
        Tiling { r, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn covered(&self) -> VertexSet {
        self.members
            .iter()
            .fold(VertexSet::EMPTY, |s, &m| s.union(m))
    }

    /// Pairwise disjoint members, each an `r`-clique of `g`.
    pub fn is_valid(&self, g: &Graph) -> bool {
        let mut seen = VertexSet::EMPTY;
        for &m in &self.members {
            if m.len() != self.r
                || !m.is_subset(g.vertices())
                || !g.is_clique(m)
                || !m.is_disjoint(seen)
            {
                return false;
            }
            seen = seen.union(m);
        }
        true
    }

    /// Members sorted lexicographically by their vertex lists.
    pub fn canonical(mut self) -> Self {
        self.members.sort_by_key(|m| m.to_vec());
        self
    }
}

/// Memo tables beyond this many entries are cleared and rebuilt.
const MEMO_CAP: usize = 1 << 22;

/// Branch-and-bound solver for `nu(K_r, G[mask])`, memoized on the mask.
pub struct TilingSolver<'g> {
    g: &'g Graph,
    r: usize,
    by_min: Vec<Vec<VertexSet>>,
    memo: HashMap<u64, u8>,
    upper: HashMap<u64, u8>,
}

impl<'g> TilingSolver<'g> {
    pub fn new(g: &'g Graph, r: usize) -> Self {
        let mut by_min = vec![Vec::new(); g.n()];
        if r >= 1 {
            for c in g.enumerate_cliques(r) {
                by_min[c.first().expect("nonempty clique")].push(c);
            }
        }
        TilingSolver {
            g,
            r,
            by_min,
            memo: HashMap::new(),
            upper: HashMap::new(),
        }
    }

    pub fn graph(&self) -> &Graph {
        self.g
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Drops leading vertices that lie in no clique inside `mask`.
    fn trim(&self, mut mask: VertexSet) -> VertexSet {
        while let Some(v) = mask.first() {
            if self.by_min[v].iter().any(|c| c.is_subset(mask)) {
                break;
            }
            mask.remove(v);
        }
        mask
    }

    fn bound(&self, mask: VertexSet) -> usize {
        mask.len().checked_div(self.r).unwrap_or(0)
    }

    /// Exact `nu(K_r, G[mask])`.
    pub fn nu_within(&mut self, mask: VertexSet) -> usize {
        if self.r == 0 {
            return 0;
        }
        let mask = self.trim(mask);
        if mask.len() < self.r {
            return 0;
        }
        if let Some(&v) = self.memo.get(&mask.0) {
            return v as usize;
        }
        let ub = self.bound(mask);
        let v = mask.first().expect("nonempty");
        let mut best = 0;
        for i in 0..self.by_min[v].len() {
            let c = self.by_min[v][i];
            if !c.is_subset(mask) {
                continue;
            }
            best = best.max(1 + self.nu_within(mask.difference(c)));
            if best == ub {
                break;
            }
        }
        if best < ub {
            let mut rest = mask;
            rest.remove(v);
            best = best.max(self.nu_within(rest));
        }
        if self.memo.len() >= MEMO_CAP {
            self.memo.clear();
        }
        self.memo.insert(mask.0, best as u8);
        best
    }

    pub fn nu(&mut self) -> usize {
        self.nu_within(self.g.vertices())
    }

    /// Whether `G[mask]` has `need` disjoint cliques; exits on the first witness.
    pub fn reaches(&mut self, mask: VertexSet, need: usize) -> bool {
        if need == 0 {
            return true;
        }
        if self.r == 0 {
            return false;
        }
        let mask = self.trim(mask);
        if self.bound(mask) < need {
            return false;
        }
        if let Some(&v) = self.memo.get(&mask.0) {
            return v as usize >= need;
        }
        if let Some(&u) = self.upper.get(&mask.0) {
            if (u as usize) < need {
                return false;
            }
        }
        let v = mask.first().expect("nonempty");
        for i in 0..self.by_min[v].len() {
            let c = self.by_min[v][i];
            if c.is_subset(mask) && self.reaches(mask.difference(c), need - 1) {
                return true;
            }
        }
        let mut rest = mask;
        rest.remove(v);
        if self.reaches(rest, need) {
            return true;
        }
        if self.upper.len() >= MEMO_CAP {
            self.upper.clear();
        }
        let entry = self.upper.entry(mask.0).or_insert(u8::MAX);
        *entry = (*entry).min((need - 1) as u8);
        false
    }

    /// Lexicographically least maximum tiling of `G[mask]`.
    pub fn best_within(&mut self, mask: VertexSet) -> Tiling {
        let mut members = Vec::new();
        let mut mask = mask;
        let mut left = self.nu_within(mask);
        while left > 0 {
            mask = self.trim(mask);
            let v = mask.first().expect("tiling remains");
            let mut taken = false;
            for i in 0..self.by_min[v].len() {
                let c = self.by_min[v][i];
                if c.is_subset(mask) && self.nu_within(mask.difference(c)) + 1 == left {
                    members.push(c);
                    mask = mask.difference(c);
                    left -= 1;
                    taken = true;
                    break;
                }
            }
            if !taken {
                mask.remove(v);
            }
        }
        Tiling::new(self.r, members)
    }

    /// Maximum tilings of `G[mask]` in lexicographic order, up to `limit`.
    /// Returns the tilings and whether the list was truncated.
    pub fn max_tilings_within(&mut self, mask: VertexSet, limit: usize) -> (Vec<Tiling>, bool) {
        let target = self.nu_within(mask);
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(target);
        let mut truncated = false;
        self.enumerate(mask, target, &mut cur, limit, &mut out, &mut truncated);
        (out, truncated)
    }

    fn enumerate(
        &mut self,
        mask: VertexSet,
        need: usize,
        cur: &mut Vec<VertexSet>,
        limit: usize,
        out: &mut Vec<Tiling>,
        truncated: &mut bool,
    ) {
        if *truncated {
            return;
        }
        if need == 0 {
            if out.len() == limit {
                *truncated = true;
                return;
            }
            out.push(Tiling::new(self.r, cur.clone()));
            return;
        }
        let mask = self.trim(mask);
        if self.nu_within(mask) < need {
            return;
        }
        let v = mask.first().expect("nonempty");
        for i in 0..self.by_min[v].len() {
            let c = self.by_min[v][i];
            if c.is_subset(mask) {
                cur.push(c);
                self.enumerate(mask.difference(c), need - 1, cur, limit, out, truncated);
                cur.pop();
            }
        }
        let mut rest = mask;
        rest.remove(v);
        self.enumerate(rest, need, cur, limit, out, truncated);
    }
}

pub fn nu(g: &Graph, r: usize) -> usize {
    TilingSolver::new(g, r).nu()
}

pub fn has_k_plus_one(g: &Graph, r: usize, k: usize) -> bool {
    TilingSolver::new(g, r).reaches(g.vertices(), k + 1)
}

/// Maximum tilings plus a truncation flag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TilingList {
    pub nu: usize,
    pub tilings: Vec<Tiling>,
    pub truncated: bool,
}

pub fn max_tilings(g: &Graph, r: usize, limit: usize) -> Result<TilingList> {
    if limit == 0 {
        return input("max_tilings needs limit >= 1");
    }
    let mut s = TilingSolver::new(g, r);
    let nu = s.nu();
    let (tilings, truncated) = s.max_tilings_within(g.vertices(), limit);
    Ok(TilingList {
        nu,
        tilings,
        truncated,
    })
}

/// Replaces up to two members by one more clique than it removes, drawing
/// on the freed vertices plus uncovered ones; repeats for `budget` steps.
pub fn rotation_improve(g: &Graph, tiling: &Tiling, budget: usize) -> Result<Tiling> {
    if !tiling.is_valid(g) {
        return input("rotation_improve needs a valid tiling");
    }
    let r = tiling.r;
    let mut solver = TilingSolver::new(g, r);
    let mut members = tiling.members.clone();
    for _ in 0..budget {
        let free = g
            .vertices()
            .difference(members.iter().fold(VertexSet::EMPTY, |s, &m| s.union(m)));
        if let Some(c) = g.cliques_within(r, free).first() {
            members.push(*c);
            continue;
        }
        let mut improved = false;
        'swap: for t in 1..=2.min(members.len()) {
            for combo in combinations(members.len(), t) {
                let region = combo.iter().fold(free, |s, &i| s.union(members[i]));
                if solver.reaches(region, t + 1) {
                    let replacement = solver.best_within(region);
                    let mut kept: Vec<VertexSet> = members
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !combo.contains(i))
                        .map(|(_, &m)| m)
                        .collect();
                    kept.extend(replacement.members);
                    members = kept;
                    improved = true;
                    break 'swap;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(Tiling::new(r, members).canonical())
}

fn combinations(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn go(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, t, cur, out);
            cur.pop();
        }
    }
    go(0, n, t, &mut cur, &mut out);
    out
}

/// Result of the brute-force extremal search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExResult {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub value: usize,
    #[serde(rename = "witness_graph6", with = "graph6_serde")]
    pub witness: Graph,
    pub levels_searched: usize,
    pub candidates_checked: u64,
}

mod graph6_serde {
    use crate::graph::Graph;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(g: &Graph, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&g.to_graph6())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Graph, D::Error> {
        let s = String::deserialize(d)?;
        crate::io::from_graph6(&s).map_err(serde::de::Error::custom)
    }
}

pub const EX_CANDIDATE_CAP: u64 = 1_000_000_000;

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// `ex(n, (k+1)K_r)` by deleting `t = 0, 1, ...` edges from `K_n`.
///
/// At each level the deletion sets are scanned in lexicographic order, split
/// across workers by their first edge; the witness is the lexicographically
/// least deletion set that works.
pub fn bruteforce_ex(n: usize, k: usize, r: usize) -> Result<ExResult> {
    if r == 4 && n > 9 {
        return resource(format!(
            "bruteforce_ex with r = 4 is limited to n <= 9 (got {n})"
        ));
    }
    if n == 0 || n > 12 || r == 0 {
        return resource(format!(
            "bruteforce_ex supports 1 <= n <= 12 and r >= 1 (got n = {n}, r = {r})"
        ));
    }
    let full = Graph::complete(n)?;
    let edges = full.edges();
    let m = edges.len();
    let mut checked: u64 = 0;
    for t in 0..=m {
        let level = binomial(m as u64, t as u64);
        if checked.saturating_add(level) > EX_CANDIDATE_CAP {
            return resource(format!(
                "bruteforce_ex({n},{k},{r}) would exceed {EX_CANDIDATE_CAP} candidate graphs at level {t}"
            ));
        }
        checked += level;
        let found = if t == 0 {
            (!has_k_plus_one(&full, r, k)).then(Vec::new)
        } else {
            (0..m)
                .into_par_iter()
                .map(|first| first_deletion_set(&full, &edges, first, t, r, k))
                .find_first(|x| x.is_some())
                .flatten()
        };
        if let Some(del) = found {
            let mut w = full.clone();
            for &e in &del {
                w.remove_edge(edges[e].0, edges[e].1);
            }
            return Ok(ExResult {
                n,
                k,
                r,
                value: m - t,
                witness: w,
                levels_searched: t + 1,
                candidates_checked: checked,
            });
        }
    }
    unreachable!("the empty graph has no K_r tiling of size k+1 for r >= 2")
}

/// Lexicographically least `t`-set of edge indices starting with `first`
/// whose deletion leaves `nu <= k`.
fn first_deletion_set(
    full: &Graph,
    edges: &[(usize, usize)],
    first: usize,
    t: usize,
    r: usize,
    k: usize,
) -> Option<Vec<usize>> {
    let m = edges.len();
    if first + t > m {
        return None;
    }
    let mut g = full.clone();
    g.remove_edge(edges[first].0, edges[first].1);
    let mut idx: Vec<usize> = (first + 1..first + t).collect();
    loop {
        for &e in &idx {
            g.remove_edge(edges[e].0, edges[e].1);
        }
        if !has_k_plus_one(&g, r, k) {
            let mut del = vec![first];
            del.extend_from_slice(&idx);
            return Some(del);
        }
        for &e in &idx {
            g.add_edge(edges[e].0, edges[e].1);
        }
        // Next combination of size t-1 from first+1..m.
        let len = idx.len();
        let mut pos = len;
        while pos > 0 {
            pos -= 1;
            if idx[pos] < m - (len - pos) {
                idx[pos] += 1;
                for q in pos + 1..len {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return None;
            }
        }
        if len == 0 {
            return None;
        }
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
    fn nu_small() {
        let k8 = Graph::complete(8).unwrap();
        assert_eq!(nu(&k8, 4), 2);
        assert_eq!(nu(&k8, 3), 2);
        assert_eq!(nu(&k8, 1), 8);
        assert_eq!(nu(&cycle(5), 3), 0);
        assert_eq!(nu(&cycle(5), 2), 2);
        assert!(has_k_plus_one(&k8, 4, 1));
        assert!(!has_k_plus_one(&Graph::complete(7).unwrap(), 4, 1));
    }

    #[test]
    fn enumerate_maximum_tilings() {
        let k4 = Graph::complete(4).unwrap();
        let l = max_tilings(&k4, 4, 10).unwrap();
        assert_eq!(l.tilings.len(), 1);
        let k8 = Graph::complete(8).unwrap();
        let l = max_tilings(&k8, 4, 100).unwrap();
        assert_eq!(l.tilings.len(), 35);
        assert!(!l.truncated);
        assert!(l.tilings.iter().all(|t| t.len() == 2 && t.is_valid(&k8)));
        let keys: Vec<Vec<Vec<usize>>> = l
            .tilings
            .iter()
            .map(|t| t.members.iter().map(|m| m.to_vec()).collect())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let l = max_tilings(&k8, 4, 10).unwrap();
        assert!(l.truncated && l.tilings.len() == 10);
        let l = max_tilings(&cycle(5), 3, 10).unwrap();
        assert_eq!(l.nu, 0);
        assert_eq!(l.tilings, vec![Tiling::new(3, vec![])]);
        assert!(max_tilings(&k8, 4, 0).is_err());
    }

    #[test]
    fn best_within_is_first_enumerated() {
        let g = cycle(7);
        let mut s = TilingSolver::new(&g, 2);
        let best = s.best_within(g.vertices());
        let (all, _) = s.max_tilings_within(g.vertices(), 1000);
        assert_eq!(best, all[0]);
        assert_eq!(best.len(), 3);
    }

    #[test]
    fn rotation_basics() {
        let k8 = Graph::complete(8).unwrap();
        let t = rotation_improve(&k8, &Tiling::new(4, vec![]), 1).unwrap();
        assert!(!t.is_empty());
        let full = rotation_improve(&k8, &t, 5).unwrap();
        assert_eq!(full.len(), 2);
        assert_eq!(
            rotation_improve(&k8, &full, 5).unwrap(),
            full.clone().canonical()
        );
        // A bad first choice on two triangles sharing a pivot path.
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let t = Tiling::new(
            2,
            vec![
                VertexSet::from_slice(&[1, 2]),
                VertexSet::from_slice(&[3, 4]),
            ],
        );
        assert_eq!(rotation_improve(&g, &t, 3).unwrap().len(), 3);
        assert!(
            rotation_improve(&g, &Tiling::new(2, vec![VertexSet::from_slice(&[0, 2])]), 1).is_err()
        );
    }

    #[test]
    fn small_extremal_numbers() {
        let r = bruteforce_ex(7, 1, 4).unwrap();
        assert_eq!(r.value, 21);
        assert_eq!(r.levels_searched, 1);
        let r = bruteforce_ex(4, 0, 4).unwrap();
        assert_eq!(r.value, 5);
        assert!(nu(&r.witness, 4) == 0);
        assert_eq!(bruteforce_ex(5, 0, 3).unwrap().value, 6);
        assert!(matches!(
            bruteforce_ex(10, 1, 4),
            Err(crate::Error::Resource(_))
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(36, 6), 1_947_792);
        assert_eq!(binomial(5, 7), 0);
    }
}
