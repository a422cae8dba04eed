//! Lexicographically maximal rank-4-packings, the seeing predicates, the
//! classification of the `K_4` members, and the edge-count audit.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, resource, Result};
use crate::graph::{Graph, VertexSet};
use crate::opt;
use crate::tiling::{Tiling, TilingSolver};

/// Partition of `V(G)` into `K_4`, `K_3`, `K_2` and `K_1` parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankPacking {
    pub a: Vec<VertexSet>,
    pub b: Vec<VertexSet>,
    pub c: Vec<VertexSet>,
    pub d: Vec<VertexSet>,
    /// Set when the enumeration of maximum `K_4`-tilings hit its cap.
    #[serde(default)]
    pub truncated: bool,
}

impl RankPacking {
    pub fn sizes(&self) -> (usize, usize, usize, usize) {
        (self.a.len(), self.b.len(), self.c.len(), self.d.len())
    }

    fn union(parts: &[VertexSet]) -> VertexSet {
        parts.iter().fold(VertexSet::EMPTY, |s, &p| s.union(p))
    }

    pub fn a_set(&self) -> VertexSet {
        Self::union(&self.a)
    }

    pub fn b_set(&self) -> VertexSet {
        Self::union(&self.b)
    }

    pub fn c_set(&self) -> VertexSet {
        Self::union(&self.c)
    }

    pub fn d_set(&self) -> VertexSet {
        Self::union(&self.d)
    }

    /// Checks the partition and clique conditions (not maximality).
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut seen = VertexSet::EMPTY;
        for (parts, size, label) in [
            (&self.a, 4, "A"),
            (&self.b, 3, "B"),
            (&self.c, 2, "C"),
            (&self.d, 1, "D"),
        ] {
            for &p in parts.iter() {
                if p.len() != size || !g.is_clique(p) {
                    return input(format!("{label}-member {p:?} is not a K_{size}"));
                }
                if !p.is_disjoint(seen) {
                    return input(format!("{label}-member {p:?} overlaps another member"));
                }
                seen = seen.union(p);
            }
        }
        if seen != g.vertices() {
            return input("packing does not cover every vertex");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PackingOptions {
    pub max_n: usize,
    pub tiling_limit: usize,
}

impl Default for PackingOptions {
    fn default() -> Self {
        PackingOptions {
            max_n: 32,
            tiling_limit: 1_000_000,
        }
    }
}

pub fn lex_max_rank_packing(g: &Graph) -> Result<RankPacking> {
    lex_max_rank_packing_with(g, PackingOptions::default())
}

/// Best `(|B|, |C|)` on a residual vertex set and its witnesses.
#[derive(Clone)]
struct Residual {
    b: usize,
    c: usize,
    b_sets: Vec<VertexSet>,
    c_sets: Vec<VertexSet>,
}

struct ResidualSolver<'g> {
    tri: TilingSolver<'g>,
    edge: TilingSolver<'g>,
    limit: usize,
    memo: HashMap<u64, (usize, usize)>,
}

impl<'g> ResidualSolver<'g> {
    fn new(g: &'g Graph, limit: usize) -> Self {
        ResidualSolver {
            tri: TilingSolver::new(g, 3),
            edge: TilingSolver::new(g, 2),
            limit,
            memo: HashMap::new(),
        }
    }

    /// Lexicographically best `(b, c)` for the residual `mask`.
    fn score(&mut self, mask: VertexSet) -> (usize, usize) {
        if let Some(&s) = self.memo.get(&mask.0) {
            return s;
        }
        let (tilings, _) = self.tri.max_tilings_within(mask, self.limit);
        let b = tilings.first().map_or(0, Tiling::len);
        let c = tilings
            .iter()
            .map(|t| self.edge.nu_within(mask.difference(t.covered())))
            .max()
            .unwrap_or(0);
        self.memo.insert(mask.0, (b, c));
        (b, c)
    }

    fn witness(&mut self, mask: VertexSet) -> Residual {
        let (b, c) = self.score(mask);
        let (tilings, _) = self.tri.max_tilings_within(mask, self.limit);
        for t in tilings {
            let rest = mask.difference(t.covered());
            if self.edge.nu_within(rest) == c {
                let m = self.edge.best_within(rest);
                return Residual {
                    b,
                    c,
                    b_sets: t.members,
                    c_sets: m.members,
                };
            }
        }
        unreachable!("score was attained by some maximum K_3-tiling")
    }
}

/// Lexicographically maximal rank-4-packing; ties go to the least `(A, B, C)` sequence.
pub fn lex_max_rank_packing_with(g: &Graph, opts: PackingOptions) -> Result<RankPacking> {
    if g.n() > opts.max_n {
        return resource(format!(
            "rank packing is capped at n <= {} (got {})",
            opts.max_n,
            g.n()
        ));
    }
    let mut k4 = TilingSolver::new(g, 4);
    let (a_tilings, truncated) = k4.max_tilings_within(g.vertices(), opts.tiling_limit);
    let all = g.vertices();
    let chunk = a_tilings
        .len()
        .div_ceil(rayon::current_num_threads().max(1) * 4)
        .max(1);
    let scores: Vec<(usize, usize)> = a_tilings
        .par_chunks(chunk)
        .flat_map_iter(|ts| {
            let mut rs = ResidualSolver::new(g, opts.tiling_limit);
            ts.iter()
                .map(|t| rs.score(all.difference(t.covered())))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    let a = a_tilings[best].members.clone();
    let residual = all.difference(RankPacking::union(&a));
    let mut rs = ResidualSolver::new(g, opts.tiling_limit);
    let res = rs.witness(residual);
    debug_assert_eq!((res.b, res.c), scores[best]);
    let d_set = residual
        .difference(RankPacking::union(&res.b_sets))
        .difference(RankPacking::union(&res.c_sets));
    Ok(RankPacking {
        a,
        b: res.b_sets,
        c: res.c_sets,
        d: d_set.iter().map(VertexSet::singleton).collect(),
        truncated,
    })
}

fn check_pair(g: &Graph, small: VertexSet, size: usize, a: VertexSet) -> Result<()> {
    if small.len() != size || !g.is_clique(small) {
        return input(format!("{small:?} is not a K_{size}"));
    }
    if a.len() != 4 || !g.is_clique(a) {
        return input(format!("{a:?} is not a K_4"));
    }
    if !small.is_disjoint(a) {
        return input("seeing predicates need disjoint sets");
    }
    Ok(())
}

#[inline]
fn three_sees_raw(g: &Graph, b: VertexSet, a: VertexSet) -> bool {
    a.iter().any(|v| b.is_subset(g.neighbors(v)))
}

#[inline]
fn two_sees_raw(g: &Graph, b: VertexSet, a: VertexSet) -> bool {
    let bs = b.to_vec();
    (0..bs.len()).any(|i| {
        (i + 1..bs.len()).any(|j| {
            a.intersection(g.neighbors(bs[i]))
                .intersection(g.neighbors(bs[j]))
                .len()
                >= 2
        })
    })
}

#[inline]
fn edge_sees_raw(g: &Graph, c: VertexSet, a: VertexSet) -> bool {
    c.iter()
        .fold(a, |s, v| s.intersection(g.neighbors(v)))
        .len()
        >= 2
}

#[inline]
fn vertex_sees_raw(g: &Graph, d: VertexSet, a: VertexSet) -> bool {
    d.iter().all(|v| a.intersection(g.neighbors(v)).len() >= 3)
}

/// Some vertex of `a` is adjacent to all of the triangle `b`.
pub fn three_sees(g: &Graph, b: VertexSet, a: VertexSet) -> Result<bool> {
    check_pair(g, b, 3, a)?;
    Ok(three_sees_raw(g, b, a))
}

/// Some pair of `b` is completely joined to some pair of `a`.
pub fn two_sees(g: &Graph, b: VertexSet, a: VertexSet) -> Result<bool> {
    check_pair(g, b, 3, a)?;
    Ok(two_sees_raw(g, b, a))
}

/// Both endpoints of `c` are adjacent to a common pair of `a`.
pub fn edge_sees(g: &Graph, c: VertexSet, a: VertexSet) -> Result<bool> {
    check_pair(g, c, 2, a)?;
    Ok(edge_sees_raw(g, c, a))
}

/// The single vertex `d` has at least three neighbours in `a`.
pub fn vertex_sees(g: &Graph, d: VertexSet, a: VertexSet) -> Result<bool> {
    check_pair(g, d, 1, a)?;
    Ok(vertex_sees_raw(g, d, a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    A1,
    A2_1,
    A2_2,
    A2_3,
    A3_1,
    A3_2,
    A4_1,
    A4_2,
    A5,
    A6,
}

impl Class {
    /// Index `1..=6` of the top-level family.
    pub fn family(self) -> usize {
        match self {
            Class::A1 => 1,
            Class::A2_1 | Class::A2_2 | Class::A2_3 => 2,
            Class::A3_1 | Class::A3_2 => 3,
            Class::A4_1 | Class::A4_2 => 4,
            Class::A5 => 5,
            Class::A6 => 6,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// How often each `A`-member is seen by the other parts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeenCounts {
    pub three_seen: usize,
    pub two_seen: usize,
    /// `B`-members that 2-see but do not 3-see.
    pub two_seen_only: usize,
    pub edge_seen: usize,
    pub vertex_seen: usize,
}

pub fn seen_counts(g: &Graph, p: &RankPacking, a: VertexSet) -> SeenCounts {
    let mut s = SeenCounts::default();
    for &b in &p.b {
        let t3 = three_sees_raw(g, b, a);
        let t2 = two_sees_raw(g, b, a);
        s.three_seen += t3 as usize;
        s.two_seen += t2 as usize;
        s.two_seen_only += (t2 && !t3) as usize;
    }
    s.edge_seen = p.c.iter().filter(|&&c| edge_sees_raw(g, c, a)).count();
    s.vertex_seen = p.d.iter().filter(|&&d| vertex_sees_raw(g, d, a)).count();
    s
}

/// First matching class among `A1 .. A4_2`, or `None` for the peel stage.
fn early_class(g: &Graph, p: &RankPacking, a: VertexSet) -> Option<Class> {
    let s = seen_counts(g, p, a);
    if s.three_seen >= 2 {
        return Some(Class::A1);
    }
    let one = s.three_seen == 1;
    let other_two_sees = one
        && p.b
            .iter()
            .any(|&b| !three_sees_raw(g, b, a) && two_sees_raw(g, b, a));
    if other_two_sees {
        Some(Class::A2_1)
    } else if one && s.edge_seen >= 1 {
        Some(Class::A2_2)
    } else if s.edge_seen >= 2 {
        Some(Class::A2_3)
    } else if s.two_seen >= 3 {
        Some(Class::A3_1)
    } else if s.two_seen >= 2 && s.edge_seen >= 1 {
        Some(Class::A3_2)
    } else if one && s.vertex_seen >= 1 {
        Some(Class::A4_1)
    } else if s.vertex_seen >= 2 {
        Some(Class::A4_2)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// Class of `packing.a[i]`.
    pub assignment: Vec<Class>,
    /// Indices into `packing.a` in the order they were moved to `A5`.
    pub peel_order: Vec<usize>,
}

impl Classification {
    pub fn members(&self, family: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i].family() == family)
            .collect()
    }

    pub fn counts(&self) -> [usize; 6] {
        let mut c = [0; 6];
        for cl in &self.assignment {
            c[cl.family() - 1] += 1;
        }
        c
    }
}

/// Assigns every `A`-member to its class; the remainder is split into `A5`
/// and `A6` by repeatedly moving the first member of `A6` that sends at most
/// `15(|A6|-1)` edges to the rest of `A6`.
pub fn classify(g: &Graph, packing: &RankPacking) -> Result<Classification> {
    packing.validate(g)?;
    let mut assignment = Vec::with_capacity(packing.a.len());
    let mut six = Vec::new();
    for (i, &a) in packing.a.iter().enumerate() {
        match early_class(g, packing, a) {
            Some(c) => assignment.push(c),
            None => {
                assignment.push(Class::A6);
                six.push(i);
            }
        }
    }
    let mut peel_order = Vec::new();
    loop {
        let pool = six
            .iter()
            .fold(VertexSet::EMPTY, |s, &i| s.union(packing.a[i]));
        let threshold = 15 * six.len().saturating_sub(1);
        let pick = six.iter().position(|&i| {
            let q = packing.a[i];
            g.e_cross(q, pool.difference(q)) <= threshold
        });
        match pick {
            Some(pos) => {
                let i = six.remove(pos);
                assignment[i] = Class::A5;
                peel_order.push(i);
            }
            None => break,
        }
    }
    Ok(Classification {
        assignment,
        peel_order,
    })
}

/// Class sizes and part counts of a classified packing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub a: [usize; 6],
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub n: usize,
    pub k: usize,
}

impl Profile {
    pub fn new(g: &Graph, p: &RankPacking, cl: &Classification) -> Self {
        Profile {
            a: cl.counts(),
            b: p.b.len(),
            c: p.c.len(),
            d: p.d.len(),
            n: g.n(),
            k: p.a.len(),
        }
    }

    pub fn to_point(&self) -> opt::OmegaPoint {
        let a = self.a.map(|x| x as f64);
        opt::OmegaPoint::new(a, self.b as f64, self.c as f64, self.d as f64)
    }
}

/// One audited inequality `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    fn push(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        let slack = rhs - lhs;
        self.checks.push(BoundCheck {
            name: name.into(),
            lhs,
            rhs,
            slack,
            pass: slack >= -1e-9,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Linear slack constant used for the bounds stated with an unspecified `O(n)` term.
pub const LINEAR_SLACK: f64 = 20.0;
/// Threshold `mu` in the dense-`A6` hypothesis.
pub const DENSE_A6_MU: f64 = 0.0;

fn c2(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

/// Audits the per-member and aggregated edge-count inequalities.
pub fn audit_bounds(g: &Graph, p: &RankPacking, cl: &Classification) -> Result<BoundReport> {
    p.validate(g)?;
    if cl.assignment.len() != p.a.len() {
        return input("classification does not match packing");
    }
    let mut rep = BoundReport::default();
    let prof = Profile::new(g, p, cl);
    let n = g.n() as f64;
    let (b, c, d) = (prof.b as f64, prof.c as f64, prof.d as f64);
    let af = prof.a.map(|x| x as f64);
    let (bs, cs, ds) = (p.b_set(), p.c_set(), p.d_set());

    rep.push("e(B) <= 3b^2", g.e_within(bs) as f64, 3.0 * b * b);
    rep.push("e(B,C) <= 4bc", g.e_cross(bs, cs) as f64, 4.0 * b * c);
    rep.push("e(B,D) <= 2bd", g.e_cross(bs, ds) as f64, 2.0 * b * d);
    rep.push("e(C) <= c^2", g.e_within(cs) as f64, c * c);
    rep.push("e(C,D) <= cd", g.e_cross(cs, ds) as f64, c * d);
    rep.push("e(D) = 0", g.e_within(ds) as f64, 0.0);
    let bcd = bs.union(cs).union(ds);
    rep.push(
        "e(B u C u D) <= Psi",
        g.e_within(bcd) as f64,
        opt::psi(b, c, d),
    );

    let fam: Vec<Vec<usize>> = (1..=6).map(|f| cl.members(f)).collect();
    let set_of = |idx: &[usize]| idx.iter().fold(VertexSet::EMPTY, |s, &i| s.union(p.a[i]));
    let fam_set: Vec<VertexSet> = fam.iter().map(|f| set_of(f)).collect();
    let e_q = |i: usize, j: usize| g.e_cross(p.a[i], p.a[j]);
    let class_of = |i: usize| cl.assignment[i].family();
    let counts: Vec<SeenCounts> = p.a.iter().map(|&a| seen_counts(g, p, a)).collect();

    // Pairwise member bounds, reported as the worst pair.
    let mut pair_max = |name: &str, fi: &[usize], fj: &[usize], rhs: f64| {
        let mut worst = 0usize;
        for &i in fi {
            for &j in fj {
                if i != j {
                    worst = worst.max(e_q(i, j));
                }
            }
        }
        rep.push(name, worst as f64, rhs);
    };
    let a1_4: Vec<usize> = (0..p.a.len()).filter(|&i| class_of(i) <= 4).collect();
    pair_max("e(Q1,Qi) <= 15 for i <= 4", &fam[0], &a1_4, 15.0);
    pair_max("e(Q1,Q1') <= 13", &fam[0], &fam[0], 13.0);
    let a34: Vec<usize> = (0..p.a.len())
        .filter(|&i| matches!(class_of(i), 3 | 4))
        .collect();
    pair_max("e(Q2,Qi) <= 15 for i in {3,4}", &fam[1], &a34, 15.0);
    pair_max("e(Q2,Q2') <= 14", &fam[1], &fam[1], 14.0);
    pair_max("e(Q3,Q3') <= 15", &fam[2], &fam[2], 15.0);
    pair_max("e(Q4,Q4') <= 15", &fam[3], &fam[3], 15.0);

    // Conditional consequences of dense member pairs; lhs counts violations.
    let mut viol = [0usize; 5];
    for i in 0..p.a.len() {
        for (j, &cj) in counts.iter().enumerate() {
            if i == j {
                continue;
            }
            let e = e_q(i, j);
            match class_of(i) {
                1 => {
                    if e >= 14 && cj.three_seen > 0 {
                        viol[0] += 1;
                    }
                    if class_of(j) >= 2 && e >= 15 && (cj.two_seen > 0 || cj.edge_seen > 0) {
                        viol[1] += 1;
                    }
                }
                2 => {
                    if class_of(j) >= 2 && e >= 15 && (cj.three_seen > 0 || cj.edge_seen > 0) {
                        viol[2] += 1;
                    }
                    if class_of(j) >= 5 && e == 16 && cj.two_seen > 0 {
                        viol[3] += 1;
                    }
                }
                3 if e == 16 && (cj.three_seen > 0 || cj.two_seen > 0 || cj.edge_seen > 0) => {
                    viol[4] += 1;
                }
                _ => {}
            }
        }
    }
    rep.push(
        "Q1: e(Q,Qi) >= 14 implies Qi not 3-seen",
        viol[0] as f64,
        0.0,
    );
    rep.push(
        "Q1: e(Q,Qi) >= 15 implies Qi not 2-seen nor C-seen",
        viol[1] as f64,
        0.0,
    );
    rep.push(
        "Q2: e(Q,Qi) >= 15 implies Qi not 3-seen nor C-seen",
        viol[2] as f64,
        0.0,
    );
    rep.push(
        "Q2: e(Q,Qi) = 16 with Qi in A5 u A6 implies Qi not 2-seen",
        viol[3] as f64,
        0.0,
    );
    rep.push(
        "Q3: e(Q,Qi) = 16 implies Qi not seen by B or C",
        viol[4] as f64,
        0.0,
    );

    // Per-target bounds e(A_f, Q) <= c * a_f when a_f >= 2.
    let mut family_to_member = |name: &str, f: usize, targets: &[usize], per: f64| {
        let worst = if prof.a[f - 1] >= 2 {
            targets
                .iter()
                .map(|&j| g.e_cross(fam_set[f - 1], p.a[j]))
                .max()
                .unwrap_or(0)
        } else {
            0
        };
        rep.push(name, worst as f64, per * af[f - 1]);
    };
    let from =
        |lo: usize| -> Vec<usize> { (0..p.a.len()).filter(|&i| class_of(i) >= lo).collect() };
    family_to_member("e(A1,Qi) <= 13a1 for i >= 2", 1, &from(2), 13.0);
    family_to_member("e(A2,Qi) <= 14a2 for i >= 3", 2, &from(3), 14.0);
    family_to_member("e(A3,Qi) <= 15a3 for i >= 4", 3, &from(4), 15.0);
    family_to_member("e(A4,Qi) <= 15a4 for i >= 5", 4, &from(5), 15.0);

    // Aggregated A-A bounds.
    rep.push(
        "e(A1) <= 13C(a1,2)+6a1",
        g.e_within(fam_set[0]) as f64,
        13.0 * c2(af[0]) + 6.0 * af[0],
    );
    for i in 2..=6 {
        rep.push(
            format!("e(A1,A{i}) <= 13a1a{i}+3a{i}"),
            g.e_cross(fam_set[0], fam_set[i - 1]) as f64,
            13.0 * af[0] * af[i - 1] + 3.0 * af[i - 1],
        );
    }
    rep.push(
        "e(A2) <= 14C(a2,2)+6a2",
        g.e_within(fam_set[1]) as f64,
        14.0 * c2(af[1]) + 6.0 * af[1],
    );
    for i in 3..=6 {
        rep.push(
            format!("e(A2,A{i}) <= 14a2a{i}+2a{i}"),
            g.e_cross(fam_set[1], fam_set[i - 1]) as f64,
            14.0 * af[1] * af[i - 1] + 2.0 * af[i - 1],
        );
    }
    rep.push(
        "e(A3) <= 15C(a3,2)+6a3",
        g.e_within(fam_set[2]) as f64,
        15.0 * c2(af[2]) + 6.0 * af[2],
    );
    rep.push(
        "e(A3) <= 7a3^2",
        g.e_within(fam_set[2]) as f64,
        7.0 * af[2] * af[2],
    );
    for i in 4..=6 {
        rep.push(
            format!("e(A3,A{i}) <= 15a3a{i}+a{i}"),
            g.e_cross(fam_set[2], fam_set[i - 1]) as f64,
            15.0 * af[2] * af[i - 1] + af[i - 1],
        );
    }
    rep.push(
        "e(A4) <= 15C(a4,2)+6a4",
        g.e_within(fam_set[3]) as f64,
        15.0 * c2(af[3]) + 6.0 * af[3],
    );
    for i in 5..=6 {
        rep.push(
            format!("e(A4,A{i}) <= 15a4a{i}+a{i}"),
            g.e_cross(fam_set[3], fam_set[i - 1]) as f64,
            15.0 * af[3] * af[i - 1] + af[i - 1],
        );
    }
    let (a5, a6) = (af[4], af[5]);
    rep.push(
        "e(A5 u A6) <= 15C(a5,2)+6a5+15a5a6+16C(a6,2)+6a6",
        g.e_within(fam_set[4].union(fam_set[5])) as f64,
        15.0 * c2(a5) + 6.0 * a5 + 15.0 * a5 * a6 + 16.0 * c2(a6) + 6.0 * a6,
    );

    // Member-to-B/C/D bounds: (limit on e(Q, part), number of exceptions allowed).
    struct Rule {
        fam: usize,
        b: (usize, usize),
        c: (usize, usize),
        d: (usize, usize),
        coeff: (f64, f64, f64),
        extra: f64,
    }
    let rules = [
        Rule {
            fam: 1,
            b: (9, 0),
            c: (6, 0),
            d: (3, 0),
            coeff: (9.0, 6.0, 3.0),
            extra: 0.0,
        },
        Rule {
            fam: 2,
            b: (8, 1),
            c: (6, 0),
            d: (3, 0),
            coeff: (8.0, 6.0, 3.0),
            extra: 4.0,
        },
        Rule {
            fam: 3,
            b: (8, 0),
            c: (5, 1),
            d: (3, 1),
            coeff: (8.0, 5.0, 3.0),
            extra: 4.0,
        },
        Rule {
            fam: 4,
            b: (7, 2),
            c: (5, 1),
            d: (3, 0),
            coeff: (7.0, 5.0, 3.0),
            extra: 18.0,
        },
        Rule {
            fam: 5,
            b: (7, 3),
            c: (5, 1),
            d: (2, 1),
            coeff: (7.0, 5.0, 2.0),
            extra: 20.0,
        },
        Rule {
            fam: 6,
            b: (7, 3),
            c: (5, 1),
            d: (2, 1),
            coeff: (7.0, 5.0, 2.0),
            extra: 20.0,
        },
    ];
    for rule in &rules {
        let f = rule.fam;
        let mut worst_excess = [0usize; 3];
        for &i in &fam[f - 1] {
            let q = p.a[i];
            for (slot, (parts, (lim, _))) in [(&p.b, rule.b), (&p.c, rule.c), (&p.d, rule.d)]
                .into_iter()
                .enumerate()
            {
                let over = parts.iter().filter(|&&x| g.e_cross(q, x) > lim).count();
                worst_excess[slot] = worst_excess[slot].max(over);
            }
        }
        let q = if f >= 5 {
            "Q5/Q6"
        } else {
            ["Q1", "Q2", "Q3", "Q4"][f - 1]
        };
        let tag = format!("{q}[A{f}]");
        rep.push(
            format!("{tag}: #B with e(Q,B) > {}", rule.b.0),
            worst_excess[0] as f64,
            rule.b.1 as f64,
        );
        rep.push(
            format!("{tag}: #C with e(Q,C) > {}", rule.c.0),
            worst_excess[1] as f64,
            rule.c.1 as f64,
        );
        rep.push(
            format!("{tag}: #D with e(Q,D) > {}", rule.d.0),
            worst_excess[2] as f64,
            rule.d.1 as f64,
        );
        let (cb, cc, cd) = rule.coeff;
        rep.push(
            format!("e(A{f},BCD) <= ({cb}b+{cc}c+{cd}d)a{f}+{}a{f}", rule.extra),
            g.e_cross(fam_set[f - 1], bcd) as f64,
            (cb * b + cc * c + cd * d) * af[f - 1] + rule.extra * af[f - 1],
        );
    }

    // Bounds with an O(n) term, instantiated with LINEAR_SLACK * n.
    let lin = LINEAR_SLACK * n;
    let a4 = af[3];
    let a4_lhs = g.e_within(fam_set[3]) + g.e_cross(fam_set[3], bs.union(cs));
    let a4_rhs = if d < (b + c) / 2.0 {
        opt::g_alpha(a4, b, 0.5) + opt::h_alpha(a4, c, 0.5)
    } else {
        opt::g_hat(a4, b) + opt::h_alpha(a4, c, 0.25)
    };
    rep.push(
        "e(A4)+e(A4,B u C) <= Cn + phi_hat",
        a4_lhs as f64,
        lin + a4_rhs,
    );
    let six_bcd = g.e_within(fam_set[5].union(bcd)) as f64;
    let piece = if a6 <= b + c {
        7.5 * a6 * a6 + (7.0 * b + 5.0 * c + 2.0 * d) * a6
    } else {
        8.0 * a6 * a6 + (6.5 * b + 4.5 * c + 2.0 * d) * a6
    };
    rep.push(
        "e(A6 u B u C u D) <= Cn + Psi + piece",
        six_bcd,
        lin + opt::psi(b, c, d) + piece,
    );
    let dense = g.e_within(fam_set[5]) as f64 >= 7.5 * a6 * a6 + DENSE_A6_MU * a6
        && a6 >= (3.0 * b + 2.0 * c + d) / 2.0;
    if dense && a6 > 0.0 {
        let s = 3.0 * b + 2.0 * c + d;
        rep.push(
            "dense A6: e(A6 u B u C u D) <= 8a6^2 + (3b+2c+d)^2 + Cn",
            six_bcd,
            8.0 * a6 * a6 + s * s + lin,
        );
    }
    let phi1 = opt::phi(opt::PhiKind::Phi1, &prof.to_point());
    rep.push("|G| <= Phi1 + 20n", g.edge_count() as f64, phi1 + 20.0 * n);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::from_slice(v)
    }

    #[test]
    fn predicates_on_small_graphs() {
        let mut g = Graph::empty(7).unwrap();
        g.make_clique(vs(&[0, 1, 2, 3]));
        g.make_clique(vs(&[4, 5, 6]));
        let (a, b) = (vs(&[0, 1, 2, 3]), vs(&[4, 5, 6]));
        assert!(!three_sees(&g, b, a).unwrap());
        assert!(!two_sees(&g, b, a).unwrap());
        g.add_edge(0, 4);
        assert!(!two_sees(&g, b, a).unwrap());
        g.join(vs(&[0]), b);
        assert!(three_sees(&g, b, a).unwrap());
        g.join(a, b);
        assert!(two_sees(&g, b, a).unwrap());
        assert!(edge_sees(&g, vs(&[4, 5]), a).unwrap());
        assert!(vertex_sees(&g, vs(&[6]), a).unwrap());
        assert!(three_sees(&g, vs(&[4, 5]), a).is_err());
        assert!(three_sees(&g, vs(&[3, 4, 5]), a).is_err());

        let mut h = Graph::empty(5).unwrap();
        h.make_clique(vs(&[0, 1, 2, 3]));
        h.add_edge(4, 0);
        h.add_edge(4, 1);
        assert!(!vertex_sees(&h, vs(&[4]), vs(&[0, 1, 2, 3])).unwrap());
    }

    #[test]
    fn tiny_packings() {
        let k4 = Graph::complete(4).unwrap();
        let p = lex_max_rank_packing(&k4).unwrap();
        assert_eq!(p.sizes(), (1, 0, 0, 0));
        let cl = classify(&k4, &p).unwrap();
        assert_eq!(cl.assignment, vec![Class::A5]);
        assert_eq!(cl.peel_order, vec![0]);
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(lex_max_rank_packing(&k3).unwrap().sizes(), (0, 1, 0, 0));
        let e = Graph::empty(5).unwrap();
        let p = lex_max_rank_packing(&e).unwrap();
        assert_eq!(p.sizes(), (0, 0, 0, 5));
        let cl = classify(&e, &p).unwrap();
        let rep = audit_bounds(&e, &p, &cl).unwrap();
        assert!(rep.all_pass());
        assert!(rep.checks.iter().all(|c| c.lhs == 0.0));
    }

    #[test]
    fn rejects_bad_packing() {
        let k4 = Graph::complete(4).unwrap();
        let bad = RankPacking {
            a: vec![],
            b: vec![vs(&[0, 1, 2])],
            c: vec![],
            d: vec![],
            truncated: false,
        };
        assert!(classify(&k4, &bad).is_err());
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let bad = RankPacking {
            a: vec![],
            b: vec![vs(&[0, 1, 2])],
            c: vec![],
            d: vec![],
            truncated: false,
        };
        assert!(bad.validate(&path).is_err());
    }

    #[test]
    fn two_k4_with_dense_link_peels_to_six() {
        let g = Graph::complete(8).unwrap();
        let p = lex_max_rank_packing(&g).unwrap();
        assert_eq!(p.a, vec![vs(&[0, 1, 2, 3]), vs(&[4, 5, 6, 7])]);
        let cl = classify(&g, &p).unwrap();
        assert_eq!(cl.assignment, vec![Class::A6, Class::A6]);
        assert!(cl.peel_order.is_empty());
    }
}
