//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use k4tiling::{Graph, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// All `r`-subsets of `mask` that induce cliques, by plain subset enumeration.
pub fn naive_cliques(g: &Graph, r: usize, mask: u64) -> Vec<u64> {
    let verts: Vec<usize> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(
        g: &Graph,
        verts: &[usize],
        r: usize,
        start: usize,
        pick: &mut Vec<usize>,
        out: &mut Vec<u64>,
    ) {
        if pick.len() == r {
            out.push(pick.iter().fold(0u64, |m, &v| m | 1 << v));
            return;
        }
        for i in start..verts.len() {
            let v = verts[i];
            if pick.iter().all(|&u| g.has_edge(u, v)) {
                pick.push(v);
                rec(g, verts, r, i + 1, pick, out);
                pick.pop();
            }
        }
    }
    rec(g, &verts, r, 0, &mut pick, &mut out);
    out
}

/// Maximum number of disjoint `r`-cliques inside `mask`, via a full table over
/// all submasks of `mask` (so only for small masks).
pub fn naive_nu(g: &Graph, r: usize, mask: u64) -> usize {
    let cliques = naive_cliques(g, r, mask);
    let verts: Vec<usize> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
    let m = verts.len();
    assert!(m <= 16, "oracle table limited to 16 vertices");
    // Compress cliques into local bit positions.
    let local: Vec<u32> = cliques
        .iter()
        .map(|&c| {
            verts
                .iter()
                .enumerate()
                .filter(|(_, &v)| c >> v & 1 == 1)
                .fold(0u32, |s, (i, _)| s | 1 << i)
        })
        .collect();
    let mut best = vec![0u8; 1 << m];
    for s in 1u32..(1 << m) {
        let mut b = 0u8;
        for &c in &local {
            if c & s == c {
                b = b.max(1 + best[(s & !c) as usize]);
            }
        }
        best[s as usize] = b;
    }
    best[(1usize << m) - 1] as usize
}

/// All families of `t` pairwise disjoint cliques from `cliques`, as unions.
pub fn disjoint_families(cliques: &[u64], t: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(cl: &[u64], t: usize, start: usize, used: u64, out: &mut Vec<u64>) {
        if t == 0 {
            out.push(used);
            return;
        }
        for i in start..cl.len() {
            if cl[i] & used == 0 {
                rec(cl, t - 1, i + 1, used | cl[i], out);
            }
        }
    }
    rec(cliques, t, 0, 0, &mut out);
    out
}

/// Lexicographically maximal `(|A|, |B|)` by exhausting every maximum `K4`-tiling.
pub fn naive_lex_ab(g: &Graph) -> (usize, usize) {
    let all = VertexSet::full(g.n()).bits();
    let k4 = naive_cliques(g, 4, all);
    let a = naive_nu(g, 4, all);
    let b = disjoint_families(&k4, a)
        .into_iter()
        .map(|used| naive_nu(g, 3, all & !used))
        .max()
        .unwrap_or(0);
    (a, b)
}

/// Expected `(a1..a6, b, c, d)` of the lexicographic packing for E1..E4.
pub fn table_row(family: usize, n: f64, k: f64) -> ([f64; 6], f64, f64, f64) {
    match family {
        1 => ([k, 0.0, 0.0, 0.0, 0.0, 0.0], (n - 4.0 * k) / 3.0, 0.0, 0.0),
        2 => ([0.0, k, 0.0, 0.0, 0.0, 0.0], (n - 6.0 * k) / 3.0, k, 0.0),
        3 => (
            [0.0, k, 0.0, 0.0, 0.0, 0.0],
            1.0,
            (n - 4.0 * k - 3.0) / 2.0,
            0.0,
        ),
        4 => ([0.0, 0.0, 0.0, k, 0.0, 0.0], 1.0, 0.0, n - 4.0 * k - 3.0),
        _ => panic!("no row for E{family}"),
    }
}

/// Class counts exact, `b` within rounding of a third, `c` and `d` within one.
pub fn matches_row(
    a: [usize; 6],
    b: usize,
    c: usize,
    d: usize,
    row: ([f64; 6], f64, f64, f64),
) -> bool {
    let (ra, rb, rc, rd) = row;
    a.iter().zip(ra).all(|(&x, y)| x as f64 == y)
        && (b as f64 - rb).abs() < 1.0
        && (c as f64 - rc).abs() <= 1.0
        && (d as f64 - rd).abs() <= 1.0
}

fn c2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

/// Closed forms for the five K4 families, written out independently of the library.
pub fn closed_count(i: usize, n: usize, k: usize, j: usize) -> usize {
    match i {
        1 => c2(k) + k * (n - k) + (n - k) * (n - k) / 3,
        2 => c2(2 * k + 1) + n * n / 3,
        3 => c2(2 * k + 1) + (2 * k + 1) * (n - 2 * k - 1) + (n - 2 * k - 1).pow(2) / 4,
        4 => c2(3 * k + 2) + (3 * k + 2) * (n - 3 * k - 2),
        _ => {
            let m = n - 4 * k - 3;
            let x = 12 * k + 9 - 2 * n - j;
            let parts = [m + j / 3, m + (j + 1) / 3, m + j.div_ceil(3)];
            c2(x)
                + x * (2 * m + j)
                + parts[0] * parts[1]
                + parts[0] * parts[2]
                + parts[1] * parts[2]
        }
    }
}
