//! Extremal construction families, their closed-form edge counts, the
//! piecewise extremal function `xi`, and the auxiliary bound `p_bound`.
//!
//! Vertices are laid out part by part in the order the parts are listed in
//! each family's definition (`X` first), so every part is a contiguous range.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{Graph, VertexSet, MAX_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    E1,
    E2,
    E3,
    E4,
    E5,
    GenA,
    GenB,
    GenR,
    T3,
}

impl Family {
    pub const K4_FAMILIES: [Family; 5] =
        [Family::E1, Family::E2, Family::E3, Family::E4, Family::E5];

    pub fn parse(s: &str) -> Result<Family> {
        Ok(match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "E1" => Family::E1,
            "E2" => Family::E2,
            "E3" => Family::E3,
            "E4" => Family::E4,
            "E5" => Family::E5,
            "GEN_A" | "GENA" => Family::GenA,
            "GEN_B" | "GENB" => Family::GenB,
            "GEN_R" | "GENR" => Family::GenR,
            "T3" => Family::T3,
            other => return Err(Error::Input(format!("unknown family `{other}`"))),
        })
    }
}

/// Parameters of one member of a construction family.
///
/// `index` selects `i` for the general-`r` families `GenA`/`GenB`.
/// `partition_seed` picks the permutation `(i1, i2, i3)` of `{0,1,2}` used by
/// `E2` (seed 0 is the identity). For `T3`, `n` is `h`, `k` is `alpha`,
/// `z_split` gives `|Z_1|, |Z_2|, |Z_3|` and `part_sizes` optionally overrides
/// `|Y_i ∪ Z_i|` (default `alpha` each).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default)]
    pub j: usize,
    #[serde(default)]
    pub index: usize,
    #[serde(default)]
    pub partition_seed: u64,
    #[serde(default)]
    pub z_split: Option<[usize; 3]>,
    #[serde(default)]
    pub part_sizes: Option<[usize; 3]>,
}

fn default_r() -> usize {
    4
}

impl ConstructionSpec {
    pub fn new(family: Family, n: usize, k: usize) -> Self {
        ConstructionSpec {
            family,
            n,
            k,
            r: 4,
            j: 0,
            index: 0,
            partition_seed: 0,
            z_split: None,
            part_sizes: None,
        }
    }

    pub fn e(i: usize, n: usize, k: usize) -> Self {
        Self::new(Family::K4_FAMILIES[i - 1], n, k)
    }

    pub fn with_j(mut self, j: usize) -> Self {
        self.j = j;
        self
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn with_index(mut self, i: usize) -> Self {
        self.index = i;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.partition_seed = seed;
        self
    }

    pub fn t3(h: usize, alpha: usize, z_split: [usize; 3]) -> Self {
        let mut s = Self::new(Family::T3, h, alpha);
        s.z_split = Some(z_split);
        s
    }

    /// Part sizes in vertex-layout order, after validating the spec.
    pub fn layout(&self) -> Result<Layout> {
        layout(self)
    }
}

/// Named parts and the edge rule of a construction.
#[derive(Clone, Debug)]
pub struct Layout {
    pub names: Vec<String>,
    pub sizes: Vec<usize>,
    /// Index of the part that induces a clique, if any.
    pub clique: Option<usize>,
    /// Pairs of part groups joined completely.
    pub joins: Vec<(Vec<usize>, Vec<usize>)>,
    /// Groups of parts whose unions form the classes of a complete multipartite graph.
    pub multipartite: Vec<Vec<usize>>,
}

impl Layout {
    fn new() -> Self {
        Layout {
            names: vec![],
            sizes: vec![],
            clique: None,
            joins: vec![],
            multipartite: vec![],
        }
    }

    fn part(&mut self, name: impl Into<String>, size: usize) -> usize {
        self.names.push(name.into());
        self.sizes.push(size);
        self.sizes.len() - 1
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Vertex set of part `i`.
    pub fn part_set(&self, i: usize) -> VertexSet {
        let lo: usize = self.sizes[..i].iter().sum();
        VertexSet::range(lo, lo + self.sizes[i])
    }

    pub fn part_by_name(&self, name: &str) -> Option<VertexSet> {
        self.names
            .iter()
            .position(|s| s == name)
            .map(|i| self.part_set(i))
    }

    fn group(&self, idx: &[usize]) -> VertexSet {
        idx.iter()
            .fold(VertexSet::EMPTY, |s, &i| s.union(self.part_set(i)))
    }

    pub fn build(&self) -> Result<Graph> {
        let n = self.n();
        if n == 0 || n > MAX_VERTICES {
            return domain(format!(
                "construction has {n} vertices, outside 1..={MAX_VERTICES}"
            ));
        }
        let mut g = Graph::empty(n)?;
        if let Some(c) = self.clique {
            g.make_clique(self.part_set(c));
        }
        for (s, t) in &self.joins {
            g.join(self.group(s), self.group(t));
        }
        let classes: Vec<VertexSet> = self.multipartite.iter().map(|c| self.group(c)).collect();
        for (i, &s) in classes.iter().enumerate() {
            for &t in &classes[i + 1..] {
                g.join(s, t);
            }
        }
        Ok(g)
    }
}

/// A built construction together with its layout.
#[derive(Clone, Debug)]
pub struct Construction {
    pub spec: ConstructionSpec,
    pub layout: Layout,
    pub graph: Graph,
}

pub fn build(spec: &ConstructionSpec) -> Result<Graph> {
    spec.layout()?.build()
}

pub fn build_detailed(spec: &ConstructionSpec) -> Result<Construction> {
    let layout = spec.layout()?;
    let graph = layout.build()?;
    Ok(Construction {
        spec: spec.clone(),
        layout,
        graph,
    })
}

/// `T_3(h, alpha)` member with the given `|Z_i|`; `|Y_i ∪ Z_i| = alpha` for all `i`.
pub fn build_t3(h: usize, alpha: usize, z_split: [usize; 3]) -> Result<Graph> {
    build(&ConstructionSpec::t3(h, alpha, z_split))
}

/// `floor((total + i) / parts)` for `i = 0..parts`: balanced, nondecreasing.
pub fn balanced(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| (total + i) / parts).collect()
}

pub fn binom2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

/// Edges of the complete multipartite graph with the given class sizes.
pub fn multipartite_edges(sizes: &[usize]) -> usize {
    let total: usize = sizes.iter().sum();
    (total * total - sizes.iter().map(|s| s * s).sum::<usize>()) / 2
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn check_common(spec: &ConstructionSpec) -> Result<()> {
    if spec.n == 0 {
        return domain("n must be positive");
    }
    if spec.family != Family::T3 && spec.r * spec.k > spec.n {
        return domain(format!(
            "n >= r*k violated: n = {}, r*k = {}",
            spec.n,
            spec.r * spec.k
        ));
    }
    Ok(())
}

fn require_r4(spec: &ConstructionSpec) -> Result<()> {
    if spec.r != 4 {
        return domain(format!(
            "{:?} is defined for r = 4 only (got r = {})",
            spec.family, spec.r
        ));
    }
    Ok(())
}

fn layout(spec: &ConstructionSpec) -> Result<Layout> {
    check_common(spec)?;
    let (n, k, r) = (spec.n, spec.k, spec.r);
    let mut l = Layout::new();
    match spec.family {
        Family::E1 => {
            if r < 2 {
                return domain("E1 needs r >= 2");
            }
            let x = l.part("X", k);
            let ys: Vec<usize> = (1..r)
                .map(|i| l.part(format!("Y{i}"), (n - k + i - 1) / (r - 1)))
                .collect();
            l.clique = Some(x);
            l.multipartite = std::iter::once(vec![x])
                .chain(ys.into_iter().map(|y| vec![y]))
                .collect();
        }
        Family::E2 => {
            require_r4(spec)?;
            let perm = PERMUTATIONS[(spec.partition_seed % 6) as usize];
            let xs = 2 * k + 1;
            let third = (n + perm[2]) / 3;
            if xs > third {
                return domain(format!(
                    "E2 requires |X| = 2k+1 = {xs} <= floor((n+i3)/3) = {third} (k <= (n-1)/6 for the identity permutation)"
                ));
            }
            let x = l.part("X", xs);
            let y1 = l.part("Y1", (n + perm[0]) / 3);
            let y2 = l.part("Y2", (n + perm[1]) / 3);
            let y3 = l.part("Y3", third - xs);
            l.clique = Some(x);
            l.multipartite = vec![vec![y1], vec![y2], vec![x, y3]];
        }
        Family::E3 => {
            require_r4(spec)?;
            let xs = 2 * k + 1;
            if xs > n {
                return domain(format!("E3 requires 2k+1 <= n (got {xs} > {n})"));
            }
            let x = l.part("X", xs);
            let y1 = l.part("Y1", (n - xs) / 2);
            let y2 = l.part("Y2", (n - xs).div_ceil(2));
            l.clique = Some(x);
            l.multipartite = vec![vec![x], vec![y1], vec![y2]];
        }
        Family::E4 => {
            require_r4(spec)?;
            let xs = 3 * k + 2;
            if xs > n {
                return domain(format!("E4 requires 3k+2 <= n (got {xs} > {n})"));
            }
            let x = l.part("X", xs);
            let y1 = l.part("Y1", n - xs);
            l.clique = Some(x);
            l.joins = vec![(vec![x], vec![y1])];
        }
        Family::E5 => {
            require_r4(spec)?;
            let (x, ys, zs) = top_family_parts(n, k, 4, spec.j, "E5")?;
            // Y4, Y5, Y6 pair with Y2, Y3, Y1 respectively.
            let xi = l.part("X", x);
            let y: Vec<usize> = (0..3)
                .map(|i| l.part(format!("Y{}", i + 1), ys[i]))
                .collect();
            let y4 = l.part("Y4", zs[1]);
            let y5 = l.part("Y5", zs[2]);
            let y6 = l.part("Y6", zs[0]);
            l.clique = Some(xi);
            l.joins = vec![(vec![xi], y.clone())];
            l.multipartite = vec![vec![y[0], y6], vec![y[1], y4], vec![y[2], y5]];
        }
        Family::GenA => {
            let i = spec.index;
            if r < 3 || i < 2 || i > r - 1 {
                return domain(format!(
                    "GEN_A needs r >= 3 and index i in [2, r-1] (got r = {r}, i = {i})"
                ));
            }
            let xs = i * k + i - 1;
            let classes = r + 1 - i;
            let sizes = balanced(n, classes);
            let last = sizes[classes - 1];
            if xs > last {
                return domain(format!(
                    "GEN_A requires k <= (ceil(n/(r+1-i)) - i + 1)/i, i.e. |X| = {xs} <= {last}"
                ));
            }
            let x = l.part("X", xs);
            let mut groups = Vec::new();
            for (t, &s) in sizes.iter().enumerate().take(classes - 1) {
                groups.push(vec![l.part(format!("Y{}", t + 1), s)]);
            }
            let y_last = l.part(format!("Y{classes}"), last - xs);
            groups.push(vec![x, y_last]);
            l.clique = Some(x);
            l.multipartite = groups;
        }
        Family::GenB => {
            let i = spec.index;
            if r < 3 || i < 2 || i > r - 1 {
                return domain(format!(
                    "GEN_B needs r >= 3 and index i in [2, r-1] (got r = {r}, i = {i})"
                ));
            }
            let xs = i * k + i - 1;
            if xs > n {
                return domain(format!("GEN_B requires |X| = ik+i-1 = {xs} <= n = {n}"));
            }
            let x = l.part("X", xs);
            let mut groups = vec![vec![x]];
            for (t, s) in balanced(n - xs, r - i).into_iter().enumerate() {
                groups.push(vec![l.part(format!("Y{}", t + 1), s)]);
            }
            l.clique = Some(x);
            l.multipartite = groups;
        }
        Family::GenR => {
            if r < 3 {
                return domain("GEN_R needs r >= 3");
            }
            let (x, ys, zs) = top_family_parts(n, k, r, spec.j, "GEN_R")?;
            let xi = l.part("X", x);
            let y: Vec<usize> = (0..r - 1)
                .map(|i| l.part(format!("Y{}", i + 1), ys[i]))
                .collect();
            let z: Vec<usize> = (0..r - 1)
                .map(|i| l.part(format!("Z{}", i + 1), zs[i]))
                .collect();
            l.clique = Some(xi);
            l.joins = vec![(vec![xi], y.clone())];
            l.multipartite = (0..r - 1).map(|i| vec![y[i], z[i]]).collect();
        }
        Family::T3 => {
            let alpha = k;
            let z = spec.z_split.unwrap_or_else(|| {
                let b = balanced(alpha, 3);
                [b[0], b[1], b[2]]
            });
            let sizes = spec.part_sizes.unwrap_or([alpha; 3]);
            if z.iter().sum::<usize>() != alpha {
                return domain(format!(
                    "T3 requires |Z1|+|Z2|+|Z3| = alpha = {alpha} (got {z:?})"
                ));
            }
            if !(sizes[0] <= sizes[1]
                && sizes[1] <= sizes[2]
                && sizes[0] >= alpha
                && sizes[2] <= alpha + 1)
            {
                return domain(format!(
                    "T3 requires alpha <= |Y1 u Z1| <= |Y2 u Z2| <= |Y3 u Z3| <= alpha+1 (got {sizes:?})"
                ));
            }
            if (0..3).any(|i| z[i] > sizes[i]) {
                return domain(format!(
                    "T3 requires |Z_i| <= |Y_i u Z_i| (got z = {z:?}, parts = {sizes:?})"
                ));
            }
            let total: usize = sizes.iter().sum();
            if total > n {
                return domain(format!(
                    "T3 requires h >= sum of |Y_i u Z_i| = {total} (got h = {n})"
                ));
            }
            let xi = l.part("X", n - total);
            let y: Vec<usize> = (0..3)
                .map(|i| l.part(format!("Y{}", i + 1), sizes[i] - z[i]))
                .collect();
            let zz: Vec<usize> = (0..3)
                .map(|i| l.part(format!("Z{}", i + 1), z[i]))
                .collect();
            l.clique = Some(xi);
            l.joins = vec![(vec![xi], y.clone())];
            l.multipartite = (0..3).map(|i| vec![y[i], zz[i]]).collect();
        }
    }
    debug_assert_eq!(l.n(), n);
    Ok(l)
}

/// Part sizes `(|X|, |Y_i|, |Z_i|)` of the top family `E_r(n,k,r)`.
///
/// The classes `Y_i ∪ Z_i` are balanced; the `Y_i` are balanced too and
/// aligned with the classes so that `|Y_i| <= |Y_i ∪ Z_i|`.
fn top_family_parts(
    n: usize,
    k: usize,
    r: usize,
    j: usize,
    name: &str,
) -> Result<(usize, Vec<usize>, Vec<usize>)> {
    if j > r - 1 {
        return domain(format!("{name} requires j in [0, {}] (got {j})", r - 1));
    }
    let top = r * k + r - 1;
    if top > n {
        return domain(format!(
            "{name} requires n >= rk + r - 1 = {top} (got n = {n})"
        ));
    }
    let m = n - top;
    let y_total = (r - 2) * m + j;
    if y_total > top {
        return domain(format!(
            "{name} requires |X| = rk+r-1-(r-2)(n-rk-r+1)-j >= 0, i.e. k >= (r-2)n/(r(r-1)) + (1-r)/r with room for j = {j}"
        ));
    }
    let x = top - y_total;
    let classes = balanced(n - x, r - 1);
    let ys = balanced(y_total, r - 1);
    let mut zs = Vec::with_capacity(r - 1);
    for i in 0..r - 1 {
        if ys[i] > classes[i] {
            return domain(format!(
                "{name}: balanced Y-part exceeds its class at j = {j}"
            ));
        }
        zs.push(classes[i] - ys[i]);
    }
    Ok((x, ys, zs))
}

/// Closed-form edge count, computed from the defining formulas without building the graph.
pub fn edge_count_formula(spec: &ConstructionSpec) -> Result<usize> {
    check_common(spec)?;
    let (n, k, r) = (spec.n, spec.k, spec.r);
    // Validation shares the layout rules; the count below does not look at the layout.
    layout(spec)?;
    Ok(match spec.family {
        Family::E1 => {
            if r == 4 {
                binom2(k) + k * (n - k) + (n - k) * (n - k) / 3
            } else {
                binom2(k) + k * (n - k) + multipartite_edges(&balanced(n - k, r - 1))
            }
        }
        Family::E2 => binom2(2 * k + 1) + n * n / 3,
        Family::E3 => {
            let x = 2 * k + 1;
            binom2(x) + x * (n - x) + (n - x) * (n - x) / 4
        }
        Family::E4 => {
            let x = 3 * k + 2;
            binom2(x) + x * (n - x)
        }
        Family::E5 => {
            let j = spec.j;
            let x = 12 * k + 9 - 2 * n - j;
            let m = n - 4 * k - 3;
            let y = 2 * m + j;
            let p = [m + j / 3, m + (j + 1) / 3, m + j.div_ceil(3)];
            binom2(x) + x * y + p[0] * p[1] + p[0] * p[2] + p[1] * p[2]
        }
        Family::GenA => {
            let x = spec.index * k + spec.index - 1;
            binom2(x) + multipartite_edges(&balanced(n, r + 1 - spec.index))
        }
        Family::GenB => {
            let x = spec.index * k + spec.index - 1;
            binom2(x) + x * (n - x) + multipartite_edges(&balanced(n - x, r - spec.index))
        }
        Family::GenR => {
            let m = n - (r * k + r - 1);
            let y = (r - 2) * m + spec.j;
            let x = r * k + r - 1 - y;
            binom2(x) + x * y + multipartite_edges(&balanced(n - x, r - 1))
        }
        Family::T3 => {
            let sizes = spec.part_sizes.unwrap_or([k; 3]);
            let total: usize = sizes.iter().sum();
            let x = n - total;
            binom2(x) + x * (total - k) + multipartite_edges(&sizes)
        }
    })
}

/// Every family member defined at `(n, k)` with `r = 4` (E5 at each valid `j`).
pub fn defined_k4_specs(n: usize, k: usize) -> Vec<ConstructionSpec> {
    let mut out = Vec::new();
    for fam in Family::K4_FAMILIES {
        let js: &[usize] = if fam == Family::E5 {
            &[0, 1, 2, 3]
        } else {
            &[0]
        };
        for &j in js {
            let s = ConstructionSpec::new(fam, n, k).with_j(j);
            if s.layout().is_ok() {
                out.push(s);
            }
        }
    }
    out
}

/// Largest closed-form edge count among the `r = 4` families defined at `(n, k)`.
pub fn best_k4_construction(n: usize, k: usize) -> Option<(ConstructionSpec, usize)> {
    defined_k4_specs(n, k)
        .into_iter()
        .filter_map(|s| edge_count_formula(&s).ok().map(|e| (s, e)))
        .fold(None, |best, (s, e)| match best {
            Some((_, be)) if be >= e => best,
            _ => Some((s, e)),
        })
}

/// One row of a density sweep: the best construction against `xi`, both over `n^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub k_over_n: f64,
    pub best: String,
    pub best_edges: usize,
    pub best_density: f64,
    pub xi_density: f64,
    /// `best_density - xi_density`.
    pub gap: f64,
}

/// Compares the best closed-form construction with `xi` at each `k`; values
/// of `k` above `(n-3)/4` are skipped. Works for any `n`, since no graph is built.
pub fn sweep(n: usize, ks: impl IntoIterator<Item = usize>) -> Vec<SweepRow> {
    let n2 = (n * n) as f64;
    ks.into_iter()
        .filter(|&k| n >= 3 && 4 * k + 3 <= n)
        .filter_map(|k| {
            let (spec, e) = best_k4_construction(n, k)?;
            let label = match spec.family {
                Family::E5 => format!("E5(j={})", spec.j),
                f => format!("{f:?}"),
            };
            let x = xi(n as f64, k as f64).ok()?.value / n2;
            let d = e as f64 / n2;
            Some(SweepRow {
                n,
                k,
                k_over_n: k as f64 / n as f64,
                best: label,
                best_edges: e,
                best_density: d,
                xi_density: x,
                gap: d - x,
            })
        })
        .collect()
}

/// Breakpoints of `xi` as fractions of `n`.
pub fn xi_breakpoints() -> [f64; 5] {
    [
        2.0 / 13.0,
        1.0 / 6.0,
        (4.0 - 2f64.sqrt()) / 14.0,
        (11.0 + 7f64.sqrt()) / 57.0,
        0.25,
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiValue {
    pub value: f64,
    pub regime: usize,
    pub breakpoints: [f64; 5],
}

/// The five quadratic pieces, indexed by regime.
pub fn xi_piece(regime: usize, n: f64, k: f64) -> f64 {
    match regime {
        1 => n * n / 3.0 + k * n / 3.0 - k * k / 6.0,
        2 => n * n / 3.0 + 2.0 * k * k,
        3 => n * n / 4.0 + k * n - k * k,
        4 => 3.0 * k * n - 4.5 * k * k,
        5 => n * n - 8.0 * k * n + 24.0 * k * k,
        _ => panic!("regime {regime} outside 1..=5"),
    }
}

/// Piecewise extremal function; each breakpoint belongs to the piece on its left.
pub fn xi(n: f64, k: f64) -> Result<XiValue> {
    if !(n >= 0.0 && k >= 0.0 && 4.0 * k <= n * (1.0 + 1e-15)) {
        return domain(format!("xi needs 0 <= k <= n/4 (got n = {n}, k = {k})"));
    }
    let bp = xi_breakpoints();
    let regime = if n == 0.0 {
        1
    } else {
        let q = k / n;
        bp.iter().position(|&b| q <= b).map_or(5, |i| i + 1)
    };
    Ok(XiValue {
        value: xi_piece(regime, n, k),
        regime,
        breakpoints: bp,
    })
}

pub type Rational = Ratio<i128>;

/// Exact `xi` for rational arguments; regimes at the irrational breakpoints
/// are decided by squaring, so no rounding enters.
pub fn xi_exact(n: Rational, k: Rational) -> Result<(Rational, usize)> {
    let zero = Rational::from_integer(0);
    if n < zero || k < zero || k * 4 > n {
        return domain(format!("xi needs 0 <= k <= n/4 (got n = {n}, k = {k})"));
    }
    let r = |a: i128, b: i128| Rational::new(a, b);
    let regime = if n == zero {
        1
    } else {
        let q = k / n;
        // q <= (4 - sqrt 2)/14  <=>  sqrt 2 <= 4 - 14q
        let le_third = {
            let t = r(4, 1) - q * 14;
            t >= zero && t * t >= r(2, 1)
        };
        // q <= (11 + sqrt 7)/57  <=>  57q - 11 <= sqrt 7
        let le_fourth = {
            let t = q * 57 - 11;
            t <= zero || t * t <= r(7, 1)
        };
        if q <= r(2, 13) {
            1
        } else if q <= r(1, 6) {
            2
        } else if le_third {
            3
        } else if le_fourth {
            4
        } else {
            5
        }
    };
    let v = match regime {
        1 => n * n / 3 + k * n / 3 - k * k / 6,
        2 => n * n / 3 + k * k * 2,
        3 => n * n / 4 + k * n - k * k,
        4 => k * n * 3 - k * k * r(9, 2),
        _ => n * n - k * n * 8 + k * k * 24,
    };
    Ok((v, regime))
}

/// Closed interval `I_i(n)` on which family `E_i` is the extremal candidate.
pub fn extremal_range(i: usize, n: f64) -> Result<(f64, f64)> {
    let e12 = (2.0 * n - 9.0) / 13.0;
    let e23 = (n - 1.0) / 6.0;
    let e34 = (4.0 * n - 11.0 - (2.0 * n * n - 4.0 * n - 5.0).sqrt()) / 14.0;
    let e45 = (22.0 * n - 75.0 + (28.0 * n * n - 108.0 * n + 153.0).sqrt()) / 114.0;
    let e5 = (n - 3.0) / 4.0;
    Ok(match i {
        1 => (0.0, e12),
        2 => (e12, e23),
        3 => (e23, e34),
        4 => (e34, e45),
        5 => (e45, e5),
        _ => return domain(format!("extremal range index {i} outside 1..=5")),
    })
}

/// Two-branch bound `P(h, alpha)`.
pub fn p_bound(h: i64, alpha: i64) -> Result<i64> {
    if alpha < 0 || h < 3 * alpha {
        return domain(format!(
            "p_bound needs h >= 3*alpha >= 0 (got h = {h}, alpha = {alpha})"
        ));
    }
    let b2 = |x: i64| x * (x - 1) / 2;
    Ok(if h < 16 * alpha {
        b2(h - 3 * alpha) + alpha * (2 * h - 3 * alpha) + 12 * h
    } else {
        b2(h - 3 * alpha + 9) + (alpha - 3) * (2 * h - 3 * alpha + 9)
    })
}

/// Relaxed form `(h-alpha)^2/2 + alpha^2 + 23h/2 + 3alpha/2 + 9`.
pub fn p_bound_relaxed(h: f64, alpha: f64) -> f64 {
    (h - alpha).powi(2) / 2.0 + alpha * alpha + 23.0 * h / 2.0 + 1.5 * alpha + 9.0
}

/// Minimum-degree threshold `k + floor((r-2)(n-k)/(r-1))`.
pub fn hs_threshold(n: usize, k: usize, r: usize) -> Result<usize> {
    if r < 3 {
        return domain(format!("threshold needs r >= 3 (got r = {r})"));
    }
    if n < r * (k + 1) {
        return domain(format!(
            "threshold needs n >= r(k+1) (got n = {n}, r(k+1) = {})",
            r * (k + 1)
        ));
    }
    Ok(k + (r - 2) * (n - k) / (r - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let e1 = build_detailed(&ConstructionSpec::e(1, 13, 1)).unwrap();
        assert_eq!(e1.layout.sizes, vec![1, 4, 4, 4]);
        assert_eq!(e1.graph.edge_count(), 60);
        assert_eq!(e1.graph.degree(0), 12);
        assert_eq!(
            build(&ConstructionSpec::e(4, 8, 1)).unwrap().edge_count(),
            25
        );
        let e3 = build_detailed(&ConstructionSpec::e(3, 11, 1)).unwrap();
        assert_eq!(e3.layout.sizes, vec![3, 4, 4]);
        assert_eq!(e3.graph.edge_count(), 43);
        assert_eq!(e3.graph.e_within(e3.layout.part_by_name("X").unwrap()), 3);
        let e4 = build_detailed(&ConstructionSpec::e(4, 12, 2)).unwrap();
        let (x, y) = (
            e4.layout.part_by_name("X").unwrap(),
            e4.layout.part_by_name("Y1").unwrap(),
        );
        assert_eq!(e4.graph.e_between(x, y).unwrap(), 32);
        assert_eq!(
            edge_count_formula(&ConstructionSpec::e(2, 14, 2)).unwrap(),
            75
        );
        assert_eq!(
            edge_count_formula(&ConstructionSpec::e(5, 13, 2)).unwrap(),
            61
        );
        for n in 1..30 {
            assert_eq!(
                edge_count_formula(&ConstructionSpec::e(1, n, 0)).unwrap(),
                n * n / 3
            );
        }
        // Closed forms work past the 64-vertex graph limit; building does not.
        assert_eq!(
            edge_count_formula(&ConstructionSpec::e(1, 300, 0)).unwrap(),
            30000
        );
        assert!(build(&ConstructionSpec::e(1, 300, 0)).is_err());
    }

    #[test]
    fn validity_domains() {
        assert!(matches!(
            build(&ConstructionSpec::e(2, 14, 3)),
            Err(Error::Domain(_))
        ));
        assert!(build(&ConstructionSpec::e(2, 13, 2)).is_ok());
        assert!(matches!(
            build(&ConstructionSpec::e(5, 13, 1)),
            Err(Error::Domain(_))
        ));
        assert!(build(&ConstructionSpec::e(5, 13, 2).with_j(3)).is_ok());
        assert!(build(&ConstructionSpec::e(5, 16, 2).with_j(1)).is_ok());
        assert!(build(&ConstructionSpec::e(5, 16, 2).with_j(2)).is_err());
        assert!(build(&ConstructionSpec::e(5, 13, 2).with_j(4)).is_err());
        assert!(build(&ConstructionSpec::e(1, 8, 3)).is_err());
        assert!(build(&ConstructionSpec::e(4, 4, 1)).is_err());
        assert!(build(&ConstructionSpec::e(3, 16, 2).with_r(5)).is_err());
    }

    #[test]
    fn t3_examples() {
        let s = ConstructionSpec::t3(12, 3, [1, 1, 1]);
        let l = s.layout().unwrap();
        assert_eq!(l.sizes, vec![3, 2, 2, 2, 1, 1, 1]);
        assert_eq!(
            build(&s).unwrap().edge_count(),
            edge_count_formula(&s).unwrap()
        );
        let g = build_t3(7, 0, [0, 0, 0]).unwrap();
        assert_eq!(g, Graph::complete(7).unwrap());
        assert!(build_t3(12, 3, [2, 2, 0]).is_err());
        assert!(build_t3(8, 3, [1, 1, 1]).is_err());
    }

    #[test]
    fn p_bound_values() {
        assert_eq!(p_bound(16, 1).unwrap(), 155);
        assert!(p_bound(5, 2).is_err());
        assert_eq!(p_bound(0, 0).unwrap(), 9);
    }

    #[test]
    fn threshold_values() {
        assert_eq!(hs_threshold(12, 0, 3).unwrap(), 6);
        assert!(hs_threshold(12, 0, 2).is_err());
        assert!(hs_threshold(7, 1, 4).is_err());
    }

    #[test]
    fn xi_pieces_and_breakpoints() {
        let n = 1.0;
        assert!((xi(n, 0.0).unwrap().value - 1.0 / 3.0).abs() < 1e-15);
        assert!((xi(n, 0.25).unwrap().value - 0.5).abs() < 1e-15);
        assert_eq!(xi(n, 1.0 / 6.0).unwrap().regime, 2);
        assert!((xi(n, 1.0 / 6.0).unwrap().value - 7.0 / 18.0).abs() < 1e-15);
        assert!(xi(1.0, 0.3).is_err());
        let (v, reg) = xi_exact(Rational::from_integer(6), Rational::from_integer(1)).unwrap();
        assert_eq!((v, reg), (Rational::from_integer(14), 2));
        let (v, reg) = xi_exact(Rational::from_integer(4), Rational::from_integer(1)).unwrap();
        assert_eq!((v, reg), (Rational::from_integer(8), 5));
    }

    #[test]
    fn family_parse_roundtrip() {
        for f in ["E1", "e5", "GEN_A", "gen-b", "GenR", "T3"] {
            assert!(Family::parse(f).is_ok());
        }
        assert!(Family::parse("E6").is_err());
    }
}
