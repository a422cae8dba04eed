//! The quadratic bound functions over profile space, their piecewise
//! ingredients, and numerical verification of the inequalities they satisfy.
//!
//! Coordinates of a profile are ordered `(a1, ..., a6, b, c, d)`. Every
//! maximization is done twice: exactly, by enumerating the faces of each
//! polyhedral piece and solving the stationarity system on them, and by
//! random sampling through the piecewise evaluators.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{xi, xi_breakpoints, xi_piece};
use crate::error::{domain, input, resource, Error, Result};

/// Absolute tolerance for bound checks at unit scale.
pub const BOUND_TOL: f64 = 1e-6;
/// Relative tolerance for exact identities.
pub const IDENTITY_TOL: f64 = 1e-10;

const A4: usize = 3;
const A6: usize = 5;
const B: usize = 6;
const C: usize = 7;
const D: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaPoint {
    pub a: [f64; 6],
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl OmegaPoint {
    pub fn new(a: [f64; 6], b: f64, c: f64, d: f64) -> Self {
        OmegaPoint { a, b, c, d }
    }

    pub fn from_slice(x: &[f64]) -> Self {
        OmegaPoint {
            a: [x[0], x[1], x[2], x[3], x[4], x[5]],
            b: x[B],
            c: x[C],
            d: x[D],
        }
    }

    pub fn to_array(&self) -> [f64; 9] {
        let a = self.a;
        [a[0], a[1], a[2], a[3], a[4], a[5], self.b, self.c, self.d]
    }

    pub fn k(&self) -> f64 {
        self.a.iter().sum()
    }

    pub fn n(&self) -> f64 {
        4.0 * self.k() + 3.0 * self.b + 2.0 * self.c + self.d
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_array().iter().any(|v| !v.is_finite() || *v < 0.0) {
            return input(format!(
                "profile coordinates must be finite and nonnegative: {self:?}"
            ));
        }
        Ok(())
    }
}

/// A point of the scaled simplex `{x >= 0 : sum x <= gamma}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    pub gamma: f64,
    pub x: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(gamma: f64, x: Vec<f64>) -> Result<Self> {
        let sum: f64 = x.iter().sum();
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) || sum > gamma * (1.0 + 1e-12) + 1e-12 {
            return input(format!("point outside the simplex of budget {gamma}"));
        }
        Ok(SimplexPoint { gamma, x })
    }
}

pub fn psi(b: f64, c: f64, d: f64) -> f64 {
    3.0 * b * b + 4.0 * b * c + 2.0 * b * d + c * c + c * d
}

/// `psi` written as `(3b+2c+d)^2/3 - (c^2+cd+d^2)/3`.
pub fn psi_identity_form(b: f64, c: f64, d: f64) -> f64 {
    let s = 3.0 * b + 2.0 * c + d;
    s * s / 3.0 - (c * c + c * d + d * d) / 3.0
}

fn g_piece(x: f64, y: f64, alpha: f64, upper: bool) -> f64 {
    if upper {
        7.5 * alpha * x * x + 6.5 * x * y + y * y / (8.0 * alpha)
    } else {
        7.0 * alpha * x * x + 7.0 * x * y
    }
}

fn h_piece(x: f64, y: f64, alpha: f64, upper: bool) -> f64 {
    if upper {
        7.5 * alpha * x * x + 4.5 * x * y + y * y / (8.0 * alpha)
    } else {
        7.0 * alpha * x * x + 5.0 * x * y
    }
}

pub fn g_alpha(x: f64, y: f64, alpha: f64) -> f64 {
    g_piece(x, y, alpha, x > y / (2.0 * alpha))
}

pub fn h_alpha(x: f64, y: f64, alpha: f64) -> f64 {
    h_piece(x, y, alpha, x > y / (2.0 * alpha))
}

/// Interior breakpoints of `g_hat`, as multiples of `y`.
pub fn g_hat_breakpoints() -> [f64; 4] {
    [1.2, (86.0 - 4.0 * 210f64.sqrt()) / 15.0, 56.0 / 15.0, 7.6]
}

fn g_hat_piece(x: f64, y: f64, i: usize) -> f64 {
    match i {
        0 => 21.0 * x * x / 4.0 + 7.0 * x * y,
        1 | 4 => {
            45.0 * x * x / 8.0
                + 61.0 * x * y / 10.0
                + if i == 1 { 27.0 } else { 151.0 / 3.0 } * y * y / 50.0
        }
        2 => 28.0 * x * x / 5.0 + 479.0 * x * y / 75.0 + 103.0 * y * y / 1125.0,
        _ => 651.0 * x * x / 116.0 + 913.0 * x * y / 145.0 + 113.0 * y * y / 435.0,
    }
}

fn g_hat_index(x: f64, y: f64) -> usize {
    g_hat_breakpoints()
        .iter()
        .position(|&t| x <= t * y)
        .unwrap_or(4)
}

pub fn g_hat(x: f64, y: f64) -> f64 {
    g_hat_piece(x, y, g_hat_index(x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GhKind {
    GAlpha,
    HAlpha,
    GHat,
}

/// Checked evaluation of `g_alpha`, `h_alpha` or `g_hat` (which ignores `alpha`).
pub fn g_h_ghat(x: f64, y: f64, alpha: f64, which: GhKind) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return input(format!(
            "arguments must be nonnegative (got x = {x}, y = {y})"
        ));
    }
    match which {
        GhKind::GHat => Ok(g_hat(x, y)),
        _ if !(alpha > 0.0 && alpha < 1.0) => {
            input(format!("alpha must lie in (0,1) (got {alpha})"))
        }
        GhKind::GAlpha => Ok(g_alpha(x, y, alpha)),
        GhKind::HAlpha => Ok(h_alpha(x, y, alpha)),
    }
}

/// Which side of `d = (b+c)/2` a profile lies on; the boundary is `Low`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Low,
    High,
}

impl Side {
    pub fn of(b: f64, c: f64, d: f64) -> Side {
        if d <= (b + c) / 2.0 {
            Side::Low
        } else {
            Side::High
        }
    }
}

/// One polynomial piece of `phi_hat`: the side, then the piece index of the
/// `b`-function (`g_{1/2}` or `g_hat`) and of the `c`-function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhiPiece {
    pub side: Side,
    pub g: usize,
    pub h: usize,
}

impl PhiPiece {
    pub fn of(a4: f64, b: f64, c: f64, d: f64) -> Self {
        Self::on_side(Side::of(b, c, d), a4, b, c)
    }

    fn on_side(side: Side, a4: f64, b: f64, c: f64) -> Self {
        match side {
            Side::Low => PhiPiece {
                side,
                g: (a4 > b) as usize,
                h: (a4 > c) as usize,
            },
            Side::High => PhiPiece {
                side,
                g: g_hat_index(a4, b),
                h: (a4 > 2.0 * c) as usize,
            },
        }
    }

    pub fn all() -> Vec<PhiPiece> {
        let mut v = Vec::new();
        for g in 0..2 {
            for h in 0..2 {
                v.push(PhiPiece {
                    side: Side::Low,
                    g,
                    h,
                });
            }
        }
        for g in 0..5 {
            for h in 0..2 {
                v.push(PhiPiece {
                    side: Side::High,
                    g,
                    h,
                });
            }
        }
        v
    }

    /// Rows `(w, r)` meaning `w . x <= r` that carve this piece out of profile space.
    fn constraints(&self) -> Vec<(Vec<f64>, f64)> {
        let row = |terms: &[(usize, f64)]| {
            let mut w = vec![0.0; 9];
            for &(i, v) in terms {
                w[i] += v;
            }
            (w, 0.0)
        };
        let mut out = Vec::new();
        match self.side {
            Side::Low => {
                out.push(row(&[(D, 1.0), (B, -0.5), (C, -0.5)]));
                out.push(if self.g == 0 {
                    row(&[(A4, 1.0), (B, -1.0)])
                } else {
                    row(&[(B, 1.0), (A4, -1.0)])
                });
                out.push(if self.h == 0 {
                    row(&[(A4, 1.0), (C, -1.0)])
                } else {
                    row(&[(C, 1.0), (A4, -1.0)])
                });
            }
            Side::High => {
                out.push(row(&[(B, 0.5), (C, 0.5), (D, -1.0)]));
                let t = g_hat_breakpoints();
                if self.g > 0 {
                    out.push(row(&[(B, t[self.g - 1]), (A4, -1.0)]));
                }
                if self.g < 4 {
                    out.push(row(&[(A4, 1.0), (B, -t[self.g])]));
                }
                out.push(if self.h == 0 {
                    row(&[(A4, 1.0), (C, -2.0)])
                } else {
                    row(&[(C, 2.0), (A4, -1.0)])
                });
            }
        }
        out
    }
}

fn phi_hat_piece(a4: f64, b: f64, c: f64, piece: PhiPiece) -> f64 {
    match piece.side {
        Side::Low => g_piece(a4, b, 0.5, piece.g == 1) + h_piece(a4, c, 0.5, piece.h == 1),
        Side::High => g_hat_piece(a4, b, piece.g) + h_piece(a4, c, 0.25, piece.h == 1),
    }
}

pub fn phi_hat(a4: f64, b: f64, c: f64, d: f64) -> f64 {
    phi_hat_piece(a4, b, c, PhiPiece::of(a4, b, c, d))
}

fn varphi_piece(a4: f64, b: f64, c: f64, piece: PhiPiece) -> f64 {
    phi_hat_piece(a4, b, c, piece) - (7.5 * a4 * a4 + (7.0 * b + 5.0 * c) * a4)
}

/// `phi_hat - (15a4^2/2 + (7b+5c)a4)`, the correction that turns the
/// second-level functions into the third.
pub fn varphi(a4: f64, b: f64, c: f64, d: f64) -> f64 {
    varphi_piece(a4, b, c, PhiPiece::of(a4, b, c, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhiKind {
    Phi,
    Phi1,
    Phi21,
    Phi22,
    Phi23,
    Phi31,
    Phi32,
    Phi33,
    Phi41,
    Phi42,
    Phi43,
    Phi51,
    Phi52,
    Phi53,
    Phi6,
    Phi61,
    Phi62,
}

impl PhiKind {
    pub const ALL: [PhiKind; 17] = [
        PhiKind::Phi,
        PhiKind::Phi1,
        PhiKind::Phi21,
        PhiKind::Phi22,
        PhiKind::Phi23,
        PhiKind::Phi31,
        PhiKind::Phi32,
        PhiKind::Phi33,
        PhiKind::Phi41,
        PhiKind::Phi42,
        PhiKind::Phi43,
        PhiKind::Phi51,
        PhiKind::Phi52,
        PhiKind::Phi53,
        PhiKind::Phi6,
        PhiKind::Phi61,
        PhiKind::Phi62,
    ];

    pub fn parse(s: &str) -> Result<PhiKind> {
        let t = s.trim().to_ascii_uppercase().replace(['_', ','], "");
        Self::ALL
            .into_iter()
            .find(|k| format!("{k:?}").to_ascii_uppercase() == t)
            .ok_or_else(|| Error::Input(format!("unknown function `{s}`")))
    }

    /// Whether the value depends on `varphi`, hence on `d` versus `(b+c)/2`.
    pub fn is_piecewise(self) -> bool {
        matches!(
            self,
            PhiKind::Phi31 | PhiKind::Phi32 | PhiKind::Phi33 | PhiKind::Phi6
        )
    }

    fn second_level(i: usize) -> PhiKind {
        [PhiKind::Phi21, PhiKind::Phi22, PhiKind::Phi23][i - 1]
    }
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format!("{self:?}").to_ascii_uppercase())
    }
}

fn phi_base(p: &OmegaPoint) -> f64 {
    let [a1, a2, a3, a4, a5, a6] = p.a;
    let (b, c, d) = (p.b, p.c, p.d);
    6.5 * a1 * a1
        + 13.0 * a1 * (a2 + a3 + a4 + a5 + a6)
        + 7.0 * a2 * a2
        + 14.0 * a2 * (a3 + a4 + a5 + a6)
        + 7.0 * a3 * a3
        + 15.0 * a3 * (a4 + a5 + a6)
        + 7.5 * a4 * a4
        + 15.0 * a4 * (a5 + a6)
        + 7.5 * a5 * a5
        + 15.0 * a5 * a6
        + 8.0 * a6 * a6
        + (9.0 * b + 6.0 * c + 3.0 * d) * a1
        + (8.0 * b + 6.0 * c + 3.0 * d) * a2
        + (8.0 * b + 5.0 * c + 3.0 * d) * a3
        + (7.0 * b + 5.0 * c + 3.0 * d) * a4
        + (7.0 * b + 5.0 * c + 2.0 * d) * (a5 + a6)
}

fn phi_on_piece(kind: PhiKind, p: &OmegaPoint, piece: PhiPiece) -> f64 {
    let (a4, a6, b, c, d) = (p.a[3], p.a[5], p.b, p.c, p.d);
    let phi1 = || phi_base(p) + psi(b, c, d);
    let low = -(b + c) * a4 / 2.0 + (b * b + c * c) / 4.0;
    let high = -0.9 * b * a4 - c * a4 / 2.0 + 151.0 * b * b / 150.0 + c * c / 2.0;
    match kind {
        PhiKind::Phi => phi_base(p),
        PhiKind::Phi1 => phi1(),
        PhiKind::Phi21 => phi1() - a6 * a6 / 2.0,
        PhiKind::Phi22 => phi1() - (b + c) * a6 / 2.0,
        PhiKind::Phi23 => {
            let s = 3.0 * b + 2.0 * c + d;
            phi_base(p) - (7.0 * b + 5.0 * c + 2.0 * d) * a6 + s * s
        }
        PhiKind::Phi31 | PhiKind::Phi32 | PhiKind::Phi33 => {
            let i = kind as usize - PhiKind::Phi31 as usize + 1;
            phi_on_piece(PhiKind::second_level(i), p, piece) + varphi_piece(a4, b, c, piece)
        }
        PhiKind::Phi41 | PhiKind::Phi42 | PhiKind::Phi43 => {
            let i = kind as usize - PhiKind::Phi41 as usize + 1;
            phi_on_piece(PhiKind::second_level(i), p, piece) + low
        }
        PhiKind::Phi51 | PhiKind::Phi52 | PhiKind::Phi53 => {
            let i = kind as usize - PhiKind::Phi51 as usize + 1;
            phi_on_piece(PhiKind::second_level(i), p, piece) + high
        }
        PhiKind::Phi6 => phi1() + varphi_piece(a4, b, c, piece),
        PhiKind::Phi61 => phi1() + low,
        PhiKind::Phi62 => phi1() + high,
    }
}

/// Evaluates one member of the family, choosing every piece from the point.
pub fn phi(kind: PhiKind, p: &OmegaPoint) -> f64 {
    phi_on_piece(kind, p, PhiPiece::of(p.a[3], p.b, p.c, p.d))
}

/// Like [`phi`], but with the `d` versus `(b+c)/2` side supplied; an
/// inconsistent side is an input error.
pub fn phi_family(kind: PhiKind, p: &OmegaPoint, side: Option<Side>) -> Result<f64> {
    p.validate()?;
    let actual_low = p.d <= (p.b + p.c) / 2.0;
    let actual_high = p.d >= (p.b + p.c) / 2.0;
    let side = match side {
        None => Side::of(p.b, p.c, p.d),
        Some(Side::Low) if !actual_low => {
            return input("branch flag says d <= (b+c)/2 but the point has d > (b+c)/2")
        }
        Some(Side::High) if !actual_high => {
            return input("branch flag says d >= (b+c)/2 but the point has d < (b+c)/2")
        }
        Some(s) => s,
    };
    Ok(phi_on_piece(
        kind,
        p,
        PhiPiece::on_side(side, p.a[3], p.b, p.c),
    ))
}

/// `eta(b, x2, ..., x10)`; `x` holds `x2..x10`.
pub fn eta(b: f64, x: &[f64]) -> f64 {
    assert_eq!(x.len(), 9, "eta takes the nine coordinates x2..x10");
    let v = |i: usize| x[i - 2];
    let tail: f64 = (6..=10).map(v).sum();
    let linear: f64 = (2..=10).map(|i| (i - 1) as f64 * b * v(i) / 10.0).sum();
    linear
        - 3.0 * v(2) * v(2) / 112.0
        - 3.0 * v(3) * v(3) / 56.0
        - 3.0 * v(4) * v(4) / 32.0
        - v(5) * v(5) / 8.0
        - 3.0 * tail * tail / 8.0
        - 0.75
            * ((v(2) + v(3) + v(4) + v(5)) * v(10)
                + (v(3) + v(4) + v(5)) * v(9)
                + (v(4) + v(5)) * v(8)
                + v(5) * v(7))
}

/// Breakpoints of the five-branch bound on `max eta`, as multiples of `b`.
pub fn eta_bound_breakpoints() -> [f64; 4] {
    g_hat_breakpoints()
}

/// Five-branch upper bound on the maximum of `eta` over the simplex of budget `gamma`.
pub fn eta_bound(gamma: f64, b: f64) -> f64 {
    let t = eta_bound_breakpoints();
    let g = gamma;
    match t.iter().position(|&x| g <= x * b).unwrap_or(4) {
        0 => -3.0 * g * g / 8.0 + 0.9 * b * g,
        1 => 27.0 * b * b / 50.0,
        2 => -g * g / 40.0 + 43.0 * b * g / 150.0 + 103.0 * b * b / 1125.0,
        3 => -3.0 * g * g / 232.0 + 57.0 * b * g / 290.0 + 113.0 * b * b / 435.0,
        _ => 151.0 * b * b / 150.0,
    }
}

/// The two-variable quadratic with centre `(28b/15, 16b/15)`.
pub fn prop_a2_objective(b: f64, x: f64, y: f64) -> f64 {
    -3.0 / 112.0 * (x - 28.0 * b / 15.0).powi(2) - 3.0 / 8.0 * (y - 16.0 * b / 15.0).powi(2)
}

/// Closed-form maximum of [`prop_a2_objective`] over `x, y >= 0, x + y <= gamma`.
pub fn prop_a2_closed_form(gamma: f64, b: f64) -> f64 {
    let g = gamma;
    if g <= 14.0 * b / 15.0 {
        -3.0 * g * g / 8.0 + 0.8 * b * g - 13.0 * b * b / 25.0
    } else if g <= 44.0 * b / 15.0 {
        -g * g / 40.0 + 11.0 * b * g / 75.0 - 242.0 * b * b / 1125.0
    } else {
        0.0
    }
}

/// `c0 + g.x + x'Hx/2`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    c0: f64,
    g: DVector<f64>,
    h: DMatrix<f64>,
}

impl Quadratic {
    /// Recovers the coefficients of a quadratic polynomial from point values.
    pub fn from_fn(dim: usize, f: impl Fn(&[f64]) -> f64) -> Self {
        let zero = vec![0.0; dim];
        let at = |pairs: &[(usize, f64)]| {
            let mut v = zero.clone();
            for &(i, s) in pairs {
                v[i] += s;
            }
            f(&v)
        };
        let c0 = f(&zero);
        let fp: Vec<f64> = (0..dim).map(|i| at(&[(i, 1.0)])).collect();
        let fm: Vec<f64> = (0..dim).map(|i| at(&[(i, -1.0)])).collect();
        let g = DVector::from_fn(dim, |i, _| (fp[i] - fm[i]) / 2.0);
        let mut h = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            h[(i, i)] = fp[i] + fm[i] - 2.0 * c0;
            for j in i + 1..dim {
                let v = at(&[(i, 1.0), (j, 1.0)]) - fp[i] - fp[j] + c0;
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Quadratic { c0, g, h }
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        self.c0 + self.g.dot(&x) + 0.5 * x.dot(&(&self.h * &x))
    }
}

/// `{x : eq rows hold with equality, le rows hold}`.
#[derive(Clone, Debug, Default)]
pub struct Polytope {
    pub dim: usize,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
}

impl Polytope {
    pub fn new(dim: usize) -> Self {
        Polytope {
            dim,
            eq: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn nonnegative(dim: usize) -> Self {
        let mut p = Self::new(dim);
        for i in 0..dim {
            p.add_le(unit_row(dim, i, -1.0), 0.0);
        }
        p
    }

    pub fn add_eq(&mut self, w: Vec<f64>, r: f64) {
        self.eq.push((w, r));
    }

    pub fn add_le(&mut self, w: Vec<f64>, r: f64) {
        self.le.push((w, r));
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let dot = |w: &[f64]| w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        self.eq.iter().all(|(w, r)| (dot(w) - r).abs() <= tol)
            && self.le.iter().all(|(w, r)| dot(w) <= r + tol)
    }
}

fn unit_row(dim: usize, i: usize, v: f64) -> Vec<f64> {
    let mut w = vec![0.0; dim];
    w[i] = v;
    w
}

struct FaceSearch<'a> {
    q: &'a Quadratic,
    p: &'a Polytope,
    best: Option<(f64, Vec<f64>)>,
    faces: u64,
}

impl FaceSearch<'_> {
    /// Rank, particular solution and null-space basis of the affine set cut
    /// out by the equalities plus the active rows; `None` when inconsistent.
    fn affine(&self, active: &[usize]) -> Option<(usize, DVector<f64>, DMatrix<f64>)> {
        let dim = self.p.dim;
        let rows: Vec<&(Vec<f64>, f64)> = self
            .p
            .eq
            .iter()
            .chain(active.iter().map(|&i| &self.p.le[i]))
            .collect();
        let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i].0[j]);
        let rhs = DVector::from_fn(rows.len(), |i, _| rows[i].1);
        let eig = SymmetricEigen::new(m.transpose() * &m);
        let top = eig.eigenvalues.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        let eps = 1e-10 * top;
        let mtr = m.transpose() * &rhs;
        let mut x0 = DVector::zeros(dim);
        let mut null = Vec::new();
        for (j, &lam) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(j);
            if lam > eps {
                x0 += v * (v.dot(&mtr) / lam);
            } else {
                null.push(v.into_owned());
            }
        }
        let scale = 1.0 + rhs.amax();
        if !rows.is_empty() && (&m * &x0 - &rhs).amax() > 1e-8 * scale {
            return None;
        }
        let basis = if null.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            DMatrix::from_columns(&null)
        };
        Some((dim - null.len(), x0, basis))
    }

    fn visit(&mut self, active: &mut Vec<usize>, start: usize, parent_rank: Option<usize>) {
        let Some((rank, x0, basis)) = self.affine(active) else {
            return;
        };
        if parent_rank == Some(rank) {
            return;
        }
        self.faces += 1;
        self.candidate(&x0, &basis);
        if rank < self.p.dim {
            for i in start..self.p.le.len() {
                active.push(i);
                self.visit(active, i + 1, Some(rank));
                active.pop();
            }
        }
    }

    fn candidate(&mut self, x0: &DVector<f64>, basis: &DMatrix<f64>) {
        let x = if basis.ncols() == 0 {
            x0.clone()
        } else {
            let reduced = basis.transpose() * &self.q.h * basis;
            let rhs = -(basis.transpose() * (&self.q.h * x0 + &self.q.g));
            let eig = SymmetricEigen::new(reduced);
            let top = eig.eigenvalues.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
            if eig.eigenvalues.iter().any(|v| v.abs() <= 1e-9 * top) {
                return;
            }
            let mut z = DVector::zeros(basis.ncols());
            for (j, &mu) in eig.eigenvalues.iter().enumerate() {
                let u = eig.eigenvectors.column(j);
                z += u * (u.dot(&rhs) / mu);
            }
            x0 + basis * z
        };
        let xs = x.as_slice();
        if !self.p.contains(xs, 1e-9) {
            return;
        }
        let v = self.q.eval(xs);
        if self.best.as_ref().is_none_or(|(b, _)| v > *b) {
            self.best = Some((v, xs.to_vec()));
        }
    }
}

/// Exact maximum of a quadratic over a bounded polytope. Every face is
/// visited; a face whose reduced Hessian is nonsingular contributes its
/// unique stationary point if feasible. A maximizer on a face with singular
/// reduced Hessian can be slid to a smaller face without changing the value,
/// so the maximum over candidates is the true maximum. Returns the value, a
/// maximizer and the number of faces visited, or `None` for an empty set.
pub fn maximize_quadratic(q: &Quadratic, p: &Polytope) -> Option<(f64, Vec<f64>, u64)> {
    assert_eq!(q.dim(), p.dim, "quadratic and polytope dimensions differ");
    let mut s = FaceSearch {
        q,
        p,
        best: None,
        faces: 0,
    };
    s.visit(&mut Vec::new(), 0, None);
    s.best.map(|(v, x)| (v, x, s.faces))
}

/// Outcome of one numerical verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub prop: String,
    pub domain: String,
    pub samples: u64,
    /// Largest value of the checked left-hand side that was found.
    pub value: f64,
    pub bound: f64,
    /// Largest excess `lhs - rhs` over all evaluated points; negative means slack.
    pub max_violation: f64,
    /// `-max_violation`: the smallest `rhs - lhs`; pass iff it is at least `-tolerance`.
    pub min_slack: f64,
    pub argmax: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attained: Option<bool>,
}

impl VerifyReport {
    fn new(prop: impl Into<String>, domain: impl Into<String>, tolerance: f64) -> Self {
        VerifyReport {
            prop: prop.into(),
            domain: domain.into(),
            samples: 0,
            value: f64::NEG_INFINITY,
            bound: 0.0,
            max_violation: f64::NEG_INFINITY,
            min_slack: f64::INFINITY,
            argmax: Vec::new(),
            tolerance,
            pass: false,
            exact: None,
            grid: None,
            sampled: None,
            attained: None,
        }
    }

    fn finish(mut self) -> Self {
        self.min_slack = -self.max_violation;
        self.pass = self.max_violation <= self.tolerance && self.attained != Some(false);
        self
    }
}

/// Best value and maximizer from a deterministic, chunked parallel sweep.
fn par_best<F>(count: u64, seed: u64, f: F) -> (f64, Vec<f64>)
where
    F: Fn(&mut ChaCha8Rng) -> Option<(f64, Vec<f64>)> + Sync,
{
    const CHUNK: u64 = 4096;
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(ci),
            );
            let todo = CHUNK.min(count - ci * CHUNK);
            let mut best = (f64::NEG_INFINITY, Vec::new());
            for _ in 0..todo {
                if let Some((v, x)) = f(&mut rng) {
                    if v > best.0 {
                        best = (v, x);
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, Vec::new()),
            |a, b| if b.0 > a.0 { b } else { a },
        )
}

/// Uniform point of the simplex `{x >= 0 : sum x = total}` in `dim` coordinates.
fn dirichlet(rng: &mut impl Rng, dim: usize, total: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    if s == 0.0 || dim == 0 {
        return vec![0.0; dim];
    }
    e.into_iter().map(|v| v / s * total).collect()
}

/// Uniform point of `{x >= 0 : sum x <= gamma}`.
fn simplex_interior(rng: &mut impl Rng, dim: usize, gamma: f64) -> Vec<f64> {
    let mut v = dirichlet(rng, dim + 1, gamma);
    v.pop();
    v
}

fn check_gamma_b(gamma: f64, b: f64) -> Result<()> {
    if !(gamma.is_finite() && b.is_finite() && gamma >= 0.0 && b >= 0.0) {
        return input(format!(
            "gamma and b must be finite and nonnegative (got {gamma}, {b})"
        ));
    }
    Ok(())
}

/// Supports of the sparse candidate maximizers of `eta` (indices into `x2..x10`).
const ETA_SUPPORTS: [&[usize]; 5] = [&[8], &[0, 7], &[0, 1, 6], &[0, 1, 2, 5], &[0, 1, 2, 3, 4]];
const GRID_CAP: u64 = 50_000_000;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn compositions(
    parts: usize,
    total: usize,
    prefix: &mut Vec<usize>,
    out: &mut dyn FnMut(&[usize]),
) {
    if prefix.len() == parts {
        out(prefix);
        return;
    }
    let used: usize = prefix.iter().sum();
    for v in 0..=total - used {
        prefix.push(v);
        compositions(parts, total, prefix, out);
        prefix.pop();
    }
}

/// Checks the five-branch bound on `max eta` over the simplex of budget `gamma`.
///
/// The maximum is computed exactly over the whole simplex, on a grid of step
/// `gamma / resolution` over the sparse supports, and by 10^4 random
/// samples. The bound must dominate all three and be attained by the exact
/// maximum and, within grid error, by the grid maximum.
pub fn verify_eta_bound(gamma: f64, b: f64, resolution: usize) -> Result<VerifyReport> {
    check_gamma_b(gamma, b)?;
    if resolution == 0 {
        return input("resolution must be positive");
    }
    let grid_points: u64 = ETA_SUPPORTS
        .iter()
        .map(|s| binomial((resolution + s.len()) as u64, s.len() as u64))
        .sum();
    if grid_points > GRID_CAP {
        return resource(format!(
            "grid of {grid_points} points exceeds the cap of {GRID_CAP}"
        ));
    }
    let mut rep = VerifyReport::new(
        "eta-bound",
        format!("gamma = {gamma}, b = {b}, step = gamma/{resolution}"),
        BOUND_TOL,
    );
    let bound = eta_bound(gamma, b);

    let q = Quadratic::from_fn(9, |x| eta(b, x));
    let mut poly = Polytope::nonnegative(9);
    poly.add_le(vec![1.0; 9], gamma);
    let (exact, exact_x, _) = maximize_quadratic(&q, &poly).expect("the simplex is nonempty");

    let step = gamma / resolution as f64;
    let (grid, grid_x) = ETA_SUPPORTS
        .par_iter()
        .map(|support| {
            let mut best = (f64::NEG_INFINITY, Vec::new());
            let mut x = vec![0.0; 9];
            compositions(support.len(), resolution, &mut Vec::new(), &mut |c| {
                for (&i, &m) in support.iter().zip(c) {
                    x[i] = m as f64 * step;
                }
                let v = eta(b, &x);
                if v > best.0 {
                    best = (v, x.clone());
                }
            });
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, Vec::new()),
            |a, c| if c.0 > a.0 { c } else { a },
        );

    let samples = 10_000u64;
    let (sampled, sampled_x) = par_best(samples, gamma.to_bits() ^ b.to_bits(), |rng| {
        let x = simplex_interior(rng, 9, gamma);
        Some((eta(b, &x), x))
    });

    rep.samples = samples + grid_points + 1;
    rep.exact = Some(exact);
    rep.grid = Some(grid);
    rep.sampled = Some(sampled);
    rep.bound = bound;
    let (value, argmax) = [(exact, exact_x), (grid, grid_x), (sampled, sampled_x)]
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |a, c| {
            if c.0 > a.0 {
                c
            } else {
                a
            }
        });
    rep.value = value;
    rep.argmax = argmax;
    rep.max_violation = value - bound;
    // Gradient of eta on the simplex is bounded by b + 3 gamma / 2 in each coordinate.
    let grid_err = (b + 1.5 * gamma) * step * 5.0 + BOUND_TOL;
    rep.attained = Some(bound - exact <= BOUND_TOL && bound - grid <= grid_err);
    Ok(rep.finish())
}

/// Compares the closed-form maximum of the two-variable quadratic with an
/// exact face enumeration and a `(resolution+1)^2` grid.
pub fn verify_prop_a2(gamma: f64, b: f64, resolution: usize) -> Result<VerifyReport> {
    check_gamma_b(gamma, b)?;
    if resolution == 0 {
        return input("resolution must be positive");
    }
    let closed = prop_a2_closed_form(gamma, b);
    let q = Quadratic::from_fn(2, |x| prop_a2_objective(b, x[0], x[1]));
    let mut poly = Polytope::nonnegative(2);
    poly.add_le(vec![1.0, 1.0], gamma);
    let (exact, x, _) = maximize_quadratic(&q, &poly).expect("the triangle is nonempty");
    let step = gamma / resolution as f64;
    let mut grid = f64::NEG_INFINITY;
    for i in 0..=resolution {
        for j in 0..=resolution - i {
            grid = grid.max(prop_a2_objective(b, i as f64 * step, j as f64 * step));
        }
    }
    let mut rep = VerifyReport::new(
        "prop-a2",
        format!("gamma = {gamma}, b = {b}, step = gamma/{resolution}"),
        BOUND_TOL,
    );
    rep.samples = ((resolution + 1) * (resolution + 2) / 2) as u64 + 1;
    rep.value = exact;
    rep.bound = closed;
    rep.argmax = x;
    rep.exact = Some(exact);
    rep.grid = Some(grid);
    rep.max_violation = (exact - closed).abs().max(grid - closed);
    let grid_err = (b + gamma) * step * 2.0 + BOUND_TOL;
    rep.attained = Some(closed - grid <= grid_err);
    Ok(rep.finish())
}

/// Constraint on `a6` in a proposition, with `half = (n - 4k)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum A6Rule {
    Free,
    EqK,
    EqHalf,
    LeHalf,
    GeHalf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BoundRule {
    Xi,
    /// `n^2/3 + kn/3 - k^2/6`.
    OnlyA1,
    /// `n^2/3 + 2k^2` up to `n/6`, then `n^2/4 + kn - k^2`.
    OnlyA2,
}

/// The inequalities `max f <= bound` over sub-regions of profile space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhiProp {
    Phi1OnlyA1,
    Phi1OnlyA2,
    Phi1NoA5A6,
    Phi1SmallK,
    Phi21,
    Phi22A6EqK,
    Phi22A6EqHalf,
    Phi22,
    Phi23,
    Phi61,
    Phi62A3A5,
    Phi62A3A4,
    Phi3A6Zero,
    Phi31,
    Phi32,
    Phi33,
}

struct PropShape {
    kinds: &'static [PhiKind],
    zero: [bool; 6],
    a6: A6Rule,
    d_ge_half: bool,
    bound: BoundRule,
}

fn k_low_a() -> f64 {
    (20.0 + 10f64.sqrt()) / 130.0
}

/// Lower end of the ranges for the `a3, a5` and `a6 = 0` families.
pub fn k_threshold_a3a5() -> f64 {
    (19982.0 - 35.0 * 402f64.sqrt()) / 108278.0
}

pub fn k_threshold_a3a4() -> f64 {
    (24086.0 - 35.0 * 3282f64.sqrt()) / 128054.0
}

impl PhiProp {
    pub const ALL: [PhiProp; 16] = [
        PhiProp::Phi1OnlyA1,
        PhiProp::Phi1OnlyA2,
        PhiProp::Phi1NoA5A6,
        PhiProp::Phi1SmallK,
        PhiProp::Phi21,
        PhiProp::Phi22A6EqK,
        PhiProp::Phi22A6EqHalf,
        PhiProp::Phi22,
        PhiProp::Phi23,
        PhiProp::Phi61,
        PhiProp::Phi62A3A5,
        PhiProp::Phi62A3A4,
        PhiProp::Phi3A6Zero,
        PhiProp::Phi31,
        PhiProp::Phi32,
        PhiProp::Phi33,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PhiProp::Phi1OnlyA1 => "phi1-a1",
            PhiProp::Phi1OnlyA2 => "phi1-a2",
            PhiProp::Phi1NoA5A6 => "phi1-a1234",
            PhiProp::Phi1SmallK => "phi1-small-k",
            PhiProp::Phi21 => "phi21",
            PhiProp::Phi22A6EqK => "phi22-a6-k",
            PhiProp::Phi22A6EqHalf => "phi22-a6-half",
            PhiProp::Phi22 => "phi22",
            PhiProp::Phi23 => "phi23",
            PhiProp::Phi61 => "phi61",
            PhiProp::Phi62A3A5 => "phi62-a3a5",
            PhiProp::Phi62A3A4 => "phi62-a3a4",
            PhiProp::Phi3A6Zero => "phi3-a6-zero",
            PhiProp::Phi31 => "phi31",
            PhiProp::Phi32 => "phi32",
            PhiProp::Phi33 => "phi33",
        }
    }

    pub fn parse(s: &str) -> Result<PhiProp> {
        Self::ALL
            .into_iter()
            .find(|p| p.id() == s.trim())
            .ok_or_else(|| Error::Input(format!("unknown proposition `{s}`")))
    }

    /// Closed intervals of `k/n` on which the inequality is claimed.
    pub fn k_ranges(self) -> Vec<(f64, f64)> {
        let q = 0.25;
        let sixth = 1.0 / 6.0;
        match self {
            PhiProp::Phi1OnlyA1 | PhiProp::Phi1OnlyA2 => vec![(0.0, q)],
            PhiProp::Phi1NoA5A6 | PhiProp::Phi21 | PhiProp::Phi22 => {
                vec![(0.0, k_low_a()), (0.2, q)]
            }
            PhiProp::Phi1SmallK => vec![(0.0, 0.125)],
            PhiProp::Phi22A6EqK => vec![(0.0, sixth)],
            PhiProp::Phi22A6EqHalf | PhiProp::Phi23 | PhiProp::Phi61 | PhiProp::Phi33 => {
                vec![(sixth, q)]
            }
            PhiProp::Phi62A3A5 | PhiProp::Phi3A6Zero | PhiProp::Phi31 | PhiProp::Phi32 => {
                vec![(k_threshold_a3a5(), q)]
            }
            PhiProp::Phi62A3A4 => vec![(k_threshold_a3a4(), q)],
        }
    }

    fn shape(self) -> PropShape {
        use PhiKind::*;
        let none = [false; 6];
        let only = |keep: &[usize]| {
            let mut z = [true; 6];
            for &i in keep {
                z[i - 1] = false;
            }
            z
        };
        let s = |kinds: &'static [PhiKind], zero: [bool; 6], a6: A6Rule| PropShape {
            kinds,
            zero,
            a6,
            d_ge_half: false,
            bound: BoundRule::Xi,
        };
        match self {
            PhiProp::Phi1OnlyA1 => PropShape {
                bound: BoundRule::OnlyA1,
                ..s(&[Phi1], only(&[1]), A6Rule::Free)
            },
            PhiProp::Phi1OnlyA2 => PropShape {
                bound: BoundRule::OnlyA2,
                ..s(&[Phi1], only(&[2]), A6Rule::Free)
            },
            PhiProp::Phi1NoA5A6 => s(&[Phi1], only(&[1, 2, 3, 4]), A6Rule::Free),
            PhiProp::Phi1SmallK => s(&[Phi1], none, A6Rule::Free),
            PhiProp::Phi21 => s(&[Phi21], none, A6Rule::Free),
            PhiProp::Phi22A6EqK => s(&[Phi22], none, A6Rule::EqK),
            PhiProp::Phi22A6EqHalf => s(&[Phi22], none, A6Rule::EqHalf),
            PhiProp::Phi22 => s(&[Phi22], none, A6Rule::LeHalf),
            PhiProp::Phi23 => s(&[Phi23], none, A6Rule::GeHalf),
            PhiProp::Phi61 => s(&[Phi61], only(&[3, 5]), A6Rule::Free),
            PhiProp::Phi62A3A5 => PropShape {
                d_ge_half: true,
                ..s(&[Phi62], only(&[3, 5]), A6Rule::Free)
            },
            PhiProp::Phi62A3A4 => PropShape {
                d_ge_half: true,
                ..s(&[Phi62], only(&[3, 4]), A6Rule::Free)
            },
            PhiProp::Phi3A6Zero => s(&[Phi31, Phi32], only(&[1, 2, 3, 4, 5]), A6Rule::Free),
            PhiProp::Phi31 => s(&[Phi31], none, A6Rule::Free),
            PhiProp::Phi32 => s(&[Phi32], none, A6Rule::LeHalf),
            PhiProp::Phi33 => s(&[Phi33], none, A6Rule::GeHalf),
        }
    }

    pub fn describe(self) -> String {
        let sh = self.shape();
        let f = sh
            .kinds
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let zeros: Vec<String> = (0..6)
            .filter(|&i| sh.zero[i])
            .map(|i| format!("a{}", i + 1))
            .collect();
        let mut parts = vec![format!("max of {f}")];
        if !zeros.is_empty() {
            parts.push(format!("{} = 0", zeros.join(" = ")));
        }
        match sh.a6 {
            A6Rule::Free => {}
            A6Rule::EqK => parts.push("a6 = k".into()),
            A6Rule::EqHalf => parts.push("a6 = (n-4k)/2".into()),
            A6Rule::LeHalf => parts.push("a6 <= (n-4k)/2".into()),
            A6Rule::GeHalf => parts.push("a6 >= (n-4k)/2".into()),
        }
        if sh.d_ge_half {
            parts.push("d >= (b+c)/2".into());
        }
        parts.join(", ")
    }

    pub fn contains_k(self, k: f64) -> bool {
        self.k_ranges()
            .iter()
            .any(|&(lo, hi)| k >= lo - 1e-12 && k <= hi + 1e-12)
    }

    /// `count` values of `k/n` spread over the stated range, endpoints included.
    pub fn k_values(self, count: usize) -> Vec<f64> {
        let ranges = self.k_ranges();
        let total: f64 = ranges.iter().map(|(a, b)| b - a).sum();
        (0..count)
            .map(|j| {
                let mut t = if count == 1 {
                    0.0
                } else {
                    total * j as f64 / (count - 1) as f64
                };
                for &(lo, hi) in &ranges {
                    if t <= hi - lo + 1e-15 {
                        return (lo + t).min(hi);
                    }
                    t -= hi - lo;
                }
                ranges.last().unwrap().1
            })
            .collect()
    }

    fn bound(self, k: f64) -> f64 {
        match self.shape().bound {
            BoundRule::Xi => xi(1.0, k.min(0.25)).expect("k within [0, 1/4]").value,
            BoundRule::OnlyA1 => 1.0 / 3.0 + k / 3.0 - k * k / 6.0,
            BoundRule::OnlyA2 if k <= 1.0 / 6.0 => 1.0 / 3.0 + 2.0 * k * k,
            BoundRule::OnlyA2 => 0.25 + k - k * k,
        }
    }

    fn polytope(self, k: f64) -> Polytope {
        let sh = self.shape();
        let half = (1.0 - 4.0 * k) / 2.0;
        let mut p = Polytope::new(9);
        let mut sum_a = vec![0.0; 9];
        sum_a[..6].fill(1.0);
        p.add_eq(sum_a, k);
        p.add_eq(
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0, 2.0, 1.0],
            1.0 - 4.0 * k,
        );
        for i in 0..9 {
            if i < 6 && sh.zero[i] {
                p.add_eq(unit_row(9, i, 1.0), 0.0);
            } else {
                p.add_le(unit_row(9, i, -1.0), 0.0);
            }
        }
        match sh.a6 {
            A6Rule::Free => {}
            A6Rule::EqK => p.add_eq(unit_row(9, A6, 1.0), k),
            A6Rule::EqHalf => p.add_eq(unit_row(9, A6, 1.0), half),
            A6Rule::LeHalf => p.add_le(unit_row(9, A6, 1.0), half),
            A6Rule::GeHalf => p.add_le(unit_row(9, A6, -1.0), -half),
        }
        if sh.d_ge_half {
            let mut w = vec![0.0; 9];
            w[B] = 0.5;
            w[C] = 0.5;
            w[D] = -1.0;
            p.add_le(w, 0.0);
        }
        p
    }

    fn sample(self, rng: &mut impl Rng, k: f64) -> Option<[f64; 9]> {
        let sh = self.shape();
        let half = (1.0 - 4.0 * k) / 2.0;
        let (a6, free): (Option<f64>, Vec<usize>) = {
            let others: Vec<usize> = (0..5).filter(|&i| !sh.zero[i]).collect();
            let mut lo_hi =
                |lo: f64, hi: f64| (hi >= lo).then(|| lo + (hi - lo) * rng.gen::<f64>());
            match sh.a6 {
                A6Rule::Free if sh.zero[A6] => (Some(0.0), others),
                A6Rule::Free => (None, (0..6).filter(|&i| !sh.zero[i]).collect()),
                A6Rule::EqK => (Some(k), others),
                A6Rule::EqHalf => (Some(half), others),
                A6Rule::LeHalf => (lo_hi(0.0, half.min(k)), others),
                A6Rule::GeHalf => (lo_hi(half.clamp(0.0, k), k), others),
            }
        };
        let mut x = [0.0; 9];
        let rest = match a6 {
            Some(v) => {
                x[A6] = v;
                k - v
            }
            None if sh.a6 != A6Rule::Free => return None,
            None => k,
        };
        if rest < -1e-15 || (free.is_empty() && rest > 1e-15) {
            return None;
        }
        for (i, v) in free.iter().zip(dirichlet(rng, free.len(), rest.max(0.0))) {
            x[*i] = v;
        }
        let s = (1.0 - 4.0 * k).max(0.0);
        for _ in 0..200 {
            let w = dirichlet(rng, 3, s);
            let (b, c, d) = (w[0] / 3.0, w[1] / 2.0, w[2]);
            if !sh.d_ge_half || d >= (b + c) / 2.0 {
                x[B] = b;
                x[C] = c;
                x[D] = d;
                return Some(x);
            }
        }
        None
    }

    fn eval(self, x: &[f64]) -> f64 {
        let p = OmegaPoint::from_slice(x);
        self.shape()
            .kinds
            .iter()
            .map(|&kind| phi(kind, &p))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Exact maximum of `kind` over `poly`, taking every polynomial piece of
/// `kind` separately with its region constraints.
fn exact_max(kind: PhiKind, poly: &Polytope) -> Option<(f64, Vec<f64>)> {
    let pieces = if kind.is_piecewise() {
        PhiPiece::all()
    } else {
        vec![PhiPiece {
            side: Side::Low,
            g: 0,
            h: 0,
        }]
    };
    let results: Vec<Option<(f64, Vec<f64>)>> = pieces
        .par_iter()
        .map(|&piece| {
            let q =
                Quadratic::from_fn(9, |x| phi_on_piece(kind, &OmegaPoint::from_slice(x), piece));
            let mut p = poly.clone();
            if kind.is_piecewise() {
                for (w, r) in piece.constraints() {
                    p.add_le(w, r);
                }
            }
            maximize_quadratic(&q, &p).map(|(v, x, _)| (v, x))
        })
        .collect();
    results
        .into_iter()
        .flatten()
        .fold(None, |best: Option<(f64, Vec<f64>)>, c| match best {
            Some(b) if b.0 >= c.0 => Some(b),
            _ => Some(c),
        })
}

/// Verifies one proposition at `k/n = k` with `n = 1`: the exact maximum over
/// the stated region, and the maximum over `samples` random points, must both
/// stay within [`BOUND_TOL`] of the bound, and sampling must not beat the
/// exact maximum.
pub fn verify_phi_proposition(
    prop: PhiProp,
    k: f64,
    samples: u64,
    seed: u64,
) -> Result<VerifyReport> {
    if !prop.contains_k(k) {
        let ranges: Vec<String> = prop
            .k_ranges()
            .iter()
            .map(|(a, b)| format!("[{a:.6}, {b:.6}]"))
            .collect();
        return domain(format!(
            "{} is stated for k/n in {} (got {k})",
            prop.id(),
            ranges.join(" u ")
        ));
    }
    let k = k.clamp(0.0, 0.25);
    let bound = prop.bound(k);
    let poly = prop.polytope(k);
    let exact = prop
        .shape()
        .kinds
        .iter()
        .filter_map(|&kind| exact_max(kind, &poly))
        .fold(None, |best: Option<(f64, Vec<f64>)>, c| match best {
            Some(b) if b.0 >= c.0 => Some(b),
            _ => Some(c),
        });
    let seed = seed ^ (prop as u64).wrapping_mul(0x51_7CC1_B727_220A) ^ k.to_bits();
    let (sampled, sampled_x) = par_best(samples, seed, |rng| {
        prop.sample(rng, k).map(|x| (prop.eval(&x), x.to_vec()))
    });
    let mut rep = VerifyReport::new(
        prop.id(),
        format!("k/n = {k}, {}", prop.describe()),
        BOUND_TOL,
    );
    rep.samples = samples;
    rep.bound = bound;
    rep.sampled = Some(sampled);
    let (ev, ex) = exact.clone().unwrap_or((f64::NEG_INFINITY, Vec::new()));
    rep.exact = Some(ev);
    if let Some((_, x)) = &exact {
        // Re-evaluate through the piecewise evaluators as an independent check.
        let direct = prop.eval(x);
        rep.attained =
            Some((direct - ev).abs() <= 1e-9 * (1.0 + ev.abs()) && sampled <= ev + BOUND_TOL);
    } else {
        rep.attained = Some(false);
    }
    let (value, argmax) = if sampled > ev {
        (sampled, sampled_x)
    } else {
        (ev, ex)
    };
    rep.value = value;
    rep.argmax = argmax;
    rep.max_violation = value - bound;
    Ok(rep.finish())
}

/// Every proposition whose range contains `k`.
pub fn verify_phi_propositions(k: f64, samples: u64, seed: u64) -> Vec<VerifyReport> {
    PhiProp::ALL
        .into_iter()
        .filter(|p| p.contains_k(k))
        .map(|p| verify_phi_proposition(p, k, samples, seed).expect("k is inside the range"))
        .collect()
}

/// A random profile with `n = 1` and `k/n` uniform in `[0, 1/4]`.
pub fn sample_omega(rng: &mut impl Rng) -> OmegaPoint {
    let k = 0.25 * rng.gen::<f64>();
    sample_omega_at(rng, k)
}

pub fn sample_omega_at(rng: &mut impl Rng, k: f64) -> OmegaPoint {
    let a = dirichlet(rng, 6, k);
    let w = dirichlet(rng, 3, 1.0 - 4.0 * k);
    OmegaPoint::new(
        [a[0], a[1], a[2], a[3], a[4], a[5]],
        w[0] / 3.0,
        w[1] / 2.0,
        w[2],
    )
}

/// Random nonnegative profile with some coordinates zeroed, to exercise boundaries.
fn sample_mixed(rng: &mut impl Rng) -> OmegaPoint {
    let mut p = sample_omega(rng);
    for i in 0..6 {
        if rng.gen_bool(0.2) {
            p.a[i] = 0.0;
        }
    }
    if rng.gen_bool(0.2) {
        p.d = (p.b + p.c) / 2.0;
    }
    if rng.gen_bool(0.1) {
        p.a[3] = p.b * [1.0, 1.2, 56.0 / 15.0, 7.6, 2.0][rng.gen_range(0..5)];
    }
    p
}

/// Pointwise identities and inequalities among the bound functions, each
/// checked at `samples` random profiles. Identities use a relative
/// tolerance of [`IDENTITY_TOL`]; inequalities allow that much excess.
pub fn identity_checks(samples: u64, seed: u64) -> Vec<VerifyReport> {
    type Check = fn(&mut ChaCha8Rng) -> Option<(f64, Vec<f64>)>;
    fn excess(lhs: f64, rhs: f64) -> f64 {
        (lhs - rhs) / (1.0 + lhs.abs().max(rhs.abs()))
    }
    fn both(lhs: f64, rhs: f64) -> f64 {
        excess(lhs, rhs).abs()
    }
    let checks: Vec<(&str, &str, Check)> = vec![
        (
            "psi-identity",
            "psi = (3b+2c+d)^2/3 - (c^2+cd+d^2)/3",
            |r| {
                let p = sample_mixed(r);
                Some((
                    both(psi(p.b, p.c, p.d), psi_identity_form(p.b, p.c, p.d)),
                    p.to_array().to_vec(),
                ))
            },
        ),
        ("phi21-difference", "PHI1 - PHI21 = a6^2/2", |r| {
            let p = sample_mixed(r);
            let d = phi(PhiKind::Phi1, &p) - phi(PhiKind::Phi21, &p);
            Some((both(d, p.a[5] * p.a[5] / 2.0), p.to_array().to_vec()))
        }),
        ("phi22-difference", "PHI1 - PHI22 = (b+c)a6/2", |r| {
            let p = sample_mixed(r);
            let d = phi(PhiKind::Phi1, &p) - phi(PhiKind::Phi22, &p);
            Some((both(d, (p.b + p.c) * p.a[5] / 2.0), p.to_array().to_vec()))
        }),
        ("phi3-decomposition", "PHI3i = PHI2i + varphi", |r| {
            let p = sample_mixed(r);
            let f = varphi(p.a[3], p.b, p.c, p.d);
            let worst = (0..3)
                .map(|i| {
                    let k3 = [PhiKind::Phi31, PhiKind::Phi32, PhiKind::Phi33][i];
                    let k2 = [PhiKind::Phi21, PhiKind::Phi22, PhiKind::Phi23][i];
                    both(phi(k3, &p), phi(k2, &p) + f)
                })
                .fold(0.0, f64::max);
            Some((worst, p.to_array().to_vec()))
        }),
        ("phi2-below-phi1", "max(PHI21, PHI22) <= PHI1", |r| {
            let p = sample_mixed(r);
            let l = phi(PhiKind::Phi21, &p).max(phi(PhiKind::Phi22, &p));
            Some((excess(l, phi(PhiKind::Phi1, &p)), p.to_array().to_vec()))
        }),
        ("phi3-below-phi6", "max(PHI31, PHI32) <= PHI6", |r| {
            let p = sample_mixed(r);
            let l = phi(PhiKind::Phi31, &p).max(phi(PhiKind::Phi32, &p));
            Some((excess(l, phi(PhiKind::Phi6, &p)), p.to_array().to_vec()))
        }),
        ("phi3-below-phi2", "PHI3i <= PHI2i", |r| {
            let p = sample_mixed(r);
            let worst = [
                (PhiKind::Phi31, PhiKind::Phi21),
                (PhiKind::Phi32, PhiKind::Phi22),
                (PhiKind::Phi33, PhiKind::Phi23),
            ]
            .iter()
            .map(|&(a, b)| excess(phi(a, &p), phi(b, &p)))
            .fold(f64::NEG_INFINITY, f64::max);
            Some((worst, p.to_array().to_vec()))
        }),
        (
            "phi3-below-phi4-phi5",
            "PHI3i <= PHI4i if d <= (b+c)/2, else <= PHI5i",
            |r| {
                let p = sample_mixed(r);
                let low = p.d <= (p.b + p.c) / 2.0;
                let worst = (0..3)
                    .map(|i| {
                        let k3 = [PhiKind::Phi31, PhiKind::Phi32, PhiKind::Phi33][i];
                        let other = if low {
                            [PhiKind::Phi41, PhiKind::Phi42, PhiKind::Phi43][i]
                        } else {
                            [PhiKind::Phi51, PhiKind::Phi52, PhiKind::Phi53][i]
                        };
                        excess(phi(k3, &p), phi(other, &p))
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                Some((worst, p.to_array().to_vec()))
            },
        ),
        (
            "phi6-below-phi61-phi62",
            "PHI6 <= PHI61 if d <= (b+c)/2, else <= PHI62",
            |r| {
                let p = sample_mixed(r);
                let other = if p.d <= (p.b + p.c) / 2.0 {
                    PhiKind::Phi61
                } else {
                    PhiKind::Phi62
                };
                Some((
                    excess(phi(PhiKind::Phi6, &p), phi(other, &p)),
                    p.to_array().to_vec(),
                ))
            },
        ),
        ("varphi-nonpositive", "varphi <= 0", |r| {
            let p = sample_mixed(r);
            Some((
                excess(varphi(p.a[3], p.b, p.c, p.d), 0.0),
                p.to_array().to_vec(),
            ))
        }),
        (
            "g-hat-upper",
            "g_hat <= min(45x^2/8 + 61xy/10 + 151y^2/150, 45x^2/8 + 7xy)",
            |r| {
                let (x, y) = (r.gen::<f64>() * 10.0, r.gen::<f64>());
                let m = (45.0 * x * x / 8.0 + 6.1 * x * y + 151.0 * y * y / 150.0)
                    .min(45.0 * x * x / 8.0 + 7.0 * x * y);
                Some((excess(g_hat(x, y), m), vec![x, y]))
            },
        ),
        (
            "g-h-alpha-upper",
            "g_alpha, h_alpha below their two quadratic majorants",
            |r| {
                let (x, y, al) = (
                    r.gen::<f64>() * 4.0,
                    r.gen::<f64>(),
                    r.gen::<f64>().clamp(1e-3, 0.999),
                );
                let gm = (7.5 * al * x * x + 6.5 * x * y + y * y / (8.0 * al))
                    .min(7.5 * al * x * x + 7.0 * x * y);
                let hm = (7.5 * al * x * x + 4.5 * x * y + y * y / (8.0 * al))
                    .min(7.5 * al * x * x + 5.0 * x * y);
                Some((
                    excess(g_alpha(x, y, al), gm).max(excess(h_alpha(x, y, al), hm)),
                    vec![x, y, al],
                ))
            },
        ),
        (
            "shift-a5-into-a6",
            "PHI(a1..a4, 0, a5+a6) - PHI = a5^2/2 + a5 a6",
            |r| {
                let p = sample_mixed(r);
                let mut q = p;
                q.a[5] += q.a[4];
                q.a[4] = 0.0;
                let d = phi(PhiKind::Phi, &q) - phi(PhiKind::Phi, &p);
                Some((
                    both(d, p.a[4] * p.a[4] / 2.0 + p.a[4] * p.a[5]),
                    p.to_array().to_vec(),
                ))
            },
        ),
        (
            "shift-a6-into-a1",
            "PHI <= PHI(a1+a6, a2..a5, 0) when k <= n/8",
            |r| {
                let k = 0.125 * r.gen::<f64>();
                let p = sample_omega_at(r, k);
                let mut q = p;
                q.a[0] += q.a[5];
                q.a[5] = 0.0;
                Some((
                    excess(phi(PhiKind::Phi, &p), phi(PhiKind::Phi, &q)),
                    p.to_array().to_vec(),
                ))
            },
        ),
        (
            "three-configuration-reduction",
            "PHI <= max over merging a1..a4 into a1, into a2, or into a3 and a4",
            |r| {
                let p = sample_mixed(r);
                let [a1, a2, a3, a4, a5, a6] = p.a;
                let s = a1 + a2 + a3 + a4;
                let with = |a: [f64; 6]| phi(PhiKind::Phi, &OmegaPoint { a, ..p });
                let mut best =
                    with([s, 0.0, 0.0, 0.0, a5, a6]).max(with([0.0, s, 0.0, 0.0, a5, a6]));
                if a3 + a4 > 0.0 {
                    let f = 1.0 + (a1 + a2) / (a3 + a4);
                    best = best.max(with([0.0, 0.0, f * a3, f * a4, a5, a6]));
                }
                Some((excess(phi(PhiKind::Phi, &p), best), p.to_array().to_vec()))
            },
        ),
    ];
    checks
        .into_iter()
        .enumerate()
        .map(|(i, (id, text, f))| {
            let (worst, x) = par_best(samples, seed.wrapping_add(i as u64 * 7919), f);
            let mut rep = VerifyReport::new(id, text, IDENTITY_TOL);
            rep.samples = samples;
            rep.value = worst;
            rep.bound = 0.0;
            rep.max_violation = worst;
            rep.argmax = x;
            rep.finish()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rho {
    Rho1,
    Rho2,
}

/// `g1 x^2 + g2 x + g3` plus `g_{1/2}(x,b) + h_{1/2}(x,c)` or `g_hat(x,b) + h_{1/4}(x,c)`.
pub fn rho(which: Rho, b: f64, c: f64, gammas: [f64; 3], x: f64) -> f64 {
    let base = gammas[0] * x * x + gammas[1] * x + gammas[2];
    base + match which {
        Rho::Rho1 => g_alpha(x, b, 0.5) + h_alpha(x, c, 0.5),
        Rho::Rho2 => g_hat(x, b) + h_alpha(x, c, 0.25),
    }
}

/// Midpoint convexity of `rho` at `pairs` random pairs from `[0, 10(b+c)+1]`.
pub fn convexity_check(
    which: Rho,
    b: f64,
    c: f64,
    gammas: [f64; 3],
    pairs: u64,
    seed: u64,
) -> Result<VerifyReport> {
    if gammas[0] < -7.0 {
        return domain(format!("convexity needs gamma1 >= -7 (got {})", gammas[0]));
    }
    if !(b >= 0.0 && c >= 0.0) {
        return input("b and c must be nonnegative");
    }
    let span = 10.0 * (b + c) + 1.0;
    let (worst, x) = par_best(pairs, seed, |r| {
        let (x, y) = (r.gen::<f64>() * span, r.gen::<f64>() * span);
        let f = |t: f64| rho(which, b, c, gammas, t);
        let (fx, fy, fm) = (f(x), f(y), f((x + y) / 2.0));
        let scale = 1.0 + fx.abs().max(fy.abs());
        Some(((fm - (fx + fy) / 2.0) / scale, vec![x, y]))
    });
    let mut rep = VerifyReport::new(
        format!("{which:?}").to_ascii_lowercase() + "-convexity",
        format!("b = {b}, c = {c}, gammas = {gammas:?}"),
        IDENTITY_TOL,
    );
    rep.samples = pairs;
    rep.value = worst;
    rep.max_violation = worst;
    rep.argmax = x;
    Ok(rep.finish())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiScanReport {
    pub points: u64,
    /// Smallest normalized slack `(xi - q)/n^2` for each of the three lower quadratics.
    pub min_slack: [f64; 3],
    /// Largest normalized jump between adjacent pieces at an interior breakpoint.
    pub max_jump: f64,
    pub pass: bool,
}

/// Checks the three quadratic lower bounds on `xi` and its continuity at
/// every interior breakpoint, for each `n` and `k_steps + 1` values of `k`.
pub fn xi_gap_scan(n_values: &[f64], k_steps: usize) -> Result<XiScanReport> {
    let tol = 1e-12;
    let mut min_slack = [f64::INFINITY; 3];
    let mut max_jump: f64 = 0.0;
    let mut points = 0;
    for &n in n_values {
        if !(n > 0.0 && n.is_finite()) {
            return input(format!("n must be positive (got {n})"));
        }
        let n2 = n * n;
        for j in 0..=k_steps {
            let k = n / 4.0 * j as f64 / k_steps.max(1) as f64;
            let x = xi(n, k)?.value;
            let lower = [
                n2 / 3.0 + k * n / 3.0 - k * k / 6.0,
                n2 / 4.0 + k * n - k * k,
                3.0 * k * n - 4.5 * k * k,
            ];
            for (m, q) in min_slack.iter_mut().zip(lower) {
                *m = m.min((x - q) / n2);
            }
            points += 1;
        }
        for (i, &t) in xi_breakpoints()[..4].iter().enumerate() {
            let k = t * n;
            max_jump = max_jump.max((xi_piece(i + 1, n, k) - xi_piece(i + 2, n, k)).abs() / n2);
        }
    }
    let pass = min_slack.iter().all(|&s| s >= -tol) && max_jump <= tol;
    Ok(XiScanReport {
        points,
        min_slack,
        max_jump,
        pass,
    })
}
