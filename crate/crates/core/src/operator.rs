//! Monotone quadratures of translation-invariant nonlocal operators.
//!
//! An operator acts on a [`GridField`] through
//! `Iu(x) = ∫ g(δu(x, y)) K(y) dy` with `δu(x, y) = u(x + y) + u(x − y) − 2u(x)`,
//! `K(y) = c m(θ) |y|^{−n−2s}` and `g(z) = p z⁺ − q z⁻`. Linear kernels have
//! `p = q = 1`; the extremal operators use `(p, q) = (Λ, λ)` or `(λ, Λ)`.
//!
//! The integral splits into three regions:
//!
//! - lattice cells `y + [−h/2, h/2]ⁿ` whose offsets keep `x ± y` within the
//!   stencil reach. The central cell uses the second-order model of `δu`;
//!   every other cell uses `δu` at the cell centre times the exact cell mass.
//!   A second-moment correction on the axis neighbours makes the sum exact on
//!   quadratics while all weights stay positive.
//! - the static shell between the stencil reach and `R_∞`, where `x ± y`
//!   lies outside the box and `u` is given by the exterior rule.
//! - the tail `|y| > R_∞`, exact when the exterior rule is eventually
//!   constant or affine, interval-bounded otherwise.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::grid::{ExteriorRule, Grid, GridField};
use crate::{Error, Point, Result};

/// Radial panel growth factor in the static shell.
const PANEL_RATIO: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `c = 1 − s`.
    #[default]
    OneMinusS,
    /// `c = c_{n,s}/2` with `c_{n,s} = 4ˢ Γ(n/2 + s) / (π^{n/2} |Γ(−s)|)`, so
    /// that the linear operator is `−(−Δ)ˢ`.
    FractionalLaplacian,
}

impl Normalization {
    pub fn describe(&self) -> &'static str {
        match self {
            Self::OneMinusS => "c = 1 - s; local limit c_n = sigma_{n-1}/(2n)",
            Self::FractionalLaplacian => {
                "c = c_{n,s}/2, c_{n,s} = 4^s Gamma(n/2+s)/(pi^{n/2}|Gamma(-s)|); local limit 1"
            }
        }
    }
}

/// Angular factor of a custom kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Modulation {
    Constant { m: f64 },
    /// `mid + amp cos(kθ)`; `k` must be even.
    Angular { mid: f64, amp: f64, k: u32 },
}

impl Modulation {
    pub fn at(&self, theta: f64) -> f64 {
        match self {
            Self::Constant { m } => *m,
            Self::Angular { mid, amp, k } => mid + amp * (*k as f64 * theta).cos(),
        }
    }

    fn mean(&self, dim: usize) -> f64 {
        match self {
            Self::Constant { m } => *m,
            Self::Angular { mid, amp, k } => {
                if dim == 1 || *k == 0 {
                    mid + amp
                } else {
                    *mid
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    FracLaplacian,
    PucciPlus,
    PucciMinus,
    #[serde(rename = "custom_L0", alias = "custom_l0")]
    CustomL0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub s: f64,
    pub s0: f64,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub kind: KernelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<Modulation>,
    #[serde(default, rename = "R_inf", skip_serializing_if = "Option::is_none")]
    pub r_inf: Option<f64>,
    #[serde(default)]
    pub normalization: Normalization,
    /// Directions per radial shell in the two-dimensional static region.
    #[serde(default = "default_directions")]
    pub directions: usize,
}

fn default_directions() -> usize {
    16
}

impl KernelSpec {
    pub fn new(kind: KernelKind, s: f64, lambda: f64, big_lambda: f64) -> Self {
        Self {
            s,
            s0: s / 2.0,
            lambda,
            big_lambda,
            kind,
            modulation: None,
            r_inf: None,
            normalization: Normalization::OneMinusS,
            directions: default_directions(),
        }
    }

    pub fn frac_laplacian(s: f64) -> Self {
        Self::new(KernelKind::FracLaplacian, s, 1.0, 1.0)
    }

    pub fn pucci_plus(s: f64, lambda: f64, big_lambda: f64) -> Self {
        Self::new(KernelKind::PucciPlus, s, lambda, big_lambda)
    }

    pub fn pucci_minus(s: f64, lambda: f64, big_lambda: f64) -> Self {
        Self::new(KernelKind::PucciMinus, s, lambda, big_lambda)
    }

    pub fn custom(s: f64, lambda: f64, big_lambda: f64, modulation: Modulation) -> Self {
        Self {
            modulation: Some(modulation),
            ..Self::new(KernelKind::CustomL0, s, lambda, big_lambda)
        }
    }

    /// The maximal (`plus`) or minimal extremal operator with the same data.
    pub fn extremal(&self, plus: bool) -> Self {
        Self {
            kind: if plus {
                KernelKind::PucciPlus
            } else {
                KernelKind::PucciMinus
            },
            modulation: None,
            ..self.clone()
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.s0 > 0.0 && self.s0 < 1.0) {
            return Err(Error::validation("s0", "need 0 < s0 < 1"));
        }
        if !(self.s > self.s0 && self.s < 1.0) {
            return Err(Error::validation("s", "need s0 < s < 1"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::validation("lambda", "need lambda > 0"));
        }
        if !(self.lambda <= self.big_lambda && self.big_lambda.is_finite()) {
            return Err(Error::validation("lambda", "need lambda <= Lambda"));
        }
        if let Some(r) = self.r_inf {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::validation("R_inf", "must be positive"));
            }
        }
        if self.directions < 4 || self.directions % 2 != 0 {
            return Err(Error::validation("directions", "need an even count >= 4"));
        }
        if self.kind == KernelKind::CustomL0 {
            let m = self
                .modulation
                .as_ref()
                .ok_or_else(|| Error::validation("modulation", "custom_L0 needs a modulation"))?;
            if let Modulation::Angular { k, .. } = m {
                if k % 2 != 0 {
                    return Err(Error::validation("modulation", "angular order must be even"));
                }
            }
            // a(y) |y|^{n+2s} / (1 − s) must stay in [λ, Λ].
            let scale = self.norm_const(dim) / (1.0 - self.s);
            for j in 0..720 {
                let v = scale * m.at(2.0 * PI * j as f64 / 720.0);
                if v < self.lambda * (1.0 - 1e-12) || v > self.big_lambda * (1.0 + 1e-12) {
                    return Err(Error::validation(
                        "modulation",
                        format!("kernel leaves the ellipticity band at angle index {j}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Kernel prefactor `c`.
    pub fn norm_const(&self, dim: usize) -> f64 {
        let s = self.s;
        match self.normalization {
            Normalization::OneMinusS => 1.0 - s,
            Normalization::FractionalLaplacian => {
                let n = dim as f64;
                let cns = 4f64.powf(s) * gamma(n / 2.0 + s)
                    / (PI.powf(n / 2.0) * gamma(-s).abs());
                cns / 2.0
            }
        }
    }

    /// `(p, q)` in `g(z) = p z⁺ − q z⁻`.
    pub fn slopes(&self) -> (f64, f64) {
        match self.kind {
            KernelKind::FracLaplacian | KernelKind::CustomL0 => (1.0, 1.0),
            KernelKind::PucciPlus => (self.big_lambda, self.lambda),
            KernelKind::PucciMinus => (self.lambda, self.big_lambda),
        }
    }

    fn modulation_at(&self, theta: f64) -> f64 {
        match (&self.kind, &self.modulation) {
            (KernelKind::CustomL0, Some(m)) => m.at(theta),
            _ => 1.0,
        }
    }

    fn mean_modulation(&self, dim: usize) -> f64 {
        match (&self.kind, &self.modulation) {
            (KernelKind::CustomL0, Some(m)) => m.mean(dim),
            _ => 1.0,
        }
    }

    /// Kernel density `K(y)`.
    pub fn density(&self, dim: usize, y: &Point) -> f64 {
        let r = if dim == 1 { y.x.abs() } else { y.norm() };
        self.norm_const(dim) * self.modulation_at(y.y.atan2(y.x)) * r.powf(-(dim as f64) - 2.0 * self.s)
    }

    /// `∫_{|y| > r} K(y) dy`.
    pub fn tail_mass(&self, dim: usize, r: f64) -> f64 {
        self.norm_const(dim) * self.mean_modulation(dim) * sphere_measure(dim) * r.powf(-2.0 * self.s)
            / (2.0 * self.s)
    }
}

/// `σ_{n−1}`: 2 points in one dimension, `2π` in two.
pub fn sphere_measure(dim: usize) -> f64 {
    if dim == 1 {
        2.0
    } else {
        2.0 * PI
    }
}

/// Far-field bound `2 sup|u| c max(p, q) m̄ σ R^{−2s}/(2s)` for a nonconstant
/// exterior rule.
pub fn tail_bound(kernel: &KernelSpec, dim: usize, sup_u: f64, r_inf: f64) -> f64 {
    let (p, q) = kernel.slopes();
    2.0 * sup_u * p.max(q) * kernel.tail_mass(dim, r_inf)
}

fn gl(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(n).expect("positive degree"))
        .as_node_weight_pairs()
        .to_vec()
}

/// `δu(x, y)` at node `node`; the flag reports bilinear interpolation.
pub fn second_difference(u: &GridField, node: usize, y: &Point) -> (f64, bool) {
    let x = u.grid.node(node);
    let (a, fa) = u.sample(&(x + y));
    let (b, fb) = u.sample(&(x - y));
    (a + b - 2.0 * u.values[node], fa || fb)
}

/// Value with a two-sided error interval `[err_lo, err_hi] ∋ exact`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorValue {
    pub value: f64,
    pub err_lo: f64,
    pub err_hi: f64,
}

impl OperatorValue {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.err_hi - self.err_lo)
    }
}

/// Offset pair `±(di, dj)` with its combined weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub di: isize,
    pub dj: isize,
    pub weight: f64,
    offset: isize,
}

/// Terms `Σ w_k g(a_k − 2t)` whose `a_k` do not depend on the unknowns,
/// sorted for `O(log)` evaluation at any `t`.
#[derive(Debug, Clone, Default)]
pub struct Loads {
    a: Vec<f64>,
    sw: Vec<f64>,
    swa: Vec<f64>,
    /// Half-width of the quadrature and tail error at this node.
    pub err: f64,
}

impl Loads {
    fn new(mut pts: Vec<(f64, f64)>, err: f64) -> Self {
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut sw = vec![0.0];
        let mut swa = vec![0.0];
        for (a, w) in &pts {
            sw.push(sw.last().unwrap() + w);
            swa.push(swa.last().unwrap() + w * a);
        }
        Self {
            a: pts.into_iter().map(|p| p.0).collect(),
            sw,
            swa,
            err,
        }
    }

    fn split(&self, t: f64) -> (f64, f64, f64, f64) {
        let k = self.a.partition_point(|a| *a <= 2.0 * t);
        let n = self.a.len();
        (
            self.sw[k],
            self.swa[k],
            self.sw[n] - self.sw[k],
            self.swa[n] - self.swa[k],
        )
    }

    pub fn eval(&self, t: f64, p: f64, q: f64) -> f64 {
        let (wl, wal, wh, wah) = self.split(t);
        q * (wal - 2.0 * t * wl) + p * (wah - 2.0 * t * wh)
    }

    /// `(Σ c_k w_k a_k, Σ c_k w_k)` with slopes `c_k` frozen at `t`.
    pub fn linearize(&self, t: f64, p: f64, q: f64) -> (f64, f64) {
        let (wl, wal, wh, wah) = self.split(t);
        (q * wal + p * wah, q * wl + p * wh)
    }

    pub fn total_weight(&self) -> f64 {
        *self.sw.last().unwrap()
    }
}

/// Precomputed lattice weights for one kernel on one grid.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub kernel: KernelSpec,
    pub grid: Grid,
    c: f64,
    r_inf: f64,
    pairs: Vec<Pair>,
    stride: usize,
    rows: usize,
    reach: [f64; 2],
}

impl Stencil {
    pub fn new(kernel: &KernelSpec, grid: &Grid) -> Result<Self> {
        let dim = grid.dim;
        kernel.validate(dim)?;
        let r_inf = kernel.r_inf.unwrap_or(8.0 * grid.diameter());
        if r_inf < grid.box_radius() {
            return Err(Error::Config(format!(
                "R_inf = {r_inf} is smaller than the box radius {}",
                grid.box_radius()
            )));
        }
        let h = grid.h;
        let reach = [
            (grid.n[0] as f64 - 0.5) * h,
            if dim == 1 { 0.0 } else { (grid.n[1] as f64 - 0.5) * h },
        ];
        // Inside the stencil reach the lattice cells are used; the shell
        // starts no earlier than the farthest cell corner.
        let corner = (reach[0] * reach[0] + reach[1] * reach[1]).sqrt();
        let stride = 3 * grid.n[0];
        let rows = if dim == 1 { 1 } else { 3 * grid.n[1] };
        let mut out = Self {
            kernel: kernel.clone(),
            grid: grid.clone(),
            c: kernel.norm_const(dim),
            r_inf: r_inf.max(corner),
            pairs: Vec::new(),
            stride,
            rows,
            reach,
        };
        out.pairs = if dim == 1 { out.pairs_1d() } else { out.pairs_2d() };
        Ok(out)
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn r_inf(&self) -> f64 {
        self.r_inf
    }

    fn pair(&self, di: isize, dj: isize, weight: f64) -> Pair {
        Pair {
            di,
            dj,
            weight,
            offset: di + dj * self.stride as isize,
        }
    }

    fn pairs_1d(&self) -> Vec<Pair> {
        let (s, h) = (self.kernel.s, self.grid.h);
        let cm = self.c * self.kernel.modulation_at(0.0);
        // ∫_{|y| ∈ [a, b]} K and ∫ y² K over both half-lines.
        let mass = |a: f64, b: f64| 2.0 * cm * (a.powf(-2.0 * s) - b.powf(-2.0 * s)) / (2.0 * s);
        let moment =
            |a: f64, b: f64| 2.0 * cm * (b.powf(2.0 - 2.0 * s) - a.powf(2.0 - 2.0 * s)) / (2.0 - 2.0 * s);
        let n = self.grid.n[0];
        let mut w: Vec<f64> = (1..n)
            .map(|j| mass((j as f64 - 0.5) * h, (j as f64 + 0.5) * h))
            .collect();
        let central = moment(0.0, 0.5 * h) / (h * h);
        let defect: f64 = (1..n)
            .map(|j| {
                let (a, b) = ((j as f64 - 0.5) * h, (j as f64 + 0.5) * h);
                moment(a, b) - (j as f64 * h).powi(2) * mass(a, b)
            })
            .sum();
        if !w.is_empty() {
            let corrected = w[0] + central + defect / (h * h);
            w[0] = if corrected > 0.0 { corrected } else { w[0] + central };
        }
        w.into_iter()
            .enumerate()
            .map(|(k, wk)| self.pair(k as isize + 1, 0, wk))
            .collect()
    }

    fn pairs_2d(&self) -> Vec<Pair> {
        let (s, h) = (self.kernel.s, self.grid.h);
        let [n0, n1] = [self.grid.n[0] as isize, self.grid.n[1] as isize];
        let nodes = gl(8);
        let offsets: Vec<(isize, isize)> = (0..n1)
            .flat_map(|dj| (-(n0 - 1)..n0).map(move |di| (di, dj)))
            .filter(|&(di, dj)| dj > 0 || di > 0)
            .collect();
        // (mass, ∫y₁²K, ∫y₂²K) over the cell, doubled for the ± pair.
        let cells: Vec<(f64, f64, f64)> = offsets
            .par_iter()
            .map(|&(di, dj)| {
                let sub = if di.abs().max(dj) <= 3 { 4 } else { 1 };
                let hs = h / sub as f64;
                let (mut m, mut m1, mut m2) = (0.0, 0.0, 0.0);
                for a in 0..sub {
                    for b in 0..sub {
                        let x0 = (di as f64 - 0.5) * h + a as f64 * hs;
                        let y0 = (dj as f64 - 0.5) * h + b as f64 * hs;
                        for (ux, wx) in &nodes {
                            for (uy, wy) in &nodes {
                                let y = Point::new(x0 + 0.5 * hs * (ux + 1.0), y0 + 0.5 * hs * (uy + 1.0));
                                let k = self.kernel.density(2, &y) * wx * wy * 0.25 * hs * hs;
                                m += k;
                                m1 += k * y.x * y.x;
                                m2 += k * y.y * y.y;
                            }
                        }
                    }
                }
                (2.0 * m, 2.0 * m1, 2.0 * m2)
            })
            .collect();
        // Central cell: ∫ K(y) yᵀD²u y dy = A₁₁ ∂₁₁u + A₂₂ ∂₂₂u, integrated
        // exactly in r and by Gauss–Legendre in θ over each octant.
        let (mut a11, mut a22) = (0.0, 0.0);
        for oct in 0..8 {
            let (t0, t1) = (oct as f64 * PI / 4.0, (oct + 1) as f64 * PI / 4.0);
            for (u, w) in gl(24) {
                let th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * u;
                let (sn, cs) = th.sin_cos();
                let rmax = 0.5 * h / cs.abs().max(sn.abs());
                let radial = self.c * self.kernel.modulation_at(th) * rmax.powf(2.0 - 2.0 * s)
                    / (2.0 - 2.0 * s)
                    * w
                    * 0.5
                    * (t1 - t0);
                a11 += radial * cs * cs;
                a22 += radial * sn * sn;
            }
        }
        let (mut d1, mut d2) = (0.0, 0.0);
        let mut pairs: Vec<Pair> = offsets
            .iter()
            .zip(&cells)
            .map(|(&(di, dj), &(m, m1, m2))| {
                let (cx, cy) = (di as f64 * h, dj as f64 * h);
                d1 += m1 - cx * cx * m;
                d2 += m2 - cy * cy * m;
                self.pair(di, dj, m)
            })
            .collect();
        for p in pairs.iter_mut() {
            let (base, defect) = match (p.di, p.dj) {
                (1, 0) => (a11, d1),
                (0, 1) => (a22, d2),
                _ => continue,
            };
            let corrected = p.weight + (base + defect) / (h * h);
            p.weight = if corrected > 0.0 {
                corrected
            } else {
                p.weight + base / (h * h)
            };
        }
        pairs
    }

    /// Values on the extended lattice `[−n, 2n)ⁿ`, box values inside and the
    /// exterior rule elsewhere.
    pub fn extend(&self, u: &GridField) -> Vec<f64> {
        let [n0, n1] = [self.grid.n[0] as isize, self.grid.n[1] as isize];
        let off1 = if self.grid.dim == 1 { 0 } else { n1 };
        (0..self.rows * self.stride)
            .map(|e| {
                let (a, b) = ((e % self.stride) as isize, (e / self.stride) as isize);
                u.at_lattice(a - n0, b - off1)
            })
            .collect()
    }

    /// Position of a box node in the extended array.
    pub fn ext_index(&self, node: usize) -> usize {
        let (i, j) = self.grid.ij(node);
        let off1 = if self.grid.dim == 1 { 0 } else { self.grid.n[1] };
        (j + off1) * self.stride + i + self.grid.n[0]
    }

    /// Position of an extended-array entry as a box node, if it is one.
    pub fn ext_to_node(&self, e: usize) -> Option<usize> {
        let (a, b) = (e % self.stride, e / self.stride);
        let off1 = if self.grid.dim == 1 { 0 } else { self.grid.n[1] };
        let i = a.checked_sub(self.grid.n[0])?;
        let j = b.checked_sub(off1)?;
        (i < self.grid.n[0] && j < self.grid.n[1]).then(|| self.grid.index(i, j))
    }

    pub fn pair_positions(&self, e: usize, p: &Pair) -> (usize, usize) {
        ((e as isize + p.offset) as usize, (e as isize - p.offset) as usize)
    }

    fn shell_points(&self, x: &Point, rule: &ExteriorRule, radial: usize, dirs: usize) -> Vec<(f64, f64)> {
        let s = self.kernel.s;
        let nodes = gl(radial);
        let panels = |r0: f64| {
            let mut v = Vec::new();
            let mut a = r0;
            while a < self.r_inf {
                let b = (a * PANEL_RATIO).min(self.r_inf);
                v.push((a, b));
                a = b;
            }
            v
        };
        let mut out = Vec::new();
        if self.grid.dim == 1 {
            let cm = 2.0 * self.c * self.kernel.modulation_at(0.0);
            for (a, b) in panels(self.reach[0]) {
                for (u, w) in &nodes {
                    let r = 0.5 * (a + b) + 0.5 * (b - a) * u;
                    let e = Point::new(r, 0.0);
                    let val = rule.value(&(x + e)) + rule.value(&(x - e));
                    out.push((val, cm * r.powf(-1.0 - 2.0 * s) * w * 0.5 * (b - a)));
                }
            }
        } else {
            // Gauss–Legendre in θ on each sector where the exit radius from
            // the lattice rectangle is smooth.
            let alpha = self.reach[1].atan2(self.reach[0]);
            let cuts = [-alpha, alpha, PI - alpha, PI + alpha, 2.0 * PI - alpha];
            let angular = gl((dirs / 4).max(1));
            for sector in cuts.windows(2) {
                let (t0, t1) = (sector[0], sector[1]);
                for (v, wt) in &angular {
                    let th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * v;
                    let (sn, cs) = th.sin_cos();
                    let exit = (self.reach[0] / cs.abs()).min(self.reach[1] / sn.abs());
                    let cm = self.c * self.kernel.modulation_at(th) * wt * 0.5 * (t1 - t0);
                    for (a, b) in panels(exit) {
                        for (u, w) in &nodes {
                            let r = 0.5 * (a + b) + 0.5 * (b - a) * u;
                            let e = Point::new(r * cs, r * sn);
                            let val = rule.value(&(x + e)) + rule.value(&(x - e));
                            out.push((val, cm * r.powf(-1.0 - 2.0 * s) * w * 0.5 * (b - a)));
                        }
                    }
                }
            }
        }
        out
    }

    /// Static loads at `x`: the shell, the tail, and their error half-width.
    pub fn loads(&self, x: &Point, rule: &ExteriorRule) -> Loads {
        let (p, q) = self.kernel.slopes();
        let lam = p.max(q);
        let dirs = self.kernel.directions;
        let mut pts = self.shell_points(x, rule, 8, dirs);
        let coarse = if self.grid.dim == 1 {
            self.shell_points(x, rule, 4, dirs)
        } else {
            self.shell_points(x, rule, 8, 2 * dirs)
        };
        let moments = |v: &[(f64, f64)]| {
            v.iter()
                .fold((0.0, 0.0, 0.0f64), |(w, wa, am), (a, wk)| (w + wk, wa + wk * a, am.max(a.abs())))
        };
        let (w8, wa8, amax) = moments(&pts);
        let (w4, wa4, _) = moments(&coarse);
        let mut err = lam * ((wa8 - wa4).abs() + amax * (w8 - w4).abs());
        let tail = self.kernel.tail_mass(self.grid.dim, self.r_inf);
        match rule.far_pair_sum(x, self.r_inf) {
            Some(a) => pts.push((a, tail)),
            None => {
                pts.push((0.0, tail));
                err += tail_bound(&self.kernel, self.grid.dim, rule.sup_norm(), self.r_inf);
            }
        }
        Loads::new(pts, err)
    }

    /// `I_h u` at the extended position `e` with `u(x) = t`.
    pub fn node_value(&self, ext: &[f64], e: usize, t: f64, loads: &Loads) -> f64 {
        let (p, q) = self.kernel.slopes();
        let mut acc = 0.0;
        for pr in &self.pairs {
            let (a, b) = self.pair_positions(e, pr);
            let z = ext[a] + ext[b] - 2.0 * t;
            acc += pr.weight * if z > 0.0 { p * z } else { q * z };
        }
        acc + loads.eval(t, p, q)
    }

    /// `(Σ c w A, Σ c w)` over lattice pairs and loads, slopes frozen at `t`,
    /// so that `I_h u(x) = first − 2t·second` near `t`.
    pub fn node_linearize(&self, ext: &[f64], e: usize, t: f64, loads: &Loads) -> (f64, f64) {
        let (p, q) = self.kernel.slopes();
        let (mut swa, mut sw) = loads.linearize(t, p, q);
        for pr in &self.pairs {
            let (a, b) = self.pair_positions(e, pr);
            let s = ext[a] + ext[b];
            let c = if s - 2.0 * t > 0.0 { p } else { q };
            swa += c * pr.weight * s;
            sw += c * pr.weight;
        }
        (swa, sw)
    }

    /// The root `t` of the nonincreasing map `t ↦ I_h u(x)|_{u(x)=t}`.
    pub fn node_solve(&self, ext: &[f64], e: usize, loads: &Loads, t0: f64) -> f64 {
        let mut t = t0;
        for _ in 0..200 {
            let f = self.node_value(ext, e, t, loads);
            if f == 0.0 {
                break;
            }
            let (_, sw) = self.node_linearize(ext, e, t, loads);
            let step = f / (2.0 * sw);
            t += step;
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
                break;
            }
        }
        t
    }

    /// Sum of all weights multiplying `u(x)`, up to the factor `2·max(p, q)`.
    pub fn weight_sum(&self, loads: &Loads) -> f64 {
        self.pairs.iter().map(|p| p.weight).sum::<f64>() + loads.total_weight()
    }

    pub fn apply_all(&self, u: &GridField, nodes: &[usize]) -> Vec<OperatorValue> {
        let ext = self.extend(u);
        nodes
            .par_iter()
            .map(|&k| {
                let loads = self.loads(&self.grid.node(k), &u.exterior);
                let value = self.node_value(&ext, self.ext_index(k), u.values[k], &loads);
                OperatorValue {
                    value,
                    err_lo: value - loads.err,
                    err_hi: value + loads.err,
                }
            })
            .collect()
    }

    pub fn apply(&self, u: &GridField, node: usize) -> OperatorValue {
        self.apply_all(u, &[node])[0]
    }
}

pub fn apply_operator(kernel: &KernelSpec, u: &GridField, node: usize) -> Result<OperatorValue> {
    Ok(Stencil::new(kernel, &u.grid)?.apply(u, node))
}

/// CSV with header `x,value,err_lo,err_hi` (or `x,y,...`).
pub fn operator_csv(grid: &Grid, nodes: &[usize], values: &[OperatorValue]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from(if grid.dim == 1 {
        "x,value,err_lo,err_hi\n"
    } else {
        "x,y,value,err_lo,err_hi\n"
    });
    for (k, v) in nodes.iter().zip(values) {
        let p = grid.node(*k);
        if grid.dim == 1 {
            let _ = write!(out, "{:.16e},", p.x);
        } else {
            let _ = write!(out, "{:.16e},{:.16e},", p.x, p.y);
        }
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", v.value, v.err_lo, v.err_hi);
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `M⁻(u − v) ≤ Iu − Iv ≤ M⁺(u − v)` at `node`.
pub fn ellipticity_check(
    kernel: &KernelSpec,
    u: &GridField,
    v: &GridField,
    node: usize,
) -> Result<EllipticityReport> {
    let w = u.combine(1.0, v, -1.0)?;
    let iu = apply_operator(kernel, u, node)?;
    let iv = apply_operator(kernel, v, node)?;
    let lo = apply_operator(&kernel.extremal(false), &w, node)?;
    let hi = apply_operator(&kernel.extremal(true), &w, node)?;
    let middle = iu.value - iv.value;
    let scale = iu.value.abs() + iv.value.abs() + lo.value.abs() + hi.value.abs();
    let tol = iu.half_width() + iv.half_width() + lo.half_width() + hi.half_width() + 1e-10 * (1.0 + scale);
    Ok(EllipticityReport {
        lower: lo.value,
        middle,
        upper: hi.value,
        tol,
        pass: lo.value <= middle + tol && middle <= hi.value + tol,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitRow {
    pub s: f64,
    pub value: f64,
    pub limit: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalLimitReport {
    pub normalization: String,
    pub c_n: f64,
    pub rows: Vec<LimitRow>,
    pub monotone: bool,
}

/// Compares the `λ = Λ = 1` operator with `c_n Δu(x)` along `s_values`.
pub fn local_limit_probe(
    u: &GridField,
    node: usize,
    laplacian: f64,
    s_values: &[f64],
    normalization: Normalization,
) -> Result<LocalLimitReport> {
    let dim = u.grid.dim;
    let c_n = match normalization {
        Normalization::OneMinusS => sphere_measure(dim) / (2.0 * dim as f64),
        Normalization::FractionalLaplacian => 1.0,
    };
    let limit = c_n * laplacian;
    let rows = s_values
        .iter()
        .map(|&s| {
            let mut k = KernelSpec::frac_laplacian(s);
            k.normalization = normalization;
            let value = apply_operator(&k, u, node)?.value;
            Ok(LimitRow {
                s,
                value,
                limit,
                deviation: (value - limit).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation);
    Ok(LocalLimitReport {
        normalization: normalization.describe().into(),
        c_n,
        rows,
        monotone,
    })
}
