//! Gauge-distance obstacles and their derivative calculus.
//!
//! For a domain `U`, a body `K` and exterior data `φ`,
//! `ρ(x) = min_{y ∈ ∂U} γ_K(x − y) + φ(y)` in `U` and `ρ = φ` outside. The
//! lower obstacle is `−ρ̄` with `ρ̄ = ρ_{−K,−φ}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{golden_min, BoundaryPoint, DomainSpec, ExteriorData};
use crate::geometry::ConvexBody;
use crate::grid::Grid;
use crate::{outer, Error, Mat2, Point, Result};

/// Default number of boundary samples.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 720;
/// Default relative tolerance for grouping near-minimal boundary samples.
pub const CLOSEST_TOL_REL: f64 = 1e-6;
/// `det Q` at or below this value marks a ridge node.
pub const DET_Q_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Rho,
    RhoBar,
}

/// `ρ` or `ρ̄` for fixed `(U, K, φ)`, with the boundary pre-sampled.
#[derive(Debug, Clone)]
pub struct Obstacle {
    domain: DomainSpec,
    /// `K` for `ρ`, `−K` for `ρ̄`.
    body: ConvexBody,
    phi: ExteriorData,
    sign: f64,
    boundary: Vec<BoundaryPoint>,
    phi_boundary: Vec<f64>,
}

/// Closest boundary points of an interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestSet {
    /// Refined boundary parameter and objective value per cluster.
    pub clusters: Vec<(f64, f64)>,
    /// The near-minimal samples cover the whole boundary.
    pub degenerate: bool,
    pub value: f64,
}

impl ClosestSet {
    pub fn unique(&self) -> Option<f64> {
        (self.clusters.len() == 1 && !self.degenerate).then(|| self.clusters[0].0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryJet {
    pub t: f64,
    pub y: Point,
    pub normal: Point,
    pub lambda: f64,
    pub mu: Point,
    /// `Dγ°(μ)`, the characteristic direction.
    pub dir: Point,
    /// `D²γ°(μ)`.
    pub polar_hess: Mat2,
    pub x_mat: Mat2,
    pub d2rho: Mat2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorHessian {
    pub jet: BoundaryJet,
    pub rho: f64,
    /// `ρ(x) − φ(y) = γ(x − y)`.
    pub dist: f64,
    pub w: Mat2,
    pub q: Mat2,
    pub det_q: f64,
    pub d2rho: Mat2,
    /// `|x − y − (ρ(x) − φ(y)) Dγ°(μ)|`.
    pub residual: f64,
}

impl Obstacle {
    pub fn new(
        domain: &DomainSpec,
        k: &ConvexBody,
        phi: &ExteriorData,
        side: Side,
        samples: usize,
    ) -> Result<Self> {
        domain.validate()?;
        phi.validate()?;
        if k.dim() != domain.dim() {
            return Err(Error::validation("body", "body and domain dimensions differ"));
        }
        if samples < 8 && domain.dim() == 2 {
            return Err(Error::validation("geometry.boundary_samples", "need at least 8"));
        }
        let (body, sign) = match side {
            Side::Rho => (k.clone(), 1.0),
            Side::RhoBar => (k.reflect()?, -1.0),
        };
        let boundary: Vec<BoundaryPoint> = domain
            .boundary_params(samples)
            .into_iter()
            .map(|t| domain.boundary_point(t))
            .collect();
        let phi_boundary = boundary.iter().map(|b| sign * phi.value(&b.y)).collect();
        Ok(Self {
            domain: domain.clone(),
            body,
            phi: phi.clone(),
            sign,
            boundary,
            phi_boundary,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    fn phi_jet(&self, x: &Point) -> (f64, Point, Mat2) {
        let (v, g, h) = self.phi.jet(x);
        (self.sign * v, self.sign * g, self.sign * h)
    }

    fn objective(&self, x: &Point, t: f64) -> f64 {
        let y = self.domain.boundary_point(t).y;
        self.body.gauge(&(x - y)) + self.sign * self.phi.value(&y)
    }

    fn sample_objectives(&self, x: &Point) -> Vec<f64> {
        self.boundary
            .iter()
            .zip(&self.phi_boundary)
            .map(|(b, p)| self.body.gauge(&(x - b.y)) + p)
            .collect()
    }

    fn refine(&self, x: &Point, lo: f64, hi: f64, fallback: (f64, f64)) -> (f64, f64) {
        if self.domain.dim() == 1 {
            return fallback;
        }
        let f = |t: f64| self.objective(x, t);
        let mut t = golden_min(&f, lo, hi, 1e-13);
        if self.body.is_smooth() {
            t = self.polish(x, t, 1e-6 * (hi - lo));
        }
        let v = f(t);
        if v <= fallback.1 {
            (t.rem_euclid(1.0), v)
        } else {
            fallback
        }
    }

    /// Bisection on the sign of the tangential derivative of the objective
    /// around `t`; golden-section search alone stops near `sqrt(eps)`.
    fn polish(&self, x: &Point, t: f64, width: f64) -> f64 {
        let slope = |t: f64| -> Option<f64> {
            let bp = self.domain.boundary_point(t);
            let jet = self.body.gauge_jet(&(x - bp.y)).ok()?;
            let dphi = self.sign * self.phi.grad(&bp.y);
            Some((dphi - jet.grad).dot(&bp.tangent))
        };
        let (mut a, mut b) = (t - width, t + width);
        match (slope(a), slope(b)) {
            (Some(sa), Some(sb)) if sa < 0.0 && sb > 0.0 => {}
            _ => return t,
        }
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            match slope(mid) {
                Some(v) if v < 0.0 => a = mid,
                Some(_) => b = mid,
                None => return t,
            }
        }
        0.5 * (a + b)
    }

    fn spacing(&self) -> f64 {
        1.0 / self.boundary.len() as f64
    }

    /// `ρ(x)` (or `ρ̄(x)`).
    pub fn eval(&self, x: &Point) -> f64 {
        if !self.domain.contains(x) {
            return self.sign * self.phi.value(x);
        }
        let vals = self.sample_objectives(x);
        let (j, v) = argmin(&vals);
        let t = self.boundary[j].t;
        let d = self.spacing();
        self.refine(x, t - d, t + d, (t, v)).1
    }

    pub fn closest_points(&self, x: &Point, tol_rel: f64) -> ClosestSet {
        let vals = self.sample_objectives(x);
        let m = vals.len();
        let (_, fmin) = argmin(&vals);
        let fmax = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let thresh = fmin + tol_rel * (fmax - fmin) + 1e-14 * (1.0 + fmin.abs());
        let marked: Vec<bool> = vals.iter().map(|v| *v <= thresh).collect();
        let d = self.spacing();
        if marked.iter().all(|b| *b) && m > 2 {
            return ClosestSet {
                clusters: vec![(self.boundary[0].t, fmin)],
                degenerate: true,
                value: fmin,
            };
        }
        let mut clusters = Vec::new();
        if self.domain.dim() == 1 {
            for (j, b) in self.boundary.iter().enumerate() {
                if marked[j] {
                    clusters.push((b.t, vals[j]));
                }
            }
        } else {
            let start = marked.iter().position(|b| !b).unwrap_or(0);
            let mut run: Vec<usize> = Vec::new();
            for step in 1..=m {
                let j = (start + step) % m;
                if marked[j] {
                    run.push(j);
                } else if !run.is_empty() {
                    clusters.push(self.refine_run(x, &run, &vals, d));
                    run.clear();
                }
            }
            if !run.is_empty() {
                clusters.push(self.refine_run(x, &run, &vals, d));
            }
        }
        let value = clusters.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        ClosestSet {
            clusters,
            degenerate: false,
            value,
        }
    }

    fn refine_run(&self, x: &Point, run: &[usize], vals: &[f64], d: f64) -> (f64, f64) {
        let best = run
            .iter()
            .copied()
            .min_by(|a, b| vals[*a].total_cmp(&vals[*b]))
            .expect("nonempty run");
        let t = self.boundary[best].t;
        self.refine(x, t - d, t + d, (t, vals[best]))
    }

    /// `λ, μ, X, D²ρ(y)` at the boundary point with parameter `t`.
    pub fn boundary_jet(&self, t: f64) -> Result<BoundaryJet> {
        let bp = self.domain.boundary_point(t);
        let (_, dphi, d2phi) = self.phi_jet(&bp.y);
        let nu = bp.normal;
        let g0 = self.body.support(&dphi);
        if g0 >= 1.0 {
            return Err(Error::Precondition(format!(
                "polar gauge of the exterior-data gradient is {g0:.6} >= 1 at boundary parameter {t}"
            )));
        }
        let g = |lam: f64| self.body.support(&(dphi + lam * nu)) - 1.0;
        let mut hi = 1.0;
        let mut guard = 0;
        while g(hi) <= 0.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::Degenerate("no bracket for the boundary multiplier".into()));
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-12 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut lambda = 0.5 * (lo + hi);
        for _ in 0..3 {
            let jet = self.body.support_jet(&(dphi + lambda * nu))?;
            let slope = jet.grad.dot(&nu);
            if slope > 0.0 {
                let next = lambda - (jet.value - 1.0) / slope;
                if next > 0.0 {
                    lambda = next;
                }
            }
        }
        let mu = dphi + lambda * nu;
        let jet = self.body.support_jet(&mu)?;
        if !jet.hess_defined {
            return Err(Error::Precondition(
                "the body must be smooth with positive curvature for boundary jets".into(),
            ));
        }
        let dir = jet.grad;
        let trans = dir.dot(&nu);
        if trans <= 1e-12 * dir.norm() {
            return Err(Error::Degenerate(format!(
                "transversality fails at boundary parameter {t}: <Dγ°(μ), ν> = {trans:e}"
            )));
        }
        let x_mat = outer(&dir, &nu) / trans;
        let p = Mat2::identity() - x_mat;
        let d2rho = p.transpose() * (d2phi + lambda * bp.d2d) * p;
        Ok(BoundaryJet {
            t: bp.t,
            y: bp.y,
            normal: nu,
            lambda,
            mu,
            dir,
            polar_hess: jet.hess,
            x_mat,
            d2rho: 0.5 * (d2rho + d2rho.transpose()),
        })
    }

    /// `D²ρ(x) = D²ρ(y) Q(x)^{-1}` with `Q = I − (ρ(x) − φ(y)) W`.
    pub fn interior_hessian(&self, x: &Point) -> Result<InteriorHessian> {
        if !self.domain.contains(x) {
            return Err(Error::Domain("interior Hessian requested outside the domain".into()));
        }
        let cs = self.closest_points(x, CLOSEST_TOL_REL);
        let t = cs.unique().ok_or_else(|| {
            Error::Degenerate(format!("point ({}, {}) has no unique closest boundary point", x.x, x.y))
        })?;
        let jet = self.boundary_jet(t)?;
        self.hessian_from_jet(x, jet, cs.value)
    }

    fn hessian_from_jet(&self, x: &Point, jet: BoundaryJet, rho: f64) -> Result<InteriorHessian> {
        let dist = self.body.gauge(&(x - jet.y));
        let w = -jet.polar_hess * jet.d2rho;
        let q = Mat2::identity() - dist * w;
        let det_q = q.determinant();
        if det_q.abs() <= DET_Q_FLOOR {
            return Err(Error::Degenerate(format!("det Q = {det_q:e} near the ridge")));
        }
        let qinv = q.try_inverse().ok_or_else(|| Error::Degenerate("Q is singular".into()))?;
        let d2rho = jet.d2rho * qinv;
        let residual = (x - jet.y - dist * jet.dir).norm();
        Ok(InteriorHessian {
            jet,
            rho,
            dist,
            w,
            q,
            det_q,
            d2rho: 0.5 * (d2rho + d2rho.transpose()),
            residual,
        })
    }

    /// Samples `ξᵀ D²ρ ξ` along the characteristic from `y(t)` and checks it
    /// against an RK4 integration of `Ṁ = −M D²γ°(μ) M`.
    pub fn characteristic_monotonicity(
        &self,
        t: f64,
        xis: &[Point],
        samples: usize,
    ) -> Result<CharacteristicReport> {
        let jet = self.boundary_jet(t)?;
        let w = -jet.polar_hess * jet.d2rho;
        let at = |s: f64| jet.y + s * jet.dir;
        let phi_y = self.sign * self.phi.value(&jet.y);

        let diam = self
            .domain
            .bounding_box()
            .map(|(a, b)| (b - a).norm().max(b.x - a.x))
            .unwrap_or(1.0);
        let probe = 400;
        let ds = diam / jet.dir.norm() / probe as f64;
        let mut end = 0.0;
        let mut reason = StopReason::Exit;
        for i in 1..=probe * 4 {
            let s = i as f64 * ds;
            let x = at(s);
            if !self.domain.contains(&x) {
                reason = StopReason::Exit;
                break;
            }
            if (Mat2::identity() - s * w).determinant() <= DET_Q_FLOOR {
                reason = StopReason::DetQFloor;
                break;
            }
            let own = self.body.gauge(&(x - jet.y)) + phi_y;
            if self.eval(&x) < own - 1e-9 * (1.0 + own.abs()) {
                reason = StopReason::LostClosestPoint;
                break;
            }
            end = s;
        }
        let end = 0.98 * end;
        let formula = |s: f64| -> Option<Mat2> {
            (Mat2::identity() - s * w).try_inverse().map(|inv| jet.d2rho * inv)
        };
        let ts: Vec<f64> = (0..=samples).map(|i| end * i as f64 / samples as f64).collect();

        let substeps = 50;
        let rhs = |m: &Mat2| -m * jet.polar_hess * m;
        let mut m = jet.d2rho;
        let mut ode = vec![m];
        for win in ts.windows(2) {
            let dt = (win[1] - win[0]) / substeps as f64;
            for _ in 0..substeps {
                let k1 = rhs(&m);
                let k2 = rhs(&(m + 0.5 * dt * k1));
                let k3 = rhs(&(m + 0.5 * dt * k2));
                let k4 = rhs(&(m + dt * k3));
                m += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            ode.push(m);
        }

        let mut max_increase = f64::NEG_INFINITY;
        let mut max_rel_dev = 0.0f64;
        let mut q_table = Vec::with_capacity(xis.len());
        for xi in xis {
            let mut qs = Vec::with_capacity(ts.len());
            for (i, &s) in ts.iter().enumerate() {
                let mf = formula(s).ok_or_else(|| Error::Degenerate("Q singular on characteristic".into()))?;
                let q = xi.dot(&(mf * xi));
                let qo = xi.dot(&(ode[i] * xi));
                let scale = q.abs().max(1e-8 * (1.0 + mf.norm()));
                max_rel_dev = max_rel_dev.max((q - qo).abs() / scale);
                qs.push(q);
            }
            for pair in qs.windows(2) {
                max_increase = max_increase.max(pair[1] - pair[0]);
            }
            q_table.push(qs);
        }
        Ok(CharacteristicReport {
            t,
            y: jet.y,
            dir: jet.dir,
            ts,
            q: q_table,
            max_increase,
            riccati_max_rel_dev: max_rel_dev,
            stop: reason,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Exit,
    DetQFloor,
    LostClosestPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacteristicReport {
    pub t: f64,
    #[serde(skip)]
    pub y: Point,
    #[serde(skip)]
    pub dir: Point,
    pub ts: Vec<f64>,
    /// `q[k][i] = ξ_kᵀ D²ρ(x(ts[i])) ξ_k`.
    pub q: Vec<Vec<f64>>,
    pub max_increase: f64,
    pub riccati_max_rel_dev: f64,
    pub stop: StopReason,
}

/// The eight directions `(cos kπ/8, sin kπ/8)`.
pub fn test_directions() -> Vec<Point> {
    (0..8)
        .map(|k| {
            let a = k as f64 * PI / 8.0;
            Point::new(a.cos(), a.sin())
        })
        .collect()
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, x)| if x < acc.1 { (i, x) } else { acc })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RidgeFlag {
    Exterior,
    Regular,
    /// More than one closest boundary point.
    MultiClosest,
    /// `det Q` at or below the floor.
    DetQ,
}

impl RidgeFlag {
    pub fn is_ridge(self) -> bool {
        matches!(self, Self::MultiClosest | Self::DetQ)
    }

    pub fn code(self) -> u8 {
        match self {
            Self::Exterior => 0,
            Self::Regular => 1,
            Self::MultiClosest => 2,
            Self::DetQ => 3,
        }
    }
}

/// Obstacles and ridge data on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleField {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub rho_bar: Vec<f64>,
    pub ridge: Vec<RidgeFlag>,
    /// `det Q` for `ρ`, NaN where undefined.
    pub det_q: Vec<f64>,
    /// Smallest distance from a flagged node to `∂U`.
    pub ridge_boundary_distance: f64,
}

#[derive(Debug, Clone)]
struct NodeScan {
    flag: RidgeFlag,
    det_q: f64,
    dir: Option<Point>,
}

fn scan_node(ob: &Obstacle, x: &Point, smooth: bool) -> NodeScan {
    if !ob.domain.contains(x) {
        return NodeScan {
            flag: RidgeFlag::Exterior,
            det_q: f64::NAN,
            dir: None,
        };
    }
    let cs = ob.closest_points(x, CLOSEST_TOL_REL);
    let Some(t) = cs.unique() else {
        return NodeScan {
            flag: RidgeFlag::MultiClosest,
            det_q: f64::NAN,
            dir: None,
        };
    };
    let y = ob.domain.boundary_point(t).y;
    let d = x - y;
    let dir = (d.norm() > 0.0).then(|| d / d.norm());
    let det_q = if smooth {
        match ob.boundary_jet(t) {
            Ok(jet) => {
                let dist = ob.body.gauge(&d);
                (Mat2::identity() + dist * jet.polar_hess * jet.d2rho).determinant()
            }
            Err(_) => f64::NAN,
        }
    } else {
        f64::NAN
    };
    let flag = if det_q <= DET_Q_FLOOR { RidgeFlag::DetQ } else { RidgeFlag::Regular };
    NodeScan { flag, det_q, dir }
}

/// Classifies grid nodes: several closest points, `det Q ≤ floor`, or a jump
/// of more than `π/3` in the characteristic direction between 4-neighbours.
pub fn ridge_scan(ob: &Obstacle, grid: &Grid) -> (Vec<RidgeFlag>, Vec<f64>) {
    let smooth = ob.body.is_smooth() && ob.body.is_strictly_convex();
    let scans: Vec<NodeScan> = (0..grid.len())
        .into_par_iter()
        .map(|k| scan_node(ob, &grid.node(k), smooth))
        .collect();
    let mut flags: Vec<RidgeFlag> = scans.iter().map(|s| s.flag).collect();
    let cos_limit = (PI / 3.0).cos();
    let nbrs: &[(isize, isize)] = if grid.dim == 1 { &[(1, 0)] } else { &[(1, 0), (0, 1)] };
    for k in 0..grid.len() {
        let Some(a) = scans[k].dir else { continue };
        for &(di, dj) in nbrs {
            if let Some(l) = grid.shift(k, di, dj) {
                if let Some(b) = scans[l].dir {
                    if a.dot(&b) < cos_limit {
                        for idx in [k, l] {
                            if flags[idx] == RidgeFlag::Regular {
                                flags[idx] = RidgeFlag::MultiClosest;
                            }
                        }
                    }
                }
            }
        }
    }
    (flags, scans.iter().map(|s| s.det_q).collect())
}

/// `ρ`, `ρ̄` and ridge flags on every grid node.
pub fn obstacle_field(
    domain: &DomainSpec,
    k: &ConvexBody,
    phi: &ExteriorData,
    grid: &Grid,
    samples: usize,
    with_ridges: bool,
) -> Result<ObstacleField> {
    let rho = Obstacle::new(domain, k, phi, Side::Rho, samples)?;
    let rho_bar = Obstacle::new(domain, k, phi, Side::RhoBar, samples)?;
    let eval = |ob: &Obstacle| -> Vec<f64> {
        (0..grid.len())
            .into_par_iter()
            .map(|i| ob.eval(&grid.node(i)))
            .collect()
    };
    let (r, rb) = (eval(&rho), eval(&rho_bar));
    let (ridge, det_q) = if with_ridges {
        ridge_scan(&rho, grid)
    } else {
        let flags = (0..grid.len())
            .map(|i| {
                if domain.contains(&grid.node(i)) {
                    RidgeFlag::Regular
                } else {
                    RidgeFlag::Exterior
                }
            })
            .collect();
        (flags, vec![f64::NAN; grid.len()])
    };
    let ridge_boundary_distance = ridge
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_ridge())
        .map(|(i, _)| domain.signed_distance(&grid.node(i)))
        .fold(f64::INFINITY, f64::min);
    Ok(ObstacleField {
        grid: grid.clone(),
        rho: r,
        rho_bar: rb,
        ridge,
        det_q,
        ridge_boundary_distance,
    })
}

impl ObstacleField {
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let two = self.grid.dim == 2;
        out.push_str(if two { "x,y,rho,rho_bar,ridge_flag,detQ\n" } else { "x,rho,rho_bar,ridge_flag,detQ\n" });
        for k in 0..self.grid.len() {
            let p = self.grid.node(k);
            if two {
                let _ = write!(out, "{:.16e},{:.16e},", p.x, p.y);
            } else {
                let _ = write!(out, "{:.16e},", p.x);
            }
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{},{:.16e}",
                self.rho[k],
                self.rho_bar[k],
                self.ridge[k].code(),
                self.det_q[k]
            );
        }
        out
    }
}

/// Gauge-distance barrier from an exterior tangent ball, truncated at `cap`
/// and equal to `φ` on the ball.
#[derive(Debug, Clone)]
pub struct Barrier {
    pub ball: DomainSpec,
    obstacle: Obstacle,
    pub cap: f64,
}

impl Barrier {
    pub fn new(
        domain: &DomainSpec,
        k: &ConvexBody,
        phi: &ExteriorData,
        t0: f64,
        r0: f64,
        cap: f64,
        samples: usize,
    ) -> Result<Self> {
        let ball = domain.exterior_ball(t0, r0)?;
        let obstacle = Obstacle::new(&ball, k, phi, Side::Rho, samples)?;
        Ok(Self { ball, obstacle, cap })
    }

    /// `γ₁(l) + sup|φ|` with `γ₁(l) = l · max_{|u|=1} γ₁(u)`.
    pub fn default_cap(k1: &ConvexBody, phi: &ExteriorData, l: f64) -> f64 {
        l * k1.gauge_upper_constant() + phi.sup_norm()
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let v = self.obstacle.eval(x);
        if self.obstacle.domain.contains(x) {
            v.min(self.cap)
        } else {
            v
        }
    }

    /// Largest eigenvalue of `D²ρ_B` over boundary points of the ball.
    pub fn max_boundary_hessian_eig(&self, samples: usize) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for t in self.ball.boundary_params(samples) {
            let jet = self.obstacle.boundary_jet(t)?;
            let e = if self.ball.dim() == 1 {
                jet.d2rho[(0, 0)]
            } else {
                jet.d2rho.symmetric_eigenvalues().max()
            };
            best = best.max(e);
        }
        Ok(best)
    }
}
