//! The open set `U` and the exterior data `φ`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::ConvexBody;
use crate::{outer, Error, Mat2, Point, Result};

/// A bounded (or, for barriers, exterior) open set in one or two dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Interval { lo: f64, hi: f64 },
    Disk { center: [f64; 2], r: f64 },
    Ellipse { center: [f64; 2], a: f64, b: f64 },
    /// Axis-aligned rectangle; its corners are nonsmooth boundary points.
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    /// `ℝ \ [lo, hi]`.
    IntervalExterior { lo: f64, hi: f64 },
    /// `ℝ² \ closed disk`.
    DiskExterior { center: [f64; 2], r: f64 },
}

/// Geometry of `∂U` at one boundary parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub t: f64,
    pub y: Point,
    /// Inward unit normal.
    pub normal: Point,
    pub tangent: Point,
    /// Curvature, positive where `U` is locally convex.
    pub curvature: f64,
    /// Hessian of the distance to `∂U` (positive inside) at `y`.
    pub d2d: Mat2,
    pub smooth: bool,
}

fn pt(a: [f64; 2]) -> Point {
    Point::new(a[0], a[1])
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |k: &str, r: &str| Err(Error::validation(k, r));
        match self {
            Self::Interval { lo, hi } | Self::IntervalExterior { lo, hi } => {
                if !(lo < hi) {
                    return bad("domain.hi", "need lo < hi");
                }
            }
            Self::Disk { r, .. } | Self::DiskExterior { r, .. } => {
                if !(*r > 0.0) {
                    return bad("domain.r", "radius must be positive");
                }
            }
            Self::Ellipse { a, b, .. } => {
                if !(*a > 0.0 && *b > 0.0) {
                    return bad("domain.a", "semi-axes must be positive");
                }
            }
            Self::Rectangle { lo, hi } => {
                if !(lo[0] < hi[0] && lo[1] < hi[1]) {
                    return bad("domain.hi", "need lo < hi componentwise");
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Interval { .. } | Self::IntervalExterior { .. } => 1,
            _ => 2,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Self::IntervalExterior { .. } | Self::DiskExterior { .. })
    }

    /// Whether the boundary is C² everywhere.
    pub fn is_c2(&self) -> bool {
        !matches!(self, Self::Rectangle { .. })
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Self::Interval { lo, hi } => *lo < x.x && x.x < *hi,
            Self::IntervalExterior { lo, hi } => x.x < *lo || x.x > *hi,
            Self::Disk { center, r } => (x - pt(*center)).norm() < *r,
            Self::DiskExterior { center, r } => (x - pt(*center)).norm() > *r,
            Self::Ellipse { center, a, b } => {
                let d = x - pt(*center);
                (d.x / a).powi(2) + (d.y / b).powi(2) < 1.0
            }
            Self::Rectangle { lo, hi } => lo[0] < x.x && x.x < hi[0] && lo[1] < x.y && x.y < hi[1],
        }
    }

    /// Smallest axis-aligned box containing `Ū`, or `None` when unbounded.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        match self {
            Self::Interval { lo, hi } => Some((Point::new(*lo, 0.0), Point::new(*hi, 0.0))),
            Self::Disk { center, r } => {
                let c = pt(*center);
                Some((c - Point::new(*r, *r), c + Point::new(*r, *r)))
            }
            Self::Ellipse { center, a, b } => {
                let c = pt(*center);
                Some((c - Point::new(*a, *b), c + Point::new(*a, *b)))
            }
            Self::Rectangle { lo, hi } => Some((pt(*lo), pt(*hi))),
            _ => None,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self.bounding_box() {
            Some((lo, hi)) => match self {
                Self::Disk { r, .. } => 2.0 * r,
                Self::Ellipse { a, b, .. } => 2.0 * a.max(*b),
                _ => (hi - lo).norm(),
            },
            None => f64::INFINITY,
        }
    }

    /// Smallest width of `U` across the coordinate directions.
    pub fn min_width(&self) -> f64 {
        match self.bounding_box() {
            Some((lo, hi)) if self.dim() == 1 => hi.x - lo.x,
            Some((lo, hi)) => (hi.x - lo.x).min(hi.y - lo.y),
            None => f64::INFINITY,
        }
    }

    pub fn boundary_point(&self, t: f64) -> BoundaryPoint {
        let t = t.rem_euclid(1.0);
        let flat = |t, y, normal: Point, smooth| BoundaryPoint {
            t,
            y,
            normal,
            tangent: Point::new(-normal.y, normal.x),
            curvature: 0.0,
            d2d: Mat2::zeros(),
            smooth,
        };
        match self {
            Self::Interval { lo, hi } => {
                if t < 0.5 {
                    flat(0.0, Point::new(*lo, 0.0), Point::new(1.0, 0.0), true)
                } else {
                    flat(0.5, Point::new(*hi, 0.0), Point::new(-1.0, 0.0), true)
                }
            }
            Self::IntervalExterior { lo, hi } => {
                if t < 0.5 {
                    flat(0.0, Point::new(*lo, 0.0), Point::new(-1.0, 0.0), true)
                } else {
                    flat(0.5, Point::new(*hi, 0.0), Point::new(1.0, 0.0), true)
                }
            }
            Self::Disk { center, r } | Self::DiskExterior { center, r } => {
                let th = 2.0 * PI * t;
                let e = Point::new(th.cos(), th.sin());
                let tangent = Point::new(-e.y, e.x);
                let interior = matches!(self, Self::Disk { .. });
                let kappa = if interior { 1.0 / r } else { -1.0 / r };
                BoundaryPoint {
                    t,
                    y: pt(*center) + *r * e,
                    normal: if interior { -e } else { e },
                    tangent,
                    curvature: kappa,
                    d2d: -kappa * outer(&tangent, &tangent),
                    smooth: true,
                }
            }
            Self::Ellipse { center, a, b } => {
                let th = 2.0 * PI * t;
                let (s, c) = th.sin_cos();
                let speed = ((a * s).powi(2) + (b * c).powi(2)).sqrt();
                let tangent = Point::new(-a * s, b * c) / speed;
                let kappa = a * b / speed.powi(3);
                BoundaryPoint {
                    t,
                    y: pt(*center) + Point::new(a * c, b * s),
                    normal: Point::new(-b * c, -a * s) / speed,
                    tangent,
                    curvature: kappa,
                    d2d: -kappa * outer(&tangent, &tangent),
                    smooth: true,
                }
            }
            Self::Rectangle { lo, hi } => {
                let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
                let mut s = t * 2.0 * (w + h);
                let corner_tol = 1e-12 * (w + h);
                let at_corner = |s: f64, len: f64| s < corner_tol || (len - s).abs() < corner_tol;
                if s < w {
                    return flat(t, Point::new(lo[0] + s, lo[1]), Point::new(0.0, 1.0), !at_corner(s, w));
                }
                s -= w;
                if s < h {
                    return flat(t, Point::new(hi[0], lo[1] + s), Point::new(-1.0, 0.0), !at_corner(s, h));
                }
                s -= h;
                if s < w {
                    return flat(t, Point::new(hi[0] - s, hi[1]), Point::new(0.0, -1.0), !at_corner(s, w));
                }
                s -= w;
                flat(t, Point::new(lo[0], hi[1] - s), Point::new(1.0, 0.0), !at_corner(s, h))
            }
        }
    }

    /// Boundary parameters of `m` uniform samples (both endpoints in 1D).
    pub fn boundary_params(&self, m: usize) -> Vec<f64> {
        if self.dim() == 1 {
            vec![0.0, 0.5]
        } else {
            (0..m).map(|j| j as f64 / m as f64).collect()
        }
    }

    /// Euclidean distance to `∂U`, positive in `U` and negative outside.
    pub fn signed_distance(&self, x: &Point) -> f64 {
        let d = match self {
            Self::Interval { lo, hi } | Self::IntervalExterior { lo, hi } => {
                (x.x - lo).abs().min((hi - x.x).abs())
            }
            Self::Disk { center, r } | Self::DiskExterior { center, r } => {
                ((x - pt(*center)).norm() - r).abs()
            }
            Self::Rectangle { lo, hi } => {
                let dx = (lo[0] - x.x).max(x.x - hi[0]);
                let dy = (lo[1] - x.y).max(x.y - hi[1]);
                if dx < 0.0 && dy < 0.0 {
                    -dx.max(dy)
                } else {
                    Point::new(dx.max(0.0), dy.max(0.0)).norm()
                }
            }
            Self::Ellipse { .. } => {
                let f = |t: f64| (self.boundary_point(t).y - x).norm();
                let m = 1024;
                let j = (0..m)
                    .min_by(|&i, &k| f(i as f64 / m as f64).total_cmp(&f(k as f64 / m as f64)))
                    .unwrap_or(0);
                let t0 = j as f64 / m as f64;
                let t = golden_min(&f, t0 - 1.0 / m as f64, t0 + 1.0 / m as f64, 1e-13);
                f(t)
            }
        };
        if self.contains(x) {
            d
        } else {
            -d
        }
    }

    /// Exterior tangent ball of radius `r0` touching `∂U` only at `y(t)`.
    pub fn exterior_ball(&self, t: f64, r0: f64) -> Result<DomainSpec> {
        if !(r0 > 0.0) {
            return Err(Error::validation("barrier.r0", "radius must be positive"));
        }
        let bp = self.boundary_point(t);
        if !bp.smooth || !self.is_bounded() {
            return Err(Error::Domain(format!(
                "no exterior tangent ball at boundary parameter {t}: boundary is not smooth there"
            )));
        }
        if bp.curvature < -1.0 / r0 {
            return Err(Error::Domain(format!(
                "exterior ball of radius {r0} does not fit at boundary parameter {t}"
            )));
        }
        Ok(if self.dim() == 1 {
            let a = bp.y.x;
            if bp.normal.x > 0.0 {
                Self::IntervalExterior { lo: a - 2.0 * r0, hi: a }
            } else {
                Self::IntervalExterior { lo: a, hi: a + 2.0 * r0 }
            }
        } else {
            let c = bp.y - r0 * bp.normal;
            Self::DiskExterior { center: [c.x, c.y], r: r0 }
        })
    }
}

/// Minimiser of a unimodal `f` on `[a, b]` by golden-section search.
pub(crate) fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Saturation `S` with `S(z) = z` for `z ≤ z1`, constant `(z1 + z2)/2` for
/// `z ≥ z2`, and `S' = 1 − P((z − z1)/(z2 − z1))` in between, where
/// `P(t) = 6t⁵ − 15t⁴ + 10t³`. Returns `(S, S', S'')`.
fn saturate(z: f64, z1: f64, z2: f64) -> (f64, f64, f64) {
    if z <= z1 {
        return (z, 1.0, 0.0);
    }
    let w = z2 - z1;
    if z >= z2 {
        return (z1 + 0.5 * w, 0.0, 0.0);
    }
    let t = (z - z1) / w;
    let p = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    let dp = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    let int_p = t.powi(4) * (2.5 + t * (-3.0 + t));
    (z1 + w * (t - int_p), 1.0 - p, -dp / w)
}

/// Exterior data `φ`, given by closed forms with saturated growth so that it
/// stays bounded on all of `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExteriorData {
    Zero,
    Constant {
        c: f64,
    },
    /// `c + a·S(|x|²)` with saturation between radii `r1 < r2`.
    Quadratic {
        #[serde(default)]
        c: f64,
        a: f64,
        r1: f64,
        r2: f64,
    },
    /// `c + sign(z) S(|z|)` with `z = ⟨g, x⟩`, saturated between `z1 < z2`.
    Linear {
        #[serde(default)]
        c: f64,
        g: [f64; 2],
        z1: f64,
        z2: f64,
    },
}

impl ExteriorData {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Quadratic { r1, r2, .. } if !(0.0 < *r1 && r1 < r2) => {
                Err(Error::validation("exterior.r2", "need 0 < r1 < r2"))
            }
            Self::Linear { z1, z2, .. } if !(0.0 < *z1 && z1 < z2) => {
                Err(Error::validation("exterior.z2", "need 0 < z1 < z2"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero) || matches!(self, Self::Constant { c } if *c == 0.0)
    }

    pub fn value(&self, x: &Point) -> f64 {
        self.jet(x).0
    }

    pub fn grad(&self, x: &Point) -> Point {
        self.jet(x).1
    }

    pub fn hess(&self, x: &Point) -> Mat2 {
        self.jet(x).2
    }

    /// `(φ, Dφ, D²φ)` at `x`.
    pub fn jet(&self, x: &Point) -> (f64, Point, Mat2) {
        match self {
            Self::Zero => (0.0, Point::zeros(), Mat2::zeros()),
            Self::Constant { c } => (*c, Point::zeros(), Mat2::zeros()),
            Self::Quadratic { c, a, r1, r2 } => {
                let (s, ds, d2s) = saturate(x.norm_squared(), r1 * r1, r2 * r2);
                (
                    c + a * s,
                    2.0 * a * ds * x,
                    *a * (2.0 * ds * Mat2::identity() + 4.0 * d2s * outer(x, x)),
                )
            }
            Self::Linear { c, g, z1, z2 } => {
                let g = pt(*g);
                let z = g.dot(x);
                let (s, ds, d2s) = saturate(z.abs(), *z1, *z2);
                let sg = if z < 0.0 { -1.0 } else { 1.0 };
                (c + sg * s, ds * g, sg * d2s * outer(&g, &g))
            }
        }
    }

    /// `sup |φ|` over `ℝⁿ`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { c } => c.abs(),
            Self::Quadratic { c, a, r1, r2 } => {
                let top = c + a * 0.5 * (r1 * r1 + r2 * r2);
                c.abs().max(top.abs())
            }
            Self::Linear { c, z1, z2, .. } => c.abs() + 0.5 * (z1 + z2),
        }
    }

    /// The constant value of `φ` on `{|z| ≥ radius}`, if `φ` is constant there.
    pub fn far_constant(&self, radius: f64) -> Option<f64> {
        match self {
            Self::Zero => Some(0.0),
            Self::Constant { c } => Some(*c),
            Self::Quadratic { c, a, r1, r2 } if radius >= *r2 => Some(c + a * 0.5 * (r1 * r1 + r2 * r2)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExteriorReport {
    /// Largest violation of `φ(x) − φ(y) ≤ γ_K(x − y)` over sampled pairs.
    pub lipschitz_violation: f64,
    pub pairs: usize,
    /// `max γ°(Dφ)` over samples of `Ū`.
    pub max_polar_gauge_grad: f64,
    /// Smallest eigenvalue of `D²φ` within `margin` of `∂U`.
    pub min_hessian_eig_near_boundary: f64,
    pub margin: f64,
    pub failures: Vec<String>,
}

impl ExteriorReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples the hypotheses on `φ`: gauge-Lipschitz bound, `γ°(Dφ) < 1` on
/// `Ū`, and convexity within `margin` of `∂U`.
pub fn validate_exterior_data(
    domain: &DomainSpec,
    k: &ConvexBody,
    phi: &ExteriorData,
    margin: f64,
    seed: u64,
) -> Result<ExteriorReport> {
    let (lo, hi) = domain
        .bounding_box()
        .ok_or_else(|| Error::Domain("exterior data validation needs a bounded domain".into()))?;
    let dim = domain.dim();
    let pad = Point::new(1.0, if dim == 2 { 1.0 } else { 0.0 }) * (0.5 * domain.diameter());
    let (blo, bhi) = (lo - pad, hi + pad);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: Point, hi: Point| {
        let x = rng.random_range(lo.x..=hi.x);
        let y = if dim == 2 { rng.random_range(lo.y..=hi.y) } else { 0.0 };
        Point::new(x, y)
    };

    let pairs = 10_000;
    let mut lipschitz_violation = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let x = draw(blo, bhi);
        let y = draw(blo, bhi);
        let v = phi.value(&x) - phi.value(&y) - k.gauge(&(x - y));
        lipschitz_violation = lipschitz_violation.max(v);
    }

    let mut max_polar = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let samples_1d: Vec<Point>;
    let inside: Box<dyn Iterator<Item = Point>> = if dim == 1 {
        let n = 4001;
        samples_1d = (0..n)
            .map(|i| Point::new(lo.x + (hi.x - lo.x) * i as f64 / (n - 1) as f64, 0.0))
            .collect();
        Box::new(samples_1d.into_iter())
    } else {
        let n = 201;
        Box::new((0..n * n).filter_map(move |i| {
            let x = Point::new(
                lo.x + (hi.x - lo.x) * (i % n) as f64 / (n - 1) as f64,
                lo.y + (hi.y - lo.y) * (i / n) as f64 / (n - 1) as f64,
            );
            (domain.signed_distance(&x) >= 0.0).then_some(x)
        }))
    };
    for x in inside {
        let g = phi.grad(&x);
        if g.norm() > 0.0 {
            max_polar = max_polar.max(k.support(&g));
        }
    }
    let params = domain.boundary_params(512);
    let offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for t in params {
        let bp = domain.boundary_point(t);
        for o in offsets {
            let x = bp.y + o * margin * bp.normal;
            let h = phi.hess(&x);
            let eig = if dim == 1 {
                h[(0, 0)]
            } else {
                h.symmetric_eigenvalues().min()
            };
            min_eig = min_eig.min(eig);
        }
    }

    let mut failures = Vec::new();
    let tol = 1e-12 * (1.0 + phi.sup_norm());
    if lipschitz_violation > tol {
        failures.push(format!(
            "gauge-Lipschitz bound violated by {lipschitz_violation:.3e} on sampled pairs"
        ));
    }
    if max_polar >= 1.0 {
        failures.push(format!("max polar gauge of Dφ on the closure is {max_polar:.6} >= 1"));
    }
    if min_eig < -tol {
        failures.push(format!(
            "φ is not convex within {margin} of the boundary (min eigenvalue {min_eig:.3e})"
        ));
    }
    Ok(ExteriorReport {
        lipschitz_violation,
        pairs,
        max_polar_gauge_grad: max_polar,
        min_hessian_eig_near_boundary: min_eig,
        margin,
        failures,
    })
}
