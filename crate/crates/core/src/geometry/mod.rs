//! Convex bodies with the origin in their interior.
//!
//! A [`ConvexBody`] carries one representation (interval, ball, ellipse,
//! polygon, support-function samples, or the lazy polar of another body) and
//! answers gauge and support-function queries together with their first and
//! second derivatives. The gauge of `K` is `γ_K(x) = inf{t > 0 : x ∈ tK}`;
//! the support function of `K` equals the gauge of its polar `K°`.
//!
//! Points are always [`Point`]s; one-dimensional bodies read only the first
//! coordinate.

mod polygon;
mod samples;
mod smoothing;

use std::f64::consts::PI;

use serde::Serialize;

use crate::{outer, Error, Mat2, Point, Result};

pub use polygon::Polygon;
pub use samples::SupportSamples;
pub use smoothing::{radial_distance, smooth_approx, SmoothingParams, SmoothingReport};

/// Default number of support-function samples (0.5° resolution).
pub const DEFAULT_SAMPLES: usize = 720;

#[derive(Debug, Clone)]
pub enum BodyRep {
    /// `[-a, b]` on the real line.
    Interval { a: f64, b: f64 },
    Ball { r: f64 },
    /// Axis-aligned ellipse with semi-axes `a` (along x) and `b` (along y).
    Ellipse { a: f64, b: f64 },
    Polygon(Polygon),
    SupportSamples(SupportSamples),
    /// The polar of the wrapped body, evaluated by swapping gauge and support.
    PolarOf(Box<ConvexBody>),
}

#[derive(Debug, Clone)]
pub struct ConvexBody {
    rep: BodyRep,
}

/// Which of the two dual functions a jet is requested for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Gauge,
    Support,
}

/// Value, gradient and Hessian of a gauge or support function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeJet {
    pub value: f64,
    pub grad: Point,
    pub hess: Mat2,
    pub hess_defined: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ValidationReport {
    pub convex: bool,
    pub strictly_convex: bool,
    /// Radius of the largest origin-centred ball inside the body.
    pub inner_radius: f64,
    /// Radius of the smallest origin-centred ball containing the body.
    pub outer_radius: f64,
    /// Minimum boundary curvature where it is positive and known.
    pub min_curvature: Option<f64>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub(crate) fn unit(theta: f64) -> Point {
    Point::new(theta.cos(), theta.sin())
}

impl ConvexBody {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::validation("body", "interval needs a, b > 0"));
        }
        Ok(Self {
            rep: BodyRep::Interval { a, b },
        })
    }

    pub fn ball(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::validation("body.r", "radius must be positive"));
        }
        Ok(Self {
            rep: BodyRep::Ball { r },
        })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::validation("body", "ellipse semi-axes must be positive"));
        }
        Ok(Self {
            rep: BodyRep::Ellipse { a, b },
        })
    }

    /// The square `[-half, half]²` as a polygon.
    pub fn square(half: f64) -> Result<Self> {
        Self::polygon(vec![
            Point::new(half, -half),
            Point::new(half, half),
            Point::new(-half, half),
            Point::new(-half, -half),
        ])
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Ok(Self {
            rep: BodyRep::Polygon(Polygon::new(vertices)?),
        })
    }

    /// Regular polygon with `n` vertices on the circle of radius `r`.
    pub fn regular_polygon(n: usize, r: f64, phase: f64) -> Result<Self> {
        let vertices = (0..n)
            .map(|i| r * unit(phase + 2.0 * PI * i as f64 / n as f64))
            .collect();
        Self::polygon(vertices)
    }

    /// Body given by samples `h(θ_j)`, `θ_j = 2πj/M`, of its support function.
    pub fn support_samples(h: Vec<f64>, smooth: bool) -> Result<Self> {
        Ok(Self {
            rep: BodyRep::SupportSamples(SupportSamples::new(h, smooth)?),
        })
    }

    /// Samples the support function of `self` on `m` uniform directions.
    pub fn to_support_samples(&self, m: usize) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::Domain("support samples are two-dimensional".into()));
        }
        let h = (0..m)
            .map(|j| self.support(&unit(2.0 * PI * j as f64 / m as f64)))
            .collect();
        Self::support_samples(h, self.is_smooth())
    }

    pub fn rep(&self) -> &BodyRep {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        match &self.rep {
            BodyRep::Interval { .. } => 1,
            BodyRep::PolarOf(b) => b.dim(),
            _ => 2,
        }
    }

    /// Boundary is C² (for sampled bodies: as claimed at construction).
    pub fn is_smooth(&self) -> bool {
        match &self.rep {
            BodyRep::Interval { .. } | BodyRep::Ball { .. } | BodyRep::Ellipse { .. } => true,
            BodyRep::Polygon(_) => false,
            BodyRep::SupportSamples(s) => s.smooth(),
            BodyRep::PolarOf(b) => b.is_smooth(),
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        match &self.rep {
            BodyRep::Interval { .. } | BodyRep::Ball { .. } | BodyRep::Ellipse { .. } => true,
            BodyRep::Polygon(_) => false,
            BodyRep::SupportSamples(s) => s.smooth() && s.min_curvature_radius() > s.curvature_tolerance(),
            BodyRep::PolarOf(b) => b.is_smooth() && b.is_strictly_convex(),
        }
    }

    /// `γ_K(x)`.
    pub fn gauge(&self, x: &Point) -> f64 {
        match &self.rep {
            BodyRep::Interval { a, b } => {
                if x.x >= 0.0 {
                    x.x / b
                } else {
                    -x.x / a
                }
            }
            BodyRep::Ball { r } => x.norm() / r,
            BodyRep::Ellipse { a, b } => ((x.x / a).powi(2) + (x.y / b).powi(2)).sqrt(),
            BodyRep::Polygon(p) => p.gauge(x),
            BodyRep::SupportSamples(s) => s.gauge(x),
            BodyRep::PolarOf(b) => b.support(x),
        }
    }

    /// `h_K(x) = sup{⟨x, y⟩ : y ∈ K} = γ_{K°}(x)`.
    pub fn support(&self, x: &Point) -> f64 {
        match &self.rep {
            BodyRep::Interval { a, b } => {
                if x.x >= 0.0 {
                    b * x.x
                } else {
                    -a * x.x
                }
            }
            BodyRep::Ball { r } => r * x.norm(),
            BodyRep::Ellipse { a, b } => ((a * x.x).powi(2) + (b * x.y).powi(2)).sqrt(),
            BodyRep::Polygon(p) => p.support(x),
            BodyRep::SupportSamples(s) => s.support(x),
            BodyRep::PolarOf(b) => b.gauge(x),
        }
    }

    pub fn eval(&self, x: &Point, which: Which) -> f64 {
        match which {
            Which::Gauge => self.gauge(x),
            Which::Support => self.support(x),
        }
    }

    /// Exact polar body. Sampled bodies map to sampled polars through the
    /// gauge evaluated on the same direction grid.
    pub fn polar(&self) -> Result<Self> {
        let rep = match &self.rep {
            BodyRep::Interval { a, b } => BodyRep::Interval {
                a: 1.0 / a,
                b: 1.0 / b,
            },
            BodyRep::Ball { r } => BodyRep::Ball { r: 1.0 / r },
            BodyRep::Ellipse { a, b } => BodyRep::Ellipse {
                a: 1.0 / a,
                b: 1.0 / b,
            },
            BodyRep::Polygon(p) => BodyRep::Polygon(p.polar()?),
            BodyRep::SupportSamples(s) => BodyRep::SupportSamples(s.polar()?),
            BodyRep::PolarOf(b) => return Ok((**b).clone()),
        };
        Ok(Self { rep })
    }

    /// The polar as a lazy view: gauge and support are swapped without
    /// resampling.
    pub fn dual(&self) -> Self {
        match &self.rep {
            BodyRep::PolarOf(b) => (**b).clone(),
            _ => Self {
                rep: BodyRep::PolarOf(Box::new(self.clone())),
            },
        }
    }

    /// `-K`, so that `γ_{-K}(x) = γ_K(-x)`.
    pub fn reflect(&self) -> Result<Self> {
        let rep = match &self.rep {
            BodyRep::Interval { a, b } => BodyRep::Interval { a: *b, b: *a },
            BodyRep::Ball { r } => BodyRep::Ball { r: *r },
            BodyRep::Ellipse { a, b } => BodyRep::Ellipse { a: *a, b: *b },
            BodyRep::Polygon(p) => BodyRep::Polygon(p.reflect()?),
            BodyRep::SupportSamples(s) => BodyRep::SupportSamples(s.reflect()?),
            BodyRep::PolarOf(b) => BodyRep::PolarOf(Box::new(b.reflect()?)),
        };
        Ok(Self { rep })
    }

    /// Gauge or support function with derivatives at `x ≠ 0`.
    pub fn jet(&self, x: &Point, which: Which) -> Result<GaugeJet> {
        let r = if self.dim() == 1 { x.x.abs() } else { x.norm() };
        if !(r > 0.0) {
            return Err(Error::Domain("gauge derivatives are undefined at the origin".into()));
        }
        let jet = match (&self.rep, which) {
            (BodyRep::Interval { a, b }, w) => {
                let slope = match (w, x.x > 0.0) {
                    (Which::Gauge, true) => 1.0 / b,
                    (Which::Gauge, false) => -1.0 / a,
                    (Which::Support, true) => *b,
                    (Which::Support, false) => -*a,
                };
                GaugeJet {
                    value: slope * x.x,
                    grad: Point::new(slope, 0.0),
                    hess: Mat2::zeros(),
                    hess_defined: true,
                }
            }
            (BodyRep::Ball { r: rad }, w) => {
                let scale = match w {
                    Which::Gauge => 1.0 / rad,
                    Which::Support => *rad,
                };
                let xh = x / r;
                GaugeJet {
                    value: scale * r,
                    grad: scale * xh,
                    hess: scale * (Mat2::identity() - outer(&xh, &xh)) / r,
                    hess_defined: true,
                }
            }
            (BodyRep::Ellipse { a, b }, w) => {
                let q = match w {
                    Which::Gauge => Mat2::new(1.0 / (a * a), 0.0, 0.0, 1.0 / (b * b)),
                    Which::Support => Mat2::new(a * a, 0.0, 0.0, b * b),
                };
                quadratic_form_jet(&q, x)
            }
            (BodyRep::Polygon(p), Which::Gauge) => p.gauge_jet(x),
            (BodyRep::Polygon(p), Which::Support) => p.support_jet(x),
            (BodyRep::SupportSamples(s), Which::Support) => s.support_jet(x),
            (BodyRep::SupportSamples(s), Which::Gauge) => s.gauge_jet(x),
            (BodyRep::PolarOf(b), Which::Gauge) => b.jet(x, Which::Support)?,
            (BodyRep::PolarOf(b), Which::Support) => b.jet(x, Which::Gauge)?,
        };
        Ok(jet)
    }

    pub fn gauge_jet(&self, x: &Point) -> Result<GaugeJet> {
        self.jet(x, Which::Gauge)
    }

    pub fn support_jet(&self, x: &Point) -> Result<GaugeJet> {
        self.jet(x, Which::Support)
    }

    /// Largest value of the gauge on unit vectors, i.e. `C` in `γ(x) ≤ C|x|`.
    pub fn gauge_upper_constant(&self) -> f64 {
        if self.dim() == 1 {
            return self.gauge(&Point::new(1.0, 0.0)).max(self.gauge(&Point::new(-1.0, 0.0)));
        }
        (0..4 * DEFAULT_SAMPLES)
            .map(|j| self.gauge(&unit(2.0 * PI * j as f64 / (4 * DEFAULT_SAMPLES) as f64)))
            .fold(0.0, f64::max)
    }

    /// Checks convexity, interior origin and curvature claims.
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let (inner, outer_r) = self.radii();
        if !(inner > 0.0) {
            failures.push("origin is not an interior point".to_string());
        }
        let (convex, strictly, curvature) = match &self.rep {
            BodyRep::Interval { .. } => (true, true, None),
            BodyRep::Ball { r } => (true, true, Some(1.0 / r)),
            BodyRep::Ellipse { a, b } => {
                let (big, small) = if a >= b { (a, b) } else { (b, a) };
                (true, true, Some(small / (big * big)))
            }
            BodyRep::Polygon(p) => {
                let ok = p.is_convex();
                if !ok {
                    failures.push("polygon vertices are not in convex position".to_string());
                }
                (ok, false, None)
            }
            BodyRep::SupportSamples(s) => {
                let rho = s.min_curvature_radius();
                let ok = rho >= -s.curvature_tolerance();
                if !ok {
                    failures.push(format!(
                        "support samples violate h'' + h >= 0 (min discrete curvature radius {rho:e})"
                    ));
                }
                let strict = ok && rho > s.curvature_tolerance();
                let curv = if strict { Some(1.0 / s.max_curvature_radius()) } else { None };
                (ok, strict, curv)
            }
            BodyRep::PolarOf(b) => {
                let r = b.validate();
                failures.extend(r.failures.iter().map(|f| format!("polar source: {f}")));
                (r.convex, b.is_smooth() && r.strictly_convex, None)
            }
        };
        ValidationReport {
            convex,
            strictly_convex: strictly,
            inner_radius: inner,
            outer_radius: outer_r,
            min_curvature: curvature,
            failures,
        }
    }

    /// `(min, max)` of the support function over unit directions.
    fn radii(&self) -> (f64, f64) {
        if self.dim() == 1 {
            let p = self.support(&Point::new(1.0, 0.0));
            let m = self.support(&Point::new(-1.0, 0.0));
            return (p.min(m), p.max(m));
        }
        let m = 4 * DEFAULT_SAMPLES;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for j in 0..m {
            let h = self.support(&unit(2.0 * PI * j as f64 / m as f64));
            lo = lo.min(h);
            hi = hi.max(h);
        }
        if let BodyRep::Polygon(p) = &self.rep {
            // Extreme values sit exactly at vertices and facet normals.
            hi = p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
            lo = p.facet_distances().into_iter().fold(f64::INFINITY, f64::min);
        }
        (lo, hi)
    }
}

/// Jet of `sqrt(xᵀ Q x)` for symmetric positive definite `Q`.
fn quadratic_form_jet(q: &Mat2, x: &Point) -> GaugeJet {
    let qx = q * x;
    let value = x.dot(&qx).sqrt();
    let grad = qx / value;
    GaugeJet {
        value,
        grad,
        hess: (q - outer(&qx, &qx) / (value * value)) / value,
        hess_defined: true,
    }
}

/// Hausdorff distance of two planar bodies through their support functions on
/// `m` directions.
pub fn hausdorff(a: &ConvexBody, b: &ConvexBody, m: usize) -> f64 {
    if a.dim() == 1 {
        let e = [Point::new(1.0, 0.0), Point::new(-1.0, 0.0)];
        return e.iter().map(|u| (a.support(u) - b.support(u)).abs()).fold(0.0, f64::max);
    }
    (0..m)
        .map(|j| {
            let u = unit(2.0 * PI * (j as f64 + 0.5) / m as f64);
            (a.support(&u) - b.support(&u)).abs()
        })
        .fold(0.0, f64::max)
}
