use std::f64::consts::PI;

use crate::{outer, Error, Point, Result};

use super::{unit, GaugeJet};

/// Periodic samples on `θ_j = jΔ` with finite-difference derivatives and a
/// cubic Hermite interpolant.
#[derive(Debug, Clone)]
struct SampleTable {
    h: Vec<f64>,
    dh: Vec<f64>,
    d2h: Vec<f64>,
    delta: f64,
}

impl SampleTable {
    fn new(h: Vec<f64>) -> Self {
        let m = h.len();
        let delta = 2.0 * PI / m as f64;
        let at = |j: isize| h[j.rem_euclid(m as isize) as usize];
        let mut dh = Vec::with_capacity(m);
        let mut d2h = Vec::with_capacity(m);
        for j in 0..m as isize {
            let (a, b, c, d, e) = (at(j - 2), at(j - 1), at(j), at(j + 1), at(j + 2));
            dh.push((a - 8.0 * b + 8.0 * d - e) / (12.0 * delta));
            d2h.push((-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * delta * delta));
        }
        Self { h, dh, d2h, delta }
    }

    /// `(H, H', H'')` at angle `theta`.
    fn interp(&self, theta: f64) -> (f64, f64, f64) {
        let m = self.h.len();
        let s = theta.rem_euclid(2.0 * PI) / self.delta;
        let fl = s.floor();
        let t = s - fl;
        let j = (fl as usize) % m;
        let k = (j + 1) % m;
        let (p0, p1, m0, m1) = (self.h[j], self.h[k], self.dh[j], self.dh[k]);
        let d = self.delta;
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * d * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * d * m1;
        let slope = ((6.0 * t2 - 6.0 * t) * p0 + (-6.0 * t2 + 6.0 * t) * p1) / d
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (3.0 * t2 - 2.0 * t) * m1;
        let curv = (1.0 - t) * self.d2h[j] + t * self.d2h[k];
        (value, slope, curv)
    }

    /// Jet of the one-homogeneous extension `|x| H(θ)`.
    fn jet(&self, x: &Point, defined: bool) -> GaugeJet {
        let r = x.norm();
        let theta = x.y.atan2(x.x);
        let (v, dv, d2v) = self.interp(theta);
        let er = x / r;
        let et = Point::new(-er.y, er.x);
        GaugeJet {
            value: r * v,
            grad: v * er + dv * et,
            hess: (v + d2v) / r * outer(&et, &et),
            hess_defined: defined,
        }
    }
}

/// Convex body stored as `M` samples of its support function. Between samples
/// the body is the circumscribed polygon `∩_j {⟨u_j, x⟩ ≤ h_j}`.
#[derive(Debug, Clone)]
pub struct SupportSamples {
    table: SampleTable,
    polar_table: SampleTable,
    /// Vertex `j` is the intersection of facet lines `j` and `j + 1`.
    vertices: Vec<Point>,
    /// Vertex angles unwrapped from `vertex_angles[0]`, nondecreasing when valid.
    vertex_angles: Vec<f64>,
    valid: bool,
    smooth: bool,
}

impl SupportSamples {
    pub fn new(h: Vec<f64>, smooth: bool) -> Result<Self> {
        let m = h.len();
        if m < 8 {
            return Err(Error::validation("body.samples", "need at least 8 support samples"));
        }
        if h.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::validation(
                "body.samples",
                "support samples must be positive and finite",
            ));
        }
        let delta = 2.0 * PI / m as f64;
        let det = delta.sin();
        let mut vertices = Vec::with_capacity(m);
        for j in 0..m {
            let k = (j + 1) % m;
            let (s0, c0) = (j as f64 * delta).sin_cos();
            let (s1, c1) = (k as f64 * delta).sin_cos();
            vertices.push(Point::new(
                (s1 * h[j] - s0 * h[k]) / det,
                (-c1 * h[j] + c0 * h[k]) / det,
            ));
        }
        let a0 = vertices[0].y.atan2(vertices[0].x) - 1e-9;
        // Coincident vertices (redundant facets) may wobble by rounding; the
        // running maximum keeps the table sorted for the binary search.
        let mut vertex_angles: Vec<f64> = vertices
            .iter()
            .map(|v| a0 + (v.y.atan2(v.x) - a0).rem_euclid(2.0 * PI))
            .collect();
        for j in 1..m {
            if vertex_angles[j] < vertex_angles[j - 1] && vertex_angles[j - 1] - vertex_angles[j] < 1e-9 {
                vertex_angles[j] = vertex_angles[j - 1];
            }
        }
        let table = SampleTable::new(h);
        let mut out = Self {
            polar_table: table.clone(),
            table,
            vertices,
            vertex_angles,
            valid: true,
            smooth,
        };
        out.valid = out.min_curvature_radius() >= -out.curvature_tolerance()
            && out.vertex_angles.windows(2).all(|w| w[0] <= w[1]);
        let g = (0..m).map(|j| out.gauge(&unit(j as f64 * delta))).collect();
        out.polar_table = SampleTable::new(g);
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.table.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.h.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.table.h
    }

    pub fn spacing(&self) -> f64 {
        self.table.delta
    }

    pub fn smooth(&self) -> bool {
        self.smooth
    }

    pub fn max_h(&self) -> f64 {
        self.table.h.iter().copied().fold(0.0, f64::max)
    }

    fn curvature_radii(&self) -> impl Iterator<Item = f64> + '_ {
        let h = &self.table.h;
        let m = h.len();
        let c = self.table.delta.cos();
        (0..m).map(move |j| {
            (h[(j + m - 1) % m] + h[(j + 1) % m] - 2.0 * c * h[j]) / (2.0 * (1.0 - c))
        })
    }

    /// Rounding floor of the discrete curvature radius.
    pub fn curvature_tolerance(&self) -> f64 {
        64.0 * f64::EPSILON * self.max_h() / (1.0 - self.table.delta.cos())
    }

    /// Minimum of the discrete radius of curvature `h + h''`.
    pub fn min_curvature_radius(&self) -> f64 {
        self.curvature_radii().fold(f64::INFINITY, f64::min)
    }

    pub fn max_curvature_radius(&self) -> f64 {
        self.curvature_radii().fold(f64::NEG_INFINITY, f64::max)
    }

    fn facet_ratio(&self, i: usize, x: &Point) -> f64 {
        let m = self.len();
        let i = i % m;
        unit(i as f64 * self.table.delta).dot(x) / self.table.h[i]
    }

    pub fn gauge(&self, x: &Point) -> f64 {
        let m = self.len();
        if !self.valid {
            return (0..m).map(|i| self.facet_ratio(i, x)).fold(f64::NEG_INFINITY, f64::max);
        }
        let a0 = self.vertex_angles[0];
        let t = a0 + (x.y.atan2(x.x) - a0).rem_euclid(2.0 * PI);
        let p = self.vertex_angles.partition_point(|a| *a <= t);
        [p + m - 1, p, p + 1]
            .into_iter()
            .map(|i| self.facet_ratio(i, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn support(&self, x: &Point) -> f64 {
        let m = self.len();
        if !self.valid {
            return self.vertices.iter().map(|v| v.dot(x)).fold(f64::NEG_INFINITY, f64::max);
        }
        let theta = x.y.atan2(x.x).rem_euclid(2.0 * PI);
        let j = ((theta / self.table.delta).floor() as usize) % m;
        [j + m - 1, j, j + 1]
            .into_iter()
            .map(|i| self.vertices[i % m].dot(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn support_jet(&self, x: &Point) -> GaugeJet {
        self.table.jet(x, self.smooth)
    }

    pub fn gauge_jet(&self, x: &Point) -> GaugeJet {
        self.polar_table.jet(x, self.smooth)
    }

    pub fn polar(&self) -> Result<Self> {
        Self::new(self.polar_table.h.clone(), self.smooth)
    }

    pub fn reflect(&self) -> Result<Self> {
        let m = self.len();
        if m % 2 != 0 {
            return Err(Error::Domain(
                "reflection of support samples needs an even sample count".into(),
            ));
        }
        let h = (0..m).map(|j| self.table.h[(j + m / 2) % m]).collect();
        Self::new(h, self.smooth)
    }
}
