use crate::{Error, Mat2, Point, Result};

use super::GaugeJet;

/// Planar polygon given by counter-clockwise vertices around the origin.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<Point>,
    /// Vertices of the polar polygon: facet normals `n_i / ⟨n_i, v_i⟩`.
    polar_vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::validation("body.vertices", "a polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::validation("body.vertices", "vertices must be finite"));
        }
        let n = vertices.len();
        let mut polar_vertices = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let e = vertices[(i + 1) % n] - a;
            let normal = Point::new(e.y, -e.x);
            let c = normal.dot(&a);
            if !(c > 0.0) {
                return Err(Error::validation(
                    "body.vertices",
                    "vertices must be counter-clockwise with the origin strictly inside",
                ));
            }
            polar_vertices.push(normal / c);
        }
        Ok(Self {
            vertices,
            polar_vertices,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Distance from the origin to each edge line.
    pub fn facet_distances(&self) -> Vec<f64> {
        self.polar_vertices.iter().map(|p| 1.0 / p.norm()).collect()
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let e0 = self.vertices[(i + 1) % n] - self.vertices[i];
            let e1 = self.vertices[(i + 2) % n] - self.vertices[(i + 1) % n];
            e0.perp(&e1) > 0.0
        })
    }

    pub fn gauge(&self, x: &Point) -> f64 {
        max_dot(&self.polar_vertices, x)
    }

    pub fn support(&self, x: &Point) -> f64 {
        max_dot(&self.vertices, x)
    }

    pub fn gauge_jet(&self, x: &Point) -> GaugeJet {
        piecewise_linear_jet(&self.polar_vertices, x)
    }

    pub fn support_jet(&self, x: &Point) -> GaugeJet {
        piecewise_linear_jet(&self.vertices, x)
    }

    pub fn polar(&self) -> Result<Self> {
        Self::new(self.polar_vertices.clone())
    }

    pub fn reflect(&self) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| -v).collect())
    }
}

fn max_dot(points: &[Point], x: &Point) -> f64 {
    points.iter().map(|p| p.dot(x)).fold(f64::NEG_INFINITY, f64::max)
}

fn piecewise_linear_jet(points: &[Point], x: &Point) -> GaugeJet {
    let value = max_dot(points, x);
    let tol = 1e-12 * value.abs().max(f64::MIN_POSITIVE);
    let active: Vec<&Point> = points.iter().filter(|p| value - p.dot(x) <= tol).collect();
    let grad = active.iter().fold(Point::zeros(), |acc, p| acc + **p) / active.len() as f64;
    GaugeJet {
        value,
        grad,
        hess: Mat2::zeros(),
        hess_defined: active.len() == 1,
    }
}
