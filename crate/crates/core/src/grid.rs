//! Uniform grids over a box and fields living on them.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{DomainSpec, ExteriorData};
use crate::{Error, Point, Result};

/// Uniform node lattice `lo + (i, j) h`, `0 ≤ i < n[0]`, `0 ≤ j < n[1]`.
/// One-dimensional grids have `n[1] = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub lo: [f64; 2],
    pub h: f64,
    pub n: [usize; 2],
}

impl Grid {
    /// Grid with spacing `h` whose nodes include the corners of the bounding
    /// box of `domain`; `h` must divide the box sides.
    pub fn covering(domain: &DomainSpec, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::validation("grid.h", "spacing must be positive"));
        }
        let (lo, hi) = domain
            .bounding_box()
            .ok_or_else(|| Error::Domain("grids need a bounded domain".into()))?;
        let count = |len: f64| -> Result<usize> {
            let c = len / h;
            if (c - c.round()).abs() > 1e-9 * c.max(1.0) {
                return Err(Error::validation("grid.h", "spacing must divide the domain box"));
            }
            Ok(c.round() as usize + 1)
        };
        let nx = count(hi.x - lo.x)?;
        let ny = if domain.dim() == 2 { count(hi.y - lo.y)? } else { 1 };
        let lo_y = if domain.dim() == 2 { lo.y } else { 0.0 };
        Ok(Self {
            dim: domain.dim(),
            lo: [lo.x, lo_y],
            h,
            n: [nx, ny],
        })
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.n[0], idx / self.n[0])
    }

    pub fn node(&self, idx: usize) -> Point {
        let (i, j) = self.ij(idx);
        self.point(i as f64, j as f64)
    }

    /// Point at fractional lattice coordinates.
    pub fn point(&self, i: f64, j: f64) -> Point {
        if self.dim == 1 {
            Point::new(self.lo[0] + i * self.h, 0.0)
        } else {
            Point::new(self.lo[0] + i * self.h, self.lo[1] + j * self.h)
        }
    }

    pub fn hi(&self) -> Point {
        self.point((self.n[0] - 1) as f64, (self.n[1] - 1) as f64)
    }

    /// Half-width of the box around its centre, in the max norm.
    pub fn box_radius(&self) -> f64 {
        let lo = self.point(0.0, 0.0);
        (self.hi() - lo).norm() / 2.0
    }

    pub fn diameter(&self) -> f64 {
        (self.hi() - self.point(0.0, 0.0)).norm()
    }

    /// Nodes lying in the open set `domain`.
    pub fn interior_nodes(&self, domain: &DomainSpec) -> Vec<usize> {
        (0..self.len()).filter(|&k| domain.contains(&self.node(k))).collect()
    }

    /// Node indices obtained by shifting `idx` by `(di, dj)`, if inside.
    pub fn shift(&self, idx: usize, di: isize, dj: isize) -> Option<usize> {
        let (i, j) = self.ij(idx);
        let (a, b) = (i as isize + di, j as isize + dj);
        (a >= 0 && b >= 0 && (a as usize) < self.n[0] && (b as usize) < self.n[1])
            .then(|| self.index(a as usize, b as usize))
    }
}

/// Values assigned outside the grid box. Never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExteriorRule {
    Zero,
    Constant { c: f64 },
    /// `c + ⟨g, x⟩`.
    Affine { c: f64, g: [f64; 2] },
    Phi { phi: ExteriorData },
    /// `Σ c_i r_i(x)`.
    Sum { terms: Vec<(f64, ExteriorRule)> },
}

impl ExteriorRule {
    pub fn value(&self, x: &Point) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { c } => *c,
            Self::Affine { c, g } => c + g[0] * x.x + g[1] * x.y,
            Self::Phi { phi } => phi.value(x),
            Self::Sum { terms } => terms.iter().map(|(c, r)| c * r.value(x)).sum(),
        }
    }

    /// `r(x + y) + r(x − y)` when it is the same for every `|y| ≥ radius`.
    pub fn far_pair_sum(&self, x: &Point, radius: f64) -> Option<f64> {
        match self {
            Self::Zero => Some(0.0),
            Self::Constant { c } => Some(2.0 * c),
            Self::Affine { c, g } => Some(2.0 * (c + g[0] * x.x + g[1] * x.y)),
            Self::Phi { phi } => phi.far_constant(radius - x.norm()).map(|v| 2.0 * v),
            Self::Sum { terms } => terms
                .iter()
                .map(|(c, r)| r.far_pair_sum(x, radius).map(|v| c * v))
                .sum(),
        }
    }

    /// `sup |rule|`, infinite for nonconstant affine rules.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { c } => c.abs(),
            Self::Affine { c, g } => {
                if g[0] == 0.0 && g[1] == 0.0 {
                    c.abs()
                } else {
                    f64::INFINITY
                }
            }
            Self::Phi { phi } => phi.sup_norm(),
            Self::Sum { terms } => terms.iter().map(|(c, r)| c.abs() * r.sup_norm()).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub exterior: ExteriorRule,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    grid: Grid,
    exterior: ExteriorRule,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Grid, values: Vec<f64>, exterior: ExteriorRule) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::validation("field.values", "length does not match the grid"));
        }
        Ok(Self {
            grid,
            values,
            exterior,
        })
    }

    pub fn from_fn(grid: Grid, exterior: ExteriorRule, f: impl Fn(&Point) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.node(k))).collect();
        Self {
            grid,
            values,
            exterior,
        }
    }

    /// `a·self + b·other` on the same grid.
    pub fn combine(&self, a: f64, other: &GridField, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Config("fields live on different grids".into()));
        }
        let exterior = if self.exterior == other.exterior && a + b == 0.0 {
            ExteriorRule::Zero
        } else {
            ExteriorRule::Sum {
                terms: vec![(a, self.exterior.clone()), (b, other.exterior.clone())],
            }
        };
        let values = self.values.iter().zip(&other.values).map(|(u, v)| a * u + b * v).collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            exterior,
        })
    }

    /// Value at an arbitrary point: bilinear inside the box, the exterior rule
    /// outside. The flag is true when interpolation was used off-node.
    pub fn sample(&self, x: &Point) -> (f64, bool) {
        let g = &self.grid;
        let fi = (x.x - g.lo[0]) / g.h;
        let fj = if g.dim == 2 { (x.y - g.lo[1]) / g.h } else { 0.0 };
        let eps = 1e-9;
        let (nx, ny) = ((g.n[0] - 1) as f64, (g.n[1] - 1) as f64);
        if fi < -eps || fj < -eps || fi > nx + eps || fj > ny + eps {
            return (self.exterior.value(x), false);
        }
        let (ri, rj) = (fi.round(), fj.round());
        if (fi - ri).abs() < eps && (fj - rj).abs() < eps {
            return (self.values[g.index(ri as usize, rj as usize)], false);
        }
        let i0 = (fi.floor().max(0.0) as usize).min(g.n[0].saturating_sub(2));
        let j0 = if g.dim == 2 { (fj.floor().max(0.0) as usize).min(g.n[1] - 2) } else { 0 };
        let (a, b) = (fi - i0 as f64, fj - j0 as f64);
        let v = |i: usize, j: usize| self.values[g.index(i, j)];
        let val = if g.dim == 1 {
            (1.0 - a) * v(i0, 0) + a * v(i0 + 1, 0)
        } else {
            (1.0 - a) * (1.0 - b) * v(i0, j0)
                + a * (1.0 - b) * v(i0 + 1, j0)
                + (1.0 - a) * b * v(i0, j0 + 1)
                + a * b * v(i0 + 1, j0 + 1)
        };
        (val, true)
    }

    /// Value at lattice offset `(i, j)` which may leave the box.
    pub fn at_lattice(&self, i: isize, j: isize) -> f64 {
        let g = &self.grid;
        if i >= 0 && j >= 0 && (i as usize) < g.n[0] && (j as usize) < g.n[1] {
            self.values[g.index(i as usize, j as usize)]
        } else {
            self.exterior.value(&g.point(i as f64, j as f64))
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .fold(self.exterior.sup_norm(), |m, v| m.max(v.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.grid.dim == 1 {
            out.push_str("x,value\n");
        } else {
            out.push_str("x,y,value\n");
        }
        for (k, v) in self.values.iter().enumerate() {
            let p = self.grid.node(k);
            if self.grid.dim == 1 {
                let _ = writeln!(out, "{:.16e},{:.16e}", p.x, v);
            } else {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", p.x, p.y, v);
            }
        }
        out
    }

    pub fn export(&self, path: &Path, format: Format) -> Result<()> {
        let text = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn to_json(&self) -> String {
        let body = FieldJson {
            grid: self.grid.clone(),
            exterior: self.exterior.clone(),
            values: self.values.clone(),
        };
        serde_json::to_string_pretty(&body).expect("grid fields serialise")
    }

    pub fn import(path: &Path, format: Format, exterior: ExteriorRule) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        match format {
            Format::Json => {
                let f: FieldJson =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                Self::new(f.grid, f.values, f.exterior)
            }
            Format::Csv => Self::from_csv(&text, exterior),
        }
    }

    pub fn from_csv(text: &str, exterior: ExteriorRule) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let dim = match header.trim() {
            "x,value" => 1,
            "x,y,value" => 2,
            other => return Err(Error::Parse(format!("unexpected CSV header {other:?}"))),
        };
        let mut rows: Vec<[f64; 3]> = Vec::new();
        for (ln, line) in lines.enumerate() {
            let parts: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("CSV line {}: {e}", ln + 2)))?;
            if parts.len() != dim + 1 {
                return Err(Error::Parse(format!("CSV line {}: wrong column count", ln + 2)));
            }
            rows.push(if dim == 1 { [parts[0], 0.0, parts[1]] } else { [parts[0], parts[1], parts[2]] });
        }
        if rows.len() < 2 {
            return Err(Error::Parse("CSV needs at least two nodes".into()));
        }
        let nx = if dim == 1 {
            rows.len()
        } else {
            rows.iter().take_while(|r| r[1] == rows[0][1]).count()
        };
        if nx < 2 || rows.len() % nx != 0 {
            return Err(Error::Parse("CSV rows do not form a rectangular grid".into()));
        }
        let ny = rows.len() / nx;
        let h = (rows[nx - 1][0] - rows[0][0]) / (nx - 1) as f64;
        let grid = Grid {
            dim,
            lo: [rows[0][0], rows[0][1]],
            h,
            n: [nx, ny],
        };
        Self::new(grid, rows.iter().map(|r| r[2]).collect(), exterior)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}
