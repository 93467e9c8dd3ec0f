//! TOML run configuration.
//!
//! Every section except `domain`, `body`, `exterior` and `kernel` may be
//! omitted; missing keys take the defaults documented on each field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::SuiteTolerances;
use crate::domain::{DomainSpec, ExteriorData};
use crate::geometry::{ConvexBody, SmoothingParams};
use crate::obstacle::DEFAULT_BOUNDARY_SAMPLES;
use crate::operator::KernelSpec;
use crate::solver::{Problem, SolveConfig, SolverMethod};
use crate::sweep::SweepOptions;
use crate::{Error, Point, Result};

/// Environment variable overriding `output_dir`.
pub const OUT_ENV: &str = "NLGC_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    /// `[-a, b]`.
    Interval { a: f64, b: f64 },
    Ball { r: f64 },
    Ellipse { a: f64, b: f64 },
    /// `[-half, half]²`.
    Square { half: f64 },
    /// Counter-clockwise vertices around the origin.
    Polygon { vertices: Vec<[f64; 2]> },
    RegularPolygon {
        n: usize,
        r: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            Self::Interval { a, b } => ConvexBody::interval(*a, *b),
            Self::Ball { r } => ConvexBody::ball(*r),
            Self::Ellipse { a, b } => ConvexBody::ellipse(*a, *b),
            Self::Square { half } => ConvexBody::square(*half),
            Self::Polygon { vertices } => {
                ConvexBody::polygon(vertices.iter().map(|v| Point::new(v[0], v[1])).collect())
            }
            Self::RegularPolygon { n, r, phase } => ConvexBody::regular_polygon(*n, *r, *phase),
        }
    }

    pub fn dim(&self) -> usize {
        if matches!(self, Self::Interval { .. }) {
            1
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Grid spacing; at least 32 nodes across the narrowest width of `U`.
    pub h: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { h: 1.0 / 64.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub method: SolverMethod,
    /// Problem solved by the `solve` subcommand.
    pub problem: Problem,
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Boundary samples for the gauge-distance minimisation.
    pub boundary_samples: usize,
    pub hamiltonian_directions: usize,
    /// Interior window margin `τ` for Hölder tables and operator bounds.
    pub window_tau: f64,
    /// Contact tolerance as a multiple of `tol_residual`.
    pub contact_factor: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            method: SolverMethod::PolicyIteration,
            problem: Problem::DoubleObstacle,
            tol_residual: 1e-8,
            max_iters: 100_000,
            boundary_samples: DEFAULT_BOUNDARY_SAMPLES,
            hamiltonian_directions: 32,
            window_tau: 0.25,
            contact_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    /// Rows of the gauge and polar tables.
    pub samples: usize,
    /// Band width around `∂U` for the exterior-data convexity check.
    pub validation_margin: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            samples: 360,
            validation_margin: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Battery {
    /// Five one-dimensional instances.
    #[default]
    Default,
    /// Two instances on the unit disk.
    Disk,
    /// The instance described by this file.
    Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub battery: Battery,
    pub grad_violation: f64,
    pub equivalence: f64,
    pub equivalence_per_h_2d: f64,
    pub monotonicity_slack: f64,
    pub hessian_rel: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        let t = SuiteTolerances::default();
        Self {
            battery: Battery::Default,
            grad_violation: t.grad_violation,
            equivalence: t.equivalence,
            equivalence_per_h_2d: t.equivalence_per_h_2d,
            monotonicity_slack: t.monotonicity_slack,
            hessian_rel: t.hessian_rel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub body: BodySpec,
    pub exterior: ExteriorData,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub smoothing: SmoothingParams,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub verify: VerifySection,
    /// Seed for randomized sampling.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads for node-parallel work; 0 uses all cores.
    #[serde(default)]
    pub max_parallel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub k_max: u32,
    pub alpha: f64,
    pub constant_spread: f64,
    pub operator_spread: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        let o = SweepOptions::default();
        Self {
            k_max: o.k_max,
            alpha: o.alpha,
            constant_spread: o.constant_spread,
            operator_spread: o.operator_spread,
        }
    }
}

fn default_seed() -> u64 {
    7
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if self.body.dim() != self.domain.dim() {
            return Err(Error::validation(
                "body.kind",
                format!("body is {}-dimensional but the domain is {}-dimensional", self.body.dim(), self.domain.dim()),
            ));
        }
        let body = self.body.build()?;
        let rep = body.validate();
        if !rep.ok() {
            return Err(Error::validation("body", format!("{rep:?}")));
        }
        if !(self.grid.h > 0.0) {
            return Err(Error::validation("grid.h", "must be positive"));
        }
        if self.geometry.samples < 4 {
            return Err(Error::validation("geometry.samples", "need at least 4"));
        }
        if !(self.solver.contact_factor >= 1.0) {
            return Err(Error::validation("solver.contact_factor", "must be at least 1"));
        }
        if !(self.solver.window_tau >= 0.0) {
            return Err(Error::validation("solver.window_tau", "must be nonnegative"));
        }
        if self.sweep.k_max == 0 {
            return Err(Error::validation("sweep.k_max", "must be at least 1"));
        }
        if !(self.sweep.alpha > 0.0 && self.sweep.alpha <= 1.0) {
            return Err(Error::validation("sweep.alpha", "need 0 < alpha <= 1"));
        }
        self.solve_config()?.validate()
    }

    pub fn solve_config(&self) -> Result<SolveConfig> {
        let mut c = SolveConfig::new(
            self.domain.clone(),
            self.body.build()?,
            self.exterior.clone(),
            self.kernel.clone(),
            self.grid.h,
        )
        .with_method(self.solver.method);
        c.tol_residual = self.solver.tol_residual;
        c.max_iters = self.solver.max_iters;
        c.boundary_samples = self.solver.boundary_samples;
        c.hamiltonian_directions = self.solver.hamiltonian_directions;
        c.window_tau = self.solver.window_tau;
        Ok(c)
    }

    pub fn tolerances(&self) -> SuiteTolerances {
        SuiteTolerances {
            contact_factor: self.solver.contact_factor,
            grad_violation: self.verify.grad_violation,
            equivalence: self.verify.equivalence,
            equivalence_per_h_2d: self.verify.equivalence_per_h_2d,
            monotonicity_slack: self.verify.monotonicity_slack,
            hessian_rel: self.verify.hessian_rel,
        }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            k_max: self.sweep.k_max,
            smoothing: self.smoothing,
            alpha: self.sweep.alpha,
            constant_spread: self.sweep.constant_spread,
            operator_spread: self.sweep.operator_spread,
        }
    }

    /// `output_dir`, unless overridden by the environment.
    pub fn resolved_output_dir(&self) -> PathBuf {
        std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| self.output_dir.clone())
    }
}
