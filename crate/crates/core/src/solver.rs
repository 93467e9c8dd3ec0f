//! Discrete double obstacle and gradient-constraint problems.
//!
//! Both problems live on the interior nodes of a [`Grid`] covering `U`. Box
//! nodes outside `U` carry `φ`, and the exterior rule of the field is `φ`
//! itself, so `u = φ` off `U` by construction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{holder_scan, HolderScan};
use crate::domain::{DomainSpec, ExteriorData};
use crate::geometry::{BodyRep, ConvexBody};
use crate::grid::{ExteriorRule, Grid, GridField};
use crate::obstacle::{Obstacle, Side, DEFAULT_BOUNDARY_SAMPLES};
use crate::operator::{KernelSpec, Loads, Stencil};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    PolicyIteration,
    #[default]
    GaussSeidelProjection,
    PseudoTime,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    DoubleObstacle,
    GradientConstraint,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub domain: DomainSpec,
    pub body: ConvexBody,
    pub phi: ExteriorData,
    pub kernel: KernelSpec,
    pub h: f64,
    pub method: SolverMethod,
    pub tol_residual: f64,
    pub max_iters: usize,
    pub subsolution: Option<GridField>,
    pub boundary_samples: usize,
    /// Directions sampled on `∂K` for the upwind Hamiltonian of a smooth body.
    pub hamiltonian_directions: usize,
    /// Interior window margin for the Hölder table.
    pub window_tau: f64,
}

impl SolveConfig {
    pub fn new(domain: DomainSpec, body: ConvexBody, phi: ExteriorData, kernel: KernelSpec, h: f64) -> Self {
        Self {
            domain,
            body,
            phi,
            kernel,
            h,
            method: SolverMethod::default(),
            tol_residual: 1e-8,
            max_iters: 100_000,
            subsolution: None,
            boundary_samples: DEFAULT_BOUNDARY_SAMPLES,
            hamiltonian_directions: 32,
            window_tau: 0.25,
        }
    }

    pub fn with_method(mut self, method: SolverMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        self.phi.validate()?;
        self.kernel.validate(self.domain.dim())?;
        if !(self.tol_residual > 0.0) {
            return Err(Error::validation("solver.tol_residual", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::validation("solver.max_iters", "must be positive"));
        }
        if self.domain.min_width() / self.h < 32.0 - 1e-9 {
            return Err(Error::validation(
                "grid.h",
                "grid must resolve U with at least 32 nodes across its minimal width",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Elastic,
    PlasticPlus,
    PlasticMinus,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeCounts {
    pub elastic: usize,
    pub plastic_plus: usize,
    pub plastic_minus: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem: Problem,
    pub method: SolverMethod,
    pub iterations: usize,
    pub residual: f64,
    pub mode_counts: ModeCounts,
    /// Mode of each interior node, in the order of `interior`.
    pub modes: Vec<Mode>,
    pub interior: Vec<usize>,
    pub grad_violation_max: f64,
    pub holder: Vec<HolderScan>,
    pub history: Vec<f64>,
}

/// Backward-difference stencil of one extreme direction at one node:
/// `H_v(u) = slope (u(x) − Σ w_k ext[pos_k]) − 1`.
#[derive(Debug, Clone)]
struct Upwind {
    slope: f64,
    taps: Vec<(usize, f64)>,
}

/// Grid, quadrature and obstacles shared by every solver.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub grid: Grid,
    pub stencil: Stencil,
    pub interior: Vec<usize>,
    pub rho: Vec<f64>,
    pub rho_bar: Vec<f64>,
    pub exterior: ExteriorRule,
    pub domain: DomainSpec,
    loads: Vec<Loads>,
    ext_pos: Vec<usize>,
    unknown: Vec<Option<usize>>,
    upwind: Vec<Vec<Upwind>>,
}

/// Points of `∂K` whose convex hull approximates `K` from inside.
pub fn extreme_directions(body: &ConvexBody, m: usize) -> Vec<Point> {
    match body.rep() {
        BodyRep::Interval { a, b } => vec![Point::new(*b, 0.0), Point::new(-*a, 0.0)],
        BodyRep::Polygon(p) => p.vertices().to_vec(),
        _ => (0..m)
            .map(|j| {
                let e = Point::new((2.0 * PI * j as f64 / m as f64).cos(), (2.0 * PI * j as f64 / m as f64).sin());
                e / body.gauge(&e)
            })
            .collect(),
    }
}

impl Discretization {
    pub fn new(config: &SolveConfig) -> Result<Self> {
        config.validate()?;
        let grid = Grid::covering(&config.domain, config.h)?;
        let stencil = Stencil::new(&config.kernel, &grid)?;
        let interior = grid.interior_nodes(&config.domain);
        let up = Obstacle::new(&config.domain, &config.body, &config.phi, Side::Rho, config.boundary_samples)?;
        let down = Obstacle::new(&config.domain, &config.body, &config.phi, Side::RhoBar, config.boundary_samples)?;
        let (rho, rho_bar): (Vec<f64>, Vec<f64>) = interior
            .par_iter()
            .map(|&k| {
                let x = grid.node(k);
                (up.eval(&x), down.eval(&x))
            })
            .unzip();
        if let Some(k) = (0..interior.len()).find(|&k| -rho_bar[k] > rho[k] + 1e-12) {
            return Err(Error::Config(format!(
                "obstacles cross at node {}: -rho_bar = {} > rho = {}",
                interior[k], -rho_bar[k], rho[k]
            )));
        }
        let exterior = ExteriorRule::Phi {
            phi: config.phi.clone(),
        };
        let loads = interior
            .par_iter()
            .map(|&k| stencil.loads(&grid.node(k), &exterior))
            .collect();
        let ext_pos: Vec<usize> = interior.iter().map(|&k| stencil.ext_index(k)).collect();
        let probe = GridField::from_fn(grid.clone(), exterior.clone(), |_| 0.0);
        let mut unknown = vec![None; stencil.extend(&probe).len()];
        for (k, &e) in ext_pos.iter().enumerate() {
            unknown[e] = Some(k);
        }
        let dirs = extreme_directions(&config.body, config.hamiltonian_directions);
        let upwind = interior
            .iter()
            .map(|&k| {
                dirs.iter()
                    .map(|v| Self::upwind_taps(&grid, &stencil, k, v))
                    .collect()
            })
            .collect();
        Ok(Self {
            grid,
            stencil,
            interior,
            rho,
            rho_bar,
            exterior,
            domain: config.domain.clone(),
            loads,
            ext_pos,
            unknown,
            upwind,
        })
    }

    fn upwind_taps(grid: &Grid, stencil: &Stencil, node: usize, v: &Point) -> Upwind {
        let h = grid.h;
        let norm = v.norm();
        let (i, j) = grid.ij(node);
        let dir = v / norm;
        let fx = i as f64 - dir.x;
        let fy = if grid.dim == 2 { j as f64 - dir.y } else { 0.0 };
        let (ix, iy) = (fx.floor(), fy.floor());
        let (ax, ay) = (fx - ix, fy - iy);
        let base = stencil.ext_index(node) as isize;
        let stride = 3 * grid.n[0] as isize;
        let pos = |di: f64, dj: f64| {
            (base + (ix + di - i as f64) as isize + (iy + dj - j as f64) as isize * stride) as usize
        };
        let mut taps = vec![(pos(0.0, 0.0), (1.0 - ax) * (1.0 - ay)), (pos(1.0, 0.0), ax * (1.0 - ay))];
        if grid.dim == 2 {
            taps.push((pos(0.0, 1.0), (1.0 - ax) * ay));
            taps.push((pos(1.0, 1.0), ax * ay));
        }
        taps.retain(|t| t.1 > 0.0);
        Upwind {
            slope: norm / h,
            taps,
        }
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    /// Field with `φ` on box nodes outside `U` and `values` on interior nodes.
    pub fn field(&self, values: &[f64]) -> GridField {
        let mut u = GridField::from_fn(self.grid.clone(), self.exterior.clone(), |x| self.exterior.value(x));
        for (k, &node) in self.interior.iter().enumerate() {
            u.values[node] = values[k];
        }
        u
    }

    pub fn interior_values(&self, u: &GridField) -> Vec<f64> {
        self.interior.iter().map(|&k| u.values[k]).collect()
    }

    /// Extended array for a field; the exterior rule of `u` is ignored in
    /// favour of `φ` so that `u = φ` off `U`.
    fn extend(&self, values: &[f64]) -> Vec<f64> {
        self.stencil.extend(&self.field(values))
    }

    fn operator_at(&self, ext: &[f64], k: usize) -> f64 {
        let e = self.ext_pos[k];
        self.stencil.node_value(ext, e, ext[e], &self.loads[k])
    }

    /// `(γ°_h(D_h u) − 1, argmax direction)` at interior node `k`.
    fn hamiltonian(&self, ext: &[f64], k: usize) -> (f64, usize) {
        let t = ext[self.ext_pos[k]];
        let mut best = (f64::NEG_INFINITY, 0);
        for (d, up) in self.upwind[k].iter().enumerate() {
            let back: f64 = up.taps.iter().map(|(p, w)| w * ext[*p]).sum();
            let val = up.slope * (t - back) - 1.0;
            if val > best.0 {
                best = (val, d);
            }
        }
        best
    }

    /// Nodal residual of the composed operator.
    fn node_residual(&self, problem: Problem, ext: &[f64], k: usize) -> f64 {
        let t = ext[self.ext_pos[k]];
        let a = -self.operator_at(ext, k);
        match problem {
            Problem::DoubleObstacle => a.min(t + self.rho_bar[k]).max(t - self.rho[k]),
            Problem::GradientConstraint => a.max(self.hamiltonian(ext, k).0),
        }
    }

    fn residual_ext(&self, problem: Problem, ext: &[f64]) -> f64 {
        (0..self.len())
            .into_par_iter()
            .map(|k| self.node_residual(problem, ext, k).abs())
            .reduce(|| 0.0, f64::max)
    }

    /// `sup |F_h u|` over interior nodes, recomputed from the field values.
    pub fn residual(&self, problem: Problem, u: &GridField) -> f64 {
        self.residual_ext(problem, &self.extend(&self.interior_values(u)))
    }

    /// `−I_h u` at every interior node.
    pub fn minus_operator(&self, u: &GridField) -> Vec<f64> {
        let ext = self.extend(&self.interior_values(u));
        (0..self.len()).into_par_iter().map(|k| -self.operator_at(&ext, k)).collect()
    }

    /// `max (γ°_h(D_h u) − 1)⁺` over interior nodes.
    pub fn grad_violation(&self, u: &GridField) -> f64 {
        let ext = self.extend(&self.interior_values(u));
        (0..self.len())
            .map(|k| self.hamiltonian(&ext, k).0.max(0.0))
            .fold(0.0, f64::max)
    }

    /// Root of the scalar node equation with all other values frozen.
    fn node_update(&self, problem: Problem, ext: &[f64], k: usize) -> f64 {
        let e = self.ext_pos[k];
        let t_i = self.stencil.node_solve(ext, e, &self.loads[k], ext[e]);
        match problem {
            Problem::DoubleObstacle => t_i.min(self.rho[k]).max(-self.rho_bar[k]),
            Problem::GradientConstraint => {
                let mut t_g = f64::INFINITY;
                for up in &self.upwind[k] {
                    let (mut rest, mut own) = (0.0, 0.0);
                    for (p, w) in &up.taps {
                        if *p == e {
                            own += w;
                        } else {
                            rest += w * ext[*p];
                        }
                    }
                    t_g = t_g.min((rest + 1.0 / up.slope) / (1.0 - own));
                }
                t_i.min(t_g)
            }
        }
    }

    pub fn modes(&self, values: &[f64], tol: f64) -> Vec<Mode> {
        values
            .iter()
            .enumerate()
            .map(|(k, &u)| {
                if u >= self.rho[k] - tol {
                    Mode::PlasticPlus
                } else if u <= -self.rho_bar[k] + tol {
                    Mode::PlasticMinus
                } else {
                    Mode::Elastic
                }
            })
            .collect()
    }

    /// Feasible start. The double obstacle iteration starts from the data
    /// itself (gauge-Lipschitz data lie between the obstacles), so zero data
    /// is a fixed point from the first sweep. The gradient constraint starts
    /// from `(ρ − ρ̄)/2`: from the data, opposite upwind rows make the policy
    /// systems singular and the iteration falls back to node solves.
    pub fn initial_values(&self, problem: Problem) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let t = match problem {
                    Problem::DoubleObstacle => self.exterior.value(&self.grid.node(self.interior[k])),
                    Problem::GradientConstraint => 0.5 * (self.rho[k] - self.rho_bar[k]),
                };
                t.min(self.rho[k]).max(-self.rho_bar[k])
            })
            .collect()
    }

    fn policy_step(&self, problem: Problem, ext: &[f64]) -> Result<(Vec<f64>, Vec<u8>)> {
        let n = self.len();
        let (p, q) = self.stencil.kernel.slopes();
        let rows: Vec<(Vec<(usize, f64)>, f64, f64, u8)> = (0..n)
            .into_par_iter()
            .map(|k| {
                let e = self.ext_pos[k];
                let t = ext[e];
                let a = -self.operator_at(ext, k);
                let branch = match problem {
                    Problem::DoubleObstacle => {
                        // Active set from the local elastic root, as in a
                        // projected Gauss–Seidel update.
                        let root = self.stencil.node_solve(ext, e, &self.loads[k], t);
                        if root >= self.rho[k] {
                            2
                        } else if root <= -self.rho_bar[k] {
                            1
                        } else {
                            0
                        }
                    }
                    Problem::GradientConstraint => {
                        let (g, d) = self.hamiltonian(ext, k);
                        if a >= g {
                            0
                        } else {
                            3 + d as u8
                        }
                    }
                };
                match branch {
                    0 => {
                        let (mut rhs, mut diag) = self.loads[k].linearize(t, p, q);
                        let mut off = Vec::new();
                        for pr in self.stencil.pairs() {
                            let (ia, ib) = self.stencil.pair_positions(e, pr);
                            let c = if ext[ia] + ext[ib] - 2.0 * t > 0.0 { p } else { q };
                            diag += c * pr.weight;
                            for pos in [ia, ib] {
                                match self.unknown[pos] {
                                    Some(j) => off.push((j, -c * pr.weight)),
                                    None => rhs += c * pr.weight * ext[pos],
                                }
                            }
                        }
                        (off, 2.0 * diag, rhs, 0)
                    }
                    1 => (Vec::new(), 1.0, -self.rho_bar[k], 1),
                    2 => (Vec::new(), 1.0, self.rho[k], 2),
                    b => {
                        let up = &self.upwind[k][(b - 3) as usize];
                        let (mut diag, mut rhs) = (1.0, 1.0 / up.slope);
                        let mut off = Vec::new();
                        for (pos, w) in &up.taps {
                            if *pos == e {
                                diag -= w;
                            } else {
                                match self.unknown[*pos] {
                                    Some(j) => off.push((j, -w)),
                                    None => rhs += w * ext[*pos],
                                }
                            }
                        }
                        (off, diag, rhs, b)
                    }
                }
            })
            .collect();
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::zeros(n);
        let mut policy = Vec::with_capacity(n);
        for (k, (off, diag, rhs, br)) in rows.into_iter().enumerate() {
            a[(k, k)] += diag;
            for (j, w) in off {
                a[(k, j)] += w;
            }
            b[k] = rhs;
            policy.push(br);
        }
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Degenerate("singular policy system".into()))?;
        Ok((x.iter().copied().collect(), policy))
    }

    fn write(&self, ext: &mut [f64], values: &[f64]) {
        for (k, &e) in self.ext_pos.iter().enumerate() {
            ext[e] = values[k];
        }
    }

    fn read(&self, ext: &[f64]) -> Vec<f64> {
        self.ext_pos.iter().map(|&e| ext[e]).collect()
    }

    /// Runs `method` from `start` until the residual is at most `tol`.
    pub fn iterate(
        &self,
        problem: Problem,
        method: SolverMethod,
        start: Vec<f64>,
        tol: f64,
        max_iters: usize,
    ) -> Result<(Vec<f64>, usize, Vec<f64>)> {
        let mut ext = self.extend(&start);
        let mut history = Vec::new();
        let mut res = self.residual_ext(problem, &ext);
        history.push(res);
        let mut iters = 0;
        let mut seen: std::collections::HashSet<Vec<u8>> = std::collections::HashSet::new();
        let mut method = method;
        while res > tol {
            if iters >= max_iters {
                return Err(Error::NonConvergence {
                    iterations: iters,
                    residual: res,
                    history,
                });
            }
            iters += 1;
            match method {
                SolverMethod::GaussSeidelProjection => {
                    for k in 0..self.len() {
                        let t = self.node_update(problem, &ext, k);
                        ext[self.ext_pos[k]] = t;
                    }
                }
                SolverMethod::Jacobi => {
                    let next: Vec<f64> = (0..self.len())
                        .into_par_iter()
                        .map(|k| self.node_update(problem, &ext, k))
                        .collect();
                    self.write(&mut ext, &next);
                }
                SolverMethod::PseudoTime => {
                    let lam = {
                        let (p, q) = self.stencil.kernel.slopes();
                        p.max(q)
                    };
                    let next: Vec<f64> = (0..self.len())
                        .into_par_iter()
                        .map(|k| {
                            let e = self.ext_pos[k];
                            let mut rate = 2.0 * lam * self.stencil.weight_sum(&self.loads[k]);
                            if problem == Problem::GradientConstraint {
                                rate = self.upwind[k].iter().map(|u| u.slope).fold(rate, f64::max);
                            }
                            let tau = 0.9 / rate.max(1.0);
                            let t = ext[e] - tau * self.node_residual(problem, &ext, k);
                            match problem {
                                Problem::DoubleObstacle => t.min(self.rho[k]).max(-self.rho_bar[k]),
                                Problem::GradientConstraint => t,
                            }
                        })
                        .collect();
                    self.write(&mut ext, &next);
                }
                SolverMethod::PolicyIteration => {
                    // Two upwind rows pointing at each other make the
                    // policy system singular; exact node solves take over.
                    let Some((mut next, policy)) = self
                        .policy_step(problem, &ext)
                        .ok()
                        .filter(|(v, _)| v.iter().all(|x| x.is_finite()))
                    else {
                        method = SolverMethod::GaussSeidelProjection;
                        continue;
                    };
                    if problem == Problem::DoubleObstacle {
                        for (k, v) in next.iter_mut().enumerate() {
                            *v = v.min(self.rho[k]).max(-self.rho_bar[k]);
                        }
                    }
                    self.write(&mut ext, &next);
                    // A repeated policy that still misses the tolerance has
                    // hit the kinks of the extremal operator or a cycle of
                    // active sets; finish with exact node solves.
                    if !seen.insert(policy) {
                        method = SolverMethod::GaussSeidelProjection;
                    }
                }
            }
            res = self.residual_ext(problem, &ext);
            history.push(res);
        }
        Ok((self.read(&ext), iters, history))
    }

    fn report(
        &self,
        problem: Problem,
        method: SolverMethod,
        values: &[f64],
        iterations: usize,
        history: Vec<f64>,
        tol: f64,
        window_tau: f64,
    ) -> (GridField, SolveReport) {
        let u = self.field(values);
        let residual = self.residual(problem, &u);
        let modes = self.modes(values, tol);
        let mut counts = ModeCounts::default();
        for m in &modes {
            match m {
                Mode::Elastic => counts.elastic += 1,
                Mode::PlasticPlus => counts.plastic_plus += 1,
                Mode::PlasticMinus => counts.plastic_minus += 1,
            }
        }
        let holder = [0.25, 0.5, 0.75]
            .into_iter()
            .map(|a| holder_scan(&u, &self.domain, window_tau, a))
            .collect();
        let report = SolveReport {
            problem,
            method,
            iterations,
            residual,
            mode_counts: counts,
            modes,
            interior: self.interior.clone(),
            grad_violation_max: self.grad_violation(&u),
            holder,
            history,
        };
        (u, report)
    }

    pub fn solve(&self, config: &SolveConfig, problem: Problem) -> Result<(GridField, SolveReport)> {
        let (values, iterations, history) = self.iterate(
            problem,
            config.method,
            self.initial_values(problem),
            config.tol_residual,
            config.max_iters,
        )?;
        Ok(self.report(
            problem,
            config.method,
            &values,
            iterations,
            history,
            config.tol_residual,
            config.window_tau,
        ))
    }
}

pub fn solve_double_obstacle(config: &SolveConfig) -> Result<(GridField, SolveReport)> {
    Discretization::new(config)?.solve(config, Problem::DoubleObstacle)
}

pub fn solve_gradient_constraint(config: &SolveConfig) -> Result<(GridField, SolveReport)> {
    Discretization::new(config)?.solve(config, Problem::GradientConstraint)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsolutionCheck {
    /// `max (−I_h v)` over interior nodes.
    pub max_minus_operator: f64,
    pub within_obstacles: bool,
    pub certified: bool,
    /// `max (v − u)` over interior nodes.
    pub max_excess: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranslationCheck {
    pub shift: [isize; 2],
    pub interior_max: f64,
    pub complement_max: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub problem: Problem,
    pub residual: f64,
    pub grad_violation_max: f64,
    pub subsolution: Option<SubsolutionCheck>,
    /// Residual of `max{−I_h u, u − ρ}` on nodes where `v ≤ u + tol`.
    pub reduced_residual: Option<f64>,
    pub translation: TranslationCheck,
    pub tol: f64,
}

impl CertificateReport {
    pub fn pass(&self) -> bool {
        self.residual <= self.tol
            && self.subsolution.as_ref().is_none_or(|s| s.pass)
            && self.translation.pass
    }
}

/// `max over the lattice of u(· + z) − u(·)`, split by whether both points
/// are interior nodes.
pub fn translation_check(d: &Discretization, u: &GridField, shift: [isize; 2], tol: f64) -> TranslationCheck {
    let g = &d.grid;
    let inside: std::collections::HashSet<usize> = d.interior.iter().copied().collect();
    let (n0, n1) = (g.n[0] as isize, g.n[1] as isize);
    let span = shift[0].abs().max(shift[1].abs()) + 1;
    let (jlo, jhi) = if g.dim == 1 { (0, 1) } else { (-span, n1 + span) };
    let (mut interior_max, mut complement_max) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for j in jlo..jhi {
        for i in -span..n0 + span {
            let diff = u.at_lattice(i + shift[0], j + shift[1]) - u.at_lattice(i, j);
            let here = (i >= 0 && j >= 0 && i < n0 && j < n1).then(|| g.index(i as usize, j as usize));
            let there = (i + shift[0] >= 0 && j + shift[1] >= 0 && i + shift[0] < n0 && j + shift[1] < n1)
                .then(|| g.index((i + shift[0]) as usize, (j + shift[1]) as usize));
            let both = matches!((here, there), (Some(a), Some(b)) if inside.contains(&a) && inside.contains(&b));
            if both {
                interior_max = interior_max.max(diff);
            } else {
                complement_max = complement_max.max(diff);
            }
        }
    }
    let margin = complement_max - interior_max;
    TranslationCheck {
        shift,
        interior_max,
        complement_max,
        margin,
        pass: margin >= -tol,
    }
}

pub fn certify_solution(u: &GridField, config: &SolveConfig, problem: Problem) -> Result<CertificateReport> {
    let d = Discretization::new(config)?;
    certify_with(&d, u, config, problem)
}

pub fn certify_with(
    d: &Discretization,
    u: &GridField,
    config: &SolveConfig,
    problem: Problem,
) -> Result<CertificateReport> {
    let tol = config.tol_residual;
    let residual = d.residual(problem, u);
    let uv = d.interior_values(u);
    let (subsolution, reduced_residual) = match &config.subsolution {
        None => (None, None),
        Some(v) => {
            let vv = d.interior_values(v);
            let mi = d.minus_operator(v);
            let max_minus_operator = mi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let within_obstacles = (0..d.len()).all(|k| -d.rho_bar[k] - tol <= vv[k] && vv[k] <= d.rho[k] + tol);
            let certified = max_minus_operator <= tol && within_obstacles;
            let max_excess = (0..d.len()).map(|k| vv[k] - uv[k]).fold(f64::NEG_INFINITY, f64::max);
            let mu = d.minus_operator(u);
            let reduced = (0..d.len())
                .filter(|&k| vv[k] <= uv[k] + tol)
                .map(|k| mu[k].max(uv[k] - d.rho[k]).abs())
                .fold(0.0, f64::max);
            (
                Some(SubsolutionCheck {
                    max_minus_operator,
                    within_obstacles,
                    certified,
                    max_excess,
                    pass: !certified || max_excess <= tol,
                }),
                Some(reduced),
            )
        }
    };
    let shift = [4, 0];
    Ok(CertificateReport {
        problem,
        residual,
        grad_violation_max: d.grad_violation(u),
        subsolution,
        reduced_residual,
        translation: translation_check(d, u, shift, tol),
        tol,
    })
}
