//! Coincidence sets, discrete Hölder quotients and the verification suite.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::domain::{DomainSpec, ExteriorData};
use crate::geometry::ConvexBody;
use crate::grid::{Grid, GridField};
use crate::obstacle::{ridge_scan, test_directions, Obstacle, RidgeFlag, Side, CLOSEST_TOL_REL};
use crate::operator::{KernelSpec, Modulation};
use crate::solver::{certify_with, Discretization, Mode, Problem, SolveConfig, SolverMethod};
use crate::{Point, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoincidenceDecomposition {
    pub interior: Vec<usize>,
    pub plus: Vec<bool>,
    pub minus: Vec<bool>,
    pub elastic: Vec<bool>,
    /// Neighbouring interior nodes with different labels.
    pub free_boundary: Vec<(usize, usize)>,
    /// Nodes in both contact sets.
    pub degenerate: Vec<usize>,
    pub tol_contact: f64,
}

impl CoincidenceDecomposition {
    pub fn modes(&self) -> Vec<Mode> {
        (0..self.interior.len())
            .map(|k| {
                if self.plus[k] {
                    Mode::PlasticPlus
                } else if self.minus[k] {
                    Mode::PlasticMinus
                } else {
                    Mode::Elastic
                }
            })
            .collect()
    }
}

/// `P⁺ = {ρ − u ≤ tol}`, `P⁻ = {u + ρ̄ ≤ tol}`, `E` the rest, over the
/// interior nodes listed with their obstacle values.
pub fn decompose(
    u: &GridField,
    interior: &[usize],
    rho: &[f64],
    rho_bar: &[f64],
    tol_contact: f64,
) -> CoincidenceDecomposition {
    let n = interior.len();
    let plus: Vec<bool> = (0..n).map(|k| rho[k] - u.values[interior[k]] <= tol_contact).collect();
    let minus: Vec<bool> = (0..n).map(|k| u.values[interior[k]] + rho_bar[k] <= tol_contact).collect();
    let elastic = (0..n).map(|k| !plus[k] && !minus[k]).collect();
    let degenerate = (0..n).filter(|&k| plus[k] && minus[k]).map(|k| interior[k]).collect();
    let label = |k: usize| (plus[k] as u8) | ((minus[k] as u8) << 1);
    let pos: std::collections::HashMap<usize, usize> = interior.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let g = &u.grid;
    let nbrs: &[(isize, isize)] = if g.dim == 1 { &[(1, 0)] } else { &[(1, 0), (0, 1)] };
    let mut free_boundary = Vec::new();
    for (k, &node) in interior.iter().enumerate() {
        for &(di, dj) in nbrs {
            if let Some(l) = g.shift(node, di, dj).and_then(|m| pos.get(&m)) {
                if label(k) != label(*l) {
                    free_boundary.push((node, interior[*l]));
                }
            }
        }
    }
    CoincidenceDecomposition {
        interior: interior.to_vec(),
        plus,
        minus,
        elastic,
        free_boundary,
        degenerate,
        tol_contact,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderRow {
    /// Pair distances in `[r_lo, r_hi)`.
    pub r_lo: f64,
    pub r_hi: f64,
    pub max_quotient: f64,
    pub pairs: usize,
}

/// Empirical seminorm `sup |D_h u(x) − D_h u(y)| / |x − y|^α` over node
/// pairs of the window `{d(x, ∂U) > τ}`. A refinement-stability signature of
/// `C^{1,α}`, not a proof of it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderScan {
    pub alpha: f64,
    pub tau: f64,
    pub rows: Vec<HolderRow>,
    pub max_quotient: f64,
    pub pairs: usize,
    pub sup_u: f64,
    pub sup_du: f64,
    pub note: Option<String>,
}

/// Central differences, or one-sided towards nodes of the same contact
/// state when `contact` marks exactly one neighbour differently.
fn gradient(u: &GridField, contact: Option<&[u8]>, i: isize, j: isize) -> Point {
    let g = &u.grid;
    let h = g.h;
    let state = |a: isize, b: isize| -> Option<u8> {
        let c = contact?;
        (a >= 0 && b >= 0 && (a as usize) < g.n[0] && (b as usize) < g.n[1]).then(|| c[g.index(a as usize, b as usize)])
    };
    let axis = |di: isize, dj: isize| {
        let (fwd, mid, bwd) = (
            u.at_lattice(i + di, j + dj),
            u.at_lattice(i, j),
            u.at_lattice(i - di, j - dj),
        );
        let here = state(i, j);
        let (sf, sb) = (state(i + di, j + dj), state(i - di, j - dj));
        if here.is_some() && sf != here && sb == here {
            (mid - bwd) / h
        } else if here.is_some() && sb != here && sf == here {
            (fwd - mid) / h
        } else {
            (fwd - bwd) / (2.0 * h)
        }
    };
    Point::new(axis(1, 0), if g.dim == 2 { axis(0, 1) } else { 0.0 })
}

pub fn holder_scan(u: &GridField, domain: &DomainSpec, tau: f64, alpha: f64) -> HolderScan {
    holder_scan_with(u, domain, tau, alpha, None)
}

/// As [`holder_scan`], with per-grid-node contact labels steering the
/// one-sided differences at contact-set borders.
pub fn holder_scan_with(
    u: &GridField,
    domain: &DomainSpec,
    tau: f64,
    alpha: f64,
    contact: Option<&[u8]>,
) -> HolderScan {
    let g = &u.grid;
    let window: Vec<(isize, isize)> = (0..g.len())
        .filter(|&k| domain.signed_distance(&g.node(k)) > tau)
        .map(|k| {
            let (i, j) = g.ij(k);
            (i as isize, j as isize)
        })
        .collect();
    let grads: std::collections::HashMap<(isize, isize), Point> =
        window.iter().map(|&(i, j)| ((i, j), gradient(u, contact, i, j))).collect();
    let sup_u = u.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sup_du = grads.values().fold(0.0f64, |m, v| m.max(v.norm()));
    // All pairs in one dimension; offsets up to six cells per axis in two.
    let reach: isize = if g.dim == 1 { g.n[0] as isize } else { 6 };
    let offsets: Vec<(isize, isize)> = if g.dim == 1 {
        (1..reach).map(|d| (d, 0)).collect()
    } else {
        (0..=reach)
            .flat_map(|dj| (-reach..=reach).map(move |di| (di, dj)))
            .filter(|&(di, dj)| dj > 0 || di > 0)
            .collect()
    };
    let mut buckets: Vec<HolderRow> = Vec::new();
    let mut total = 0;
    for (di, dj) in offsets {
        let r = g.h * ((di * di + dj * dj) as f64).sqrt();
        let m = (r / g.h).log2().floor() as i32;
        let (lo, hi) = (g.h * 2f64.powi(m), g.h * 2f64.powi(m + 1));
        let mut best = 0.0f64;
        let mut pairs = 0;
        for &(i, j) in &window {
            if let (Some(a), Some(b)) = (grads.get(&(i, j)), grads.get(&(i + di, j + dj))) {
                best = best.max((a - b).norm() / r.powf(alpha));
                pairs += 1;
            }
        }
        if pairs == 0 {
            continue;
        }
        total += pairs;
        match buckets.iter_mut().find(|row| row.r_lo == lo) {
            Some(row) => {
                row.max_quotient = row.max_quotient.max(best);
                row.pairs += pairs;
            }
            None => buckets.push(HolderRow {
                r_lo: lo,
                r_hi: hi,
                max_quotient: best,
                pairs,
            }),
        }
    }
    buckets.sort_by(|a, b| a.r_lo.total_cmp(&b.r_lo));
    let note = if window.is_empty() {
        Some("window empty, skipped".to_string())
    } else if total < 1000 {
        Some(format!("only {total} pairs in the window"))
    } else {
        None
    };
    HolderScan {
        alpha,
        tau,
        max_quotient: buckets.iter().map(|r| r.max_quotient).fold(0.0, f64::max),
        rows: buckets,
        pairs: total,
        sup_u,
        sup_du,
        note,
    }
}

/// The fixed exponent grid `{0.1, …, 0.9}`.
pub fn alpha_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    /// The property being checked, in words.
    pub paper_ref: String,
    pub pass: bool,
    /// Positive when the check passes with room to spare.
    pub margin: f64,
    pub location: Option<String>,
}

fn check(id: &str, what: &str, margin: f64, location: Option<String>) -> CheckResult {
    CheckResult {
        check_id: id.into(),
        paper_ref: what.into(),
        pass: margin >= 0.0,
        margin,
        location,
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SuiteTolerances {
    /// Contact detection tolerance relative to the residual tolerance.
    pub contact_factor: f64,
    pub grad_violation: f64,
    pub equivalence: f64,
    /// Two-dimensional equivalence tolerance per unit of grid spacing; the
    /// upwind gradient constraint is first order there.
    pub equivalence_per_h_2d: f64,
    pub monotonicity_slack: f64,
    pub hessian_rel: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        Self {
            contact_factor: 10.0,
            grad_violation: 0.05,
            equivalence: 5e-2,
            equivalence_per_h_2d: 2.0,
            monotonicity_slack: 1e-8,
            hessian_rel: 1e-3,
        }
    }
}

fn locate(grid: &Grid, node: usize) -> String {
    let p = grid.node(node);
    if grid.dim == 1 {
        format!("node={node} x={:.6}", p.x)
    } else {
        format!("node={node} x={:.6} y={:.6}", p.x, p.y)
    }
}

/// Worst node of `values` (smallest margin) as `(margin, location)`.
fn worst(grid: &Grid, nodes: &[usize], margins: impl Iterator<Item = f64>) -> (f64, Option<String>) {
    let mut best = (f64::INFINITY, None);
    for (k, m) in margins.enumerate() {
        if m < best.0 {
            best = (m, Some(k));
        }
    }
    (best.0.min(f64::MAX), best.1.map(|k| locate(grid, nodes[k])))
}

/// Checks on a given field for the double obstacle problem: residual,
/// sandwich, branch complementarity, gradient bound, comparison with a
/// certified subsolution, translation comparison, plastic segments and
/// ridge disjointness.
pub fn check_field(
    d: &Discretization,
    config: &SolveConfig,
    u: &GridField,
    tol: &SuiteTolerances,
) -> Result<Vec<CheckResult>> {
    let g = &d.grid;
    let nodes = &d.interior;
    let t = config.tol_residual;
    let tc = tol.contact_factor * t;
    let vals = d.interior_values(u);
    let mi = d.minus_operator(u);
    let mut out = Vec::new();

    let residual = d.residual(Problem::DoubleObstacle, u);
    out.push(check(
        "residual",
        "discrete double obstacle equation max{min{-Iu, u+rho_bar}, u-rho} = 0",
        t - residual,
        None,
    ));

    let (m, loc) = worst(
        g,
        nodes,
        (0..d.len()).map(|k| (d.rho[k] - vals[k]).min(vals[k] + d.rho_bar[k])),
    );
    out.push(check("sandwich", "obstacle sandwich -rho_bar <= u <= rho", m, loc));

    let dec = decompose(u, nodes, &d.rho, &d.rho_bar, tc);
    let modes = dec.modes();
    let (m, loc) = worst(
        g,
        nodes,
        (0..d.len()).map(|k| match modes[k] {
            Mode::Elastic => tc - mi[k].abs(),
            Mode::PlasticPlus => tc - mi[k],
            Mode::PlasticMinus => tc + mi[k],
        }),
    );
    out.push(check(
        "complementarity",
        "branch complementarity on the coincidence decomposition",
        m,
        loc,
    ));
    if !dec.degenerate.is_empty() {
        out.push(check(
            "contact_overlap",
            "coincidence sets P+ and P- are disjoint",
            -(dec.degenerate.len() as f64),
            Some(locate(g, dec.degenerate[0])),
        ));
    }

    // Without a supplied subsolution, try φ itself and then −ρ̄.
    let candidates = match &config.subsolution {
        Some(v) => vec![v.clone()],
        None => vec![
            d.field(&nodes.iter().map(|&n| config.phi.value(&g.node(n))).collect::<Vec<_>>()),
            d.field(&d.rho_bar.iter().map(|v| -v).collect::<Vec<_>>()),
        ],
    };
    let mut cert = None;
    for v in candidates {
        let mut c = config.clone();
        c.subsolution = Some(v);
        let r = certify_with(d, u, &c, Problem::DoubleObstacle)?;
        let done = r.subsolution.as_ref().is_some_and(|s| s.certified);
        cert = Some(r);
        if done {
            break;
        }
    }
    let cert = cert.expect("at least one candidate");
    out.push(check(
        "gradient_bound",
        "gradient bound gamma_polar(Du) <= 1",
        tol.grad_violation - cert.grad_violation_max,
        None,
    ));
    if let Some(sub) = &cert.subsolution {
        let margin = if sub.certified { t - sub.max_excess } else { 0.0 };
        out.push(check(
            "subsolution_comparison",
            "comparison v <= u for a certified subsolution v",
            margin,
            (!sub.certified).then(|| "subsolution not certified, comparison skipped".to_string()),
        ));
        if sub.certified {
            out.push(check(
                "reduced_obstacle",
                "reduced obstacle equation max{-Iu, u-rho} = 0 where v <= u",
                tc - cert.reduced_residual.unwrap_or(0.0),
                None,
            ));
        }
    }
    out.push(check(
        "translation",
        "translation comparison sup over U of u(.+z)-u is attained off U",
        cert.translation.margin + t,
        Some(format!("shift={:?}", cert.translation.shift)),
    ));

    let up = Obstacle::new(&config.domain, &config.body, &config.phi, Side::Rho, config.boundary_samples)?;
    out.push(plastic_segments(d, &up, &modes));
    out.push(ridge_elastic(d, config, &modes)?);
    Ok(out)
}

/// Mode per grid node, `None` off the interior.
fn mode_grid(d: &Discretization, modes: &[Mode]) -> Vec<Option<Mode>> {
    let mut m = vec![None; d.grid.len()];
    for (k, &node) in d.interior.iter().enumerate() {
        m[node] = Some(modes[k]);
    }
    m
}

fn near_mode(grid: &Grid, m: &[Option<Mode>], node: usize, want: Mode) -> bool {
    let nb: &[(isize, isize)] = if grid.dim == 1 {
        &[(0, 0), (1, 0), (-1, 0)]
    } else {
        &[(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    };
    nb.iter()
        .filter_map(|&(di, dj)| grid.shift(node, di, dj))
        .any(|l| m[l] == Some(want))
}

fn nearest_node(grid: &Grid, p: &Point) -> usize {
    let i = ((p.x - grid.lo[0]) / grid.h).round().clamp(0.0, (grid.n[0] - 1) as f64) as usize;
    let j = if grid.dim == 2 {
        ((p.y - grid.lo[1]) / grid.h).round().clamp(0.0, (grid.n[1] - 1) as f64) as usize
    } else {
        0
    };
    grid.index(i, j)
}

/// Nodes along `[x, y[` from each `P⁺` node to its closest boundary point are
/// in `P⁺` up to one cell.
fn plastic_segments(d: &Discretization, up: &Obstacle, modes: &[Mode]) -> CheckResult {
    let g = &d.grid;
    let m = mode_grid(d, modes);
    let mut fails = 0usize;
    let mut first = None;
    for (k, &node) in d.interior.iter().enumerate() {
        if modes[k] != Mode::PlasticPlus {
            continue;
        }
        let x = g.node(node);
        let cs = up.closest_points(&x, CLOSEST_TOL_REL);
        let Some(t) = cs.unique() else { continue };
        let y = d.domain.boundary_point(t).y;
        let steps = ((x - y).norm() / (0.5 * g.h)).ceil() as usize;
        for s in 0..steps {
            let p = x + (y - x) * (s as f64 / steps as f64);
            if d.domain.signed_distance(&p) < g.h {
                break;
            }
            let n = nearest_node(g, &p);
            if !near_mode(g, &m, n, Mode::PlasticPlus) {
                fails += 1;
                first.get_or_insert(n);
                break;
            }
        }
    }
    check(
        "plastic_segment",
        "plastic segment [x, y[ toward the closest boundary point lies in P+",
        -(fails as f64),
        first.map(|n| locate(g, n)),
    )
}

/// No ridge node of `ρ` lies in `P⁺` beyond one cell of `E ∪ P⁻`.
fn ridge_elastic(d: &Discretization, config: &SolveConfig, modes: &[Mode]) -> Result<CheckResult> {
    let g = &d.grid;
    let up = Obstacle::new(&config.domain, &config.body, &config.phi, Side::Rho, config.boundary_samples)?;
    let (flags, _) = ridge_scan(&up, g);
    let m = mode_grid(d, modes);
    let mut fails = 0usize;
    let mut first = None;
    for &node in &d.interior {
        if flags[node] == RidgeFlag::MultiClosest
            && m[node] == Some(Mode::PlasticPlus)
            && !near_mode(g, &m, node, Mode::Elastic)
        {
            fails += 1;
            first.get_or_insert(node);
        }
    }
    Ok(check(
        "ridge_elastic",
        "ridge of rho and plastic set P+ are disjoint",
        -(fails as f64),
        first.map(|n| locate(g, n)),
    ))
}

/// Characteristic monotonicity and Hessian formula checks for smooth,
/// strictly convex two-dimensional bodies.
pub fn geometry_checks(config: &SolveConfig, tol: &SuiteTolerances) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    if config.domain.dim() != 2 || !config.body.is_smooth() {
        return Ok(out);
    }
    let ob = Obstacle::new(&config.domain, &config.body, &config.phi, Side::Rho, config.boundary_samples)?;
    let xis = test_directions();
    let (mut worst_inc, mut worst_dev, mut loc) = (f64::NEG_INFINITY, 0.0f64, None);
    for t in config.domain.boundary_params(10) {
        let rep = ob.characteristic_monotonicity(t, &xis, 40)?;
        if rep.max_increase > worst_inc {
            worst_inc = rep.max_increase;
            loc = Some(format!("t={t:.6}"));
        }
        worst_dev = worst_dev.max(rep.riccati_max_rel_dev);
    }
    out.push(check(
        "characteristic_monotonicity",
        "second derivatives of rho are nonincreasing along characteristics",
        tol.monotonicity_slack - worst_inc,
        loc,
    ));
    out.push(check(
        "riccati_oracle",
        "characteristic Hessians agree with the Riccati integration",
        1e-5 - worst_dev,
        None,
    ));
    let grid = Grid::covering(&config.domain, 1.0 / 16.0)?;
    let e = 1e-4;
    let (mut rel, mut loc) = (0.0f64, None);
    for k in grid.interior_nodes(&config.domain) {
        let x = grid.node(k);
        let Ok(ih) = ob.interior_hessian(&x) else { continue };
        if ih.det_q < 0.1 || config.domain.signed_distance(&x) < 2.0 * e {
            continue;
        }
        let f = |p: Point| ob.eval(&p);
        let dx = Point::new(e, 0.0);
        let dy = Point::new(0.0, e);
        let fd = crate::Mat2::new(
            (f(x + dx) - 2.0 * f(x) + f(x - dx)) / (e * e),
            (f(x + dx + dy) - f(x + dx - dy) - f(x - dx + dy) + f(x - dx - dy)) / (4.0 * e * e),
            (f(x + dx + dy) - f(x + dx - dy) - f(x - dx + dy) + f(x - dx - dy)) / (4.0 * e * e),
            (f(x + dy) - 2.0 * f(x) + f(x - dy)) / (e * e),
        );
        let r = (fd - ih.d2rho).norm() / ih.d2rho.norm().max(1.0);
        if r > rel {
            rel = r;
            loc = Some(locate(&grid, k));
        }
    }
    out.push(check(
        "hessian_formula",
        "closed-form Hessian of rho matches second differences",
        tol.hessian_rel - rel,
        loc,
    ));
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub config: SolveConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceReport {
    pub name: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub instances: Vec<InstanceReport>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> Vec<(&str, &CheckResult)> {
        self.instances
            .iter()
            .flat_map(|i| i.checks.iter().filter(|c| !c.pass).map(move |c| (i.name.as_str(), c)))
            .collect()
    }
}

/// Solves both formulations for one instance and runs every check.
pub fn run_instance(inst: &Instance, tol: &SuiteTolerances) -> Result<InstanceReport> {
    let d = Discretization::new(&inst.config)?;
    let (u, _) = d.solve(&inst.config, Problem::DoubleObstacle)?;
    let mut checks = check_field(&d, &inst.config, &u, tol)?;
    let (w, _) = d.solve(&inst.config, Problem::GradientConstraint)?;
    let diff = u.values.iter().zip(&w.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let eq_tol = if d.grid.dim == 1 {
        tol.equivalence
    } else {
        tol.equivalence_per_h_2d * d.grid.h
    };
    let certified = checks
        .iter()
        .any(|c| c.check_id == "subsolution_comparison" && c.location.is_none());
    checks.push(check(
        "equivalence",
        "the double obstacle solution solves the gradient-constraint problem",
        if certified { eq_tol - diff } else { 0.0 },
        (!certified).then(|| format!("no certified subsolution, sup difference {diff:.3e} not enforced")),
    ));
    checks.extend(geometry_checks(&inst.config, tol)?);
    let pass = checks.iter().all(|c| c.pass);
    Ok(InstanceReport {
        name: inst.name.clone(),
        checks,
        pass,
    })
}

/// Runs the instances in order; reports are deterministic for fixed input.
pub fn lemma_suite(instances: &[Instance], tol: &SuiteTolerances) -> Result<SuiteReport> {
    let instances = instances
        .iter()
        .map(|i| run_instance(i, tol))
        .collect::<Result<Vec<_>>>()?;
    let pass = instances.iter().all(|i| i.pass);
    Ok(SuiteReport { instances, pass })
}

fn interval_instance(name: &str, k: ConvexBody, phi: ExteriorData, kernel: KernelSpec) -> Instance {
    let config = SolveConfig::new(DomainSpec::Interval { lo: -1.0, hi: 1.0 }, k, phi, kernel, 1.0 / 64.0)
        .with_method(SolverMethod::PolicyIteration);
    Instance {
        name: name.into(),
        config,
    }
}

/// Five one-dimensional instances on `U = (−1, 1)`.
pub fn default_battery() -> Vec<Instance> {
    let sym = || ConvexBody::interval(1.0, 1.0).expect("valid interval");
    vec![
        interval_instance("zero_data", sym(), ExteriorData::Zero, KernelSpec::frac_laplacian(0.7)),
        interval_instance(
            "quadratic_frac",
            sym(),
            ExteriorData::Quadratic { c: 0.0, a: 0.25, r1: 1.5, r2: 2.0 },
            KernelSpec::frac_laplacian(0.7),
        ),
        interval_instance(
            "asymmetric_pucci_plus",
            ConvexBody::interval(0.8, 1.2).expect("valid interval"),
            ExteriorData::Quadratic { c: 0.0, a: 0.2, r1: 1.5, r2: 2.0 },
            KernelSpec::pucci_plus(0.5, 0.5, 2.0),
        ),
        interval_instance(
            "quadratic_pucci_minus",
            sym(),
            ExteriorData::Quadratic { c: -0.1, a: 0.25, r1: 1.5, r2: 2.0 },
            KernelSpec::pucci_minus(0.4, 0.5, 2.0),
        ),
        interval_instance(
            "custom_kernel",
            sym(),
            ExteriorData::Quadratic { c: 0.1, a: 0.2, r1: 1.5, r2: 2.0 },
            KernelSpec::custom(0.85, 0.5, 2.0, Modulation::Constant { m: 1.5 }),
        ),
    ]
}

/// Ball gauge with zero data and an ellipse gauge with quadratic data, both
/// on the unit disk.
pub fn disk_battery() -> Vec<Instance> {
    let config = SolveConfig::new(
        DomainSpec::Disk { center: [0.0, 0.0], r: 1.0 },
        ConvexBody::ball(1.0).expect("valid ball"),
        ExteriorData::Zero,
        KernelSpec::frac_laplacian(0.6),
        1.0 / 16.0,
    )
    .with_method(SolverMethod::PolicyIteration);
    let ellipse = SolveConfig::new(
        DomainSpec::Disk { center: [0.0, 0.0], r: 1.0 },
        ConvexBody::ellipse(1.2, 0.8).expect("valid ellipse"),
        ExteriorData::Quadratic { c: 0.0, a: 0.2, r1: 1.5, r2: 2.0 },
        KernelSpec::pucci_plus(0.6, 0.5, 2.0),
        1.0 / 16.0,
    )
    .with_method(SolverMethod::PolicyIteration);
    vec![
        Instance {
            name: "disk_ball_zero".into(),
            config,
        },
        Instance {
            name: "disk_ellipse_quadratic".into(),
            config: ellipse,
        },
    ]
}

/// Contact labels per grid node: 0 elastic or exterior, 1 `P⁺`, 2 `P⁻`.
pub fn contact_labels(grid_len: usize, dec: &CoincidenceDecomposition) -> Vec<u8> {
    let mut out = vec![0u8; grid_len];
    for (k, &node) in dec.interior.iter().enumerate() {
        out[node] = if dec.plus[k] {
            1
        } else if dec.minus[k] {
            2
        } else {
            0
        };
    }
    out
}

/// Indices of `a` not present in `b`.
pub fn mask_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let b: HashSet<usize> = b.iter().copied().collect();
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}
