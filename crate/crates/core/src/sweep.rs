//! Solves along the smoothing sequence `K°_k` of a possibly nonsmooth body.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{holder_scan, HolderScan};
use crate::geometry::{smooth_approx, SmoothingParams, SmoothingReport};
use crate::grid::GridField;
use crate::solver::{Discretization, Problem, SolveConfig, SolveReport};
use crate::{Error, Point, Result};

/// Number of directions used to certify `K°_{k+1} ⊂ int K°_k`.
pub const NESTING_DIRECTIONS: usize = 4096;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub k_max: u32,
    pub smoothing: SmoothingParams,
    /// Hölder exponent of the reported quotient table.
    pub alpha: f64,
    /// Largest allowed ratio between the obstacle constants `C_k`.
    pub constant_spread: f64,
    /// Largest allowed ratio between `sup |I_h u_k|` over the window and its
    /// value at `k = 1`, floored at ten residual tolerances.
    pub operator_spread: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            k_max: 5,
            smoothing: SmoothingParams::default(),
            alpha: 0.5,
            constant_spread: 4.0,
            operator_spread: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepLevel {
    pub k: u32,
    pub smoothing: SmoothingReport,
    /// `min_u (h_{k-1}(u) − h_k(u))` over the direction grid; `None` at `k = 1`.
    pub nesting_margin: Option<f64>,
    /// `max |ρ_k − ρ|` over interior nodes.
    pub rho_deviation: f64,
    /// `rho_deviation / (δ_k diam U)`.
    pub rho_constant: f64,
    /// `−ρ̄_{k-1} ≤ −ρ̄_k ≤ u_k ≤ ρ_k ≤ ρ_{k-1}` at every interior node.
    pub sandwich: bool,
    /// `sup |u_k − u_{k-1}|`; `None` at `k = 1`.
    pub diff_prev: Option<f64>,
    /// `sup |I_h u_k|` over nodes with `d(x, ∂U) > τ`.
    pub operator_window: f64,
    pub holder: HolderScan,
    pub report: SolveReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub levels: Vec<SweepLevel>,
    pub nested: bool,
    pub diffs_decreasing: bool,
    pub rho_constant_min: f64,
    pub rho_constant_max: f64,
    pub rho_constant_stable: bool,
    /// Measured `C_V = max_k sup |I_h u_k|` over the window.
    pub c_v: f64,
    pub operator_bounded: bool,
    pub sandwich: bool,
}

impl SweepSummary {
    pub fn pass(&self) -> bool {
        self.nested && self.diffs_decreasing && self.rho_constant_stable && self.operator_bounded && self.sandwich
    }
}

fn directions(dim: usize) -> Vec<Point> {
    if dim == 1 {
        return vec![Point::new(1.0, 0.0), Point::new(-1.0, 0.0)];
    }
    (0..NESTING_DIRECTIONS)
        .map(|j| {
            let t = std::f64::consts::TAU * (j as f64 + 0.5) / NESTING_DIRECTIONS as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect()
}

/// Runs `k = 1..=k_max`. `config.body` is `K`; level `k` solves the double
/// obstacle problem for `K_k = (K°_k)°`.
pub fn smoothing_sweep(config: &SolveConfig, options: &SweepOptions) -> Result<(Vec<GridField>, SweepSummary)> {
    if options.k_max == 0 {
        return Err(Error::validation("sweep.k_max", "must be at least 1"));
    }
    let base = Discretization::new(config)?;
    let polar = config.body.polar()?;
    let dirs = directions(config.domain.dim());
    let diam = config.domain.diameter();
    let tau = config.window_tau;

    let mut fields: Vec<GridField> = Vec::new();
    let mut levels: Vec<SweepLevel> = Vec::new();
    let mut prev_support: Option<Vec<f64>> = None;
    let mut prev_obstacles: Option<(Vec<f64>, Vec<f64>)> = None;
    for k in 1..=options.k_max {
        let (polar_k, smoothing) = smooth_approx(&polar, k, &options.smoothing)?;
        let support: Vec<f64> = dirs.iter().map(|u| polar_k.support(u)).collect();
        let nesting_margin = prev_support
            .as_ref()
            .map(|p| p.iter().zip(&support).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min));
        let mut cfg = config.clone();
        cfg.body = polar_k.polar()?;
        let d = Discretization::new(&cfg)?;
        if d.interior != base.interior {
            return Err(Error::Config("sweep levels must share the interior node set".into()));
        }
        let (u, report) = d.solve(&cfg, Problem::DoubleObstacle)?;

        let rho_deviation = d.rho.iter().zip(&base.rho).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let delta = options.smoothing.delta0 * 0.5f64.powi(k as i32);
        let values = d.interior_values(&u);
        let slack = config.tol_residual;
        let mut sandwich = (0..d.len()).all(|i| -d.rho_bar[i] - slack <= values[i] && values[i] <= d.rho[i] + slack);
        if let Some((r, rb)) = &prev_obstacles {
            sandwich &= (0..d.len()).all(|i| d.rho[i] <= r[i] + slack && d.rho_bar[i] <= rb[i] + slack);
        }
        let diff_prev = fields.last().map(|p| {
            p.values
                .iter()
                .zip(&u.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        });
        let mi = d.minus_operator(&u);
        let operator_window = d
            .interior
            .iter()
            .zip(&mi)
            .filter(|(n, _)| config.domain.signed_distance(&d.grid.node(**n)) > tau)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        let holder = holder_scan(&u, &config.domain, tau, options.alpha);

        levels.push(SweepLevel {
            k,
            smoothing,
            nesting_margin,
            rho_deviation,
            rho_constant: rho_deviation / (delta * diam),
            sandwich,
            diff_prev,
            operator_window,
            holder,
            report,
        });
        prev_support = Some(support);
        prev_obstacles = Some((d.rho.clone(), d.rho_bar.clone()));
        fields.push(u);
    }

    let nested = levels.iter().filter_map(|l| l.nesting_margin).all(|m| m > 0.0);
    let diffs: Vec<f64> = levels.iter().filter_map(|l| l.diff_prev).collect();
    let diffs_decreasing = diffs.windows(2).all(|w| w[1] < w[0] || w[0].max(w[1]) <= config.tol_residual);
    let (cmin, cmax) = levels
        .iter()
        .map(|l| l.rho_constant)
        .fold((f64::INFINITY, 0.0f64), |(a, b), c| (a.min(c), b.max(c)));
    let c_v = levels.iter().map(|l| l.operator_window).fold(0.0, f64::max);
    let first = levels[0].operator_window;
    let summary = SweepSummary {
        nested,
        diffs_decreasing,
        rho_constant_min: cmin,
        rho_constant_max: cmax,
        rho_constant_stable: cmax <= options.constant_spread * cmin.max(f64::MIN_POSITIVE),
        c_v,
        operator_bounded: c_v <= options.operator_spread * first.max(10.0 * config.tol_residual),
        sandwich: levels.iter().all(|l| l.sandwich),
        levels,
    };
    Ok((fields, summary))
}
