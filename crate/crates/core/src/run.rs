//! Subcommand driver: reads a [`RunConfig`], runs one stage and writes its
//! artifacts together with a checksummed manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Battery, RunConfig};
use crate::diagnostics::{default_battery, disk_battery, lemma_suite, Instance};
use crate::domain::validate_exterior_data;
use crate::geometry::ConvexBody;
use crate::grid::{Format, Grid};
use crate::obstacle::obstacle_field;
use crate::solver::{certify_with, Discretization};
use crate::sweep::smoothing_sweep;
use crate::{Error, Point, Result, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Geometry,
    Obstacle,
    Solve,
    Verify,
    Sweep,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Self::Geometry => "geometry",
            Self::Obstacle => "obstacle",
            Self::Solve => "solve",
            Self::Verify => "verify",
            Self::Sweep => "sweep",
        }
    }
}

impl std::str::FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "geometry" => Self::Geometry,
            "obstacle" => Self::Obstacle,
            "solve" => Self::Solve,
            "verify" => Self::Verify,
            "sweep" => Self::Sweep,
            _ => return Err(Error::Parse(format!("unknown subcommand {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: Subcommand,
    /// SHA-256 of the configuration file as read.
    pub config_hash: String,
    pub tool_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub artifacts: Vec<Artifact>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
}

impl RunOutcome {
    pub fn pass(&self) -> bool {
        self.manifest.pass
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            5
        }
    }
}

/// Process exit status for an error: 2 parse, 3 validation, 4 nonconvergence,
/// 1 for I/O failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => 2,
        Error::Validation { .. }
        | Error::Config(_)
        | Error::Domain(_)
        | Error::Precondition(_)
        | Error::Degenerate(_) => 3,
        Error::NonConvergence { .. } => 4,
        Error::Io { .. } => 1,
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects artifacts in emission order; writes are sequential.
struct Writer {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl Writer {
    fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir,
            artifacts: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.artifacts.push(Artifact {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }
}

/// `angle,x,y,gauge,support` on `m` equally spaced directions, or the two
/// unit directions in one dimension.
pub fn body_table(body: &ConvexBody, m: usize) -> String {
    let dirs: Vec<(f64, Point)> = if body.dim() == 1 {
        vec![(0.0, Point::new(1.0, 0.0)), (std::f64::consts::PI, Point::new(-1.0, 0.0))]
    } else {
        (0..m)
            .map(|j| {
                let t = std::f64::consts::TAU * j as f64 / m as f64;
                (t, Point::new(t.cos(), t.sin()))
            })
            .collect()
    };
    let mut out = String::from("angle,x,y,gauge,support\n");
    for (t, u) in dirs {
        let _ = writeln!(
            out,
            "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            u.x,
            u.y,
            body.gauge(&u),
            body.support(&u)
        );
    }
    out
}

fn check_exterior(cfg: &RunConfig, body: &ConvexBody) -> Result<crate::domain::ExteriorReport> {
    let rep = validate_exterior_data(&cfg.domain, body, &cfg.exterior, cfg.geometry.validation_margin, cfg.seed)?;
    if !rep.ok() {
        return Err(Error::validation("exterior", rep.failures.join("; ")));
    }
    Ok(rep)
}

/// Runs `sub` on the configuration at `config_path`.
///
/// `out` overrides the configured output directory, which itself may be
/// overridden by the `NLGC_OUT` environment variable; `max_parallel`
/// overrides the configured thread count.
pub fn run(config_path: &Path, sub: Subcommand, out: Option<&Path>, max_parallel: Option<usize>) -> Result<RunOutcome> {
    let raw = std::fs::read(config_path).map_err(|e| Error::io(config_path, e))?;
    let text = String::from_utf8(raw.clone()).map_err(|e| Error::Parse(format!("config is not UTF-8: {e}")))?;
    let cfg = RunConfig::parse(&text)?;
    cfg.validate()?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.resolved_output_dir());
    let threads = max_parallel.unwrap_or(cfg.max_parallel);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let started = now();
    let mut w = Writer::new(dir.clone())?;
    let pass = pool.install(|| stage(&cfg, sub, &mut w))?;
    let manifest = RunManifest {
        subcommand: sub,
        config_hash: sha256_hex(&raw),
        tool_version: VERSION.to_string(),
        started_unix: started,
        finished_unix: now(),
        artifacts: w.artifacts.clone(),
        pass,
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    let path = dir.join("manifest.json");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(RunOutcome { out_dir: dir, manifest })
}

fn stage(cfg: &RunConfig, sub: Subcommand, w: &mut Writer) -> Result<bool> {
    let body = cfg.body.build()?;
    match sub {
        Subcommand::Geometry => {
            let polar = body.polar()?;
            w.put("gauge_table.csv", body_table(&body, cfg.geometry.samples).as_bytes())?;
            w.put("polar_table.csv", body_table(&polar, cfg.geometry.samples).as_bytes())?;
            let body_rep = body.validate();
            let ext = validate_exterior_data(&cfg.domain, &body, &cfg.exterior, cfg.geometry.validation_margin, cfg.seed)?;
            w.json(
                "validation.json",
                &serde_json::json!({ "body": &body_rep, "exterior": &ext }),
            )?;
            Ok(body_rep.ok() && ext.ok())
        }
        Subcommand::Obstacle => {
            check_exterior(cfg, &body)?;
            let grid = Grid::covering(&cfg.domain, cfg.grid.h)?;
            let field = obstacle_field(&cfg.domain, &body, &cfg.exterior, &grid, cfg.solver.boundary_samples, true)?;
            w.put("obstacles.csv", field.to_csv().as_bytes())?;
            let ridge: Vec<usize> = (0..grid.len()).filter(|&k| field.ridge[k].is_ridge()).collect();
            w.json(
                "ridge.json",
                &serde_json::json!({
                    "ridge_nodes": ridge,
                    "ridge_boundary_distance": field.ridge_boundary_distance,
                }),
            )?;
            Ok(true)
        }
        Subcommand::Solve => {
            check_exterior(cfg, &body)?;
            let sc = cfg.solve_config()?;
            let d = Discretization::new(&sc)?;
            let (u, report) = d.solve(&sc, cfg.solver.problem)?;
            w.put("u.csv", u.to_csv().as_bytes())?;
            w.put("u.json", u.to_json().as_bytes())?;
            w.json("report.json", &report)?;
            let cert = certify_with(&d, &u, &sc, cfg.solver.problem)?;
            w.json("certificate.json", &cert)?;
            Ok(report.residual <= sc.tol_residual)
        }
        Subcommand::Verify => {
            let instances = match cfg.verify.battery {
                Battery::Default => default_battery(),
                Battery::Disk => disk_battery(),
                Battery::Config => {
                    check_exterior(cfg, &body)?;
                    vec![Instance {
                        name: "config".into(),
                        config: cfg.solve_config()?,
                    }]
                }
            };
            let rep = lemma_suite(&instances, &cfg.tolerances())?;
            w.json("verify.json", &rep)?;
            Ok(rep.pass)
        }
        Subcommand::Sweep => {
            check_exterior(cfg, &body)?;
            let sc = cfg.solve_config()?;
            let (fields, summary) = smoothing_sweep(&sc, &cfg.sweep_options())?;
            for (l, u) in summary.levels.iter().zip(&fields) {
                w.put(&format!("sweep/u_k{}.csv", l.k), u.to_csv().as_bytes())?;
            }
            w.json("sweep.json", &summary)?;
            Ok(summary.pass())
        }
    }
}

/// Writes `u` as CSV or JSON.
pub fn export_field(u: &crate::grid::GridField, path: &Path, format: Format) -> Result<()> {
    u.export(path, format)
}
