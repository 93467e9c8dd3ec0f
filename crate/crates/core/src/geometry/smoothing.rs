use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Point, Result};

use super::{unit, BodyRep, ConvexBody, DEFAULT_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothingParams {
    /// Mollifier half-width at `k = 0`, in radians.
    pub delta0: f64,
    /// Additive margin scale.
    pub eps0: f64,
    /// Direction-grid size for the sampled result.
    pub samples: usize,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            delta0: 0.4,
            eps0: 0.05,
            samples: 4 * DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SmoothingReport {
    pub k: u32,
    /// Mollifier half-width `δ₀ 2^{-k}`.
    pub width: f64,
    pub margin: f64,
    /// Angular Lipschitz bound of the sampled support function.
    pub lipschitz: f64,
    /// Sampled Hausdorff distance to the input body (`max_j h_k − h`).
    pub hausdorff: f64,
    /// A priori bound on `hausdorff`.
    pub hausdorff_bound: f64,
    pub min_curvature_radius: f64,
}

/// Smooth, positively curved outer approximation `K°_k` of `body_polar`.
///
/// The support function is sampled, convolved with a C² bump of half-width
/// `δ_k = δ₀ 2^{-k}` and lifted by `ε_k = (1 + δ_k) L δ_k + 2^{-k} ε₀`.
/// A sampled support function satisfies `h_{j-i} + h_{j+i} ≥ 2 cos(iΔ) h_j`,
/// so the symmetric average loses at most `L δ_k² / 2` and gains at most
/// `L δ_k`; the margin therefore gives `h < h_{k+1} < h_k` at every sample.
pub fn smooth_approx(
    body_polar: &ConvexBody,
    k: u32,
    params: &SmoothingParams,
) -> Result<(ConvexBody, SmoothingReport)> {
    if !(params.delta0 > 0.0 && params.eps0 > 0.0) {
        return Err(Error::validation("smoothing", "delta0 and eps0 must be positive"));
    }
    let scale = 0.5f64.powi(k as i32);
    if let BodyRep::Interval { a, b } = body_polar.rep() {
        let eps = scale * params.eps0;
        let body = ConvexBody::interval(a + eps, b + eps)?;
        let report = SmoothingReport {
            k,
            width: 0.0,
            margin: eps,
            lipschitz: 0.0,
            hausdorff: eps,
            hausdorff_bound: eps,
            min_curvature_radius: f64::INFINITY,
        };
        return Ok((body, report));
    }
    let m = params.samples;
    let step = 2.0 * PI / m as f64;
    let width = params.delta0 * scale;
    if width < 2.0 * step {
        return Err(Error::Config(format!(
            "smoothing level {k} has width {width:.3e} rad below two direction-grid steps \
             ({step:.3e} rad); increase smoothing.samples"
        )));
    }
    let h: Vec<f64> = (0..m).map(|j| body_polar.support(&unit(j as f64 * step))).collect();
    let lipschitz = h.iter().copied().fold(0.0, f64::max) / (0.5 * step).cos();

    let half = (width / step).ceil() as usize;
    let weights: Vec<f64> = (0..=half)
        .map(|i| {
            let t = i as f64 * step / width;
            if t < 1.0 {
                (1.0 - t * t).powi(3)
            } else {
                0.0
            }
        })
        .collect();
    let total = weights[0] + 2.0 * weights[1..].iter().sum::<f64>();
    let margin = (1.0 + width) * lipschitz * width + scale * params.eps0;
    let smoothed: Vec<f64> = (0..m)
        .map(|j| {
            let mut acc = weights[0] * h[j];
            for (i, w) in weights.iter().enumerate().skip(1) {
                acc += w * (h[(j + i) % m] + h[(j + m - i % m) % m]);
            }
            acc / total + margin
        })
        .collect();
    let hausdorff = smoothed
        .iter()
        .zip(&h)
        .map(|(a, b)| a - b)
        .fold(0.0, f64::max);
    let body = ConvexBody::support_samples(smoothed, true)?;
    let min_curvature_radius = match body.rep() {
        BodyRep::SupportSamples(s) => s.min_curvature_radius(),
        _ => unreachable!(),
    };
    let report = SmoothingReport {
        k,
        width,
        margin,
        lipschitz,
        hausdorff,
        hausdorff_bound: lipschitz * width + margin,
        min_curvature_radius,
    };
    Ok((body, report))
}

/// Largest distance along rays between the boundaries of `a` and `b`:
/// `max_u |1/γ_a(u) − 1/γ_b(u)|`.
pub fn radial_distance(a: &ConvexBody, b: &ConvexBody, m: usize) -> f64 {
    let dirs: Vec<Point> = if a.dim() == 1 {
        vec![Point::new(1.0, 0.0), Point::new(-1.0, 0.0)]
    } else {
        (0..m).map(|j| unit(2.0 * PI * (j as f64 + 0.5) / m as f64)).collect()
    };
    dirs.iter()
        .map(|u| (1.0 / a.gauge(u) - 1.0 / b.gauge(u)).abs())
        .fold(0.0, f64::max)
}
