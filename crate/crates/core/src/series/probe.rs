//! Heuristic growth classification on the real ray.
//!
//! `f ∈ ℐ` when `e^{ax}|f(x)| → 0` for some `a > 0`, `f ∈ ℬ` when
//! `e^{−ax}|f(x)| → 0` for every `a > 0`. Both are limit statements; the probe
//! only fits the slope of `log|f(x)|` on a finite grid and reports evidence.

use num::complex::Complex64;
use serde::Serialize;

use super::SeriesError;

/// Slopes within `±PROBE_TOLERANCE` of zero count as subexponential.
pub const PROBE_TOLERANCE: f64 = 1e-3;

pub enum ProbeTarget<'a> {
    Values(&'a dyn Fn(f64) -> Complex64),
    /// `x ↦ log|f(x)|`, for functions whose values over- or underflow.
    LogModulus(&'a dyn Fn(f64) -> f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    InI,
    InBNotI,
    OutsideB,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProbeReport {
    pub slope_estimate: f64,
    /// `(x, log|f(x)|)`.
    pub samples: Vec<(f64, f64)>,
    pub verdict: ProbeVerdict,
    pub tolerance: f64,
}

/// 16 equally spaced points on `[1000, 4000]`.
pub fn default_probe_grid() -> Vec<f64> {
    (0..16).map(|i| 1000.0 + 200.0 * i as f64).collect()
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn classify(s: f64) -> ProbeVerdict {
    if s < -PROBE_TOLERANCE {
        ProbeVerdict::InI
    } else if s > PROBE_TOLERANCE {
        ProbeVerdict::OutsideB
    } else {
        ProbeVerdict::InBNotI
    }
}

/// Least-squares slope of `log|f(x)|` over the upper half of `x_grid`.
///
/// The verdict is `inconclusive` when the two halves of that window
/// classify differently. Fails with [`SeriesError::NonFinite`] at the first
/// grid point where `|f(x)|` is infinite, NaN or zero.
pub fn decay_probe(f: ProbeTarget<'_>, x_grid: &[f64]) -> Result<DecayProbeReport, SeriesError> {
    if x_grid.len() < 8 {
        return Err(SeriesError::InvalidGrid(format!("need at least 8 points, got {}", x_grid.len())));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SeriesError::InvalidGrid("grid must be increasing".into()));
    }
    let (lo, hi) = (x_grid[0], x_grid[x_grid.len() - 1]);
    if !(lo > 0.0 && hi >= 2.0 * lo) {
        return Err(SeriesError::InvalidGrid(format!("need 0 < min and max ≥ 2·min, got [{lo}, {hi}]")));
    }
    let mut samples = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let y = match &f {
            ProbeTarget::Values(g) => {
                let m = g(x).norm();
                if !(m.is_finite() && m > 0.0) {
                    return Err(SeriesError::NonFinite { x, value: m });
                }
                m.ln()
            }
            ProbeTarget::LogModulus(g) => {
                let y = g(x);
                if !y.is_finite() {
                    return Err(SeriesError::NonFinite { x, value: y.exp() });
                }
                y
            }
        };
        samples.push((x, y));
    }
    let top = &samples[samples.len() / 2..];
    let s = slope(top);
    let mid = top.len() / 2;
    let verdict = if classify(slope(&top[..mid.max(2)])) != classify(slope(&top[mid.min(top.len() - 2)..])) {
        ProbeVerdict::Inconclusive
    } else {
        classify(s)
    };
    Ok(DecayProbeReport { slope_estimate: s, samples, verdict, tolerance: PROBE_TOLERANCE })
}
