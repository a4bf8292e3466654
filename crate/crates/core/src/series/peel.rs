//! Coefficient recovery from values of `F_L(α)` on the real ray.
//!
//! Once `α(1), …, α(n₀−1)` are known,
//! `(G(x) − Σ_{n<n₀} α(n)L(n)(x)) / L(n₀)(x) = α(n₀) + R(x)` with
//! `|R(x)| ≤ C Σ_{n>n₀} n^k |L(n)(x)/L(n₀)(x)| ≤ C Σ_{n>n₀} n^{−σ}`,
//! `σ = C(n₀)·x − k`, which vanishes as `x → ∞`.

use num::bigint::BigInt;
use num::BigRational;
use serde::Serialize;

use crate::arith::GaussRational;
use crate::kernel::{HpFloat, Kernel};

use super::hp::{kernel_hp, HpComplex, SeriesOracle};
use super::SeriesError;

/// Absolute accuracy, in bits past the scale of `L(n₀)(x)`, requested from the oracle.
const GUARD_BITS: usize = 96;

/// How recovered values are turned into exact coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Rounding {
    /// Round to the nearest Gaussian integer once the majorant is below `1/2`.
    Integer,
    /// Round to the nearest multiple of `1/q` once the majorant is below `1/(2q)`.
    Denominator { q: u64 },
    /// Keep the approximation once the majorant is below `tol`.
    None { tol: f64 },
}

impl Rounding {
    fn threshold(&self) -> f64 {
        match self {
            Rounding::Integer => 0.5,
            Rounding::Denominator { q } => 0.5 / *q as f64,
            Rounding::None { tol } => *tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeelConfig {
    pub n_max: u64,
    /// Increasing evaluation points; each coefficient uses the first one whose
    /// majorant is below the rounding threshold.
    pub schedule: Vec<f64>,
    /// `(C, k)` in `|α(n)| ≤ C n^k`.
    pub growth_c: f64,
    pub growth_k: f64,
    pub rounding: Rounding,
}

impl PeelConfig {
    pub fn new(n_max: u64, growth_c: f64, growth_k: f64) -> Self {
        PeelConfig { n_max, schedule: default_schedule(), growth_c, growth_k, rounding: Rounding::Integer }
    }
}

/// `x_i = 20·1.5^i`, `i = 0..8`. For the classical kernel and `|α(n)| ≤ 10`
/// the last point drives the majorant for `n₀ = 8` to about `10^{−16}`.
pub fn default_schedule() -> Vec<f64> {
    (0..8).map(|i| 20.0 * 1.5f64.powi(i)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeelRow {
    pub n: u64,
    pub x: f64,
    pub recovered_re: f64,
    pub recovered_im: f64,
    pub error_majorant: f64,
    pub rounded: Option<GaussRational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeelReport {
    pub rows: Vec<PeelRow>,
    pub config: PeelConfig,
}

impl PeelReport {
    /// The exact coefficients, if every row was rounded.
    pub fn coefficients(&self) -> Option<Vec<GaussRational>> {
        self.rows.iter().map(|r| r.rounded.clone()).collect()
    }
}

/// `C (n₀+1)^{−σ} (1 + (n₀+1)/(σ−1))` bounds `C Σ_{n>n₀} n^{−σ}`.
fn truncation_majorant(c: f64, n0: u64, sigma: f64) -> f64 {
    let m = (n0 + 1) as f64;
    c * (-sigma * m.ln()).exp() * (1.0 + m / (sigma - 1.0))
}

fn round_hp(v: &HpFloat, q: u64) -> BigRational {
    let scaled = v * HpFloat::from(q);
    let i: BigInt = scaled.round().to_int().value().to_string().parse().expect("decimal integer");
    BigRational::new(i, BigInt::from(q))
}

/// Recovers `α(1..=n_max)` from the oracle `G = F_L(α)`.
///
/// Fails with [`SeriesError::RecoveryUncertain`] at the first `n₀` whose
/// majorant cannot be brought below the rounding threshold on the schedule.
pub fn peel(g: &dyn SeriesOracle, l: &Kernel, cfg: &PeelConfig) -> Result<PeelReport, SeriesError> {
    if cfg.schedule.is_empty() || cfg.schedule.windows(2).any(|w| w[0] >= w[1]) || cfg.schedule[0] <= 0.0 {
        return Err(SeriesError::InvalidGrid("peel schedule must be positive and increasing".into()));
    }
    let threshold = cfg.rounding.threshold();
    let lambdas: Vec<f64> = (1..=cfg.n_max).map(|n| l.lambda().value(n)).collect::<Result<_, _>>()?;
    let mut recovered: Vec<HpComplex> = Vec::new();
    let mut errors: Vec<f64> = Vec::new();
    let mut rows = Vec::new();

    for n0 in 1..=cfg.n_max {
        let ratio = l.ratio_c(n0).ok_or(SeriesError::RecoveryUncertain { n0, majorant: f64::INFINITY })?;
        let lam0 = lambdas[n0 as usize - 1];
        let mut best = f64::INFINITY;
        let mut chosen = None;
        for &x in &cfg.schedule {
            let sigma = ratio * x - cfg.growth_k;
            if sigma <= 1.0 {
                continue;
            }
            let inherited: f64 = errors
                .iter()
                .zip(&lambdas)
                .map(|(e, lam)| if *e == 0.0 { 0.0 } else { e * ((lam0 - lam) * x).exp() })
                .sum();
            let guard = (n0 + 1) as f64 * (-(GUARD_BITS as f64) + 6.0).exp2();
            let majorant = truncation_majorant(cfg.growth_c, n0, sigma) + inherited + guard;
            best = best.min(majorant);
            if majorant < threshold {
                chosen = Some((x, majorant));
                break;
            }
        }
        let (x, majorant) = chosen.ok_or(SeriesError::RecoveryUncertain { n0, majorant: best })?;

        let scale_bits = (lam0 * x / std::f64::consts::LN_2).ceil().max(0.0) as usize;
        let abs_bits = scale_bits + GUARD_BITS;
        let p = abs_bits + 64;
        let mut acc = g.eval(x, abs_bits)?;
        for (n, a) in recovered.iter().enumerate() {
            let ln = kernel_hp(l, n as u64 + 1, x, p)?;
            acc = &acc - &a.scale(&ln);
        }
        let value = acc.div_real(&kernel_hp(l, n0, x, p)?);
        let (re, im) = value.to_f64();

        let rounded = match &cfg.rounding {
            Rounding::Integer => Some(GaussRational::new(round_hp(&value.re, 1), round_hp(&value.im, 1))),
            Rounding::Denominator { q } => Some(GaussRational::new(round_hp(&value.re, *q), round_hp(&value.im, *q))),
            Rounding::None { .. } => None,
        };
        match &rounded {
            Some(exact) => {
                recovered.push(HpComplex::from_gauss(exact, p));
                errors.push(0.0);
            }
            None => {
                recovered.push(value);
                errors.push(majorant);
            }
        }
        rows.push(PeelRow { n: n0, x, recovered_re: re, recovered_im: im, error_majorant: majorant, rounded });
    }
    Ok(PeelReport { rows, config: cfg.clone() })
}
