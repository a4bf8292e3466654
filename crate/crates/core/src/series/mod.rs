//! Certified evaluation of `F_L(α)(z) = Σ α(n)(z) L(n)(z)`.
//!
//! Every value comes with a tail bound derived from the declared growth
//! certificate of `α` and the decay certificate of `L`; the certificate is
//! audited on the summed prefix before the bound is trusted.

mod hp;
mod peel;
mod probe;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{convolve, ArithError, ArithFunc, GrowthCert};
use crate::kernel::{power_tail, Kernel, KernelError};

pub use hp::{ForwardOracle, HpComplex, SeriesOracle};
pub use peel::{default_schedule, peel, PeelConfig, PeelReport, PeelRow, Rounding};
pub use probe::{decay_probe, default_probe_grid, DecayProbeReport, ProbeTarget, ProbeVerdict, PROBE_TOLERANCE};

/// Largest truncation [`evaluate_to_tolerance`] will sum to.
pub const DEFAULT_TRUNCATION_CAP: u64 = 100_000_000;

/// Terms per summation block; blocks are reduced pairwise in index order,
/// so results do not depend on the thread count.
const BLOCK: usize = 4096;

/// Relative slack allowed when auditing float values against a certificate.
const AUDIT_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("Re z = {re} is not past the certified abscissa {abscissa}")]
    Divergent { re: f64, abscissa: f64 },
    #[error("{0} has no growth certificate")]
    CertificateMissing(String),
    #[error("growth certificate of {function} fails at n = {n}: |α(n)(z)| = {observed} > {declared}")]
    CertificateViolation { function: String, n: u64, observed: f64, declared: f64 },
    #[error("tail bound {tail_at_cap:e} at the truncation cap {cap} is above the tolerance {tol:e}")]
    BudgetExceeded { tol: f64, cap: u64, tail_at_cap: f64 },
    #[error("kernel is not a monoid morphism (witness {witness:?})")]
    NotMorphism { witness: Option<(u64, u64)> },
    #[error("cannot certify coefficient {n0}: best error majorant {majorant:e}")]
    RecoveryUncertain { n0: u64, majorant: f64 },
    #[error("{function}({n}) is not a constant Gaussian rational")]
    UnsupportedCoefficients { function: String, n: u64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("f({x}) is not finite and nonzero (got {value})")]
    NonFinite { x: f64, value: f64 },
    #[error("truncation must be at least 1")]
    InvalidTruncation,
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A truncated sum with its certified tail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Bound on `|Σ_{n>N} α(n)(z) L(n)(z)|`.
    pub tail_bound: f64,
    pub truncation_n: u64,
    pub abscissa_kprime: f64,
    /// Bound on the floating-point error of the partial sum.
    pub rounding_bound: f64,
    /// `M(z)` from the declared certificate.
    pub growth_constant: f64,
    /// `max_{n ≤ N} |α(n)(z)| / n^k` observed while summing.
    pub audited_constant: f64,
}

impl SeriesValue {
    /// `tail_bound + rounding_bound`.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// `k′ = max{(k+1)/c, k}`.
pub fn abscissa(k: f64, c: f64) -> f64 {
    assert!(c > 0.0, "decay constant must be positive");
    ((k + 1.0) / c).max(k)
}

/// `C·C_L(z)·N^{1−s}/(s−1)` with `s = c·x − k`, bounding the tail of a series
/// whose terms satisfy `|α(n)(z)L(n)(z)| ≤ C·C_L(z)·n^{−s}`.
pub fn tail_bound(
    c_growth: f64,
    k: f64,
    decay_c_at_z: f64,
    c: f64,
    x: f64,
    n: u64,
) -> Result<f64, SeriesError> {
    if n == 0 {
        return Err(SeriesError::InvalidTruncation);
    }
    power_tail(c * x - k, n)
        .map(|t| c_growth * decay_c_at_z * t)
        .ok_or(SeriesError::Divergent { re: x, abscissa: (k + 1.0) / c })
}

fn certificate(a: &ArithFunc) -> Result<&GrowthCert, SeriesError> {
    a.growth().ok_or_else(|| SeriesError::CertificateMissing(a.label()))
}

fn check_abscissa(cert: &GrowthCert, l: &Kernel, z: Complex64) -> Result<f64, SeriesError> {
    let kprime = l.abscissa(cert.k);
    if z.re <= kprime {
        return Err(SeriesError::Divergent { re: z.re, abscissa: kprime });
    }
    Ok(kprime)
}

/// Certified tail after `N` terms: zero past the declared support.
fn certified_tail(cert: &GrowthCert, l: &Kernel, z: Complex64, n: u64) -> Result<f64, SeriesError> {
    if cert.support.is_some_and(|s| n >= s) {
        return Ok(0.0);
    }
    let m = cert.at(z) * l.decay_constant_at(z);
    if m == 0.0 {
        return Ok(0.0);
    }
    l.tail_sum(cert.k, z.re, n)
        .map(|t| m * t)
        .ok_or(SeriesError::Divergent { re: z.re, abscissa: l.abscissa(cert.k) })
}

fn pairwise(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise(&v[..n / 2]) + pairwise(&v[n / 2..]),
    }
}

/// `Σ_{n≤N} α(n)(z) L(n)(z)` with the certified tail bound.
///
/// Fails with [`SeriesError::CertificateMissing`] if `α` declares no growth
/// certificate, [`SeriesError::Divergent`] if `Re z` is not past the
/// abscissa, and [`SeriesError::CertificateViolation`] if a summed value
/// exceeds the declared bound.
pub fn evaluate(a: &ArithFunc, l: &Kernel, z: Complex64, n: u64) -> Result<SeriesValue, SeriesError> {
    let cert = certificate(a)?;
    let kprime = check_abscissa(cert, l, z)?;
    if n == 0 {
        return Err(SeriesError::InvalidTruncation);
    }
    if z.re <= l.domain_k() {
        return Err(KernelError::DomainError { re: z.re, domain_k: l.domain_k() }.into());
    }
    let summed = cert.support.map_or(n, |s| s.min(n));
    let values = a.values_at(summed, z)?;
    let m = cert.at(z);

    let blocks: Vec<Result<(Complex64, f64, f64), SeriesError>> = values[1..]
        .par_chunks(BLOCK)
        .enumerate()
        .map(|(b, chunk)| {
            let (mut acc, mut abs, mut worst) = (Complex64::new(0.0, 0.0), 0.0f64, 0.0f64);
            for (i, v) in chunk.iter().enumerate() {
                let idx = (b * BLOCK + i + 1) as u64;
                let ratio = v.norm() / (idx as f64).powf(cert.k);
                if ratio > m * (1.0 + AUDIT_SLACK) {
                    return Err(SeriesError::CertificateViolation {
                        function: a.label(),
                        n: idx,
                        observed: v.norm(),
                        declared: m * (idx as f64).powf(cert.k),
                    });
                }
                worst = worst.max(ratio);
                if v.norm() == 0.0 {
                    continue;
                }
                let t = v * l.eval(idx, z)?;
                acc += t;
                abs += t.norm();
            }
            Ok((acc, abs, worst))
        })
        .collect();

    let mut sums = Vec::with_capacity(blocks.len());
    let (mut abs_total, mut audited) = (0.0f64, 0.0f64);
    for b in blocks {
        let (s, abs, worst) = b?;
        sums.push(s);
        abs_total += abs;
        audited = audited.max(worst);
    }
    let value = pairwise(&sums);
    let depth = (sums.len().max(1) as f64).log2().ceil();
    // per-term exp/log error plus sequential in-block and pairwise accumulation
    let rounding_bound = (BLOCK as f64 + depth + 16.0) * f64::EPSILON * abs_total;

    Ok(SeriesValue {
        value,
        tail_bound: certified_tail(cert, l, z, n)?,
        truncation_n: n,
        abscissa_kprime: kprime,
        rounding_bound,
        growth_constant: m,
        audited_constant: audited,
    })
}

/// Doubling policy for [`evaluate_to_tolerance_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TolerancePolicy {
    pub n0: u64,
    pub cap: u64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { n0: 1, cap: DEFAULT_TRUNCATION_CAP }
    }
}

/// Truncation `2^j·N₀` for the smallest `j` whose certified tail is at most `tol`.
pub fn truncation_for(
    a: &ArithFunc,
    l: &Kernel,
    z: Complex64,
    tol: f64,
    policy: TolerancePolicy,
) -> Result<u64, SeriesError> {
    let cert = certificate(a)?;
    check_abscissa(cert, l, z)?;
    let mut n = policy.n0.max(1);
    loop {
        let tail = certified_tail(cert, l, z, n)?;
        if tail <= tol {
            return Ok(n);
        }
        if n >= policy.cap {
            return Err(SeriesError::BudgetExceeded { tol, cap: policy.cap, tail_at_cap: tail });
        }
        n = (n * 2).min(policy.cap);
    }
}

/// [`evaluate`] at the truncation picked by [`truncation_for`] with the default policy.
pub fn evaluate_to_tolerance(a: &ArithFunc, l: &Kernel, z: Complex64, tol: f64) -> Result<SeriesValue, SeriesError> {
    evaluate_to_tolerance_with(a, l, z, tol, TolerancePolicy::default())
}

pub fn evaluate_to_tolerance_with(
    a: &ArithFunc,
    l: &Kernel,
    z: Complex64,
    tol: f64,
    policy: TolerancePolicy,
) -> Result<SeriesValue, SeriesError> {
    let n = truncation_for(a, l, z, tol, policy)?;
    evaluate(a, l, z, n)
}

/// `|F(α·β)(z) − F(α)(z)F(β)(z)|` against its certified bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub residual: f64,
    pub bound: f64,
    pub f_alpha: SeriesValue,
    pub f_beta: SeriesValue,
    pub f_product: SeriesValue,
}

impl ResidualReport {
    pub fn within_bound(&self) -> bool {
        self.residual <= self.bound
    }
}

/// Evaluates `F(α)`, `F(β)` and `F(α·β)` to tolerance `tol` each. The bound
/// is `tol·(2 + |F(α)| + |F(β)|)` plus the three rounding bounds, covering
/// the truncation errors of all three sums (`tol ≤ 1`).
pub fn homomorphism_residual(
    a: &ArithFunc,
    b: &ArithFunc,
    l: &Kernel,
    z: Complex64,
    tol: f64,
) -> Result<ResidualReport, SeriesError> {
    if !l.is_monoid_morphism() {
        return Err(SeriesError::NotMorphism { witness: l.morphism_check().witness });
    }
    let ab = convolve(a, b);
    let fa = evaluate_to_tolerance(a, l, z, tol)?;
    let fb = evaluate_to_tolerance(b, l, z, tol)?;
    let fab = evaluate_to_tolerance(&ab, l, z, tol)?;
    let residual = (fab.value - fa.value * fb.value).norm();
    let (na, nb) = (fa.value.norm(), fb.value.norm());
    let rounding = fab.rounding_bound
        + fa.rounding_bound * (nb + fb.error_bound())
        + fb.rounding_bound * (na + fa.error_bound());
    let bound = tol * (2.0 + na + nb) + rounding;
    Ok(ResidualReport { residual, bound, f_alpha: fa, f_beta: fb, f_product: fab })
}
