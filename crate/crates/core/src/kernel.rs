//! Kernels `L(n)(z) = e^{−λ(n) z}` for an increasing exponent sequence `λ`.
//!
//! A kernel carries a decay certificate `|L(n)(z)| ≤ n^{−c·Re z}` (from the
//! declared `λ(n) ≥ c log n`) and ratio constants `C(n₀)` with
//! `|L(n)(z)/L(n₀)(z)| ≤ n^{−C(n₀) Re z}` for `n > n₀`. Both are audited on a
//! finite horizon that is recorded in the kernel.

use std::fmt;
use std::sync::Arc;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num::complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type HpFloat = FBig<HalfEven>;

/// Audit horizon used when none is given.
pub const DEFAULT_AUDIT_HORIZON: u64 = 10_000;

const MORPHISM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("kernel certificate fails at n = {n}: {reason}")]
    CertificateViolation { n: u64, reason: String },
    #[error("Re z = {re} is outside the kernel domain Re z > {domain_k}")]
    DomainError { re: f64, domain_k: f64 },
    #[error("λ({n}) is not defined (table has {len} entries)")]
    OutOfRange { n: u64, len: u64 },
    #[error("invalid kernel: {0}")]
    Invalid(String),
}

#[derive(Clone)]
enum LambdaRule {
    /// `λ(n) = scale·log n`.
    Log { scale: f64 },
    /// `λ(n) = n`.
    Linear,
    /// `λ(n) = values[n-1]`.
    Table(Arc<Vec<f64>>),
    Custom(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

/// Exponent sequence `λ` with the declared constant `c` in `λ(n) ≥ c log n`.
#[derive(Clone)]
pub struct LambdaSeq {
    rule: LambdaRule,
    declared_c: f64,
    label: String,
}

impl fmt::Debug for LambdaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LambdaSeq({}, c = {})", self.label, self.declared_c)
    }
}

impl LambdaSeq {
    /// `λ(n) = log n`, `c = 1`.
    pub fn log() -> Self {
        Self::power(1.0)
    }

    /// `λ(n) = β log n`, `c = β`, giving `L(n)(z) = n^{−βz}`.
    pub fn power(beta: f64) -> Self {
        LambdaSeq { rule: LambdaRule::Log { scale: beta }, declared_c: beta, label: format!("{beta}·log n") }
    }

    /// `λ(n) = n`, `c = 1`.
    pub fn linear() -> Self {
        LambdaSeq { rule: LambdaRule::Linear, declared_c: 1.0, label: "n".into() }
    }

    pub fn table(values: Vec<f64>, c: f64) -> Self {
        LambdaSeq { rule: LambdaRule::Table(Arc::new(values)), declared_c: c, label: "table".into() }
    }

    pub fn custom(label: impl Into<String>, f: impl Fn(u64) -> f64 + Send + Sync + 'static, c: f64) -> Self {
        LambdaSeq { rule: LambdaRule::Custom(Arc::new(f)), declared_c: c, label: label.into() }
    }

    pub fn declared_c(&self) -> f64 {
        self.declared_c
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Largest `n` with a defined value, if finite.
    pub fn defined_up_to(&self) -> Option<u64> {
        match &self.rule {
            LambdaRule::Table(v) => Some(v.len() as u64),
            _ => None,
        }
    }

    pub fn value(&self, n: u64) -> Result<f64, KernelError> {
        Ok(match &self.rule {
            LambdaRule::Log { scale } => scale * (n as f64).ln(),
            LambdaRule::Linear => n as f64,
            LambdaRule::Table(v) => *v
                .get((n as usize).wrapping_sub(1))
                .ok_or(KernelError::OutOfRange { n, len: v.len() as u64 })?,
            LambdaRule::Custom(f) => f(n),
        })
    }

    /// `λ(n)` to `precision` bits. Table and custom values are taken as the
    /// exact binary value of their `f64`.
    pub fn value_hp(&self, n: u64, precision: usize) -> Result<HpFloat, KernelError> {
        let exact_f64 = |v: f64| -> Result<HpFloat, KernelError> {
            let x = HpFloat::try_from(v).map_err(|_| KernelError::Invalid(format!("λ({n}) = {v}")))?;
            Ok(x.with_precision(precision).value())
        };
        match &self.rule {
            LambdaRule::Log { scale } => {
                let ln = HpFloat::from(n).with_precision(precision).value().ln();
                Ok(exact_f64(*scale)? * ln)
            }
            LambdaRule::Linear => Ok(HpFloat::from(n).with_precision(precision).value()),
            _ => exact_f64(self.value(n)?),
        }
    }

    fn closed_form_ratio(&self, n0: u64) -> Option<f64> {
        match self.rule {
            // β(1 − log n₀ / log n) increases in n, so n = n₀+1 is the infimum
            LambdaRule::Log { scale } => Some(scale * (1.0 - (n0 as f64).ln() / ((n0 + 1) as f64).ln())),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorphismCheck {
    pub holds: bool,
    /// First pair `(a, b)` with `λ(ab) ≠ λ(a) + λ(b)`; `(1, 1)` flags `λ(1) ≠ 0`.
    pub witness: Option<(u64, u64)>,
}

/// A certified kernel in the half-plane `Re z > domain_k`.
#[derive(Clone, Debug)]
pub struct Kernel {
    lambda: LambdaSeq,
    decay_c: f64,
    domain_k: f64,
    audit_horizon: u64,
    morphism: MorphismCheck,
}

impl Kernel {
    pub fn lambda(&self) -> &LambdaSeq {
        &self.lambda
    }

    pub fn decay_c(&self) -> f64 {
        self.decay_c
    }

    /// `C(z)` in `|L(n)(z)| ≤ C(z) n^{−c Re z}`; identically 1 for exponential kernels.
    pub fn decay_constant_at(&self, _z: Complex64) -> f64 {
        1.0
    }

    pub fn domain_k(&self) -> f64 {
        self.domain_k
    }

    pub fn audit_horizon(&self) -> u64 {
        self.audit_horizon
    }

    pub fn is_monoid_morphism(&self) -> bool {
        self.morphism.holds
    }

    pub fn morphism_check(&self) -> &MorphismCheck {
        &self.morphism
    }

    pub fn label(&self) -> String {
        format!("exp(-({})·z)", self.lambda.label)
    }

    /// `C(n₀)`: closed form for `λ = β log n`, otherwise the audited
    /// `min_{n₀ < n ≤ H} (λ(n) − λ(n₀)) / log n`. `None` when `n₀ ≥ H`.
    pub fn ratio_c(&self, n0: u64) -> Option<f64> {
        if n0 == 0 {
            return None;
        }
        if let Some(c) = self.lambda.closed_form_ratio(n0) {
            return Some(c);
        }
        if n0 >= self.audit_horizon {
            return None;
        }
        let l0 = self.lambda.value(n0).ok()?;
        let mut best = f64::INFINITY;
        for n in n0 + 1..=self.audit_horizon {
            let v = (self.lambda.value(n).ok()? - l0) / (n as f64).ln();
            best = best.min(v);
        }
        Some(best.max(f64::MIN_POSITIVE))
    }

    /// Convergence abscissa `max{(k+1)/c, k}` for coefficients of growth `n^k`.
    /// For `λ(n) = n` the ratio `log n / λ(n)` tends to 0, so every `c` is
    /// eventually admissible and the abscissa is `max{k, 0}`.
    pub fn abscissa(&self, k: f64) -> f64 {
        match self.lambda.rule {
            LambdaRule::Linear => k.max(self.domain_k),
            _ => ((k + 1.0) / self.decay_c).max(k),
        }
    }

    /// Upper bound on `Σ_{n>N} n^k |L(n)(x)|`, or `None` when `x` is not past
    /// the abscissa.
    pub fn tail_sum(&self, k: f64, x: f64, n: u64) -> Option<f64> {
        if x <= self.abscissa(k) {
            return None;
        }
        match self.lambda.rule {
            LambdaRule::Linear => {
                let first = (n + 1) as f64;
                let head = (k * first.ln() - first * x).exp();
                // ratio of consecutive terms, maximal at n = N+1 when k > 0
                let r = if k > 0.0 { (k * (1.0 / first).ln_1p() - x).exp() } else { (-x).exp() };
                Some(head / (1.0 - r))
            }
            _ => power_tail(self.decay_c * x - k, n),
        }
    }

    /// `L(n)(z) = e^{−λ(n) z}`.
    pub fn eval(&self, n: u64, z: Complex64) -> Result<Complex64, KernelError> {
        if z.re <= self.domain_k {
            return Err(KernelError::DomainError { re: z.re, domain_k: self.domain_k });
        }
        if n == 0 {
            return Err(KernelError::OutOfRange { n, len: 0 });
        }
        Ok((-self.lambda.value(n)? * z).exp())
    }
}

/// `Σ_{n>N} n^{−s} ≤ ∫_N^∞ t^{−s} dt = N^{1−s}/(s−1)`; `None` unless `s > 1`.
pub(crate) fn power_tail(s: f64, n: u64) -> Option<f64> {
    if !(s > 1.0) || n == 0 {
        return None;
    }
    Some(((1.0 - s) * (n as f64).ln()).exp() / (s - 1.0))
}

/// `L(n)(z) = n^{−z}`: `c = 1`, `C(n₀) = 1 − log n₀ / log(n₀+1)`, a monoid morphism.
pub fn classical_kernel() -> Kernel {
    Kernel {
        lambda: LambdaSeq::log(),
        decay_c: 1.0,
        domain_k: 0.0,
        audit_horizon: DEFAULT_AUDIT_HORIZON,
        morphism: MorphismCheck { holds: true, witness: None },
    }
}

/// Audits `λ` on `1..=audit_horizon` (strictly increasing, `λ(n) ≥ c log n`)
/// and builds the kernel `e^{−λ(n) z}` on `Re z > 0`.
pub fn general_kernel(lambda: LambdaSeq, audit_horizon: u64) -> Result<Kernel, KernelError> {
    let c = lambda.declared_c;
    if !(c > 0.0 && c.is_finite()) {
        return Err(KernelError::Invalid(format!("declared c = {c} must be positive")));
    }
    let horizon = match lambda.defined_up_to() {
        Some(len) => audit_horizon.min(len),
        None => audit_horizon,
    };
    if horizon < 2 {
        return Err(KernelError::Invalid("audit horizon must be at least 2".into()));
    }
    let values: Vec<f64> = (1..=horizon).map(|n| lambda.value(n)).collect::<Result<_, _>>()?;
    for n in 1..=horizon {
        let v = values[n as usize - 1];
        if !v.is_finite() {
            return Err(KernelError::CertificateViolation { n, reason: format!("λ({n}) = {v}") });
        }
        if n > 1 && v <= values[n as usize - 2] {
            return Err(KernelError::CertificateViolation {
                n,
                reason: format!("λ is not strictly increasing: λ({n}) = {v} ≤ λ({}) ", n - 1),
            });
        }
        let floor = c * (n as f64).ln();
        if v + MORPHISM_TOL * v.abs().max(1.0) < floor {
            return Err(KernelError::CertificateViolation {
                n,
                reason: format!("λ({n}) = {v} < c·log n = {floor}"),
            });
        }
    }
    let morphism = morphism_on(&values);
    Ok(Kernel { lambda, decay_c: c, domain_k: 0.0, audit_horizon: horizon, morphism })
}

fn morphism_on(values: &[f64]) -> MorphismCheck {
    let h = values.len() as u64;
    let lam = |n: u64| values[n as usize - 1];
    let close = |x: f64, y: f64| (x - y).abs() <= MORPHISM_TOL * x.abs().max(y.abs()).max(1.0);
    let mut a = 2;
    while a * a <= h {
        for b in a..=h / a {
            if !close(lam(a * b), lam(a) + lam(b)) {
                return MorphismCheck { holds: false, witness: Some((a, b)) };
            }
        }
        a += 1;
    }
    if !close(lam(1), 0.0) {
        return MorphismCheck { holds: false, witness: Some((1, 1)) };
    }
    MorphismCheck { holds: true, witness: None }
}

/// `L(n)(z)`; fails outside the kernel's half-plane.
pub fn kernel_eval(l: &Kernel, n: u64, z: Complex64) -> Result<Complex64, KernelError> {
    l.eval(n, z)
}

/// Checks `λ(ab) = λ(a) + λ(b)` for `2 ≤ a ≤ b`, `ab ≤ horizon`, then `λ(1) = 0`.
pub fn is_monoid_morphism(l: &Kernel, horizon: u64) -> Result<MorphismCheck, KernelError> {
    let values: Vec<f64> = (1..=horizon.max(1)).map(|n| l.lambda.value(n)).collect::<Result<_, _>>()?;
    Ok(morphism_on(&values))
}

/// JSON kernel description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    Classical {},
    /// `λ(n) = β log n`.
    Power { beta: f64 },
    /// `λ(n) = n`.
    Linear {},
    Table { lambda: Vec<f64>, c: f64 },
}

impl KernelSpec {
    pub fn build(&self, audit_horizon: u64) -> Result<Kernel, KernelError> {
        match self {
            KernelSpec::Classical {} => Ok(classical_kernel()),
            KernelSpec::Power { beta } => general_kernel(LambdaSeq::power(*beta), audit_horizon),
            KernelSpec::Linear {} => general_kernel(LambdaSeq::linear(), audit_horizon),
            KernelSpec::Table { lambda, c } => general_kernel(LambdaSeq::table(lambda.clone(), *c), audit_horizon),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn classical_values() {
        let l = classical_kernel();
        assert_eq!(l.eval(1, Complex64::new(3.0, 7.0)).unwrap(), Complex64::new(1.0, 0.0));
        assert!((l.eval(2, z(2.0)).unwrap().re - 0.25).abs() < 1e-15);
        assert!((l.eval(10, z(1.0)).unwrap().re - 0.1).abs() < 1e-15);
        assert!((l.eval(4, z(0.5)).unwrap().re - 0.5).abs() < 1e-15);
        assert_eq!(l.ratio_c(1), Some(1.0));
        assert!(matches!(l.eval(3, z(-1.0)), Err(KernelError::DomainError { .. })));
    }

    #[test]
    fn linear_kernel_audits_and_fails_morphism() {
        let l = general_kernel(LambdaSeq::linear(), 1000).unwrap();
        assert!((l.eval(3, z(1.0)).unwrap().re - (-3f64).exp()).abs() < 1e-16);
        assert!(!l.is_monoid_morphism());
        assert_eq!(l.morphism_check().witness, Some((2, 3)));
        let check = is_monoid_morphism(&l, 30).unwrap();
        assert_eq!(check.witness, Some((2, 3)));
    }

    #[test]
    fn sqrt_log_violates_decay_certificate() {
        // λ(n)/log n = 1/√log n drops below c once log n > 1/c²
        for c in [1.0, 0.5] {
            let lam = LambdaSeq::custom("sqrt(log n)", |n| (n as f64).ln().sqrt(), c);
            let err = general_kernel(lam, DEFAULT_AUDIT_HORIZON).unwrap_err();
            let first = (1..).find(|&n: &u64| (n as f64).ln().sqrt() < c * (n as f64).ln()).unwrap();
            assert_eq!(err, KernelError::CertificateViolation { n: first, reason: match &err {
                KernelError::CertificateViolation { reason, .. } => reason.clone(),
                _ => unreachable!(),
            } });
        }
    }

    #[test]
    fn scaled_log_is_a_morphism() {
        let l = general_kernel(LambdaSeq::power(2.0), 2000).unwrap();
        assert!(l.is_monoid_morphism());
        assert!((l.eval(3, z(1.0)).unwrap().re - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn table_kernel_spec() {
        let spec: KernelSpec = serde_json::from_str(r#"{"kind":"table","lambda":[0.0,1.0,2.0,3.5],"c":0.5}"#).unwrap();
        let l = spec.build(100).unwrap();
        assert_eq!(l.audit_horizon(), 4);
        assert!(matches!(l.eval(5, z(1.0)), Err(KernelError::OutOfRange { n: 5, len: 4 })));
        let bad: Result<KernelSpec, _> = serde_json::from_str(r#"{"kind":"linear","beta":2}"#);
        assert!(bad.is_err());
    }
}
