//! Lazy arithmetic functions `n ↦ α(n)` with memoized exact values.
//!
//! An [`ArithFunc`] is an immutable expression node (table, rule, product over
//! prime powers, sum, convolution, ...) shared behind an `Arc`. Exact values
//! are memoized per node; [`ArithFunc::values_at`] computes a whole prefix in
//! double precision for series evaluation without touching the cache.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num::complex::Complex64;
use serde::Serialize;

use super::factor::{self, factorize, factorize_unbounded, spf_sieve};
use super::gauss::GaussRational;
use super::logpoly::{Coeff, LogPoly};
use super::poly::PolyCoeff;
use super::ArithError;

/// Exponent slack `ε` added when a bound needs `n^ε` room
/// (divisor counts, powers of `log n`).
pub const GROWTH_SLACK: f64 = 0.25;

/// Declared bound `|α(n)(z)| ≤ M(z)·n^k` for all `n ≥ 1`, with
/// `M(z) = Σ majorant[m]·|z|^m`. `support = Some(S)` additionally
/// declares `α(n) = 0` for `n > S`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCert {
    pub k: f64,
    pub majorant: Vec<f64>,
    pub support: Option<u64>,
}

impl GrowthCert {
    pub fn constant(k: f64, c: f64) -> Self {
        GrowthCert { k, majorant: vec![c], support: None }
    }

    pub fn with_support(mut self, support: u64) -> Self {
        self.support = Some(support);
        self
    }

    /// `M(z)`.
    pub fn at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.majorant.iter().rev().fold(0.0, |acc, m| acc * r + m)
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.majorant.len().max(o.majorant.len());
        let majorant = (0..n)
            .map(|i| self.majorant.get(i).unwrap_or(&0.0) + o.majorant.get(i).unwrap_or(&0.0))
            .collect();
        let support = match (self.support, o.support) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        GrowthCert { k: self.k.max(o.k), majorant, support }
    }

    fn mul_majorant(a: &[f64], b: &[f64]) -> Vec<f64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn scaled(&self, f: &PolyCoeff) -> Self {
        GrowthCert {
            k: self.k,
            majorant: Self::mul_majorant(&self.majorant, &f.abs_coeffs()),
            support: self.support,
        }
    }

    /// `|Σ_{ab=n} α(a)β(b)| ≤ Mα Mβ n^{max(kα,kβ)}·#{a | n}`; the divisor
    /// count is bounded by the smaller support when one is finite, else by
    /// `D(ε) n^ε`.
    fn convolved(&self, o: &Self) -> Self {
        let k = self.k.max(o.k);
        let base = Self::mul_majorant(&self.majorant, &o.majorant);
        let support = match (self.support, o.support) {
            (Some(a), Some(b)) => Some(a.saturating_mul(b)),
            _ => None,
        };
        let finite = match (self.support, o.support) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        };
        match finite {
            Some(s) => GrowthCert {
                k,
                majorant: base.iter().map(|m| m * s as f64).collect(),
                support,
            },
            None => {
                let d = divisor_bound_constant(GROWTH_SLACK);
                GrowthCert {
                    k: k + GROWTH_SLACK,
                    majorant: base.iter().map(|m| m * d).collect(),
                    support,
                }
            }
        }
    }

    fn derived(&self, j: u32) -> Self {
        if j == 0 {
            return self.clone();
        }
        let c = log_power_bound(j, GROWTH_SLACK);
        GrowthCert {
            k: self.k + GROWTH_SLACK,
            majorant: self.majorant.iter().map(|m| m * c).collect(),
            support: self.support,
        }
    }
}

/// `sup_n d(n)/n^ε`, computed as `Π_{p < 2^{1/ε}} max_a (a+1)/p^{aε}`
/// (rounded up). Factors with `p ≥ 2^{1/ε}` are maximized at `a = 0`.
pub fn divisor_bound_constant(eps: f64) -> f64 {
    assert!(eps > 0.0);
    let cutoff = 2f64.powf(1.0 / eps);
    let mut prod = 1.0;
    for p in factor::primes_up_to(cutoff.ceil() as u64) {
        if (p as f64) >= cutoff {
            continue;
        }
        let mut best = 1.0f64;
        let mut a = 1u32;
        loop {
            let v = (a as f64 + 1.0) / (p as f64).powf(a as f64 * eps);
            if v > best {
                best = v;
            } else if a as f64 * eps * (p as f64).ln() > 2.0 {
                // (a+1)/p^{aε} is unimodal in a; past the peak it only decreases
                break;
            }
            a += 1;
        }
        prod *= best;
    }
    prod * (1.0 + 1e-12)
}

/// `sup_{n ≥ 1} (ln n)^j / n^ε = (j/(eε))^j`.
pub fn log_power_bound(j: u32, eps: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    (j as f64 / (std::f64::consts::E * eps)).powi(j as i32) * (1.0 + 1e-12)
}

pub(crate) type ExactRule = Arc<dyn Fn(u64) -> Result<Coeff, ArithError> + Send + Sync>;
pub(crate) type FloatRule = Arc<dyn Fn(u64, Complex64) -> Complex64 + Send + Sync>;
pub(crate) type PrimePowerRule = Arc<dyn Fn(u64, u32) -> GaussRational + Send + Sync>;

#[derive(Clone)]
enum Node {
    /// `values[n-1]`, zero beyond the table.
    Table(Arc<Vec<Coeff>>),
    Rule { exact: ExactRule, float: Option<FloatRule> },
    PrimePowers { rule: PrimePowerRule, limit: u64 },
    Sum(ArithFunc, ArithFunc),
    Scaled(PolyCoeff, ArithFunc),
    Conv(ArithFunc, ArithFunc),
    Inverse { base: ArithFunc, unit_inv: GaussRational },
    Derivative(ArithFunc, u32),
}

struct Inner {
    node: Node,
    name: Option<String>,
    growth: Option<GrowthCert>,
    cache: RwLock<HashMap<u64, Coeff>>,
}

/// An arithmetic function `α: ℕ → ℚ(i)[z][log 2, log 3, …]`.
#[derive(Clone)]
pub struct ArithFunc {
    inner: Arc<Inner>,
}

impl fmt::Debug for ArithFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArithFunc")
            .field("name", &self.inner.name)
            .field("growth", &self.inner.growth)
            .finish_non_exhaustive()
    }
}

impl ArithFunc {
    fn from_node(node: Node, name: Option<String>, growth: Option<GrowthCert>) -> Self {
        ArithFunc {
            inner: Arc::new(Inner { node, name, growth, cache: RwLock::new(HashMap::new()) }),
        }
    }

    /// Finitely supported function `α(n) = values[n-1]`, zero afterwards.
    /// Its certificate is exact: `k = 0`, support = table length.
    pub fn table(values: Vec<Coeff>) -> Self {
        let len = values.len() as u64;
        let width = values.iter().map(Coeff::z_degree).max().unwrap_or(0) + 1;
        let mut majorant = vec![0.0f64; width];
        for v in &values {
            for (m, c) in v.terms() {
                let scale = m.eval().abs();
                for (i, a) in c.abs_coeffs().into_iter().enumerate() {
                    // round up a little to cover the f64 conversion
                    majorant[i] = majorant[i].max(a * scale * (1.0 + 1e-12));
                }
            }
        }
        let growth = GrowthCert { k: 0.0, majorant, support: Some(len) };
        Self::from_node(Node::Table(Arc::new(values)), None, Some(growth))
    }

    pub fn scalar_table(values: Vec<GaussRational>) -> Self {
        Self::table(values.into_iter().map(Coeff::from_gauss).collect())
    }

    /// Function given by an exact rule, without a growth certificate.
    pub fn from_rule(rule: impl Fn(u64) -> Coeff + Send + Sync + 'static) -> Self {
        let exact: ExactRule = Arc::new(move |n| Ok(rule(n)));
        Self::from_node(Node::Rule { exact, float: None }, None, None)
    }

    pub(crate) fn from_rules(exact: ExactRule, float: Option<FloatRule>, growth: Option<GrowthCert>) -> Self {
        Self::from_node(Node::Rule { exact, float }, None, growth)
    }

    pub(crate) fn from_prime_power_rule(rule: PrimePowerRule, limit: u64) -> Self {
        Self::from_node(Node::PrimePowers { rule, limit }, None, None)
    }

    fn rebuild(&self, name: Option<String>, growth: Option<GrowthCert>) -> Self {
        Self::from_node(self.inner.node.clone(), name, growth)
    }

    pub fn with_name(self, name: impl Into<String>) -> Self {
        let growth = self.inner.growth.clone();
        self.rebuild(Some(name.into()), growth)
    }

    /// Declares a growth certificate. It is audited against computed values
    /// whenever the function is evaluated in a series.
    pub fn with_growth(self, growth: GrowthCert) -> Self {
        let name = self.inner.name.clone();
        self.rebuild(name, Some(growth))
    }

    pub fn name(&self) -> Option<&str> {
        self.inner.name.as_deref()
    }

    pub fn label(&self) -> String {
        self.inner.name.clone().unwrap_or_else(|| "<anon>".to_string())
    }

    pub fn growth(&self) -> Option<&GrowthCert> {
        self.inner.growth.as_ref()
    }

    /// `α(n)`; panics if the value cannot be produced (`n = 0` or a
    /// factorization beyond the configured limit). See [`ArithFunc::try_coeff`].
    pub fn coeff(&self, n: u64) -> Coeff {
        self.try_coeff(n).unwrap_or_else(|e| panic!("{}: {e}", self.label()))
    }

    pub fn try_coeff(&self, n: u64) -> Result<Coeff, ArithError> {
        if n == 0 {
            return Err(ArithError::InvalidIndex(0));
        }
        if let Node::Table(values) = &self.inner.node {
            return Ok(values.get(n as usize - 1).cloned().unwrap_or_default());
        }
        if let Some(v) = self.inner.cache.read().expect("cache poisoned").get(&n) {
            return Ok(v.clone());
        }
        let v = self.compute(n)?;
        // pure rules: a racing writer inserts an identical value
        self.inner.cache.write().expect("cache poisoned").entry(n).or_insert_with(|| v.clone());
        Ok(v)
    }

    /// `α(p^j)`, read straight from the rule for prime-power builders so that
    /// large prime powers need no factorization.
    pub fn try_prime_power(&self, p: u64, j: u32) -> Result<Coeff, ArithError> {
        if let Node::PrimePowers { rule, .. } = &self.inner.node {
            return Ok(Coeff::from_gauss(if j == 0 { GaussRational::one() } else { rule(p, j) }));
        }
        let q = p.checked_pow(j).ok_or(ArithError::FactorizationOverflow { n: u64::MAX, limit: u64::MAX })?;
        self.try_coeff(q)
    }

    /// `α(n)` as a Gaussian rational; `None` when it depends on `z` or on logs.
    pub fn scalar(&self, n: u64) -> Option<GaussRational> {
        self.coeff(n).as_scalar()
    }

    fn compute(&self, n: u64) -> Result<Coeff, ArithError> {
        match &self.inner.node {
            Node::Table(_) => unreachable!("tables bypass the cache"),
            Node::Rule { exact, .. } => exact(n),
            Node::PrimePowers { rule, limit } => {
                let mut acc = GaussRational::one();
                for (p, a) in factorize(n, *limit)? {
                    acc = &acc * &rule(p, a);
                    if acc.is_zero() {
                        break;
                    }
                }
                Ok(Coeff::from_gauss(acc))
            }
            Node::Sum(a, b) => Ok(&a.try_coeff(n)? + &b.try_coeff(n)?),
            Node::Scaled(f, a) => Ok(a.try_coeff(n)?.scale(f)),
            Node::Conv(a, b) => {
                let mut acc = Coeff::zero();
                for d in factor::divisors(n) {
                    let x = a.try_coeff(d)?;
                    if x.is_zero() {
                        continue;
                    }
                    let y = b.try_coeff(n / d)?;
                    if !y.is_zero() {
                        acc = &acc + &(&x * &y);
                    }
                }
                Ok(acc)
            }
            Node::Inverse { base, unit_inv } => {
                let unit = Coeff::from_gauss(unit_inv.clone());
                if n == 1 {
                    return Ok(unit);
                }
                let mut acc = Coeff::zero();
                for d in factor::divisors(n) {
                    if d == n {
                        continue;
                    }
                    let x = base.try_coeff(n / d)?;
                    if !x.is_zero() {
                        acc = &acc + &(&x * &self.try_coeff(d)?);
                    }
                }
                Ok(-&(&acc * &unit))
            }
            Node::Derivative(a, j) => {
                let v = a.try_coeff(n)?;
                if *j == 0 {
                    return Ok(v);
                }
                if n == 1 || v.is_zero() {
                    return Ok(Coeff::zero());
                }
                let log_n: Coeff = LogPoly::log_of_factorization(&factorize_unbounded(n));
                let sign = if j % 2 == 0 { 1 } else { -1 };
                Ok(&(&v * &log_n.pow(*j)) * &Coeff::from_int(sign))
            }
        }
    }

    /// `α(n)(z)` for `n = 0..=n_max` in double precision (index 0 is 0).
    pub fn values_at(&self, n_max: u64, z: Complex64) -> Result<Vec<Complex64>, ArithError> {
        let len = n_max as usize + 1;
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; len];
        match &self.inner.node {
            Node::Table(values) => {
                for (i, v) in values.iter().take(n_max as usize).enumerate() {
                    out[i + 1] = v.eval(z);
                }
            }
            Node::Rule { exact, float } => {
                for n in 1..=n_max {
                    out[n as usize] = match float {
                        Some(f) => f(n, z),
                        None => exact(n)?.eval(z),
                    };
                }
            }
            Node::PrimePowers { rule, limit } => {
                if n_max > *limit {
                    return Err(ArithError::FactorizationOverflow { n: n_max, limit: *limit });
                }
                if n_max >= 1 {
                    out[1] = Complex64::new(1.0, 0.0);
                }
                let spf = spf_sieve(len - 1);
                let mut memo: HashMap<(u64, u32), Complex64> = HashMap::new();
                for n in 2..len {
                    let p = spf[n] as usize;
                    let (mut m, mut a) = (n, 0u32);
                    while m % p == 0 {
                        m /= p;
                        a += 1;
                    }
                    let r = *memo
                        .entry((p as u64, a))
                        .or_insert_with(|| rule(p as u64, a).to_complex());
                    out[n] = out[m] * r;
                }
            }
            Node::Sum(a, b) => {
                let (x, y) = (a.values_at(n_max, z)?, b.values_at(n_max, z)?);
                for n in 1..len {
                    out[n] = x[n] + y[n];
                }
            }
            Node::Scaled(f, a) => {
                let c = f.eval(z);
                for (o, v) in out.iter_mut().zip(a.values_at(n_max, z)?) {
                    *o = v * c;
                }
            }
            Node::Conv(a, b) => {
                let (x, y) = (a.values_at(n_max, z)?, b.values_at(n_max, z)?);
                for d in 1..len {
                    if x[d] == zero {
                        continue;
                    }
                    for (q, m) in (d..len).step_by(d).enumerate() {
                        out[m] += x[d] * y[q + 1];
                    }
                }
            }
            Node::Inverse { base, unit_inv } => {
                let x = base.values_at(n_max, z)?;
                let u = unit_inv.to_complex();
                let mut acc = vec![zero; len];
                for d in 1..len {
                    out[d] = if d == 1 { u } else { -acc[d] * u };
                    if out[d] == zero {
                        continue;
                    }
                    for (q, m) in (2 * d..len).step_by(d).enumerate() {
                        acc[m] += x[q + 2] * out[d];
                    }
                }
            }
            Node::Derivative(a, j) => {
                let x = a.values_at(n_max, z)?;
                for n in 1..len {
                    out[n] = x[n] * (-(n as f64).ln()).powi(*j as i32);
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn unit_value(&self) -> Result<Coeff, ArithError> {
        self.try_coeff(1)
    }
}

fn join_names(a: &ArithFunc, b: &ArithFunc, op: &str) -> Option<String> {
    Some(format!("({}{op}{})", a.name()?, b.name()?))
}

/// Pointwise sum `(α+β)(n) = α(n) + β(n)`.
pub fn add(a: &ArithFunc, b: &ArithFunc) -> ArithFunc {
    let growth = match (a.growth(), b.growth()) {
        (Some(x), Some(y)) => Some(x.add(y)),
        _ => None,
    };
    ArithFunc::from_node(Node::Sum(a.clone(), b.clone()), join_names(a, b, "+"), growth)
}

/// `(f·α)(n) = f(z)·α(n)` for a polynomial `f`.
pub fn scale(f: impl Into<PolyCoeff>, a: &ArithFunc) -> ArithFunc {
    let f = f.into();
    let growth = a.growth().map(|g| g.scaled(&f));
    let name = a.name().map(|n| format!("({f})·{n}"));
    ArithFunc::from_node(Node::Scaled(f, a.clone()), name, growth)
}

/// Dirichlet convolution `(α·β)(n) = Σ_{ab=n} α(a)β(b)`.
pub fn convolve(a: &ArithFunc, b: &ArithFunc) -> ArithFunc {
    let growth = match (a.growth(), b.growth()) {
        (Some(x), Some(y)) => Some(x.convolved(y)),
        _ => None,
    };
    ArithFunc::from_node(Node::Conv(a.clone(), b.clone()), join_names(a, b, "*"), growth)
}

/// `k`-fold convolution power; `power(α, 0) = e`.
pub fn power(a: &ArithFunc, k: u32) -> ArithFunc {
    if k == 0 {
        return super::builtins::unity();
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = convolve(&acc, a);
    }
    match a.name() {
        Some(n) if k > 1 => acc.with_name(format!("{n}^{k}")),
        _ => acc,
    }
}

/// Dirichlet inverse via `α⁻¹(n) = −α(1)⁻¹ Σ_{d|n, d<n} α(n/d) α⁻¹(d)`.
///
/// Requires `α(1)` to be a nonzero constant. The result carries no growth
/// certificate; declare one with [`ArithFunc::with_growth`] before evaluating
/// its series.
pub fn dirichlet_inverse(a: &ArithFunc) -> Result<ArithFunc, ArithError> {
    let unit = a.unit_value()?;
    let not_inv = || ArithError::NotInvertible(unit.to_string());
    let c = unit.as_scalar().ok_or_else(not_inv)?;
    let unit_inv = c.inv().ok_or_else(not_inv)?;
    let name = a.name().map(|n| format!("{n}^-1"));
    Ok(ArithFunc::from_node(Node::Inverse { base: a.clone(), unit_inv }, name, None))
}

/// `α^{(j)}(n) = (−1)^j α(n) log^j n`, with `log n` kept symbolic.
pub fn derivative(a: &ArithFunc, j: u32) -> ArithFunc {
    if j == 0 {
        return a.clone();
    }
    let growth = a.growth().map(|g| g.derived(j));
    let name = a.name().map(|n| format!("{n}^({j})"));
    ArithFunc::from_node(Node::Derivative(a.clone(), j), name, growth)
}

/// Result of [`growth_check`]: the smallest `C` with `|α(n)(z)| ≤ C n^k` on
/// the audited samples. This is evidence over the horizon, not a proof for all `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthAudit {
    pub constant: f64,
    pub at_n: u64,
    pub at_z: (f64, f64),
    pub horizon: u64,
}

pub fn growth_check(
    a: &ArithFunc,
    k: f64,
    horizon: u64,
    z_grid: &[Complex64],
) -> Result<GrowthAudit, ArithError> {
    let mut best = GrowthAudit { constant: 0.0, at_n: 1, at_z: (0.0, 0.0), horizon };
    for &z in z_grid {
        let vals = a.values_at(horizon, z)?;
        for n in 1..=horizon {
            let r = vals[n as usize].norm() / (n as f64).powf(k);
            if r > best.constant {
                best = GrowthAudit { constant: r, at_n: n, at_z: (z.re, z.im), horizon };
            }
        }
    }
    Ok(best)
}
