//! Polynomials in the formal symbols `log p` (p prime).
//!
//! Values of `α^{(j)}(n) = (−1)^j α(n) log^j n` are kept exact by expanding
//! `log n = Σ v_p(n)·log p` and treating the `log p` as independent
//! indeterminates. Monomials are ordered lexicographically with smaller
//! primes more significant; the leading term is the largest monomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;

use super::gauss::GaussRational;
use super::poly::PolyCoeff;

/// Coefficient ring for [`LogPoly`].
pub trait CoeffRing: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn from_int(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn radd(&self, o: &Self) -> Self;
    fn rsub(&self, o: &Self) -> Self;
    fn rmul(&self, o: &Self) -> Self;
    fn rneg(&self) -> Self;
    fn eval_at(&self, z: Complex64) -> Complex64;
}

pub trait CoeffField: CoeffRing {
    fn rinv(&self) -> Option<Self>;
}

impl CoeffRing for GaussRational {
    fn zero() -> Self {
        GaussRational::zero()
    }
    fn from_int(v: i64) -> Self {
        GaussRational::from_int(v)
    }
    fn is_zero(&self) -> bool {
        GaussRational::is_zero(self)
    }
    fn is_one(&self) -> bool {
        GaussRational::is_one(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn eval_at(&self, _z: Complex64) -> Complex64 {
        self.to_complex()
    }
}

impl CoeffField for GaussRational {
    fn rinv(&self) -> Option<Self> {
        self.inv()
    }
}

impl CoeffRing for PolyCoeff {
    fn zero() -> Self {
        PolyCoeff::zero()
    }
    fn from_int(v: i64) -> Self {
        PolyCoeff::from_int(v)
    }
    fn is_zero(&self) -> bool {
        PolyCoeff::is_zero(self)
    }
    fn is_one(&self) -> bool {
        PolyCoeff::is_one(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn eval_at(&self, z: Complex64) -> Complex64 {
        self.eval(z)
    }
}

/// Product `Π (log p)^e`, stored as `(p, e)` pairs sorted by prime with `e > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LogMonomial(Vec<(u64, u32)>);

impl LogMonomial {
    pub fn one() -> Self {
        LogMonomial(Vec::new())
    }

    pub fn log_of(p: u64) -> Self {
        LogMonomial(vec![(p, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(u64, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        let mut out: Vec<(u64, u32)> = Vec::with_capacity(pairs.len());
        for (p, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => out.push((p, e)),
            }
        }
        LogMonomial(out)
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LogMonomial(out)
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(p, e) in &self.0 {
            if j < o.0.len() && o.0[j].0 < p {
                return None;
            }
            if j < o.0.len() && o.0[j].0 == p {
                let f = o.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((p, e - f)),
                }
            } else {
                out.push((p, e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(LogMonomial(out))
    }

    pub fn eval(&self) -> f64 {
        self.0.iter().map(|&(p, e)| (p as f64).ln().powi(e as i32)).product()
    }
}

impl Ord for LogMonomial {
    fn cmp(&self, o: &Self) -> Ordering {
        let (a, b) = (&self.0, &o.0);
        for i in 0.. {
            match (a.get(i), b.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(pa, ea)), Some(&(pb, eb))) => {
                    if pa != pb {
                        // the side holding the smaller prime has the larger exponent there
                        return if pa < pb { Ordering::Greater } else { Ordering::Less };
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
        }
        unreachable!()
    }
}

impl PartialOrd for LogMonomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for LogMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &(p, e) in &self.0 {
            if !first {
                write!(f, "·")?;
            }
            first = false;
            if e == 1 {
                write!(f, "log{p}")?;
            } else {
                write!(f, "log{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial over `C` in the indeterminates `log p`.
#[derive(Clone, PartialEq, Debug)]
pub struct LogPoly<C> {
    terms: BTreeMap<LogMonomial, C>,
}

impl<C: CoeffRing> Default for LogPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: CoeffRing> LogPoly<C> {
    pub fn zero() -> Self {
        LogPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(LogMonomial::one(), c)
    }

    pub fn term(m: LogMonomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LogPoly { terms }
    }

    pub fn from_int(v: i64) -> Self {
        Self::constant(C::from_int(v))
    }

    /// `log n` expanded from the factorization `n = Π p^a`.
    pub fn log_of_factorization(factors: &[(u64, u32)]) -> Self {
        let terms = factors
            .iter()
            .filter(|&&(_, a)| a > 0)
            .map(|&(p, a)| (LogMonomial::log_of(p), C::from_int(a as i64)))
            .collect();
        LogPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.first_key_value().is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LogMonomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the monomial `1`, zero if absent.
    pub fn constant_term(&self) -> C {
        self.terms.get(&LogMonomial::one()).cloned().unwrap_or_else(C::zero)
    }

    /// The coefficient when no `log p` symbol occurs.
    pub fn as_constant(&self) -> Option<C> {
        if self.terms.keys().all(LogMonomial::is_one) {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&LogMonomial, &C)> {
        self.terms.last_key_value()
    }

    /// Largest total log-degree among the terms (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(LogMonomial::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(LogMonomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, a)| {
                let v = a.rmul(c);
                (!v.is_zero()).then(|| (m.clone(), v))
            })
            .collect();
        LogPoly { terms }
    }

    pub fn mul_monomial(&self, m: &LogMonomial, c: &C) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, a)| {
                let v = a.rmul(c);
                (!v.is_zero()).then(|| (k.mul(m), v))
            })
            .collect();
        LogPoly { terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_int(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn map_coeffs<D: CoeffRing>(&self, f: impl Fn(&C) -> D) -> LogPoly<D> {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let v = f(c);
                (!v.is_zero()).then(|| (m.clone(), v))
            })
            .collect();
        LogPoly { terms }
    }

    pub fn try_map_coeffs<D: CoeffRing>(&self, f: impl Fn(&C) -> Option<D>) -> Option<LogPoly<D>> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = f(c)?;
            if !v.is_zero() {
                terms.insert(m.clone(), v);
            }
        }
        Some(LogPoly { terms })
    }

    /// Substitutes `log p ↦ ln p` and evaluates the coefficients at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|(m, c)| c.eval_at(z) * m.eval()).sum()
    }

    fn add_term(&mut self, m: &LogMonomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(m) {
            Some(v) => {
                *v = v.radd(&c);
                if v.is_zero() {
                    self.terms.remove(m);
                }
            }
            None => {
                self.terms.insert(m.clone(), c);
            }
        }
    }
}

impl<C: CoeffField> LogPoly<C> {
    /// Exact quotient `self / d`; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (lm_d, lc_d) = d.leading()?;
        let lc_inv = lc_d.rinv()?;
        if d.terms.len() == 1 {
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                terms.insert(m.div(lm_d)?, c.rmul(&lc_inv));
            }
            return Some(LogPoly { terms });
        }
        let mut q = Self::zero();
        let mut r = self.clone();
        while let Some((lm_r, lc_r)) = r.leading() {
            let m = lm_r.div(lm_d)?;
            let c = lc_r.rmul(&lc_inv);
            r = &r - &d.mul_monomial(&m, &c);
            q.add_term(&m, c);
        }
        Some(q)
    }
}

impl<'a, C: CoeffRing> Add<&'a LogPoly<C>> for &'a LogPoly<C> {
    type Output = LogPoly<C>;
    fn add(self, o: &LogPoly<C>) -> LogPoly<C> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m, c.clone());
        }
        out
    }
}

impl<'a, C: CoeffRing> Sub<&'a LogPoly<C>> for &'a LogPoly<C> {
    type Output = LogPoly<C>;
    fn sub(self, o: &LogPoly<C>) -> LogPoly<C> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m, c.rneg());
        }
        out
    }
}

impl<'a, C: CoeffRing> Mul<&'a LogPoly<C>> for &'a LogPoly<C> {
    type Output = LogPoly<C>;
    fn mul(self, o: &LogPoly<C>) -> LogPoly<C> {
        if self.is_zero() || o.is_zero() {
            return LogPoly::zero();
        }
        let mut out = LogPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(&ma.mul(mb), ca.rmul(cb));
            }
        }
        out
    }
}

impl<C: CoeffRing> Neg for &LogPoly<C> {
    type Output = LogPoly<C>;
    fn neg(self) -> LogPoly<C> {
        LogPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.rneg())).collect() }
    }
}

impl<C: CoeffRing> fmt::Display for LogPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // ascending degree reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| b.0.cmp(a.0)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let ctxt = c.to_string();
            if m.is_one() {
                write!(f, "{ctxt}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else if ctxt.chars().skip(1).any(|ch| ch == '+' || ch == '-' || ch == ' ') {
                write!(f, "({ctxt})·{m}")?;
            } else {
                write!(f, "{ctxt}·{m}")?;
            }
        }
        Ok(())
    }
}

/// Value of an arithmetic function: a polynomial in `z` times formal log factors.
pub type Coeff = LogPoly<PolyCoeff>;

/// Constant-coefficient symbolic-log values, the entries of coefficient matrices.
pub type LogScalar = LogPoly<GaussRational>;

impl Coeff {
    pub fn from_poly(p: PolyCoeff) -> Self {
        LogPoly::constant(p)
    }

    pub fn from_gauss(c: GaussRational) -> Self {
        LogPoly::constant(PolyCoeff::constant(c))
    }

    /// The `z`-polynomial when no log symbol occurs.
    pub fn as_poly(&self) -> Option<PolyCoeff> {
        self.as_constant()
    }

    /// The scalar when no log symbol occurs and the `z`-degree is 0.
    pub fn as_scalar(&self) -> Option<GaussRational> {
        self.as_constant()?.as_constant()
    }

    /// Drops the `z`-dependence; fails when some coefficient has positive degree.
    pub fn to_log_scalar(&self) -> Option<LogScalar> {
        self.try_map_coeffs(PolyCoeff::as_constant)
    }

    /// Largest `z`-degree over all terms.
    pub fn z_degree(&self) -> usize {
        self.terms().map(|(_, c)| c.degree()).max().unwrap_or(0)
    }
}
