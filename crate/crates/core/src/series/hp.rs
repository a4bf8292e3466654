//! Extended-precision series values on the real ray, where `e^{−λ(n)x}`
//! underflows double precision.

use std::ops::{Add, Sub};

use dashu_int::IBig;
use num::complex::Complex64;
use num::BigRational;

use crate::arith::{ArithFunc, GaussRational};
use crate::kernel::{HpFloat, Kernel};

use super::SeriesError;

/// Complex number with binary floating-point parts.
#[derive(Clone, Debug)]
pub struct HpComplex {
    pub re: HpFloat,
    pub im: HpFloat,
}

pub(crate) fn hp_zero(precision: usize) -> HpFloat {
    HpFloat::ZERO.with_precision(precision).value()
}

pub(crate) fn hp_from_f64(v: f64, precision: usize) -> HpFloat {
    HpFloat::try_from(v).expect("finite").with_precision(precision).value()
}

fn hp_from_int(v: &num::BigInt, precision: usize) -> HpFloat {
    let i: IBig = v.to_string().parse().expect("decimal integer");
    HpFloat::from(i).with_precision(precision).value()
}

pub(crate) fn hp_from_rational(r: &BigRational, precision: usize) -> HpFloat {
    hp_from_int(r.numer(), precision) / hp_from_int(r.denom(), precision)
}

impl HpComplex {
    pub fn zero(precision: usize) -> Self {
        HpComplex { re: hp_zero(precision), im: hp_zero(precision) }
    }

    pub fn from_gauss(g: &GaussRational, precision: usize) -> Self {
        HpComplex { re: hp_from_rational(&g.re, precision), im: hp_from_rational(&g.im, precision) }
    }

    pub fn scale(&self, r: &HpFloat) -> Self {
        HpComplex { re: &self.re * r, im: &self.im * r }
    }

    /// `self·g` for a Gaussian rational `g`.
    pub fn mul_gauss(&self, g: &GaussRational, precision: usize) -> Self {
        let g = HpComplex::from_gauss(g, precision);
        HpComplex {
            re: &self.re * &g.re - &self.im * &g.im,
            im: &self.re * &g.im + &self.im * &g.re,
        }
    }

    pub fn div_real(&self, r: &HpFloat) -> Self {
        HpComplex { re: &self.re / r, im: &self.im / r }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64().value(), self.im.to_f64().value())
    }

    /// `ln |self|` as an `f64`; `−∞` at zero.
    pub fn ln_abs(&self) -> f64 {
        let norm2 = &self.re * &self.re + &self.im * &self.im;
        if norm2 == HpFloat::ZERO {
            return f64::NEG_INFINITY;
        }
        norm2.ln().to_f64().value() / 2.0
    }
}

impl Add for &HpComplex {
    type Output = HpComplex;
    fn add(self, o: &HpComplex) -> HpComplex {
        HpComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &HpComplex {
    type Output = HpComplex;
    fn sub(self, o: &HpComplex) -> HpComplex {
        HpComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

/// `e^{−λ(n)x}` with relative error about `2^{−precision}`.
pub(crate) fn kernel_hp(l: &Kernel, n: u64, x: f64, precision: usize) -> Result<HpFloat, SeriesError> {
    // λ(n)·x can reach a few thousand; spend its bit length as guard digits
    let p = precision + 16;
    let lam = l.lambda().value_hp(n, p)?;
    let y = lam * hp_from_f64(x, p);
    Ok((-y).exp().with_precision(precision).value())
}

/// A function on the real ray known to absolute error `2^{−abs_bits}`.
pub trait SeriesOracle {
    fn eval(&self, x: f64, abs_bits: usize) -> Result<HpComplex, SeriesError>;
}

impl<F> SeriesOracle for F
where
    F: Fn(f64, usize) -> Result<HpComplex, SeriesError>,
{
    fn eval(&self, x: f64, abs_bits: usize) -> Result<HpComplex, SeriesError> {
        self(x, abs_bits)
    }
}

/// Largest truncation [`ForwardOracle`] will sum.
const FORWARD_CAP: u64 = 1 << 22;

/// `x ↦ F_L(α)(x)` summed in extended precision until the certified tail
/// falls below the requested accuracy. Requires constant coefficients and a
/// growth certificate.
#[derive(Clone, Debug)]
pub struct ForwardOracle {
    alpha: ArithFunc,
    kernel: Kernel,
    /// Number of leading terms left out of the sum.
    skip: u64,
}

impl ForwardOracle {
    pub fn new(alpha: ArithFunc, kernel: Kernel) -> Self {
        ForwardOracle { alpha, kernel, skip: 0 }
    }

    /// `F_L(α)(x) − Σ_{n ≤ skip} α(n)L(n)(x)`.
    pub fn without_head(mut self, skip: u64) -> Self {
        self.skip = skip;
        self
    }

    fn truncation(&self, x: f64, abs_bits: usize) -> Result<u64, SeriesError> {
        let cert = self
            .alpha
            .growth()
            .ok_or_else(|| SeriesError::CertificateMissing(self.alpha.label()))?;
        let m = cert.at(Complex64::new(x, 0.0));
        if let Some(s) = cert.support {
            return Ok(s);
        }
        let target = (-(abs_bits as f64) - 1.0).exp2();
        let mut n = 1u64;
        loop {
            let tail = self
                .kernel
                .tail_sum(cert.k, x, n)
                .ok_or(SeriesError::Divergent { re: x, abscissa: self.kernel.abscissa(cert.k) })?;
            if m * tail <= target {
                return Ok(n);
            }
            if n >= FORWARD_CAP {
                return Err(SeriesError::BudgetExceeded { tol: target, cap: FORWARD_CAP, tail_at_cap: m * tail });
            }
            n *= 2;
        }
    }
}

impl SeriesOracle for ForwardOracle {
    fn eval(&self, x: f64, abs_bits: usize) -> Result<HpComplex, SeriesError> {
        let cert = self
            .alpha
            .growth()
            .ok_or_else(|| SeriesError::CertificateMissing(self.alpha.label()))?;
        let n_max = self.truncation(x, abs_bits)?;
        let m = cert.at(Complex64::new(x, 0.0)).max(1.0);
        let growth_bits = m.log2() + cert.k.max(0.0) * (n_max as f64).log2() + (n_max as f64).log2();
        let p = abs_bits + 64 + growth_bits.ceil() as usize;
        let mut acc = HpComplex::zero(p);
        for n in self.skip + 1..=n_max {
            let c = self.alpha.try_coeff(n)?;
            let g = c.as_scalar().ok_or_else(|| SeriesError::UnsupportedCoefficients {
                function: self.alpha.label(),
                n,
            })?;
            if g.is_zero() {
                continue;
            }
            let l = kernel_hp(&self.kernel, n, x, p)?;
            acc = &acc + &HpComplex::from_gauss(&g, p).scale(&l);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::builtin;
    use crate::kernel::classical_kernel;

    #[test]
    fn zeta_forty_minus_one() {
        let g = ForwardOracle::new(builtin("one").unwrap(), classical_kernel()).without_head(1);
        let v = g.eval(40.0, 200).unwrap();
        // 2^40 (ζ(40) − 1) = 1 + Σ_{n≥3} (2/n)^40
        let scaled = v.re * hp_from_f64(2f64.powi(40), 300);
        let s = scaled.to_f64().value();
        assert!((s - 1.0 - (2.0f64 / 3.0).powi(40)).abs() < 1e-9, "{s}");
    }

    #[test]
    fn rational_conversion() {
        let g = GaussRational::parse("1/3-2i").unwrap();
        let (re, im) = HpComplex::from_gauss(&g, 128).to_f64();
        assert!((re - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(im, -2.0);
    }
}
