//! Polynomials in `z` with Gaussian-rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;

use super::gauss::GaussRational;

/// `coeffs[m]` is the coefficient of `z^m`. Empty means the zero polynomial;
/// otherwise the last coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PolyCoeff {
    coeffs: Vec<GaussRational>,
}

impl PolyCoeff {
    pub fn zero() -> Self {
        PolyCoeff { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> Self {
        let mut p = PolyCoeff { coeffs: vec![c] };
        p.normalize();
        p
    }

    pub fn from_int(v: i64) -> Self {
        Self::constant(GaussRational::from_int(v))
    }

    /// The indeterminate `z`.
    pub fn z() -> Self {
        PolyCoeff { coeffs: vec![GaussRational::zero(), GaussRational::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<GaussRational>) -> Self {
        let mut p = PolyCoeff { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(GaussRational::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// The constant value when the degree is 0 (zero included).
    pub fn as_constant(&self) -> Option<GaussRational> {
        match self.coeffs.len() {
            0 => Some(GaussRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PolyCoeff { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Horner evaluation in double precision.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_complex())
    }

    /// `|c_m|` per degree, used to majorize `|p(z)| ≤ Σ |c_m| |z|^m`.
    pub fn abs_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(GaussRational::abs_f64).collect()
    }
}

impl fmt::Display for PolyCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match m {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{m}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a PolyCoeff> for &'a PolyCoeff {
    type Output = PolyCoeff;
    fn add(self, o: &PolyCoeff) -> PolyCoeff {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = GaussRational::zero();
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&zero) + o.coeffs.get(i).unwrap_or(&zero))
            .collect();
        PolyCoeff::from_coeffs(coeffs)
    }
}

impl<'a> Sub<&'a PolyCoeff> for &'a PolyCoeff {
    type Output = PolyCoeff;
    fn sub(self, o: &PolyCoeff) -> PolyCoeff {
        self + &(-o)
    }
}

impl<'a> Mul<&'a PolyCoeff> for &'a PolyCoeff {
    type Output = PolyCoeff;
    fn mul(self, o: &PolyCoeff) -> PolyCoeff {
        if self.is_zero() || o.is_zero() {
            return PolyCoeff::zero();
        }
        if self.coeffs.len() == 1 {
            return o.scale(&self.coeffs[0]);
        }
        if o.coeffs.len() == 1 {
            return self.scale(&o.coeffs[0]);
        }
        let mut out = vec![GaussRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        PolyCoeff::from_coeffs(out)
    }
}

impl Neg for &PolyCoeff {
    type Output = PolyCoeff;
    fn neg(self) -> PolyCoeff {
        PolyCoeff { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl From<GaussRational> for PolyCoeff {
    fn from(c: GaussRational) -> Self {
        PolyCoeff::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_multiplies() {
        let p = PolyCoeff::from_coeffs(vec![GaussRational::one(), GaussRational::zero()]);
        assert_eq!(p.degree(), 0);
        let z = PolyCoeff::z();
        let q = &(&z * &z) - &PolyCoeff::one(); // z^2 - 1
        assert_eq!(q.degree(), 2);
        let v = q.eval(Complex64::new(3.0, 0.0));
        assert!((v.re - 8.0).abs() < 1e-12);
        assert!((&q - &q).is_zero());
    }
}
