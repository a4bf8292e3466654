//! Independence certificates from exact ranks of coefficient matrices.
//!
//! Row `(α, i)` of a [`CoeffMatrix`] holds `α^{(i)}(n) = (−1)^i α(n) log^i n`
//! for `n = 1..=N`, with `log p` kept as a formal symbol. Because the `log p`
//! are linearly independent over `ℚ`, the rank over the field they generate is
//! computed exactly. A full rank at a finite horizon witnesses independence of
//! the series; a deficit only says the horizon was too small to tell.

mod bareiss;

use std::fmt;

use nalgebra::DMatrix;
use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{convolve, derivative, power, ArithError, ArithFunc, LogScalar};

pub use bareiss::bareiss_rank;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndependenceError {
    #[error("{function}({n}) depends on z; only constant coefficients are supported")]
    UnsupportedCoefficients { function: String, n: u64 },
    #[error("horizon {horizon} is smaller than the {rows} rows")]
    HorizonTooSmall { horizon: u64, rows: usize },
    #[error("degree bound must be at least 1")]
    InvalidDegree,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A row of a coefficient matrix: the `order`-th derivative of `function`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowLabel {
    pub function: String,
    pub order: u32,
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            0 => write!(f, "{}", self.function),
            j => write!(f, "{}^({j})", self.function),
        }
    }
}

/// Exact matrix `A[row][n−1]` over `ℚ(i)[log 2, log 3, …]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrix {
    row_labels: Vec<RowLabel>,
    horizon: u64,
    entries: Vec<Vec<LogScalar>>,
}

impl CoeffMatrix {
    /// Panics unless every row has the same length as the first.
    pub fn from_rows(row_labels: Vec<RowLabel>, entries: Vec<Vec<LogScalar>>) -> Self {
        assert_eq!(row_labels.len(), entries.len());
        let horizon = entries.first().map_or(0, Vec::len);
        assert!(entries.iter().all(|r| r.len() == horizon), "ragged matrix");
        CoeffMatrix { row_labels, horizon: horizon as u64, entries }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn row_labels(&self) -> &[RowLabel] {
        &self.row_labels
    }

    pub fn entries(&self) -> &[Vec<LogScalar>] {
        &self.entries
    }

    /// Entry at row `i`, column `n` (1-based).
    pub fn entry(&self, i: usize, n: u64) -> &LogScalar {
        &self.entries[i][n as usize - 1]
    }

    /// The first `n` columns.
    pub fn truncated(&self, n: u64) -> CoeffMatrix {
        let n = n.min(self.horizon) as usize;
        CoeffMatrix {
            row_labels: self.row_labels.clone(),
            horizon: n as u64,
            entries: self.entries.iter().map(|r| r[..n].to_vec()).collect(),
        }
    }

    /// Entries with `log p` replaced by its double-precision value.
    pub fn to_numeric(&self) -> DMatrix<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        DMatrix::from_fn(self.rows(), self.horizon as usize, |i, j| self.entries[i][j].eval(zero))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedIndependent,
    NotCertified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub rank: usize,
    pub expected: usize,
    pub horizon: u64,
    pub verdict: Verdict,
    /// Columns `n` of a nonsingular `rank × rank` minor.
    pub pivot_columns: Vec<u64>,
    pub row_labels: Vec<String>,
}

impl IndependenceReport {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedIndependent
    }
}

/// `r(m+1)` rows `(−1)^i α_j(n) log^i n`, `j = 1..r`, `i = 0..=m`, `n = 1..=N`.
pub fn coefficient_matrix(funcs: &[ArithFunc], m: u32, n: u64) -> Result<CoeffMatrix, IndependenceError> {
    let rows = funcs.len() * (m as usize + 1);
    if n < rows as u64 {
        return Err(IndependenceError::HorizonTooSmall { horizon: n, rows });
    }
    let mut labels = Vec::with_capacity(rows);
    let mut entries = Vec::with_capacity(rows);
    for a in funcs {
        for i in 0..=m {
            let d = derivative(a, i);
            let row = (1..=n)
                .into_par_iter()
                .map(|k| {
                    d.try_coeff(k)?.to_log_scalar().ok_or_else(|| {
                        IndependenceError::UnsupportedCoefficients { function: a.label(), n: k }
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            labels.push(RowLabel { function: a.label(), order: i });
            entries.push(row);
        }
    }
    Ok(CoeffMatrix { row_labels: labels, horizon: n, entries })
}

/// Exact rank by fraction-free elimination. `expected` is the row count.
pub fn rank_exact(m: &CoeffMatrix) -> IndependenceReport {
    let (rank, pivots) = bareiss_rank(m.entries.clone());
    let expected = m.rows();
    IndependenceReport {
        rank,
        expected,
        horizon: m.horizon,
        verdict: if rank == expected { Verdict::CertifiedIndependent } else { Verdict::NotCertified },
        pivot_columns: pivots.into_iter().map(|c| c as u64 + 1).collect(),
        row_labels: m.row_labels.iter().map(ToString::to_string).collect(),
    }
}

/// `ε·max(rows, cols)·σ_max`.
pub fn numeric_rank_tolerance(m: &DMatrix<Complex64>, sigma_max: f64) -> f64 {
    f64::EPSILON * m.nrows().max(m.ncols()) as f64 * sigma_max
}

/// Number of singular values above [`numeric_rank_tolerance`].
pub fn rank_numeric(m: &DMatrix<Complex64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let tol = numeric_rank_tolerance(m, sv.max());
    sv.iter().filter(|&&s| s > tol).count()
}

/// Exponent vectors with entries summing to `d`, in lexicographically decreasing order.
fn compositions(r: usize, d: u32) -> Vec<Vec<u32>> {
    if r == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in compositions(r - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Convolution monomials `α_1^{i_1}⋯α_r^{i_r}` with `1 ≤ Σ i ≤ D`, by degree
/// and then lexicographically with `α_1` first.
pub fn monomial_family(funcs: &[ArithFunc], d: u32) -> Vec<ArithFunc> {
    let mut out = Vec::new();
    if funcs.is_empty() {
        return out;
    }
    for deg in 1..=d {
        for exps in compositions(funcs.len(), deg) {
            let factors: Vec<ArithFunc> = funcs
                .iter()
                .zip(&exps)
                .filter(|(_, &e)| e > 0)
                .map(|(a, &e)| power(a, e))
                .collect();
            let name = factors.iter().map(ArithFunc::label).collect::<Vec<_>>().join("*");
            let product = factors[1..].iter().fold(factors[0].clone(), |acc, f| convolve(&acc, f));
            out.push(product.with_name(name));
        }
    }
    out
}

/// Rank of the `(α_j^{(i)})` matrix at horizon `N`.
pub fn certify_linear_independence(funcs: &[ArithFunc], m: u32, n: u64) -> Result<IndependenceReport, IndependenceError> {
    Ok(rank_exact(&coefficient_matrix(funcs, m, n)?))
}

/// Rank of the monomials of degree `≤ D`; full rank excludes every nonzero
/// polynomial relation of total degree `≤ D` among the series.
pub fn certify_algebraic_independence(funcs: &[ArithFunc], d: u32, n: u64) -> Result<IndependenceReport, IndependenceError> {
    if d == 0 {
        return Err(IndependenceError::InvalidDegree);
    }
    let family = monomial_family(funcs, d);
    Ok(rank_exact(&coefficient_matrix(&family, 0, n)?))
}
