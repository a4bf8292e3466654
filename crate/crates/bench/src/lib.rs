//! Shared fixtures for the criterion benchmarks.

use dforge::arith::builtins;
use dforge::{coefficient_matrix, ArithFunc, CoeffMatrix};

/// The `{one, μ}` derivative matrix of order `m` at horizon `n`.
pub fn one_mu_matrix(m: u32, n: u64) -> CoeffMatrix {
    let funcs: Vec<ArithFunc> = ["one", "mu"].iter().map(|f| builtins::builtin(f).expect("builtin")).collect();
    coefficient_matrix(&funcs, m, n).expect("horizon covers the rows")
}
