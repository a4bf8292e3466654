//! Arithmetic functions, certified generalized Dirichlet series and exact
//! independence certificates.
//!
//! * [`arith`]: the ring of arithmetic functions with exact Gaussian-rational
//!   polynomial values, Dirichlet convolution, inverses, the log-derivative
//!   `α^{(j)}(n) = (−1)^j α(n) log^j n` and multiplicative tooling.
//! * [`kernel`]: kernels `L(n)(z) = e^{−λ(n) z}` with audited decay and ratio
//!   certificates.
//! * [`series`]: truncated evaluation of `Σ α(n)(z) L(n)(z)` with rigorous tail
//!   bounds, coefficient peeling, homomorphism residuals and decay probes.
//! * [`independence`]: exact ranks of coefficient matrices over the field
//!   generated by the formal symbols `log p`.

pub mod arith;
pub mod independence;
pub mod kernel;
pub mod series;

pub use arith::{
    add, builtin, convolve, derivative, dirichlet_inverse, equivalent, eval_coeff,
    from_prime_powers, growth_check, is_multiplicative, power, scale, ArithError, ArithFunc,
    Coeff, EquivalenceVerdict, GaussRational, GrowthCert, LogScalar, PolyCoeff,
};
pub use independence::{
    certify_algebraic_independence, certify_linear_independence, coefficient_matrix,
    monomial_family, rank_exact, rank_numeric, CoeffMatrix, IndependenceError,
    IndependenceReport, Verdict,
};
pub use kernel::{
    classical_kernel, general_kernel, is_monoid_morphism, kernel_eval, Kernel, KernelError,
    KernelSpec, LambdaSeq,
};
pub use series::{
    abscissa, decay_probe, evaluate, evaluate_to_tolerance, homomorphism_residual, peel,
    tail_bound, DecayProbeReport, ForwardOracle, PeelConfig, PeelReport, ProbeTarget,
    ProbeVerdict, ResidualReport, Rounding, SeriesError, SeriesValue,
};

pub use num::complex::Complex64;
