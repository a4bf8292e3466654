//! Job files: strict JSON schema and resolution of function definitions.

use std::fmt;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use dforge::arith::{builtin, GrowthCert};
use dforge::{
    add, convolve, derivative, dirichlet_inverse, power, scale, ArithFunc, Complex64, GaussRational,
    KernelSpec, PolyCoeff,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eval,
    Convolve,
    Inverse,
    Derive,
    Peel,
    Rank,
    Equiv,
    Probe,
    Residual,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub functions: IndexMap<String, FuncDef>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

/// A name (built-in or earlier definition) or a construction.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum FuncDef {
    Name(String),
    Op(FuncOp),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FuncOp {
    /// Values `α(1), α(2), …` as Gaussian rationals, zero afterwards.
    Table(Vec<String>),
    Add(Vec<String>),
    Convolve(Vec<String>),
    /// `by` lists polynomial coefficients in `z`, constant term first.
    Scale { by: Vec<String>, of: String },
    Inverse(String),
    Derivative { of: String, j: u32 },
    Power { of: String, k: u32 },
    /// Declares `|α(n)| ≤ c·n^k`.
    Growth { of: String, k: String, c: String },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub funcs: Option<Vec<String>>,
    pub z: Option<Vec<String>>,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub tol: Option<String>,
    pub cap: Option<u64>,
    pub m: Option<u32>,
    #[serde(rename = "D")]
    pub d: Option<u32>,
    #[serde(rename = "P")]
    pub p: Option<u64>,
    #[serde(rename = "J")]
    pub j: Option<u32>,
    pub order: Option<u32>,
    pub horizon: Option<u64>,
    pub audit_horizon: Option<u64>,
    pub n_max: Option<u64>,
    pub schedule: Option<Vec<String>>,
    pub growth: Option<GrowthParam>,
    pub rounding: Option<RoundingSpec>,
    pub x_grid: Option<Vec<String>>,
    pub target: Option<ProbeTargetSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthParam {
    pub c: String,
    pub k: String,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum RoundingSpec {
    Integer {},
    Denominator { q: u64 },
    None { tol: String },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeTargetSpec {
    /// `x ↦ e^{rate·x}`.
    Exp { rate: String },
    /// `x ↦ Σ coeffs[i]·x^i`.
    Polynomial { coeffs: Vec<String> },
    /// `x ↦ F_L(α)(x) − Σ_{n ≤ skip} α(n)L(n)(x)`.
    Series {
        function: String,
        #[serde(default)]
        skip: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: String,
    pub format: OutputFormat,
}

/// Parses a job, reporting the line, column and field path of the first problem.
pub fn parse_job(text: &str) -> Result<(JobSpec, serde_json::Value)> {
    let echo: serde_json::Value = serde_json::from_str(text).map_err(|e| anyhow!("parse error: {e}"))?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let job: JobSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        anyhow!("parse error at line {} column {} (field `{path}`): {inner}", inner.line(), inner.column())
    })?;
    Ok((job, echo))
}

pub fn parse_gauss(s: &str) -> Result<GaussRational> {
    Ok(GaussRational::parse(s)?)
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    Ok(parse_gauss(s)?.to_complex())
}

pub fn parse_real(s: &str) -> Result<f64> {
    let g = parse_gauss(s)?;
    if !g.is_real() {
        bail!("expected a real number, got {s:?}");
    }
    Ok(g.to_complex().re)
}

pub fn parse_reals(v: &[String]) -> Result<Vec<f64>> {
    v.iter().map(|s| parse_real(s)).collect()
}

/// Functions in definition order; later entries may refer to earlier ones.
pub struct FunctionEnv {
    defined: IndexMap<String, ArithFunc>,
}

impl FunctionEnv {
    pub fn build(defs: &IndexMap<String, FuncDef>) -> Result<Self> {
        let mut env = FunctionEnv { defined: IndexMap::new() };
        for (name, def) in defs {
            let f = env.construct(def).with_context(|| format!("function `{name}`"))?;
            env.defined.insert(name.clone(), f.with_name(name.clone()));
        }
        Ok(env)
    }

    pub fn names(&self) -> Vec<String> {
        self.defined.keys().cloned().collect()
    }

    /// A defined function, else a built-in.
    pub fn get(&self, name: &str) -> Result<ArithFunc> {
        if let Some(f) = self.defined.get(name) {
            return Ok(f.clone());
        }
        Ok(builtin(name)?)
    }

    fn construct(&self, def: &FuncDef) -> Result<ArithFunc> {
        let op = match def {
            FuncDef::Name(n) => return self.get(n),
            FuncDef::Op(op) => op,
        };
        let many = |names: &[String], what: &str| -> Result<Vec<ArithFunc>> {
            if names.is_empty() {
                bail!("{what} needs at least one operand");
            }
            names.iter().map(|n| self.get(n)).collect()
        };
        Ok(match op {
            FuncOp::Table(values) => {
                ArithFunc::scalar_table(values.iter().map(|s| parse_gauss(s)).collect::<Result<_>>()?)
            }
            FuncOp::Add(names) => {
                let fs = many(names, "add")?;
                fs[1..].iter().fold(fs[0].clone(), |acc, f| add(&acc, f))
            }
            FuncOp::Convolve(names) => {
                let fs = many(names, "convolve")?;
                fs[1..].iter().fold(fs[0].clone(), |acc, f| convolve(&acc, f))
            }
            FuncOp::Scale { by, of } => {
                let coeffs = by.iter().map(|s| parse_gauss(s)).collect::<Result<Vec<_>>>()?;
                scale(PolyCoeff::from_coeffs(coeffs), &self.get(of)?)
            }
            FuncOp::Inverse(of) => dirichlet_inverse(&self.get(of)?)?,
            FuncOp::Derivative { of, j } => derivative(&self.get(of)?, *j),
            FuncOp::Power { of, k } => power(&self.get(of)?, *k),
            FuncOp::Growth { of, k, c } => {
                let (k, c) = (parse_real(k)?, parse_real(c)?);
                if !(c >= 0.0 && c.is_finite() && k.is_finite()) {
                    bail!("growth certificate needs finite k and c ≥ 0");
                }
                self.get(of)?.with_growth(GrowthCert::constant(k, c))
            }
        })
    }
}
