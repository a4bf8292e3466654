//! Command dispatch.

use std::cell::RefCell;

use anyhow::{anyhow, bail, Result};
use serde_json::{json, Value};

use dforge::kernel::DEFAULT_AUDIT_HORIZON;
use dforge::series::{
    default_probe_grid, evaluate_to_tolerance_with, SeriesOracle, TolerancePolicy, DEFAULT_TRUNCATION_CAP,
};
use dforge::{
    classical_kernel, coefficient_matrix, decay_probe, derivative, dirichlet_inverse, equivalent,
    evaluate, homomorphism_residual, monomial_family, peel, rank_exact,
    rank_numeric, ArithFunc, Complex64, ForwardOracle, Kernel, PeelConfig, ProbeTarget, Rounding,
    SeriesError, SeriesValue,
};

use crate::job::{
    parse_complex, parse_real, parse_reals, Command, FunctionEnv, JobSpec, ProbeTargetSpec,
    RoundingSpec,
};
use crate::report::{Audit, FunctionAudit, KernelAudit, Status, Table};

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub results: Value,
    pub table: Option<Table>,
}

impl Outcome {
    fn ok(results: Value, table: Option<Table>) -> Self {
        Outcome { status: Status::Ok, results, table }
    }
}

/// Whether `--csv` means anything for `command`.
pub fn has_table(command: Command) -> bool {
    !matches!(command, Command::Rank | Command::Equiv)
}

const DEFAULT_TOL: &str = "1/1000000";
const DEFAULT_RESIDUAL_TOL: &str = "1/100000000";
const DEFAULT_COEFF_HORIZON: u64 = 32;

struct Ctx<'a> {
    job: &'a JobSpec,
    env: FunctionEnv,
    audit: &'a mut Audit,
}

impl Ctx<'_> {
    fn kernel(&mut self) -> Result<Kernel> {
        let horizon = self.job.params.audit_horizon.unwrap_or(DEFAULT_AUDIT_HORIZON);
        let l = match &self.job.kernel {
            Some(spec) => spec.build(horizon)?,
            None => classical_kernel(),
        };
        self.audit.kernel = Some(KernelAudit::of(&l));
        Ok(l)
    }

    /// The functions named in `params.funcs`, or every defined function.
    fn funcs(&mut self, count: Option<usize>) -> Result<Vec<ArithFunc>> {
        let names = match &self.job.params.funcs {
            Some(v) => v.clone(),
            None => self.env.names(),
        };
        if names.is_empty() {
            bail!("no functions given: set params.funcs or define functions");
        }
        if let Some(c) = count {
            if names.len() != c {
                bail!("this command takes {c} function(s), got {}", names.len());
            }
        }
        let fs = names.iter().map(|n| Ok(self.env.get(n)?.with_name(n.clone()))).collect::<Result<Vec<_>>>()?;
        for f in &fs {
            self.audit.functions.push(FunctionAudit { name: f.label(), growth: f.growth().cloned() });
        }
        Ok(fs)
    }

    fn zs(&self, default: Option<&str>) -> Result<Vec<Complex64>> {
        match (&self.job.params.z, default) {
            (Some(v), _) if !v.is_empty() => v.iter().map(|s| parse_complex(s)).collect(),
            (None, Some(d)) => Ok(vec![parse_complex(d)?]),
            _ => bail!("params.z must list at least one point"),
        }
    }

    fn tol(&self, default: &str) -> Result<f64> {
        let t = parse_real(self.job.params.tol.as_deref().unwrap_or(default))?;
        if !(t > 0.0) {
            bail!("params.tol must be positive");
        }
        Ok(t)
    }
}

fn require_certified(fs: &[ArithFunc]) -> Result<()> {
    for f in fs {
        if f.growth().is_none() {
            return Err(SeriesError::CertificateMissing(f.label()).into());
        }
    }
    Ok(())
}

fn series_json(function: &str, z: Complex64, v: &SeriesValue) -> Value {
    json!({
        "function": function,
        "z": z,
        "truncation_n": v.truncation_n,
        "value": v.value,
        "tail_bound": v.tail_bound,
        "rounding_bound": v.rounding_bound,
        "error_bound": v.error_bound(),
        "abscissa_kprime": v.abscissa_kprime,
        "growth_constant": v.growth_constant,
        "audited_constant": v.audited_constant,
    })
}

pub fn run(command: Command, job: &JobSpec, audit: &mut Audit) -> Result<Outcome> {
    let env = FunctionEnv::build(&job.functions)?;
    let mut cx = Ctx { job, env, audit };
    match command {
        Command::Eval => eval(&mut cx),
        Command::Convolve => {
            let fs = cx.funcs(None)?;
            if fs.len() < 2 {
                bail!("convolve takes at least 2 functions");
            }
            let c = fs[1..].iter().fold(fs[0].clone(), |acc, f| dforge::convolve(&acc, f));
            let name = fs.iter().map(ArithFunc::label).collect::<Vec<_>>().join("*");
            coefficients(&cx, &c.with_name(name))
        }
        Command::Inverse => {
            let f = cx.funcs(Some(1))?.remove(0);
            let inv = dirichlet_inverse(&f)?.with_name(format!("{}^-1", f.label()));
            coefficients(&cx, &inv)
        }
        Command::Derive => {
            let f = cx.funcs(Some(1))?.remove(0);
            let j = cx.job.params.order.unwrap_or(1);
            let d = derivative(&f, j).with_name(format!("{}^({j})", f.label()));
            coefficients(&cx, &d)
        }
        Command::Peel => peel_cmd(&mut cx),
        Command::Rank => rank(&mut cx),
        Command::Equiv => equiv(&mut cx),
        Command::Probe => probe(&mut cx),
        Command::Residual => residual(&mut cx),
    }
}

fn eval(cx: &mut Ctx) -> Result<Outcome> {
    let fs = cx.funcs(None)?;
    require_certified(&fs)?;
    let l = cx.kernel()?;
    let zs = cx.zs(None)?;
    let p = &cx.job.params;
    let policy = TolerancePolicy { n0: 1, cap: p.cap.unwrap_or(DEFAULT_TRUNCATION_CAP) };
    let tol = match p.n {
        Some(_) => None,
        None => Some(cx.tol(DEFAULT_TOL)?),
    };
    let mut rows = Vec::new();
    let mut table = Table::new(&["function", "n_truncation", "re_z", "im_z", "re_value", "im_value", "tail_bound"]);
    for f in &fs {
        for &z in &zs {
            let v = match (p.n, tol) {
                (Some(n), _) => evaluate(f, &l, z, n)?,
                (None, Some(t)) => evaluate_to_tolerance_with(f, &l, z, t, policy)?,
                (None, None) => unreachable!(),
            };
            table.push(vec![
                f.label(),
                v.truncation_n.to_string(),
                z.re.to_string(),
                z.im.to_string(),
                v.value.re.to_string(),
                v.value.im.to_string(),
                v.tail_bound.to_string(),
            ]);
            rows.push(series_json(&f.label(), z, &v));
        }
    }
    Ok(Outcome::ok(json!({ "tol": tol, "evaluations": rows }), Some(table)))
}

fn coefficients(cx: &Ctx, f: &ArithFunc) -> Result<Outcome> {
    let h = cx.job.params.horizon.unwrap_or(DEFAULT_COEFF_HORIZON);
    if h == 0 {
        bail!("params.horizon must be positive");
    }
    let mut table = Table::new(&["n", "value"]);
    let mut values = Vec::with_capacity(h as usize);
    for n in 1..=h {
        let v = f.try_coeff(n)?.to_string();
        table.push(vec![n.to_string(), v.clone()]);
        values.push(v);
    }
    Ok(Outcome::ok(json!({ "function": f.label(), "horizon": h, "values": values }), Some(table)))
}

fn peel_cmd(cx: &mut Ctx) -> Result<Outcome> {
    let f = cx.funcs(Some(1))?.remove(0);
    require_certified(std::slice::from_ref(&f))?;
    let l = cx.kernel()?;
    let p = &cx.job.params;
    let (growth_c, growth_k) = match &p.growth {
        Some(g) => (parse_real(&g.c)?, parse_real(&g.k)?),
        None => {
            let cert = f.growth().expect("checked above");
            if cert.majorant.len() > 1 {
                bail!("{} has a z-dependent growth bound; set params.growth", f.label());
            }
            (cert.majorant.first().copied().unwrap_or(0.0), cert.k)
        }
    };
    let mut cfg = PeelConfig::new(p.n_max.unwrap_or(8), growth_c, growth_k);
    if let Some(s) = &p.schedule {
        cfg.schedule = parse_reals(s)?;
    }
    cfg.rounding = match &p.rounding {
        None | Some(RoundingSpec::Integer {}) => Rounding::Integer,
        Some(RoundingSpec::Denominator { q }) if *q > 0 => Rounding::Denominator { q: *q },
        Some(RoundingSpec::Denominator { .. }) => bail!("rounding denominator must be positive"),
        Some(RoundingSpec::None { tol }) => Rounding::None { tol: parse_real(tol)? },
    };
    let oracle = ForwardOracle::new(f.clone(), l.clone());
    match peel(&oracle, &l, &cfg) {
        Ok(report) => {
            let mut table = Table::new(&["n", "recovered_re", "recovered_im", "error_majorant", "rounded_integer"]);
            for r in &report.rows {
                table.push(vec![
                    r.n.to_string(),
                    r.recovered_re.to_string(),
                    r.recovered_im.to_string(),
                    r.error_majorant.to_string(),
                    r.rounded.as_ref().map(ToString::to_string).unwrap_or_default(),
                ]);
            }
            let coeffs = report.coefficients().map(|c| c.iter().map(ToString::to_string).collect::<Vec<_>>());
            Ok(Outcome::ok(json!({ "function": f.label(), "coefficients": coeffs, "peel": report }), Some(table)))
        }
        Err(SeriesError::RecoveryUncertain { n0, majorant }) => Ok(Outcome {
            status: Status::CertifiedFailure,
            results: json!({
                "function": f.label(),
                "recovery_uncertain_at": n0,
                "best_majorant": majorant,
                "config": cfg,
            }),
            table: None,
        }),
        Err(e) => Err(e.into()),
    }
}

fn rank(cx: &mut Ctx) -> Result<Outcome> {
    let fs = cx.funcs(None)?;
    let p = &cx.job.params;
    let n = p.n.ok_or_else(|| anyhow!("rank needs params.N"))?;
    let (family, m) = match p.d {
        Some(0) => bail!("params.D must be at least 1"),
        Some(d) => {
            if p.m.unwrap_or(0) != 0 {
                bail!("params.m and params.D cannot be combined");
            }
            (monomial_family(&fs, d), 0)
        }
        None => (fs, p.m.unwrap_or(0)),
    };
    let matrix = coefficient_matrix(&family, m, n)?;
    let report = rank_exact(&matrix);
    let numeric = rank_numeric(&matrix.to_numeric());
    let status = if report.is_certified() { Status::Ok } else { Status::CertifiedFailure };
    Ok(Outcome {
        status,
        results: json!({
            "mode": if p.d.is_some() { "algebraic" } else { "linear" },
            "m": m,
            "D": p.d,
            "report": report,
            "numeric_rank": numeric,
            "numeric_agrees": numeric == report.rank,
        }),
        table: None,
    })
}

fn equiv(cx: &mut Ctx) -> Result<Outcome> {
    let fs = cx.funcs(Some(2))?;
    let p = &cx.job.params;
    let v = equivalent(&fs[0], &fs[1], p.p.unwrap_or(100), p.j.unwrap_or(5))?;
    let against = v.exceptions_reach_horizon();
    Ok(Outcome {
        status: if against { Status::CertifiedFailure } else { Status::Ok },
        results: json!({
            "functions": [fs[0].label(), fs[1].label()],
            "verdict": v,
            "exceptions_reach_horizon": against,
            "evidence": if against { "against_equivalence" } else { "consistent_with_equivalence" },
        }),
        table: None,
    })
}

fn probe(cx: &mut Ctx) -> Result<Outcome> {
    let p = &cx.job.params;
    let grid = match &p.x_grid {
        Some(g) => parse_reals(g)?,
        None => default_probe_grid(),
    };
    let target = p.target.as_ref().ok_or_else(|| anyhow!("probe needs params.target"))?;
    let report = match target {
        ProbeTargetSpec::Exp { rate } => {
            let a = parse_real(rate)?;
            decay_probe(ProbeTarget::LogModulus(&|x| a * x), &grid)?
        }
        ProbeTargetSpec::Polynomial { coeffs } => {
            let c: Vec<Complex64> = coeffs.iter().map(|s| parse_complex(s)).collect::<Result<_>>()?;
            let f = |x: f64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, v| acc * x + v);
            decay_probe(ProbeTarget::Values(&f), &grid)?
        }
        ProbeTargetSpec::Series { function, skip } => {
            let a = cx.env.get(function)?.with_name(function.clone());
            cx.audit.functions.push(FunctionAudit { name: a.label(), growth: a.growth().cloned() });
            require_certified(std::slice::from_ref(&a))?;
            let l = cx.kernel()?;
            series_probe(&a, &l, *skip, &grid)?
        }
    };
    let mut table = Table::new(&["x", "log_abs_f"]);
    for (x, y) in &report.samples {
        table.push(vec![x.to_string(), y.to_string()]);
    }
    Ok(Outcome::ok(json!({ "heuristic": true, "probe": report }), Some(table)))
}

/// Probes `F_L(α) − Σ_{n ≤ skip} α(n)L(n)` in extended precision, scaled
/// to the first surviving term so that `log|f|` is exact to many digits.
fn series_probe(a: &ArithFunc, l: &Kernel, skip: u64, grid: &[f64]) -> Result<dforge::DecayProbeReport> {
    const SEARCH: u64 = 1 << 16;
    let first = (skip + 1..=skip + SEARCH)
        .find(|&n| a.try_coeff(n).map(|c| !c.is_zero()).unwrap_or(true))
        .ok_or_else(|| anyhow!("{} vanishes on ({skip}, {}]; log|f| is undefined", a.label(), skip + SEARCH))?;
    let lam = l.lambda().value(first)?;
    let oracle = ForwardOracle::new(a.clone(), l.clone()).without_head(skip);
    let failure: RefCell<Option<SeriesError>> = RefCell::new(None);
    let f = |x: f64| -> f64 {
        let bits = (lam * x / std::f64::consts::LN_2).ceil().max(0.0) as usize + 128;
        match oracle.eval(x, bits) {
            Ok(v) => v.ln_abs(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let result = decay_probe(ProbeTarget::LogModulus(&f), grid);
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(result?)
}

fn residual(cx: &mut Ctx) -> Result<Outcome> {
    let fs = cx.funcs(Some(2))?;
    require_certified(&fs)?;
    let l = cx.kernel()?;
    let zs = cx.zs(Some("3"))?;
    let tol = cx.tol(DEFAULT_RESIDUAL_TOL)?;
    let mut rows = Vec::new();
    let mut table = Table::new(&["re_z", "im_z", "residual", "bound", "within_bound"]);
    let mut all_within = true;
    for &z in &zs {
        let r = homomorphism_residual(&fs[0], &fs[1], &l, z, tol)?;
        all_within &= r.within_bound();
        table.push(vec![
            z.re.to_string(),
            z.im.to_string(),
            r.residual.to_string(),
            r.bound.to_string(),
            r.within_bound().to_string(),
        ]);
        rows.push(json!({
            "z": z,
            "residual": r.residual,
            "bound": r.bound,
            "within_bound": r.within_bound(),
            "f_alpha": series_json(&fs[0].label(), z, &r.f_alpha),
            "f_beta": series_json(&fs[1].label(), z, &r.f_beta),
            "f_product": series_json(&format!("{}*{}", fs[0].label(), fs[1].label()), z, &r.f_product),
        }));
    }
    Ok(Outcome {
        status: if all_within { Status::Ok } else { Status::CertifiedFailure },
        results: json!({ "tol": tol, "residuals": rows }),
        table: Some(table),
    })
}
