use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    report: Value,
    raw: String,
    stderr: String,
}

fn write_job(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn dforge(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dforge"));
    cmd.args(args).env_remove("DFORGE_FACTOR_LIMIT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn run_job(command: &str, job: &str, extra: &[&str], env: &[(&str, &str)]) -> Run {
    let dir = TempDir::new().unwrap();
    let job_path = write_job(dir.path(), "job.json", job);
    let out = dir.path().join("report.json");
    let mut args = vec![command, "--job", job_path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = dforge(&args, env);
    let raw = std::fs::read_to_string(&out).unwrap_or_default();
    Run {
        code: o.status.code().unwrap(),
        report: serde_json::from_str(&raw).unwrap_or(Value::Null),
        raw,
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
    }
}

const ZETA2: &str = r#"{"command":"eval","functions":{"a":"one"},"kernel":{"kind":"classical"},"params":{"z":["2"],"tol":"1/1000000"}}"#;

#[test]
fn eval_writes_report_and_csv() {
    let dir = TempDir::new().unwrap();
    let job = write_job(dir.path(), "job.json", ZETA2);
    let (out, csv) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    let o = dforge(
        &["eval", "--job", job.to_str().unwrap(), "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["status"], "ok");
    assert_eq!(report["job"]["params"]["tol"], "1/1000000");
    assert_eq!(report["audit"]["kernel"]["monoid_morphism"], true);
    assert_eq!(report["audit"]["functions"][0]["name"], "a");
    assert!(report["wall_time_s"].is_number());

    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["function", "n_truncation", "re_z", "im_z", "re_value", "im_value", "tail_bound"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let value: f64 = rows[0][4].parse().unwrap();
    let tail: f64 = rows[0][6].parse().unwrap();
    assert!((value - 1.6449340668482264).abs() <= 1e-6 && tail <= 1e-6);
}

#[test]
fn report_goes_to_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let job = write_job(dir.path(), "job.json", ZETA2);
    let o = dforge(&["eval", "--job", job.to_str().unwrap(), "--deterministic"], &[]);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["status"], "ok");
    assert!(report.get("wall_time_s").is_none() && report.get("threads").is_none());
}

#[test]
fn deterministic_reports_match_across_thread_counts() {
    let job = r#"{"functions":{"a":"mu","b":{"convolve":["one","one"]}},"kernel":{"kind":"power","beta":2},
        "params":{"z":["1.3","0.8+5i"],"N":300000}}"#;
    let runs: Vec<Run> = ["1", "3", "8"].iter().map(|t| run_job("eval", job, &["--deterministic", "--threads", t], &[])).collect();
    assert_eq!(runs[0].code, 0, "{}", runs[0].stderr);
    assert!(runs.windows(2).all(|w| w[0].raw == w[1].raw));
    assert_eq!(runs[0].raw, run_job("eval", job, &["--deterministic", "--threads", "1"], &[]).raw);
}

#[test]
fn rank_job_is_certified() {
    let r = run_job("rank", r#"{"params":{"funcs":["one","mu"],"m":1,"N":64}}"#, &[], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["results"]["report"]["rank"], 4);
    assert_eq!(r.report["results"]["report"]["verdict"], "certified_independent");
}

#[test]
fn negative_verdicts_exit_two() {
    let r = run_job("equiv", r#"{"params":{"funcs":["one","mu"],"P":100,"J":5}}"#, &[], &[]);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["status"], "certified_failure");
    assert_eq!(r.report["results"]["verdict"]["exceptional_primes"].as_array().unwrap().len(), 25);

    let r = run_job("rank", r#"{"functions":{"a":"one","b":{"scale":{"by":["2"],"of":"one"}}},"params":{"N":16}}"#, &[], &[]);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["results"]["report"]["rank"], 1);

    let r = run_job("peel", r#"{"params":{"funcs":["one"],"schedule":["3/2","2"]}}"#, &[], &[]);
    assert_eq!(r.code, 2);
}

#[test]
fn equivalent_functions_exit_zero() {
    let job = r#"{"functions":{"m2":{"add":["mu",{"dummy":1}]}}}"#;
    assert_eq!(run_job("equiv", job, &[], &[]).code, 1);
    let r = run_job("equiv", r#"{"params":{"funcs":["mu","mu"]}}"#, &[], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["results"]["evidence"], "consistent_with_equivalence");
}

#[test]
fn errors_exit_one_with_report() {
    let r = run_job("eval", r#"{"command":"nope"}"#, &[], &[]);
    assert_eq!(r.code, 1);
    assert!(r.report["error"].as_str().unwrap().contains("parse error"));

    let r = run_job("eval", r#"{"functions":{"a":"one"},"params":{"z":["0.5"]}}"#, &[], &[]);
    assert_eq!(r.code, 1);
    assert!(r.report["error"].as_str().unwrap().contains("abscissa"), "{}", r.report);
    assert_eq!(r.report["status"], "error");

    let r = run_job("rank", ZETA2, &[], &[]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("`eval`"));

    let r = run_job("eval", r#"{"functions":{"a":{"inverse":"one"}},"params":{"z":["2"]}}"#, &[], &[]);
    assert_eq!(r.code, 1);
    assert!(r.report["error"].as_str().unwrap().contains("no growth certificate"));

    let r = run_job("residual", r#"{"kernel":{"kind":"linear"},"params":{"funcs":["one","one"]}}"#, &[], &[]);
    assert_eq!(r.code, 1);
    assert!(r.report["error"].as_str().unwrap().contains("(2, 3)"));
}

#[test]
fn missing_job_file_exits_one() {
    let o = dforge(&["eval", "--job", "/nonexistent/job.json"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = dforge(&["frobnicate", "--job", "x.json"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(dforge(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn factor_limit_override() {
    let job = r#"{"params":{"funcs":["mu"],"z":["2"],"N":1000}}"#;
    let r = run_job("eval", job, &[], &[("DFORGE_FACTOR_LIMIT", "500")]);
    assert_eq!(r.code, 1);
    assert!(r.report["error"].as_str().unwrap().contains("factorization limit 500"), "{}", r.report);
    assert_eq!(r.report["audit"]["factor_limit"], 500);
    let r = run_job("eval", job, &[], &[("DFORGE_FACTOR_LIMIT", "2000")]);
    assert_eq!(r.code, 0);
    let r = run_job("eval", job, &[], &[("DFORGE_FACTOR_LIMIT", "lots")]);
    assert_eq!(r.code, 1);
}

#[test]
fn job_output_section_is_honored() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("peel.csv");
    let job = format!(
        r#"{{"functions":{{"t":{{"table":["2","0","-1","3+i"]}}}},"params":{{"n_max":4}},"output":{{"path":{:?},"format":"csv"}}}}"#,
        csv.to_str().unwrap()
    );
    let r = run_job("peel", &job, &[], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["results"]["coefficients"], serde_json::json!(["2", "0", "-1", "3+i"]));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,recovered_re,recovered_im,error_majorant,rounded_integer\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn csv_is_rejected_for_rank() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("x.csv");
    let r = run_job("rank", r#"{"params":{"funcs":["one"],"N":4}}"#, &["--csv", csv.to_str().unwrap()], &[]);
    assert_eq!(r.code, 1);
    assert!(!csv.exists());
}

#[test]
fn other_commands_run() {
    let r = run_job("convolve", r#"{"params":{"funcs":["mu","one"],"horizon":10}}"#, &[], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["results"]["values"][0], "1");
    assert!(r.report["results"]["values"].as_array().unwrap()[1..].iter().all(|v| v == "0"));

    let r = run_job("derive", r#"{"params":{"funcs":["one"],"order":1,"horizon":3}}"#, &[], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["results"]["values"][0], "0");

    let r = run_job("probe", r#"{"params":{"target":{"kind":"exp","rate":"1"}}}"#, &[], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["results"]["probe"]["verdict"], "outside_b");

    let r = run_job("residual", r#"{"params":{"funcs":["one","mu"],"z":["3","2.5-1i"]}}"#, &[], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["results"]["residuals"].as_array().unwrap().len(), 2);
}
