//! Run reports and CSV tables.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use dforge::arith::GrowthCert;
use dforge::Kernel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    CertifiedFailure,
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Error => 1,
            Status::CertifiedFailure => 2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct KernelAudit {
    pub label: String,
    pub decay_c: f64,
    pub domain_k: f64,
    pub audit_horizon: u64,
    pub monoid_morphism: bool,
    pub morphism_witness: Option<(u64, u64)>,
}

impl KernelAudit {
    pub fn of(l: &Kernel) -> Self {
        KernelAudit {
            label: l.label(),
            decay_c: l.decay_c(),
            domain_k: l.domain_k(),
            audit_horizon: l.audit_horizon(),
            monoid_morphism: l.is_monoid_morphism(),
            morphism_witness: l.morphism_check().witness,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FunctionAudit {
    pub name: String,
    pub growth: Option<GrowthCert>,
}

#[derive(Debug, Default, Serialize)]
pub struct Audit {
    pub factor_limit: u64,
    pub kernel: Option<KernelAudit>,
    pub functions: Vec<FunctionAudit>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub status: Status,
    pub job: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub audit: Audit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        match path {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}
