//! Deterministic reports: a header, computed results, checks sorted by
//! name, and an overall status line.

use std::fmt::Write as _;

use mirrorkit_core::Check;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultEntry {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    pub results: Vec<ResultEntry>,
    pub checks: Vec<CheckRecord>,
    pub status: &'static str,
    #[serde(skip)]
    digest: Sha256,
    #[serde(skip)]
    digested: bool,
    #[serde(skip)]
    cap: Option<f64>,
}

/// Scientific notation with a fixed number of digits, so equal runs give
/// equal bytes.
pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Report {
            command: command.into(),
            inputs: String::new(),
            seed,
            truncation: None,
            results: Vec::new(),
            checks: Vec::new(),
            status: "pass",
            digest: Sha256::new(),
            digested: false,
            cap: None,
        }
    }

    /// Feeds an input file into the inputs digest.
    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        self.digest.update(name.as_bytes());
        self.digest.update([0u8]);
        self.digest.update((bytes.len() as u64).to_le_bytes());
        self.digest.update(bytes);
        self.digested = true;
    }

    /// Numeric checks added afterwards use `min(own tolerance, tol)`.
    pub fn cap_tolerance(&mut self, tol: Option<f64>) {
        self.cap = tol;
    }

    pub fn truncation(&mut self, n: usize) {
        self.truncation = Some(n);
    }

    pub fn result(&mut self, key: impl Into<String>, value: impl ToString) {
        self.results.push(ResultEntry { key: key.into(), value: value.to_string() });
    }

    /// Adds checks under `prefix.`.
    pub fn checks<'a>(&mut self, prefix: &str, checks: impl IntoIterator<Item = &'a Check>) {
        for c in checks {
            self.check(prefix, c);
        }
    }

    pub fn check(&mut self, prefix: &str, c: &Check) {
        let name = if prefix.is_empty() { c.name.to_string() } else { format!("{prefix}.{}", c.name) };
        let mut passed = c.passed;
        let mut tolerance = c.tolerance;
        if let (Some(cap), Some(tol), Some(r)) = (self.cap, c.tolerance, c.residual) {
            if cap < tol {
                tolerance = Some(cap);
                passed = c.passed && r < cap;
            }
        }
        self.checks.push(CheckRecord {
            name,
            status: if passed { "pass" } else { "fail" },
            residual: c.residual.map(sci),
            tolerance: tolerance.map(sci),
            detail: c.detail.to_string(),
        });
    }

    /// A check built from a boolean, for conditions computed here.
    pub fn exact(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.check("", &Check::exact(name.into(), passed, detail.into()));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == "pass")
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &str> {
        self.checks.iter().filter(|c| c.status == "fail").map(|c| c.name.as_str())
    }

    /// Merges another report's results and checks, keeping this header.
    pub fn absorb(&mut self, other: Report) {
        self.results.extend(other.results);
        self.checks.extend(other.checks);
        if other.digested {
            self.digest.update(other.digest.finalize());
            self.digested = true;
        }
    }

    fn finish(&mut self) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.status = if self.passed() { "pass" } else { "fail" };
        self.inputs = if self.digested {
            let d = self.digest.clone().finalize();
            let mut s = String::from("sha256:");
            for b in d {
                let _ = write!(s, "{b:02x}");
            }
            s
        } else {
            "none".into()
        };
    }

    pub fn render(mut self, format: Format) -> String {
        self.finish();
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "inputs: {}", self.inputs);
        let _ = writeln!(s, "seed: {}", self.seed);
        if let Some(t) = self.truncation {
            let _ = writeln!(s, "truncation: {t}");
        }
        for r in &self.results {
            let _ = writeln!(s, "result.{}: {}", r.key, r.value);
        }
        for c in &self.checks {
            let _ = writeln!(s);
            let _ = writeln!(s, "check: {}", c.name);
            let _ = writeln!(s, "status: {}", c.status);
            match (&c.residual, &c.tolerance) {
                (Some(r), Some(t)) => {
                    let _ = writeln!(s, "residual: {r}");
                    let _ = writeln!(s, "tolerance: {t}");
                }
                _ => {
                    let _ = writeln!(s, "residual: exact");
                }
            }
            if !c.detail.is_empty() {
                let _ = writeln!(s, "detail: {}", c.detail);
            }
        }
        let _ = writeln!(s);
        let failed = self.checks.iter().filter(|c| c.status == "fail").count();
        let passed = self.checks.len() - failed;
        let _ = writeln!(s, "status: {} ({passed} passed, {failed} failed)", self.status);
        s
    }
}
