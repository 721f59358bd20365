use std::fmt::Write as _;

use serde::Serialize;

use crate::json::{format_real, real};

/// Every threshold a run uses; echoed into each report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    #[serde(serialize_with = "real")]
    pub rank: f64,
    /// Singular values within this factor of the rank threshold abort the run.
    #[serde(serialize_with = "real")]
    pub rank_band: f64,
    #[serde(serialize_with = "real")]
    pub block: f64,
    #[serde(serialize_with = "real")]
    pub block_det: f64,
    #[serde(serialize_with = "real")]
    pub beltrami: f64,
    #[serde(serialize_with = "real")]
    pub beltrami_control: f64,
    #[serde(serialize_with = "real")]
    pub free_displacement: f64,
    #[serde(serialize_with = "real")]
    pub descent_pass: f64,
    #[serde(serialize_with = "real")]
    pub descent_fail: f64,
    #[serde(serialize_with = "real")]
    pub riemannian_pointwise: f64,
    #[serde(serialize_with = "real")]
    pub frechet: f64,
    #[serde(serialize_with = "real")]
    pub deviation: f64,
    #[serde(serialize_with = "real")]
    pub dt: f64,
    #[serde(serialize_with = "real")]
    pub energy_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: projdim_core::numkernel::DEFAULT_RANK_TOL,
            rank_band: 10.0,
            block: projdim_core::liealg::BLOCK_TOL,
            block_det: 1e-8,
            beltrami: 1e-9,
            beltrami_control: 1e-3,
            free_displacement: 1.41,
            descent_pass: 1e-12,
            descent_fail: 0.1,
            riemannian_pointwise: 1e-8,
            frechet: projdim_core::randers::CURVE_EQ_TOL,
            deviation: 1e-3,
            dt: projdim_core::randers::DEFAULT_DT,
            energy_drift: projdim_core::randers::ENERGY_DRIFT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub name: String,
    #[serde(serialize_with = "real")]
    pub residual: f64,
    pub pass: bool,
}

impl TestResult {
    pub fn new(name: impl Into<String>, residual: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            residual,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub dim_sl: usize,
    pub dim_isom_bound: usize,
    pub dim_centralizer: usize,
    pub formula_match: bool,
    pub chain_holds: bool,
    pub free_action: bool,
    pub free_action_checks: Vec<TestResult>,
    pub block_form_tests: Vec<TestResult>,
    pub geodesic_tests: Vec<TestResult>,
    pub descent_tests: Vec<TestResult>,
    pub overall: bool,
    pub seed: u64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Anything that can be written as a report.
pub trait Report: Serialize {
    fn text(&self) -> String;
}

pub fn emit_report<R: Report + ?Sized>(r: &R, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => r.text(),
    }
}

fn mark(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn residual_text(x: f64) -> String {
    format_real(x).unwrap_or_else(|| "n/a".into())
}

pub(crate) fn write_tests(out: &mut String, title: &str, tests: &[TestResult]) {
    let passed = tests.iter().filter(|t| t.pass).count();
    let _ = writeln!(out, "{title} ({passed}/{} pass)", tests.len());
    for t in tests {
        let _ = writeln!(
            out,
            "  {}  {:<44} {}",
            mark(t.pass),
            t.name,
            residual_text(t.residual)
        );
    }
}

impl Report for VerificationReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}  seed = {}", self.n, self.seed);
        let _ = writeln!(s, "  dim sl(n+1)                 {}", self.dim_sl);
        let _ = writeln!(s, "  isometry bound n(n+1)/2     {}", self.dim_isom_bound);
        let _ = writeln!(
            s,
            "  centralizer dimension       {} (n^2-2n+2 = {}: {})",
            self.dim_centralizer,
            self.n * self.n - 2 * self.n + 2,
            if self.formula_match {
                "match"
            } else {
                "MISMATCH"
            }
        );
        let _ = writeln!(
            s,
            "  chain {} < {} < {}  {}",
            self.dim_isom_bound,
            self.n * self.n - 2 * self.n + 2,
            self.dim_sl,
            if self.chain_holds {
                "STRICT"
            } else {
                "NOT STRICT"
            }
        );
        let _ = writeln!(
            s,
            "  free action                 {}",
            mark(self.free_action)
        );
        write_tests(&mut s, "free action checks", &self.free_action_checks);
        write_tests(&mut s, "block form", &self.block_form_tests);
        write_tests(&mut s, "geodesics", &self.geodesic_tests);
        write_tests(&mut s, "descent", &self.descent_tests);
        let _ = writeln!(s, "overall {}", mark(self.overall));
        s
    }
}

impl Report for [VerificationReport] {
    fn text(&self) -> String {
        self.iter().map(Report::text).collect::<Vec<_>>().join("\n")
    }
}

impl Report for Vec<VerificationReport> {
    fn text(&self) -> String {
        self.as_slice().text()
    }
}
