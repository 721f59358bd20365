use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use projdim_core::numkernel::{Matrix, Vector};
use projdim_core::randers::{validate_finsler, RandersData};
use projdim_core::sampling;

use crate::error::VerifyError;
use crate::json::real;
use crate::report::{write_tests, Report, TestResult, Tolerances};
use crate::verify::{check_n, frechet_to_great_circle};

pub const RANDERS_GEODESICS: usize = 10;
pub const FINSLER_SAMPLES: usize = 10_000;
pub const ROUND: &str = "projectively round";
pub const DEVIATING: &str = "deviating";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandersConfig {
    pub n: usize,
    pub w: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

impl RandersConfig {
    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        serde_json::from_str(text).map_err(|e| VerifyError::Config(e.to_string()))
    }

    pub fn to_data(&self) -> Result<RandersData, VerifyError> {
        check_n(self.n)?;
        let d = self.n + 1;
        if self.w.len() != d {
            return Err(VerifyError::Config(format!(
                "w has {} entries, expected {d}",
                self.w.len()
            )));
        }
        if self.c.len() != d || self.c.iter().any(|row| row.len() != d) {
            return Err(VerifyError::Config(format!("C must be {d}x{d}")));
        }
        let c = Matrix::from_fn(d, d, |i, j| self.c[i][j]);
        RandersData::new(self.n, Vector::from_column_slice(&self.w), c)
            .map_err(|e| VerifyError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandersReport {
    pub n: usize,
    #[serde(serialize_with = "real")]
    pub max_form_norm: f64,
    pub geodesics: Vec<TestResult>,
    pub classification: String,
    pub seed: u64,
    #[serde(serialize_with = "real")]
    pub dt: f64,
}

impl Report for RandersReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "randers check  n = {}  seed = {}", self.n, self.seed);
        let _ = writeln!(s, "  max |omega|  {:.6}", self.max_form_norm);
        write_tests(&mut s, "distance to great circle", &self.geodesics);
        let _ = writeln!(s, "classification: {}", self.classification);
        s
    }
}

/// Integrates seeded forward geodesics of the configured metric and compares
/// each with the great circle it starts along.
pub fn run_randers_check(
    config: &RandersConfig,
    seed: u64,
    tol: &Tolerances,
) -> Result<RandersReport, VerifyError> {
    let m = config.to_data()?;
    let check = validate_finsler(&m, FINSLER_SAMPLES).map_err(VerifyError::from_core)?;
    if !check.valid {
        return Err(VerifyError::NotFinsler {
            max_norm: check.max_norm,
        });
    }
    let mut rng = sampling::rng(seed);
    let d = config.n + 1;
    let mut geodesics = Vec::with_capacity(RANDERS_GEODESICS);
    for i in 0..RANDERS_GEODESICS {
        let x0 = sampling::sphere_point(&mut rng, d);
        let v0 = sampling::unit_tangent(&mut rng, &x0);
        let dist = frechet_to_great_circle(&m, &x0, &v0, tol.dt).map_err(VerifyError::from_core)?;
        geodesics.push(TestResult::new(
            format!("geodesic {i}"),
            dist,
            dist < tol.frechet,
        ));
    }
    let round = geodesics.iter().all(|t| t.pass);
    Ok(RandersReport {
        n: config.n,
        max_form_norm: check.max_norm,
        geodesics,
        classification: if round { ROUND } else { DEVIATING }.to_string(),
        seed,
        dt: tol.dt,
    })
}
