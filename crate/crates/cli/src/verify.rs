use std::f64::consts::TAU;

use projdim_core::liealg::{centralizer_with_tol, classify_flow, DeckMatrix, DimensionReport};
use projdim_core::numkernel::{Matrix, Vector};
use projdim_core::quotient::{descends, verify_free_action, QuotientSpace};
use projdim_core::randers::{
    corresponding_great_circle, curves_projectively_equal, integrate_geodesic, RandersData,
};
use projdim_core::sampling::{self, SeededRng};
use projdim_core::sphere::{map_great_circle, map_great_circle_with, ProjectiveMap, SpherePoint};
use projdim_core::Error;

use crate::error::VerifyError;
use crate::report::{TestResult, Tolerances, VerificationReport};

pub const MIN_N: usize = 2;
pub const MAX_N: usize = 16;
pub const FREE_ACTION_SAMPLES: usize = 10_000;
pub const BELTRAMI_TESTS: usize = 20;
pub const DESCENT_TESTS: usize = 5;
pub const FLOW_TIMES: [f64; 2] = [0.1, 1.0];
const CIRCLE_SAMPLES: usize = 64;

pub fn check_n(n: usize) -> Result<(), VerifyError> {
    if (MIN_N..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(VerifyError::Usage(format!(
            "n must be between {MIN_N} and {MAX_N}, got {n}"
        )))
    }
}

/// Random skew matrix with Frobenius norm `scale`.
pub fn skew_matrix(rng: &mut SeededRng, dim: usize, scale: f64) -> Matrix {
    let g = sampling::gaussian_matrix(rng, dim, dim);
    let s = &g - g.transpose();
    let norm = s.norm();
    s * (scale / norm)
}

/// Random covector of length `scale`.
pub fn covector(rng: &mut SeededRng, dim: usize, scale: f64) -> Vector {
    let g = sampling::gaussian_vector(rng, dim);
    let norm = g.norm();
    g * (scale / norm)
}

/// A smooth sphere map that is not projective: cubing the coordinates bends
/// great circles.
pub fn cubic_perturbation(a: &Matrix, p: &SpherePoint) -> SpherePoint {
    let y = a * p.coords();
    let bent = &y + y.map(|c| 0.5 * c * c * c);
    SpherePoint::normalize(&bent).expect("nonzero image")
}

pub fn block_form_tests(basis: &[Matrix], n: usize, tol: &Tolerances) -> Vec<TestResult> {
    let mut out = Vec::new();
    for (i, x) in basis.iter().enumerate() {
        for t in FLOW_TIMES {
            let name = format!("exp({t} X{i}) block form");
            out.push(match classify_flow(x, n, t) {
                Ok(form) => {
                    let defect = form.det_defect();
                    TestResult::new(name, defect, defect < tol.block_det)
                }
                Err(_) => TestResult::new(name, f64::NAN, false),
            });
        }
    }
    out
}

pub fn free_action_checks(
    q: &QuotientSpace,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<TestResult>, VerifyError> {
    let report =
        verify_free_action(q, FREE_ACTION_SAMPLES, seed).map_err(VerifyError::from_core)?;
    let d = q.deck().dim();
    let square_defect = (q.deck().power(2) - Matrix::identity(d, d)).norm();
    Ok(vec![
        TestResult::new(
            format!("min |Bv - v| over {FREE_ACTION_SAMPLES} points"),
            report.min_displacement,
            report.min_displacement >= tol.free_displacement,
        ),
        TestResult::new("B^2 = I exactly", square_defect, report.involution),
        TestResult::new(
            "det(B - I) nonzero",
            report.det_b_minus_i,
            report.det_b_minus_i != 0.0,
        ),
    ])
}

pub fn beltrami_tests(rng: &mut SeededRng, n: usize, tol: &Tolerances) -> Vec<TestResult> {
    let d = n + 1;
    let mut out = Vec::new();
    for i in 0..BELTRAMI_TESTS {
        let a = ProjectiveMap::new(sampling::special_linear(rng, d)).expect("det one");
        let gc = sampling::great_circle(rng, d);
        let name = format!("great circle image {i}");
        out.push(match map_great_circle(&a, &gc, CIRCLE_SAMPLES) {
            Ok(img) => TestResult::new(name, img.residual, img.residual < tol.beltrami),
            Err(_) => TestResult::new(name, f64::NAN, false),
        });
    }
    let a = sampling::special_linear(rng, d);
    let gc = sampling::great_circle(rng, d);
    let name = "non-projective control";
    out.push(
        match map_great_circle_with(|p| cubic_perturbation(&a, p), &gc, CIRCLE_SAMPLES) {
            Ok(img) => TestResult::new(name, img.residual, img.residual > tol.beltrami_control),
            Err(_) => TestResult::new(name, f64::NAN, false),
        },
    );
    out
}

pub fn descent_tests(rng: &mut SeededRng, q: &QuotientSpace, tol: &Tolerances) -> Vec<TestResult> {
    let n = q.n();
    let mut out = Vec::new();
    for i in 0..DESCENT_TESTS {
        let a = ProjectiveMap::new(sampling::block_form(rng, n).matrix()).expect("det one");
        let name = format!("block form {i} descends");
        out.push(match descends(q, &a) {
            Ok(d) => TestResult::new(
                name,
                d.residual,
                d.descends && d.residual < tol.descent_pass,
            ),
            Err(_) => TestResult::new(name, f64::NAN, false),
        });
    }
    for i in 0..DESCENT_TESTS {
        let a = ProjectiveMap::new(sampling::special_linear(rng, n + 1)).expect("det one");
        let name = format!("generic {i} does not descend");
        out.push(match descends(q, &a) {
            Ok(d) => TestResult::new(
                name,
                d.residual,
                !d.descends && d.residual > tol.descent_fail,
            ),
            Err(_) => TestResult::new(name, f64::NAN, false),
        });
    }
    out
}

fn integration_failure(name: String, _e: Error) -> TestResult {
    TestResult::new(name, f64::NAN, false)
}

/// Riemannian pointwise check, one closed-form Fréchet check and one
/// non-closed control.
pub fn geodesic_tests(rng: &mut SeededRng, n: usize, tol: &Tolerances) -> Vec<TestResult> {
    let d = n + 1;
    let mut out = Vec::new();

    let x0 = sampling::sphere_point(rng, d);
    let v0 = sampling::unit_tangent(rng, &x0);
    let name = "riemannian geodesic pointwise".to_string();
    let round = RandersData::riemannian(n).expect("valid n");
    out.push(match integrate_geodesic(&round, &x0, &v0, TAU, tol.dt) {
        Ok(curve) => {
            let err = curve
                .times()
                .iter()
                .zip(curve.points())
                .map(|(t, p)| (p.coords() - (x0.coords() * t.cos() + &v0 * t.sin())).norm())
                .fold(0.0, f64::max);
            TestResult::new(name, err, err < tol.riemannian_pointwise)
        }
        Err(e) => integration_failure(name, e),
    });

    let w = covector(rng, d, 0.5);
    let x0 = sampling::sphere_point(rng, d);
    let v0 = sampling::unit_tangent(rng, &x0);
    let name = "closed form |w| = 0.5 frechet".to_string();
    let closed = RandersData::with_covector(n, w).expect("valid data");
    out.push(match frechet_to_great_circle(&closed, &x0, &v0, tol.dt) {
        Ok(dist) => TestResult::new(name, dist, dist < tol.frechet),
        Err(e) => integration_failure(name, e),
    });

    let c = skew_matrix(rng, d, 0.3);
    let x0 = sampling::sphere_point(rng, d);
    let v0 = sampling::unit_tangent(rng, &x0);
    let name = "non-closed |C| = 0.3 control".to_string();
    let open = RandersData::with_skew(n, c).expect("valid data");
    out.push(match frechet_to_great_circle(&open, &x0, &v0, tol.dt) {
        Ok(dist) => TestResult::new(name, dist, dist > tol.deviation),
        Err(e) => integration_failure(name, e),
    });
    out
}

pub fn frechet_to_great_circle(
    m: &RandersData,
    x0: &SpherePoint,
    v0: &Vector,
    dt: f64,
) -> Result<f64, Error> {
    let curve = integrate_geodesic(m, x0, v0, TAU, dt)?;
    let reference = corresponding_great_circle(&curve)?;
    Ok(curves_projectively_equal(&curve, &reference).distance)
}

/// Runs the full certificate suite for `S^n / <B>`.
pub fn run_verify(
    n: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<VerificationReport, VerifyError> {
    check_n(n)?;
    let dims = DimensionReport::from_formulas(n).map_err(VerifyError::from_core)?;
    let cent = centralizer_with_tol(n, tol.rank).map_err(VerifyError::from_core)?;
    let deck = DeckMatrix::new(n).map_err(VerifyError::from_core)?;
    let q = QuotientSpace::new(n).map_err(VerifyError::from_core)?;

    let dim_centralizer = cent.dim;
    let formula_match = dim_centralizer == n * n - 2 * n + 2;
    let commutes = cent.max_commutator(&deck) < tol.block && cent.max_trace() < tol.block;

    let mut rng = sampling::rng(seed);
    let block_form_tests = block_form_tests(&cent.basis, n, tol);
    let free_action_checks = free_action_checks(&q, seed, tol)?;
    let free_action = free_action_checks.iter().all(|t| t.pass);
    let mut geodesic_tests = beltrami_tests(&mut rng, n, tol);
    let descent_tests = descent_tests(&mut rng, &q, tol);
    geodesic_tests.extend(self::geodesic_tests(&mut rng, n, tol));

    let all_pass = |tests: &[TestResult]| tests.iter().all(|t| t.pass);
    let overall = formula_match
        && commutes
        && dims.chain_holds == (n > 4)
        && dim_centralizer < dims.dim_sl
        && free_action
        && all_pass(&block_form_tests)
        && all_pass(&geodesic_tests)
        && all_pass(&descent_tests);

    Ok(VerificationReport {
        n,
        dim_sl: dims.dim_sl,
        dim_isom_bound: dims.dim_isom_bound,
        dim_centralizer,
        formula_match,
        chain_holds: dims.chain_holds,
        free_action,
        free_action_checks,
        block_form_tests,
        geodesic_tests,
        descent_tests,
        overall,
        seed,
        tolerances: tol.clone(),
    })
}
