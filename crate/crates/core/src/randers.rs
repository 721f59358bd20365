//! Randers metrics `F(x, ξ) = |ξ| + ω_x(ξ)` on the round sphere, with the
//! 1-form given by ambient data: `ω_x(ξ) = <w, ξ> + <Cx, ξ>` for a constant
//! covector `w` (an exact form) and a skew matrix `C` (generally not closed).
//!
//! Forward geodesics are integrated in ambient coordinates with fixed-step
//! RK4 and compared as unparametrised paths through a Fréchet distance.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::numkernel::{self, Matrix, Vector};
use crate::sampling;
use crate::sphere::SpherePoint;

pub const DEFAULT_DT: f64 = 1e-3;
/// Relative drift of `½F²` tolerated along an integrated geodesic.
pub const ENERGY_DRIFT_TOL: f64 = 1e-6;
/// Curves closer than this are the same unparametrised path.
pub const CURVE_EQ_TOL: f64 = 1e-5;
pub const SKEW_TOL: f64 = 1e-12;
const FINSLER_MARGIN: f64 = 1e-6;
const FINSLER_SEED: u64 = 0x00F1_A5E5;
const INTEGRATION_CHECK_SAMPLES: usize = 1000;
const MAX_RESAMPLE: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct RandersData {
    n: usize,
    w: Vector,
    c: Matrix,
}

impl RandersData {
    pub fn new(n: usize, w: Vector, c: Matrix) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let d = n + 1;
        if w.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: w.len(),
            });
        }
        if c.nrows() != d || c.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if c.nrows() != d { c.nrows() } else { c.ncols() },
            });
        }
        numkernel::check_matrix(&c)?;
        if let Some(i) = w.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        let skew = (&c + c.transpose()).amax();
        if skew > SKEW_TOL {
            return Err(Error::NotSkew(skew));
        }
        Ok(Self { n, w, c })
    }

    /// The round metric itself (`ω = 0`).
    pub fn riemannian(n: usize) -> Result<Self> {
        Self::new(n, Vector::zeros(n + 1), Matrix::zeros(n + 1, n + 1))
    }

    pub fn with_covector(n: usize, w: Vector) -> Result<Self> {
        Self::new(n, w, Matrix::zeros(n + 1, n + 1))
    }

    pub fn with_skew(n: usize, c: Matrix) -> Result<Self> {
        Self::new(n, Vector::zeros(n + 1), c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> &Vector {
        &self.w
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    /// Ambient covector `w + Cx` representing `ω_x`.
    pub fn form_at(&self, x: &Vector) -> Vector {
        &self.w + &self.c * x
    }

    /// g-norm of `ω_x`: the length of the tangential part of `w + Cx`.
    pub fn form_norm_at(&self, x: &SpherePoint) -> f64 {
        x.tangent_part(&self.form_at(x.coords())).norm()
    }

    /// `F` on ambient data without any checks.
    pub fn f_ambient(&self, x: &Vector, v: &Vector) -> f64 {
        v.norm() + self.form_at(x).dot(v)
    }

    /// Acceleration of the constant-speed forward geodesic through `(x, v)`.
    ///
    /// The normal part carries the sphere constraint and the magnetic force of
    /// `dω` (only `C` contributes); the component along `v` keeps `F`
    /// constant.
    fn acceleration(&self, x: &Vector, v: &Vector) -> Vector {
        let speed = v.norm();
        let dir = v / speed;
        let b = self.form_at(x);
        let cv = &self.c * v;
        let cv_tangent = &cv - x * x.dot(&cv);
        let normal = x * (-speed * speed) - cv_tangent * (2.0 * speed);
        let along = -b.dot(&normal) / (1.0 + b.dot(&dir));
        normal + dir * along
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinslerCheck {
    pub valid: bool,
    pub max_norm: f64,
}

fn form_norm_sq(m: &RandersData, x: &Vector) -> f64 {
    let b = m.form_at(x);
    let wx = m.w.dot(x);
    b.norm_squared() - wx * wx
}

/// Projected gradient ascent of `|P_x(w + Cx)|²` from `x`.
fn polish(m: &RandersData, start: &Vector) -> f64 {
    let mut x = start.clone();
    let mut value = form_norm_sq(m, &x);
    let mut step = 0.5;
    for _ in 0..200 {
        let b = m.form_at(&x);
        let grad = (m.c.transpose() * &b - &m.w * m.w.dot(&x)) * 2.0;
        let tangent = &grad - &x * x.dot(&grad);
        if tangent.norm() < 1e-15 {
            break;
        }
        let mut improved = false;
        while step > 1e-12 {
            let trial = &x + &tangent * step;
            let trial = &trial / trial.norm();
            let v = form_norm_sq(m, &trial);
            if v > value {
                x = trial;
                value = v;
                improved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    value.max(0.0).sqrt()
}

/// Largest g-norm of `ω` over seeded uniform samples, refined by local ascent
/// from the best few. Valid iff the maximum stays below `1 - 1e-6`.
pub fn validate_finsler(m: &RandersData, samples: usize) -> Result<FinslerCheck> {
    if samples < 100 {
        return Err(Error::TooFewSamples {
            min: 100,
            got: samples,
        });
    }
    let mut rng = sampling::rng(FINSLER_SEED);
    let mut scored: Vec<(f64, Vector)> = (0..samples)
        .map(|_| {
            let x = sampling::sphere_point(&mut rng, m.n + 1).into_coords();
            (form_norm_sq(m, &x).max(0.0).sqrt(), x)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut max_norm = scored[0].0;
    for (_, x) in scored.iter().take(5) {
        max_norm = max_norm.max(polish(m, x));
    }
    Ok(FinslerCheck {
        valid: max_norm < 1.0 - FINSLER_MARGIN,
        max_norm,
    })
}

fn check_tangent(x: &SpherePoint, xi: &Vector) -> Result<f64> {
    if xi.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: xi.len(),
        });
    }
    let norm = xi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let inner = x.coords().dot(xi);
    if inner.abs() > 1e-10 * norm.max(1.0) {
        return Err(Error::NotTangent(inner));
    }
    Ok(norm)
}

/// `F(x, ξ) = |ξ| + <w, ξ> + <Cx, ξ>` for a nonzero tangent vector `ξ`.
pub fn evaluate_f(m: &RandersData, x: &SpherePoint, xi: &Vector) -> Result<f64> {
    if x.dim() != m.n + 1 {
        return Err(Error::DimensionMismatch {
            expected: m.n + 1,
            found: x.dim(),
        });
    }
    check_tangent(x, xi)?;
    Ok(m.f_ambient(x.coords(), xi))
}

/// Sampled curve on the sphere with tangent velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCurve {
    times: Vec<f64>,
    points: Vec<SpherePoint>,
    velocities: Vec<Vector>,
}

impl GeodesicCurve {
    pub fn new(times: Vec<f64>, points: Vec<SpherePoint>, velocities: Vec<Vector>) -> Result<Self> {
        if times.len() < 2 || points.len() != times.len() || velocities.len() != times.len() {
            return Err(Error::ShortCurve);
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidStep {
                dt: 0.0,
                t_max: *times.last().unwrap_or(&0.0),
            });
        }
        for (p, v) in points.iter().zip(&velocities) {
            let inner = p.coords().dot(v);
            if inner.abs() > 1e-10 * v.norm().max(1.0) {
                return Err(Error::NotTangent(inner));
            }
        }
        Ok(Self {
            times,
            points,
            velocities,
        })
    }

    /// Unit-speed great circle `cos s·x0 + sin s·v0` for `s` in
    /// `[0, length]`, with `count` samples including both ends.
    pub fn great_circle(x0: &SpherePoint, v0: &Vector, length: f64, count: usize) -> Result<Self> {
        let speed = check_tangent(x0, v0)?;
        let dir = v0 / speed;
        let count = count.max(2);
        let times: Vec<f64> = (0..count)
            .map(|k| length * k as f64 / (count - 1) as f64)
            .collect();
        let points = times
            .iter()
            .map(|&s| SpherePoint::normalize(&(x0.coords() * s.cos() + &dir * s.sin())))
            .collect::<Result<Vec<_>>>()?;
        let velocities = times
            .iter()
            .zip(&points)
            .map(|(&s, p)| p.tangent_part(&(&dir * s.cos() - x0.coords() * s.sin())))
            .collect();
        Self::new(times, points, velocities)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn velocities(&self) -> &[Vector] {
        &self.velocities
    }

    /// Length in the round metric of the spherical polyline through the
    /// samples.
    pub fn g_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| arc_angle(w[0].coords(), w[1].coords()))
            .sum()
    }

    /// Same trace, opposite orientation.
    pub fn reversed(&self) -> Self {
        let end = *self.times.last().expect("nonempty");
        Self {
            times: self.times.iter().rev().map(|t| end - t).collect(),
            points: self.points.iter().rev().cloned().collect(),
            velocities: self.velocities.iter().rev().map(|v| -v).collect(),
        }
    }

    fn coords(&self) -> Vec<Vector> {
        self.points.iter().map(|p| p.coords().clone()).collect()
    }
}

/// The great-circle arc leaving the curve's first point along its first
/// velocity, with the same round-metric length and sample count.
pub fn corresponding_great_circle(curve: &GeodesicCurve) -> Result<GeodesicCurve> {
    GeodesicCurve::great_circle(
        &curve.points[0],
        &curve.velocities[0],
        curve.g_length(),
        curve.len(),
    )
}

/// Integrates the forward geodesic of `F` from `(x0, v0)` on `[0, t_max]`
/// with RK4 at a uniform step no larger than `dt`. Positions are renormalised
/// and velocities re-projected onto the tangent space after every step.
pub fn integrate_geodesic(
    m: &RandersData,
    x0: &SpherePoint,
    v0: &Vector,
    t_max: f64,
    dt: f64,
) -> Result<GeodesicCurve> {
    if !(dt > 0.0 && t_max > 0.0 && dt <= t_max / 10.0) || !t_max.is_finite() {
        return Err(Error::InvalidStep { dt, t_max });
    }
    if x0.dim() != m.n + 1 {
        return Err(Error::DimensionMismatch {
            expected: m.n + 1,
            found: x0.dim(),
        });
    }
    check_tangent(x0, v0)?;
    let check = validate_finsler(m, INTEGRATION_CHECK_SAMPLES)?;
    if !check.valid {
        return Err(Error::NotFinsler {
            max_norm: check.max_norm,
        });
    }
    let f0 = m.f_ambient(x0.coords(), v0);
    if f0 <= 1e-8 {
        return Err(Error::DegenerateInitialData(f0));
    }
    let energy0 = 0.5 * f0 * f0;

    let steps = (t_max / dt - 1e-9).ceil() as usize;
    let h = t_max / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    let mut x = x0.coords().clone();
    let mut v = v0.clone();
    times.push(0.0);
    points.push(x0.clone());
    velocities.push(v.clone());

    for k in 1..=steps {
        let (k1x, k1v) = (v.clone(), m.acceleration(&x, &v));
        let x2 = &x + &k1x * (0.5 * h);
        let v2 = &v + &k1v * (0.5 * h);
        let (k2x, k2v) = (v2.clone(), m.acceleration(&x2, &v2));
        let x3 = &x + &k2x * (0.5 * h);
        let v3 = &v + &k2v * (0.5 * h);
        let (k3x, k3v) = (v3.clone(), m.acceleration(&x3, &v3));
        let x4 = &x + &k3x * h;
        let v4 = &v + &k3v * h;
        let (k4x, k4v) = (v4.clone(), m.acceleration(&x4, &v4));

        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        x /= x.norm();
        v -= &x * x.dot(&v);

        let t = h * k as f64;
        let f = m.f_ambient(&x, &v);
        let drift = (0.5 * f * f - energy0).abs() / energy0;
        if drift > ENERGY_DRIFT_TOL {
            return Err(Error::EnergyDrift {
                drift,
                limit: ENERGY_DRIFT_TOL,
                time: t,
            });
        }
        times.push(t);
        points.push(SpherePoint::normalize(&x)?);
        velocities.push(v.clone());
    }
    GeodesicCurve::new(times, points, velocities)
}

/// Angle between two unit vectors, accurate for nearby points.
fn arc_angle(p: &Vector, q: &Vector) -> f64 {
    let chord = (p - q).norm().min(2.0);
    2.0 * (0.5 * chord).asin()
}

fn slerp(p: &Vector, q: &Vector, angle: f64, frac: f64) -> Vector {
    let v = if angle < 1e-9 {
        p + (q - p) * frac
    } else {
        let s = angle.sin();
        p * (((1.0 - frac) * angle).sin() / s) + q * ((frac * angle).sin() / s)
    };
    let norm = v.norm();
    v / norm
}

/// Resamples a spherical polyline at `count` points equally spaced in arc
/// length, interpolating along great-circle arcs between samples.
pub fn resample_by_arc_length(points: &[Vector], count: usize) -> Vec<Vector> {
    assert!(count >= 2 && !points.is_empty());
    let angles: Vec<f64> = points.windows(2).map(|w| arc_angle(&w[0], &w[1])).collect();
    let total: f64 = angles.iter().sum();
    if total == 0.0 || points.len() == 1 {
        return vec![points[0].clone(); count];
    }
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for k in 0..count {
        let target = total * k as f64 / (count - 1) as f64;
        while seg + 1 < angles.len() && seg_start + angles[seg] < target {
            seg_start += angles[seg];
            seg += 1;
        }
        let frac = if angles[seg] > 0.0 {
            ((target - seg_start) / angles[seg]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(slerp(&points[seg], &points[seg + 1], angles[seg], frac));
    }
    out
}

fn chord(p: &Vector, q: &Vector) -> f64 {
    p.iter()
        .zip(q.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Discrete Fréchet distance between two point sequences (Eiter–Mannila).
pub fn discrete_frechet(p: &[Vector], q: &[Vector]) -> f64 {
    if p.is_empty() || q.is_empty() {
        return f64::INFINITY;
    }
    let m = q.len();
    let mut prev = vec![0.0_f64; m];
    let mut cur = vec![0.0_f64; m];
    for (i, pi) in p.iter().enumerate() {
        for j in 0..m {
            let d = chord(pi, &q[j]);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveComparison {
    pub equal: bool,
    pub distance: f64,
}

/// Compares two curves as unparametrised paths: both are resampled at equal
/// arc-length fractions and the discrete Fréchet distance is taken in both
/// orientations.
pub fn curves_projectively_equal(c1: &GeodesicCurve, c2: &GeodesicCurve) -> CurveComparison {
    let count = c1.len().max(c2.len()).clamp(2, MAX_RESAMPLE);
    let p = resample_by_arc_length(&c1.coords(), count);
    let mut q = resample_by_arc_length(&c2.coords(), count);
    let forward = discrete_frechet(&p, &q);
    q.reverse();
    let backward = discrete_frechet(&p, &q);
    let distance = forward.min(backward);
    CurveComparison {
        equal: distance < CURVE_EQ_TOL,
        distance,
    }
}

/// Integrates from `(x0, v0)` over one turn and measures the distance to the
/// matching great-circle arc.
pub fn deviation_from_great_circle(
    m: &RandersData,
    x0: &SpherePoint,
    v0: &Vector,
    dt: f64,
) -> Result<CurveComparison> {
    let curve = integrate_geodesic(m, x0, v0, TAU, dt)?;
    let reference = corresponding_great_circle(&curve)?;
    Ok(curves_projectively_equal(&curve, &reference))
}
