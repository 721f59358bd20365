//! The round sphere S^n in R^{n+1}, great circles, and the projective action
//! `v -> Av/|Av|` of invertible matrices together with its infinitesimal form.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::numkernel::{self, determinant, matrix_exp, plane_fit, Matrix, Vector};

pub const UNIT_TOL: f64 = 1e-12;
/// Proportionality tolerance for [`projective_maps_equal`].
pub const MAP_EQ_TOL: f64 = 1e-9;
pub const DEFAULT_CIRCLE_SAMPLES: usize = 64;

/// A unit vector of R^{n+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint(Vector);

impl SpherePoint {
    pub fn new(coords: Vector) -> Result<Self> {
        let norm = coords.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self(coords))
    }

    /// Projects a nonzero vector onto the sphere.
    pub fn normalize(v: &Vector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self(v / norm))
    }

    /// The `i`-th standard basis vector of R^dim.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self(Vector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 }))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(Vector::from_row_slice(coords))
    }

    pub fn coords(&self) -> &Vector {
        &self.0
    }

    pub fn into_coords(self) -> Vector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Tangential part of an ambient vector at this point.
    pub fn tangent_part(&self, v: &Vector) -> Vector {
        v - &self.0 * self.0.dot(v)
    }
}

/// A great circle `t -> cos t·u + sin t·w` given by an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GreatCircle {
    u: Vector,
    w: Vector,
}

impl GreatCircle {
    pub fn new(u: Vector, w: Vector) -> Result<Self> {
        if u.len() != w.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: w.len(),
            });
        }
        let defect = (u.norm_squared() - 1.0)
            .abs()
            .max((w.norm_squared() - 1.0).abs())
            .max(u.dot(&w).abs());
        if !(defect <= UNIT_TOL) {
            return Err(Error::NotOrthonormal(defect));
        }
        Ok(Self { u, w })
    }

    /// The great circle through `x` with initial direction `v` (any nonzero
    /// tangent vector).
    pub fn through(x: &SpherePoint, v: &Vector) -> Result<Self> {
        let t = x.tangent_part(v);
        let norm = t.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Self::new(x.coords().clone(), t / norm)
    }

    pub fn u(&self) -> &Vector {
        &self.u
    }

    pub fn w(&self) -> &Vector {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn point_at(&self, t: f64) -> SpherePoint {
        SpherePoint(&self.u * t.cos() + &self.w * t.sin())
    }

    pub fn velocity_at(&self, t: f64) -> Vector {
        &self.w * t.cos() - &self.u * t.sin()
    }

    /// `samples` points uniformly spaced in angle over one full turn.
    pub fn sample(&self, samples: usize) -> Vec<SpherePoint> {
        (0..samples)
            .map(|k| self.point_at(TAU * k as f64 / samples as f64))
            .collect()
    }
}

/// An invertible matrix acting on the sphere by `v -> Av/|Av|`; two maps are
/// the same when their matrices are proportional.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap {
    matrix: Matrix,
}

impl ProjectiveMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let det = determinant(&matrix)?;
        if !(det.abs() > 1e-12) {
            return Err(Error::Singular(det.abs()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: Matrix::identity(dim, dim),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &SpherePoint) -> SpherePoint {
        let image = &self.matrix * v.coords();
        let norm = image.norm();
        SpherePoint(image / norm)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjectiveMap) -> ProjectiveMap {
        ProjectiveMap {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn inverse(&self) -> Result<ProjectiveMap> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(Error::Singular(0.0))?;
        ProjectiveMap::new(inv)
    }
}

pub fn apply(map: &ProjectiveMap, v: &SpherePoint) -> SpherePoint {
    map.apply(v)
}

/// Frobenius-normalised, sign-fixed distance between two matrices viewed up
/// to a nonzero scalar.
pub fn projective_distance(a: &Matrix, b: &Matrix) -> f64 {
    let na = a / a.norm();
    let nb = b / b.norm();
    (&na - &nb).norm().min((&na + &nb).norm())
}

pub fn projective_maps_equal(m1: &ProjectiveMap, m2: &ProjectiveMap) -> bool {
    m1.dim() == m2.dim() && projective_distance(m1.matrix(), m2.matrix()) < MAP_EQ_TOL
}

/// Image of a sampled great circle and the plane-fit residual of that image.
#[derive(Debug, Clone)]
pub struct CircleImage {
    pub points: Vec<SpherePoint>,
    pub residual: f64,
}

/// Pushes a sampled great circle through an arbitrary sphere map.
pub fn map_great_circle_with<F>(f: F, gc: &GreatCircle, samples: usize) -> Result<CircleImage>
where
    F: Fn(&SpherePoint) -> SpherePoint,
{
    if samples < 8 {
        return Err(Error::TooFewSamples {
            min: 8,
            got: samples,
        });
    }
    let points: Vec<SpherePoint> = gc.sample(samples).iter().map(f).collect();
    let coords: Vec<Vector> = points.iter().map(|p| p.coords().clone()).collect();
    let residual = plane_fit(&coords)?.residual;
    Ok(CircleImage { points, residual })
}

pub fn map_great_circle(
    map: &ProjectiveMap,
    gc: &GreatCircle,
    samples: usize,
) -> Result<CircleImage> {
    if map.dim() != gc.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            found: gc.dim(),
        });
    }
    map_great_circle_with(|p| map.apply(p), gc, samples)
}

/// The vector field `x -> Ax - <x, Ax> x` of a trace-free generator `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveVectorField {
    generator: Matrix,
}

impl ProjectiveVectorField {
    pub fn new(generator: Matrix) -> Result<Self> {
        numkernel::check_matrix(&generator)?;
        if generator.nrows() != generator.ncols() {
            return Err(Error::NotSquare {
                rows: generator.nrows(),
                cols: generator.ncols(),
            });
        }
        let tr = numkernel::trace(&generator);
        if tr.abs() > 1e-10 {
            return Err(Error::NotTraceFree(tr));
        }
        Ok(Self { generator })
    }

    /// Removes the trace part first; scalars act trivially on the sphere.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        let d = m.nrows();
        let shift = numkernel::trace(m) / d as f64;
        Self::new(m - Matrix::identity(d, d) * shift)
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn at(&self, x: &SpherePoint) -> Vector {
        x.tangent_part(&(&self.generator * x.coords()))
    }

    /// The projective map `exp(tau·A)`.
    pub fn flow(&self, tau: f64) -> Result<ProjectiveMap> {
        ProjectiveMap::new(matrix_exp(&self.generator, tau)?)
    }
}

pub fn vector_field_at(field: &ProjectiveVectorField, x: &SpherePoint) -> Vector {
    field.at(x)
}

pub fn flow(field: &ProjectiveVectorField, tau: f64) -> Result<ProjectiveMap> {
    field.flow(tau)
}
