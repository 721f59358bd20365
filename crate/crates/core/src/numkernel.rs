//! Dense real linear algebra used by every other module: numerical kernels,
//! two independent rank strategies, the matrix exponential, determinants and
//! best-fit planes through the origin.
//!
//! Matrices and vectors are plain `nalgebra` dynamic types. Serialized forms
//! always walk entries in row-major order.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative singular-value threshold used for every dimension decision.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Width (in decades, either side) of the band around the rank threshold
/// inside which a singular value makes the rank decision ambiguous.
const AMBIGUITY_BAND: f64 = 10.0;

pub fn check_matrix(m: &Matrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if !m[(r, c)].is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

fn check_square(m: &Matrix) -> Result<()> {
    check_matrix(m)?;
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(rel_tol))
    }
}

/// Row-major copy of the entries.
pub fn row_major(m: &Matrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(m[(r, c)]);
        }
    }
    out
}

/// Singular values and right singular vectors, sorted by decreasing singular
/// value. Wide matrices are padded with zero rows so the full right basis is
/// always available.
fn right_svd(m: &Matrix) -> (Vec<f64>, Vec<Vector>) {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = Matrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut pairs: Vec<(f64, Vector)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, v_t.row(i).transpose()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.into_iter().unzip()
}

/// Outcome of an SVD-based kernel computation.
#[derive(Debug, Clone)]
pub struct Kernel {
    /// Orthonormal basis of the numerical kernel.
    pub basis: Vec<Vector>,
    /// All singular values, largest first.
    pub singular_values: Vec<f64>,
    /// Absolute cut: `rel_tol * sigma_max`.
    pub threshold: f64,
    pub rel_tol: f64,
}

impl Kernel {
    pub fn rank(&self) -> usize {
        // singular_values always has one entry per column
        self.singular_values.len() - self.basis.len()
    }

    /// First singular value whose ratio to the largest one falls within a
    /// decade of `rel_tol` on either side, as `(ratio, rel_tol)`.
    pub fn ambiguous(&self) -> Option<(f64, f64)> {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return None;
        }
        self.singular_values
            .iter()
            .map(|s| s / top)
            .find(|r| *r >= self.rel_tol / AMBIGUITY_BAND && *r <= self.rel_tol * AMBIGUITY_BAND)
            .map(|r| (r, self.rel_tol))
    }

    /// Fails with [`Error::AmbiguousRank`] when any singular value sits in the
    /// ambiguity band.
    pub fn certain(self) -> Result<Self> {
        match self.ambiguous() {
            Some((ratio, threshold)) => Err(Error::AmbiguousRank { ratio, threshold }),
            None => Ok(self),
        }
    }
}

/// SVD kernel with full diagnostics.
pub fn kernel(m: &Matrix, rel_tol: f64) -> Result<Kernel> {
    check_matrix(m)?;
    check_tol(rel_tol)?;
    let (sv, right) = right_svd(m);
    let top = sv.first().copied().unwrap_or(0.0);
    let threshold = rel_tol * top;
    let basis = if top == 0.0 {
        (0..m.ncols())
            .map(|i| Vector::from_fn(m.ncols(), |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect()
    } else {
        sv.iter()
            .zip(right)
            .filter(|(s, _)| **s < threshold)
            .map(|(_, v)| v)
            .collect()
    };
    Ok(Kernel {
        basis,
        singular_values: sv,
        threshold,
        rel_tol,
    })
}

/// Orthonormal basis of the numerical kernel of `m`: right singular vectors
/// whose singular value is below `rel_tol` times the largest one.
pub fn null_space(m: &Matrix, rel_tol: f64) -> Result<Vec<Vector>> {
    kernel(m, rel_tol).map(|k| k.basis)
}

pub fn svd_rank(m: &Matrix, rel_tol: f64) -> Result<usize> {
    let k = kernel(m, rel_tol)?;
    Ok(m.ncols() - k.basis.len())
}

/// Rank by Gaussian elimination with partial pivoting. A column is skipped
/// when its best remaining pivot is below `rel_tol * max|m_ij| * max(rows, cols)`.
pub fn elimination_rank(m: &Matrix, rel_tol: f64) -> Result<usize> {
    check_matrix(m)?;
    check_tol(rel_tol)?;
    let (rows, cols) = m.shape();
    let scale = m.amax();
    if scale == 0.0 {
        return Ok(0);
    }
    let cut = rel_tol * scale * rows.max(cols) as f64;
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (pivot_row, pivot_abs) =
            (rank..rows)
                .map(|r| (r, a[(r, col)].abs()))
                .fold(
                    (rank, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_abs <= cut {
            continue;
        }
        a.swap_rows(rank, pivot_row);
        let pivot = a[(rank, col)];
        for r in rank + 1..rows {
            let factor = a[(r, col)] / pivot;
            if factor != 0.0 {
                for c in col..cols {
                    a[(r, c)] -= factor * a[(rank, c)];
                }
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// Determinant by LU with partial pivoting.
pub fn determinant(m: &Matrix) -> Result<f64> {
    check_square(m)?;
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let (p, _) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .fold(
                (col, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if a[(p, col)] == 0.0 {
            return Ok(0.0);
        }
        if p != col {
            a.swap_rows(p, col);
            det = -det;
        }
        let pivot = a[(col, col)];
        det *= pivot;
        for r in col + 1..n {
            let factor = a[(r, col)] / pivot;
            for c in col + 1..n {
                a[(r, c)] -= factor * a[(col, c)];
            }
        }
    }
    Ok(det)
}

pub fn trace(m: &Matrix) -> f64 {
    m.diagonal().sum()
}

// Padé(13, 13) numerator coefficients for exp.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

fn one_norm(m: &Matrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(tau * a)` by scaling and squaring around a Padé(13) approximant.
pub fn matrix_exp(a: &Matrix, tau: f64) -> Result<Matrix> {
    check_square(a)?;
    let n = a.nrows();
    let scaled = a * tau;
    let norm = one_norm(&scaled);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let x = scaled / 2f64.powi(squarings);

    let id = Matrix::identity(n, n);
    let b = &PADE13;
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let u_inner = &x6 * (&x6 * b[13] + &x4 * b[11] + &x2 * b[9])
        + &x6 * b[7]
        + &x4 * b[5]
        + &x2 * b[3]
        + &id * b[1];
    let u = &x * u_inner;
    let v = &x6 * (&x6 * b[12] + &x4 * b[10] + &x2 * b[8])
        + &x6 * b[6]
        + &x4 * b[4]
        + &x2 * b[2]
        + &id * b[0];

    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .ok_or(Error::Singular(0.0))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// Best-fit 2-plane through the origin.
#[derive(Debug, Clone)]
pub struct PlaneFit {
    pub frame: (Vector, Vector),
    /// Third singular value over the first; zero iff the points are coplanar
    /// with the origin.
    pub residual: f64,
}

/// Fits a plane through the origin to unit vectors. Residual near zero means
/// the points lie on one great circle.
pub fn plane_fit(points: &[Vector]) -> Result<PlaneFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let dim = points[0].len();
    for (index, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        let norm = p.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::OffSphere { index, norm });
        }
    }
    let stacked = Matrix::from_fn(points.len(), dim, |r, c| points[r][c]);
    let (sv, mut right) = right_svd(&stacked);
    let ratio = sv.get(1).copied().unwrap_or(0.0) / sv[0];
    if ratio <= 1e-12 {
        return Err(Error::DegeneratePoints { ratio });
    }
    let residual = sv.get(2).copied().unwrap_or(0.0) / sv[0];
    right.truncate(2);
    let second = right.pop().expect("two right vectors");
    let first = right.pop().expect("two right vectors");
    Ok(PlaneFit {
        frame: (first, second),
        residual,
    })
}

/// Modified Gram-Schmidt with one re-orthogonalisation pass. Vectors whose
/// remaining norm drops below `drop_tol` times their original norm are
/// discarded.
pub fn orthonormalize(vectors: &[Vector], drop_tol: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let original = v.norm();
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > drop_tol * original {
            out.push(w / norm);
        }
    }
    out
}
