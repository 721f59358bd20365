//! Seeded generators for test and report inputs. Every draw goes through a
//! `ChaCha8Rng`, so a seed fully determines the sequence on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::liealg::BlockFormMatrix;
use crate::numkernel::{determinant, Matrix, Vector};
use crate::sphere::{GreatCircle, SpherePoint};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Uniformly distributed point of the unit sphere in R^dim.
pub fn sphere_point<R: Rng>(rng: &mut R, dim: usize) -> SpherePoint {
    loop {
        if let Ok(p) = SpherePoint::normalize(&gaussian_vector(rng, dim)) {
            return p;
        }
    }
}

/// Unit tangent vector at `x`, uniform on the tangent unit sphere.
pub fn unit_tangent<R: Rng>(rng: &mut R, x: &SpherePoint) -> Vector {
    loop {
        let t = x.tangent_part(&gaussian_vector(rng, x.dim()));
        let norm = t.norm();
        if norm > 1e-6 {
            let t = t / norm;
            // one more projection keeps <x, t> at rounding level
            let t = x.tangent_part(&t);
            return &t / t.norm();
        }
    }
}

pub fn great_circle<R: Rng>(rng: &mut R, dim: usize) -> GreatCircle {
    let x = sphere_point(rng, dim);
    let v = unit_tangent(rng, &x);
    GreatCircle::through(&x, &v).expect("unit tangent is nonzero")
}

/// Gaussian matrix with `|det| >= 0.1`, sign-fixed and scaled to determinant
/// one.
pub fn special_linear<R: Rng>(rng: &mut R, dim: usize) -> Matrix {
    loop {
        let mut m = gaussian_matrix(rng, dim, dim);
        let det = determinant(&m).expect("square");
        if det.abs() < 0.1 {
            continue;
        }
        if det < 0.0 {
            m.row_mut(0).neg_mut();
        }
        return m / det.abs().powf(1.0 / dim as f64);
    }
}

/// Random trace-free matrix with Frobenius norm `scale`.
pub fn trace_free<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> Matrix {
    let mut m = gaussian_matrix(rng, dim, dim);
    let shift = m.diagonal().sum() / dim as f64;
    for i in 0..dim {
        m[(i, i)] -= shift;
    }
    let norm = m.norm();
    m * (scale / norm)
}

/// Random element of the block group for S^n: Gaussian `α, β` with
/// `α² + β² >= 0.1` and a Gaussian `Ã` rescaled to `det(Ã) = 1/(α² + β²)`.
pub fn block_form<R: Rng>(rng: &mut R, n: usize) -> BlockFormMatrix {
    let k = n - 1;
    loop {
        let alpha: f64 = rng.sample(StandardNormal);
        let beta: f64 = rng.sample(StandardNormal);
        let radius = alpha * alpha + beta * beta;
        if radius < 0.1 {
            continue;
        }
        let mut tilde = gaussian_matrix(rng, k, k);
        let det = determinant(&tilde).expect("square");
        if det.abs() < 0.1 {
            continue;
        }
        if det < 0.0 {
            tilde.row_mut(0).neg_mut();
        }
        let scale = (1.0 / (radius * det.abs())).powf(1.0 / k as f64);
        if let Ok(b) = BlockFormMatrix::new(alpha, beta, tilde * scale) {
            return b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible() {
        let a = special_linear(&mut rng(7), 4);
        let b = special_linear(&mut rng(7), 4);
        assert_eq!(a, b);
        assert!((determinant(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tangents_are_tangent() {
        let mut r = rng(3);
        for _ in 0..100 {
            let x = sphere_point(&mut r, 5);
            let t = unit_tangent(&mut r, &x);
            assert!(t.dot(x.coords()).abs() < 1e-15);
            assert!((t.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn block_forms_have_unit_determinant() {
        let mut r = rng(11);
        for n in 2..7 {
            let b = block_form(&mut r, n);
            assert_eq!(b.n(), n);
            assert!((determinant(&b.matrix()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_free_draws() {
        let m = trace_free(&mut rng(5), 4, 0.7);
        assert!(m.diagonal().sum().abs() < 1e-15);
        assert!((m.norm() - 0.7).abs() < 1e-15);
    }
}
