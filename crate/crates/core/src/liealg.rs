//! The deck matrix `B`, the commutator operator `X -> BX - XB` on sl(n+1),
//! the centralizer of `B` and the block pattern its group elements follow.

use crate::error::{Error, Result};
use crate::numkernel::{
    self, determinant, elimination_rank, matrix_exp, orthonormalize, Matrix, Vector,
    DEFAULT_RANK_TOL,
};

/// Zero-block tolerance for [`classify_block_form`].
pub const BLOCK_TOL: f64 = 1e-9;

fn require_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::DimensionTooSmall(n))
    } else {
        Ok(())
    }
}

/// `B = [[0, 1], [-1, 0]] ⊕ (-I_{n-1})`, acting on R^{n+1}.
///
/// Entries are exact integers, so products and powers of `B` with other
/// integer matrices are exact as well.
#[derive(Debug, Clone, PartialEq)]
pub struct DeckMatrix {
    n: usize,
    matrix: Matrix,
}

impl DeckMatrix {
    pub fn new(n: usize) -> Result<Self> {
        require_n(n)?;
        let d = n + 1;
        let mut matrix = Matrix::zeros(d, d);
        matrix[(0, 1)] = 1.0;
        matrix[(1, 0)] = -1.0;
        for i in 2..d {
            matrix[(i, i)] = -1.0;
        }
        Ok(Self { n, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension n + 1.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `B^k` for `k >= 0`.
    pub fn power(&self, k: usize) -> Matrix {
        let mut p = Matrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            p = &self.matrix * p;
        }
        p
    }

    /// `B^{-1} = B^T`.
    pub fn inverse(&self) -> Matrix {
        self.matrix.transpose()
    }

    /// Exact test of `B * B == I`.
    pub fn is_involution(&self) -> bool {
        self.power(2) == Matrix::identity(self.dim(), self.dim())
    }

    pub fn is_orthogonal(&self) -> bool {
        self.matrix.transpose() * &self.matrix == Matrix::identity(self.dim(), self.dim())
    }

    /// Multiplicative order of `B` (exact; B is a signed permutation so the
    /// search is bounded).
    pub fn order(&self) -> usize {
        let id = Matrix::identity(self.dim(), self.dim());
        let mut p = self.matrix.clone();
        let mut k = 1;
        while p != id {
            p = &self.matrix * p;
            k += 1;
        }
        k
    }

    /// The cyclic group generated by `B`, starting at the identity.
    pub fn group(&self) -> Vec<Matrix> {
        (0..self.order()).map(|k| self.power(k)).collect()
    }
}

pub fn build_deck_matrix(n: usize) -> Result<DeckMatrix> {
    DeckMatrix::new(n)
}

/// Ordered basis of sl(d): the off-diagonal units `E_ij` (i != j) in row-major
/// order, then the `d - 1` diagonal elements `E_kk - E_{k+1,k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlBasis {
    d: usize,
}

impl SlBasis {
    pub fn new(d: usize) -> Self {
        Self { d }
    }

    pub fn len(&self) -> usize {
        self.d * self.d - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn element(&self, index: usize) -> Matrix {
        let d = self.d;
        let off = d * (d - 1);
        let mut m = Matrix::zeros(d, d);
        if index < off {
            let (i, j) = self.off_diagonal(index);
            m[(i, j)] = 1.0;
        } else {
            let k = index - off;
            m[(k, k)] = 1.0;
            m[(k + 1, k + 1)] = -1.0;
        }
        m
    }

    fn off_diagonal(&self, index: usize) -> (usize, usize) {
        let i = index / (self.d - 1);
        let r = index % (self.d - 1);
        let j = if r < i { r } else { r + 1 };
        (i, j)
    }

    /// Coordinates of the trace-free part of `y`.
    pub fn coords(&self, y: &Matrix) -> Vector {
        let d = self.d;
        let mut out = Vector::zeros(self.len());
        let mut idx = 0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    out[idx] = y[(i, j)];
                    idx += 1;
                }
            }
        }
        let shift = numkernel::trace(y) / d as f64;
        let mut partial = 0.0;
        for k in 0..d - 1 {
            partial += y[(k, k)] - shift;
            out[idx + k] = partial;
        }
        out
    }

    pub fn matrix(&self, coords: &Vector) -> Matrix {
        let d = self.d;
        let off = d * (d - 1);
        let mut m = Matrix::zeros(d, d);
        for idx in 0..off {
            let (i, j) = self.off_diagonal(idx);
            m[(i, j)] = coords[idx];
        }
        for k in 0..d - 1 {
            let c = coords[off + k];
            m[(k, k)] += c;
            m[(k + 1, k + 1)] -= c;
        }
        m
    }
}

/// Matrix of `X -> BX - XB` on sl(n+1) in the [`SlBasis`] ordering, both on
/// the domain and the codomain side.
pub fn sylvester_operator(b: &DeckMatrix) -> Matrix {
    let basis = SlBasis::new(b.dim());
    let m = basis.len();
    let bm = b.matrix();
    let mut op = Matrix::zeros(m, m);
    for col in 0..m {
        let e = basis.element(col);
        let image = bm * &e - &e * bm;
        op.set_column(col, &basis.coords(&image));
    }
    op
}

/// Frobenius-orthonormal basis of `{X in sl(n+1) : BX = XB}`.
#[derive(Debug, Clone)]
pub struct CentralizerBasis {
    pub n: usize,
    pub basis: Vec<Matrix>,
    pub dim: usize,
    /// Rank of the commutator operator from the SVD.
    pub svd_rank: usize,
    /// Rank of the commutator operator from partial-pivot elimination.
    pub elimination_rank: usize,
    /// Smallest kept singular value over the largest one; how far the rank
    /// decision is from the threshold on the nonzero side.
    pub rank_gap: f64,
}

impl CentralizerBasis {
    /// The closed-form value `n^2 - 2n + 2`.
    pub fn expected_dim(&self) -> usize {
        proj_prime_formula(self.n)
    }

    pub fn matches_formula(&self) -> bool {
        self.dim == self.expected_dim()
    }

    /// Largest `||BX - XB||_F` over the basis.
    pub fn max_commutator(&self, b: &DeckMatrix) -> f64 {
        self.basis
            .iter()
            .map(|x| (b.matrix() * x - x * b.matrix()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_trace(&self) -> f64 {
        self.basis
            .iter()
            .map(|x| numkernel::trace(x).abs())
            .fold(0.0, f64::max)
    }
}

pub fn centralizer(n: usize) -> Result<CentralizerBasis> {
    centralizer_with_tol(n, DEFAULT_RANK_TOL)
}

/// Centralizer of `B` inside sl(n+1). Fails on an ambiguous rank decision or
/// when the SVD and elimination ranks disagree.
pub fn centralizer_with_tol(n: usize, rel_tol: f64) -> Result<CentralizerBasis> {
    let b = DeckMatrix::new(n)?;
    let op = sylvester_operator(&b);
    let kernel = numkernel::kernel(&op, rel_tol)?.certain()?;
    let svd_rank = kernel.rank();
    let elim = elimination_rank(&op, rel_tol)?;
    if svd_rank != elim {
        return Err(Error::RankMismatch {
            svd: svd_rank,
            elimination: elim,
        });
    }
    let rank_gap = if svd_rank == 0 {
        0.0
    } else {
        kernel.singular_values[svd_rank - 1] / kernel.singular_values[0]
    };

    let sl = SlBasis::new(b.dim());
    let d = b.dim();
    let flat: Vec<Vector> = kernel
        .basis
        .iter()
        .map(|c| {
            let m = sl.matrix(c);
            Vector::from_iterator(d * d, m.iter().copied())
        })
        .collect();
    let basis: Vec<Matrix> = orthonormalize(&flat, 1e-9)
        .into_iter()
        .map(|v| Matrix::from_iterator(d, d, v.iter().copied()))
        .collect();
    Ok(CentralizerBasis {
        n,
        dim: basis.len(),
        basis,
        svd_rank,
        elimination_rank: elim,
        rank_gap,
    })
}

/// Decomposition of a matrix that follows the block pattern
/// `[[α, β], [-β, α]] ⊕ Ã` with zero off-diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockForm {
    pub alpha: f64,
    pub beta: f64,
    pub tilde_a: Matrix,
}

impl BlockForm {
    /// `|det(Ã)·(α² + β²) - 1|`; zero exactly for elements of the group.
    pub fn det_defect(&self) -> f64 {
        let det = determinant(&self.tilde_a).unwrap_or(f64::NAN);
        (det * (self.alpha * self.alpha + self.beta * self.beta) - 1.0).abs()
    }

    pub fn to_matrix(&self) -> Matrix {
        embed(self.alpha, self.beta, &self.tilde_a)
    }

    pub fn into_group_element(self) -> Result<BlockFormMatrix> {
        BlockFormMatrix::new(self.alpha, self.beta, self.tilde_a)
    }
}

fn embed(alpha: f64, beta: f64, tilde_a: &Matrix) -> Matrix {
    let d = tilde_a.nrows() + 2;
    let mut m = Matrix::zeros(d, d);
    m[(0, 0)] = alpha;
    m[(0, 1)] = beta;
    m[(1, 0)] = -beta;
    m[(1, 1)] = alpha;
    m.view_mut((2, 2), (d - 2, d - 2)).copy_from(tilde_a);
    m
}

/// An element of the group of block matrices: `α² + β² > 0` and
/// `det(Ã) = 1/(α² + β²)`, so the full matrix has determinant one.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFormMatrix {
    alpha: f64,
    beta: f64,
    tilde_a: Matrix,
}

impl BlockFormMatrix {
    pub fn new(alpha: f64, beta: f64, tilde_a: Matrix) -> Result<Self> {
        numkernel::check_matrix(&tilde_a)?;
        let radius = alpha * alpha + beta * beta;
        if !(radius > 0.0) {
            return Err(Error::DegenerateRotationBlock);
        }
        let product = determinant(&tilde_a)? * radius;
        if (product - 1.0).abs() > 1e-9 {
            return Err(Error::BlockDeterminant { product });
        }
        Ok(Self {
            alpha,
            beta,
            tilde_a,
        })
    }

    pub fn n(&self) -> usize {
        self.tilde_a.nrows() + 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tilde_a(&self) -> &Matrix {
        &self.tilde_a
    }

    pub fn matrix(&self) -> Matrix {
        embed(self.alpha, self.beta, &self.tilde_a)
    }
}

/// Splits `x` into the block pattern or reports the first offending block.
pub fn classify_block_form(x: &Matrix, n: usize) -> Result<BlockForm> {
    require_n(n)?;
    let d = n + 1;
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if x.nrows() != d { x.nrows() } else { x.ncols() },
        });
    }
    numkernel::check_matrix(x)?;
    let upper = x.view((0, 2), (2, d - 2));
    let lower = x.view((2, 0), (d - 2, 2));
    if upper.amax() > BLOCK_TOL {
        return Err(Error::BlockPattern {
            block: "upper-right",
            norm: upper.norm(),
        });
    }
    if lower.amax() > BLOCK_TOL {
        return Err(Error::BlockPattern {
            block: "lower-left",
            norm: lower.norm(),
        });
    }
    let (a, b, c, e) = (x[(0, 0)], x[(0, 1)], x[(1, 0)], x[(1, 1)]);
    let defect = (a - e).abs().max((b + c).abs());
    if defect > BLOCK_TOL {
        return Err(Error::BlockPattern {
            block: "rotation",
            norm: defect,
        });
    }
    Ok(BlockForm {
        alpha: 0.5 * (a + e),
        beta: 0.5 * (b - c),
        tilde_a: x.view((2, 2), (d - 2, d - 2)).into_owned(),
    })
}

/// Exponentiates `x` at `t` and classifies the result.
pub fn classify_flow(x: &Matrix, n: usize, t: f64) -> Result<BlockForm> {
    classify_block_form(&matrix_exp(x, t)?, n)
}

/// `dim sl(n+1) = n(n + 2)`, the dimension of the projective group of S^n.
pub fn dim_sl(n: usize) -> usize {
    n * (n + 2)
}

/// `n(n + 1)/2`, the bound for groups of isometries.
pub fn isometry_bound(n: usize) -> usize {
    n * (n + 1) / 2
}

/// `(n - 1)^2 + 1 = n^2 - 2n + 2`.
pub fn proj_prime_formula(n: usize) -> usize {
    (n - 1) * (n - 1) + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionReport {
    pub dim_sl: usize,
    pub dim_isom_bound: usize,
    pub dim_proj_prime: usize,
    pub chain_holds: bool,
}

impl DimensionReport {
    fn from_parts(n: usize, dim_proj_prime: usize) -> Self {
        let dim_sl = dim_sl(n);
        let dim_isom_bound = isometry_bound(n);
        Self {
            dim_sl,
            dim_isom_bound,
            dim_proj_prime,
            chain_holds: dim_isom_bound < dim_proj_prime && dim_proj_prime < dim_sl,
        }
    }

    /// Closed-form values only; no numerics.
    pub fn from_formulas(n: usize) -> Result<Self> {
        require_n(n)?;
        Ok(Self::from_parts(n, proj_prime_formula(n)))
    }
}

/// Dimension chain with the centralizer dimension computed numerically.
pub fn dimension_report(n: usize) -> Result<DimensionReport> {
    let c = centralizer(n)?;
    Ok(DimensionReport::from_parts(n, c.dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hand_commutator(b: &Matrix, x: &Matrix) -> Matrix {
        let d = b.nrows();
        let mut out = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += b[(i, k)] * x[(k, j)] - x[(i, k)] * b[(k, j)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    #[test]
    fn deck_matrix_n2() {
        let b = build_deck_matrix(2).unwrap();
        let expected =
            Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(b.matrix(), &expected);
    }

    #[test]
    fn deck_matrix_rejects_small_n() {
        assert_eq!(
            build_deck_matrix(1).unwrap_err(),
            Error::DimensionTooSmall(1)
        );
        assert!(centralizer(0).is_err());
        assert!(DimensionReport::from_formulas(1).is_err());
    }

    #[test]
    fn deck_matrix_is_orthogonal_of_order_four() {
        let b = build_deck_matrix(5).unwrap();
        assert!(b.is_orthogonal());
        // The rotation block squares to -I_2, so B^2 = diag(-1, -1, 1, ..., 1).
        let mut sq = Matrix::identity(6, 6);
        sq[(0, 0)] = -1.0;
        sq[(1, 1)] = -1.0;
        assert_eq!(b.power(2), sq);
        assert!(!b.is_involution());
        assert_eq!(b.order(), 4);
        assert_eq!(b.group().len(), 4);
        assert_eq!(b.inverse(), b.power(3));
    }

    #[test]
    fn sl_basis_round_trip() {
        let sl = SlBasis::new(4);
        assert_eq!(sl.len(), 15);
        for i in 0..sl.len() {
            let e = sl.element(i);
            assert!(numkernel::trace(&e).abs() < 1e-15);
            let c = sl.coords(&e);
            for (k, v) in c.iter().enumerate() {
                assert_eq!(*v, if k == i { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(sl.element(0)[(0, 1)], 1.0);
        assert_eq!(sl.element(3)[(1, 0)], 1.0);
    }

    #[test]
    fn sylvester_kernel_n2() {
        let b = build_deck_matrix(2).unwrap();
        let op = sylvester_operator(&b);
        assert_eq!(op.shape(), (8, 8));
        assert_eq!(
            numkernel::null_space(&op, DEFAULT_RANK_TOL).unwrap().len(),
            2
        );
    }

    #[test]
    fn sylvester_annihilates_b() {
        let b = build_deck_matrix(3).unwrap();
        let sl = SlBasis::new(4);
        let img = sylvester_operator(&b) * sl.coords(b.matrix());
        assert!(img.norm() < 1e-15);
    }

    #[test]
    fn sylvester_on_e13_matches_hand_product() {
        let b = build_deck_matrix(3).unwrap();
        let sl = SlBasis::new(4);
        let mut x = Matrix::zeros(4, 4);
        x[(0, 2)] = 1.0;
        let img = sylvester_operator(&b) * sl.coords(&x);
        let oracle = hand_commutator(b.matrix(), &x);
        // B E13 = -E23 and E13 B = -E13, so BX - XB = E13 - E23
        assert!((sl.matrix(&img) - &oracle).norm() < 1e-15);
        assert!(img.norm() > 1.0);
        assert_eq!(oracle[(0, 2)], 1.0);
        assert_eq!(oracle[(1, 2)], -1.0);
    }

    #[test]
    fn centralizer_small_cases() {
        let c = centralizer(2).unwrap();
        assert_eq!(c.dim, 2);
        assert_eq!(c.svd_rank, c.elimination_rank);
        let c = centralizer(5).unwrap();
        assert_eq!(c.dim, 17);
        assert!(c.matches_formula());
        let b = build_deck_matrix(5).unwrap();
        assert!(c.max_commutator(&b) <= 1e-9);
        assert!(c.max_trace() <= 1e-10);
    }

    #[test]
    fn centralizer_basis_is_frobenius_orthonormal() {
        let c = centralizer(4).unwrap();
        for (i, x) in c.basis.iter().enumerate() {
            for (j, y) in c.basis.iter().enumerate() {
                let ip = x.dot(y);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let f = classify_block_form(&Matrix::identity(4, 4), 3).unwrap();
        assert_eq!((f.alpha, f.beta), (1.0, 0.0));
        assert_eq!(f.tilde_a, Matrix::identity(2, 2));

        let b = build_deck_matrix(3).unwrap();
        let f = classify_block_form(b.matrix(), 3).unwrap();
        assert_eq!((f.alpha, f.beta), (0.0, 1.0));
        assert_eq!(f.tilde_a, -Matrix::identity(2, 2));
        assert!(f.det_defect() < 1e-15);

        let mut e13 = Matrix::zeros(4, 4);
        e13[(0, 2)] = 1.0;
        match classify_block_form(&e13, 3) {
            Err(Error::BlockPattern { block, norm }) => {
                assert_eq!(block, "upper-right");
                assert_eq!(norm, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }

        let mut skewed = Matrix::identity(4, 4);
        skewed[(1, 0)] = 0.5;
        assert!(matches!(
            classify_block_form(&skewed, 3),
            Err(Error::BlockPattern {
                block: "rotation",
                ..
            })
        ));
        assert!(matches!(
            classify_block_form(&Matrix::identity(3, 3), 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn block_form_matrix_validation() {
        let ok = BlockFormMatrix::new(0.6, 0.8, Matrix::identity(2, 2)).unwrap();
        assert_eq!(ok.n(), 3);
        assert!((determinant(&ok.matrix()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            BlockFormMatrix::new(0.0, 0.0, Matrix::identity(2, 2)).unwrap_err(),
            Error::DegenerateRotationBlock
        );
        assert!(matches!(
            BlockFormMatrix::new(2.0, 0.0, Matrix::identity(2, 2)),
            Err(Error::BlockDeterminant { .. })
        ));
    }

    #[test]
    fn dimension_report_examples() {
        let r = dimension_report(5).unwrap();
        assert_eq!(
            (r.dim_sl, r.dim_isom_bound, r.dim_proj_prime, r.chain_holds),
            (35, 15, 17, true)
        );
        let r = dimension_report(4).unwrap();
        assert_eq!(
            (r.dim_sl, r.dim_isom_bound, r.dim_proj_prime, r.chain_holds),
            (24, 10, 10, false)
        );
        let r = dimension_report(2).unwrap();
        assert_eq!(
            (r.dim_sl, r.dim_isom_bound, r.dim_proj_prime, r.chain_holds),
            (8, 3, 2, false)
        );
        assert_eq!(
            DimensionReport::from_formulas(4).unwrap(),
            dimension_report(4).unwrap()
        );
    }
}
