use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has no entries")]
    EmptyMatrix,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tolerance {0:e} is outside (0, 1)")]
    InvalidTolerance(f64),
    #[error("need n >= 2, got n = {0}")]
    DimensionTooSmall(usize),

    #[error("plane fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point {index} is off the unit sphere (norm {norm})")]
    OffSphere { index: usize, norm: f64 },
    #[error("points span fewer than two dimensions (sigma2/sigma1 = {ratio:e})")]
    DegeneratePoints { ratio: f64 },

    #[error("ambiguous numerical rank: singular value ratio {ratio:e} is within a decade of the threshold {threshold:e}")]
    AmbiguousRank { ratio: f64, threshold: f64 },
    #[error("rank strategies disagree: svd gives {svd}, elimination gives {elimination}")]
    RankMismatch { svd: usize, elimination: usize },

    #[error("block {block} breaks the rotation/scaling block pattern (norm {norm:e})")]
    BlockPattern { block: &'static str, norm: f64 },
    #[error("alpha^2 + beta^2 must be positive")]
    DegenerateRotationBlock,
    #[error("det(tilde A) * (alpha^2 + beta^2) = {product}, expected 1")]
    BlockDeterminant { product: f64 },

    #[error("matrix is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("matrix is not trace-free (trace = {0:e})")]
    NotTraceFree(f64),
    #[error("matrix is not skew-symmetric (max |C + C^T| = {0:e})")]
    NotSkew(f64),
    #[error("vector norm {norm} is not 1")]
    NotUnit { norm: f64 },
    #[error("vectors are not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
    #[error("zero tangent vector")]
    ZeroVector,
    #[error("vector is not tangent to the sphere (<x, v> = {0:e})")]
    NotTangent(f64),

    #[error("Finsler condition fails: sampled max g-norm of the 1-form is {max_norm}")]
    NotFinsler { max_norm: f64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("initial data lies on the boundary of the forward cone (F = {0:e})")]
    DegenerateInitialData(f64),
    #[error("step size {dt} is invalid for t_max = {t_max}")]
    InvalidStep { dt: f64, t_max: f64 },
    #[error("relative energy drift {drift:e} exceeds {limit:e} at t = {time}")]
    EnergyDrift { drift: f64, limit: f64, time: f64 },
    #[error("curve needs at least two points")]
    ShortCurve,

    #[error("map does not descend to the quotient (residual {0:e})")]
    DoesNotDescend(f64),
    #[error("point is fixed by the deck transformation")]
    FixedPoint,
}
