use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("gram matrix is not symmetric positive definite (smallest eigenvalue {min_eig:e})")]
    GramNotSpd { min_eig: f64 },

    #[error("conflicting values for structure constant ({i},{j},{k})")]
    DuplicateEntry { i: usize, j: usize, k: usize },

    #[error("bracket entry ({i},{i}) must vanish")]
    SelfBracket { i: usize },

    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("bad decomposition: {0}")]
    BadDecomposition(String),

    #[error("dimension {m} too small")]
    TooSmall { m: usize },

    #[error("not a Lie algebra: Jacobi residual {residual:e}")]
    NotALieAlgebra { residual: f64 },

    #[error("degenerate plane (denominator {denominator:e})")]
    DegeneratePlane { denominator: f64 },

    #[error("basis is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("action of a on n is not abelian (commutator norm {residual:e})")]
    NotAbelianAction { residual: f64 },

    #[error("n is not invariant under ad(a) (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("root space mismatch: {0}")]
    RootSpaceMismatch(String),

    #[error("grading violation: {0}")]
    GradingViolation(String),

    #[error("layer brackets violate the Jacobi identity (residual {residual:e} at {triple:?})")]
    JacobiViolation { residual: f64, triple: (usize, usize, usize) },

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("constraint set cannot be solved on any branch")]
    BranchUnsolvable,

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("constraint violated: {constraint} = {residual:e}")]
    ConstraintViolated { constraint: String, residual: f64 },

    #[error("degenerate branch: denominator `{denominator}` vanishes")]
    DegenerateBranch { denominator: String },

    #[error("family `{0}` has no curvature predicate")]
    NoPredicate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
