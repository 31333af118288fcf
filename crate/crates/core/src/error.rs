use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("closest-point iteration did not converge (residual {residual:.3e})")]
    NonConvergent { residual: f64 },

    #[error("closest point is not unique: two candidate feet at theta {theta_a:.6} and {theta_b:.6}")]
    NotUnique { theta_a: f64, theta_b: f64 },

    #[error("too coarse: {requested} boundary vertices requested, at least 8 required")]
    TooCoarse { requested: usize },

    #[error("boundary interval turns by {turning_deg:.1} deg (limit {limit_deg:.1}); refine h")]
    CurvatureTooHigh { turning_deg: f64, limit_deg: f64 },

    #[error("mesh quality failure: {0}")]
    MeshQualityFailure(String),

    #[error("boundary edge {edge} crosses the arc away from its endpoints")]
    OrientationAmbiguous { edge: usize },

    #[error("unsupported polynomial or quadrature degree {0}")]
    UnsupportedDegree(usize),

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("{dofs} dofs exceed the dense eigensolver cap of {cap}")]
    TooLarge { dofs: usize, cap: usize },

    #[error("anchor element {element} of the regularized delta touches the boundary")]
    BoundaryElement { element: usize },

    #[error("moment system is numerically singular (condition {condition:.3e})")]
    SingularMoments { condition: f64 },

    #[error("point ({x:.6}, {y:.6}) is not inside any element")]
    PointOutsideMesh { x: f64, y: f64 },

    #[error("dyadic decomposition is degenerate: J* = {j_star}")]
    DegenerateDecomposition { j_star: i64 },

    #[error("rate fit is degenerate: {0}")]
    DegenerateFit(String),

    #[error("reference Green's function levels disagree by {shift:.1}% (gate {gate:.1}%)")]
    ReferenceInconsistent { shift: f64, gate: f64 },

    #[error("dense factorization failed: {0}")]
    Factorization(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
