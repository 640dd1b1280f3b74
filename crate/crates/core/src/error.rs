use thiserror::Error;

/// Errors produced by the discretization and solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("refinement parameter must be at least 1")]
    ZeroRefinement,

    #[error("invalid level set: {0}")]
    InvalidLevelSet(String),

    #[error("invalid material parameters: {0}")]
    InvalidMaterial(String),

    #[error(
        "mesh too coarse for the interface: edge {edge} of triangle {triangle} \
         is crossed more than once"
    )]
    InterfaceResolution { triangle: usize, edge: usize },

    #[error("degenerate interface cut in triangle {triangle}: sub-polygon area {area:.3e}")]
    DegenerateCut { triangle: usize, area: f64 },

    #[error("degenerate triangle with area {area:.3e}")]
    DegenerateTriangle { area: f64 },

    #[error("degenerate polygon with {vertices} vertices and area {area:.3e}")]
    DegeneratePolygon { vertices: usize, area: f64 },

    #[error("unsupported quadrature order {0} (supported: 1, 2, 3)")]
    UnsupportedQuadratureOrder(usize),

    #[error("immersed basis system ill-conditioned on triangle {triangle}: residual {residual:.3e}")]
    BasisConditioning { triangle: usize, residual: f64 },

    #[error("point ({0}, {1}) lies outside the triangle")]
    PointOutsideTriangle(f64, f64),

    #[error("assembled matrix has symmetry defect {0:.3e}")]
    SymmetryDefect(f64),

    #[error("matrix is not positive definite (leading minor {minor})")]
    NotPositiveDefinite { minor: usize },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge: {converged} of {requested} pairs after {iterations} iterations")]
    EigenNonConvergence {
        requested: usize,
        converged: usize,
        iterations: usize,
    },

    #[error("invalid solver parameter: {0}")]
    InvalidSolverParameter(String),

    #[error("invalid case configuration: {0}")]
    InvalidConfig(String),

    #[error("failed to parse configuration: {0}")]
    ConfigParse(String),

    #[error("ambiguous eigenvalue match at level {level}, index {index}: gap {gap:.3e} below resolution")]
    AmbiguousEigenvalueMatch {
        level: usize,
        index: usize,
        gap: f64,
    },

    #[error("{context} at level N={level}: {source}")]
    AtLevel {
        level: usize,
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attaches a mesh level to an error bubbling out of a convergence run.
    pub fn at_level(self, level: usize, context: &str) -> Self {
        Error::AtLevel {
            level,
            context: context.to_string(),
            source: Box::new(self),
        }
    }

    /// Wraps an i/o error with the path it occurred on.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
