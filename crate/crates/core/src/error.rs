use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate bounds: {0}")]
    DegenerateBounds(String),

    #[error("point ({x}, {y}) lies outside the mesh")]
    PointOutsideMesh { x: f64, y: f64 },

    #[error("unsupported polynomial order {0}, expected 1..=4")]
    UnsupportedOrder(usize),

    #[error("evaluation at the singular point ({x}, {y})")]
    AtSingularity { x: f64, y: f64 },

    #[error("non-finite sample at dof {index}")]
    NonFiniteSample { index: usize },

    #[error("conjugate gradient stopped after {iterations} iterations with relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("point ({x}, {y}) lies on the boundary of element {element}; perturb it into the element interior")]
    OnElementBoundary { x: f64, y: f64, element: usize },

    #[error("ball of radius {epsilon} around ({x}, {y}) is not covered by the mesh")]
    BallOutsideDomain { x: f64, y: f64, epsilon: f64 },

    #[error("singular point lies in the closure of included element {element}")]
    SingularElement { element: usize },

    #[error("subdomain separation violated by {count} elements (first: {first})")]
    SeparationFailed { count: usize, first: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable tag, used by the command line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMesh(_) => "invalid-mesh",
            Error::DegenerateBounds(_) => "degenerate-bounds",
            Error::PointOutsideMesh { .. } => "point-outside-mesh",
            Error::UnsupportedOrder(_) => "unsupported-order",
            Error::AtSingularity { .. } => "at-singularity",
            Error::NonFiniteSample { .. } => "non-finite-sample",
            Error::NotConverged { .. } => "solver-not-converged",
            Error::OnElementBoundary { .. } => "on-element-boundary",
            Error::BallOutsideDomain { .. } => "ball-outside-domain",
            Error::SingularElement { .. } => "singular-element",
            Error::SeparationFailed { .. } => "separation-failed",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Parse(_) => "parse",
            Error::AtLevel { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn at_level(self, level: usize) -> Error {
        Error::AtLevel {
            level,
            source: Box::new(self),
        }
    }
}
