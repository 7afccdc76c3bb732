use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no background element intersects the domain")]
    EmptyActiveMesh,
    #[error("clipped polygon of element {element} has fewer than three vertices")]
    DegenerateIntersection { element: usize },
    #[error("normal vector has length {length}, expected unit length")]
    NonUnitNormal { length: f64 },
    #[error("unsupported quadrature order {0}")]
    UnsupportedOrder(usize),
    #[error("normal derivative of order {requested} exceeds basis order {order}")]
    OrderTooHigh { requested: usize, order: usize },
    #[error("slip length {0} is not admissible for the substitution method")]
    InvalidSlipLength(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("convergence rates need positive errors, got {0}")]
    NonPositiveError(f64),
    #[error("convergence rates need at least two entries with strictly decreasing h")]
    InvalidSeries,
    #[error("system matrix is singular")]
    SingularMatrix,
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
