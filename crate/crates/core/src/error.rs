use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("metric not positive definite at node {node}: {detail}")]
    Metric { node: usize, detail: String },

    #[error("not convex at node {node} (coordinates {coords:?}): min Hessian eigenvalue {min_eig:e}")]
    Convexity {
        node: usize,
        coords: Vec<f64>,
        min_eig: f64,
    },

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("path dependence: closedness residual {residual:e} exceeds tolerance {tol:e}")]
    PathDependence { residual: f64, tol: f64 },

    #[error("Newton stagnated after {iterations} iterations (residual history {history:?})")]
    Convergence {
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("positivity error: {0}")]
    Positivity(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
