//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by grid construction, coefficient validation,
/// operator assembly, spectral splitting and the Dirichlet solver.
#[derive(Debug, Clone, Error)]
pub enum LabError {
    /// The coefficient field is not strictly accretive: the smallest
    /// eigenvalue of Re A(x) dips to `min` at grid point `location`.
    #[error("coefficients not strictly accretive: min eigenvalue {min:.3e} at grid point {location}")]
    NotAccretive { min: f64, location: usize },

    /// A multiplication block that must be inverted pointwise is singular.
    #[error("singular matrix in {context}: smallest singular value {sigma_min:.3e}")]
    Singular { context: String, sigma_min: f64 },

    /// A resolvent solve failed; usually the accretivity assumption broke down.
    #[error("resolvent solve failed at t = {t:.6e}: {context}")]
    ResolventSolve { t: f64, context: String },

    /// The Newton sign iteration detected spectrum touching the imaginary axis.
    #[error("no spectral gap: {0}")]
    NoGap(String),

    /// The Newton sign iteration ran out of iterations.
    #[error("sign iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    /// A vector expected in range(chi_plus) is too far from it.
    #[error("vector outside range(chi_+): relative defect {defect:.3e}")]
    OutsideHardySpace { defect: f64 },

    /// The Dirichlet problem for this coefficient field is not well-posed
    /// at the configured singular-value floor.
    #[error("Dirichlet problem ill-posed: sigma_min(S) = {sigma_min:.3e} < floor {floor:.3e}")]
    IllPosed { sigma_min: f64, floor: f64 },

    /// Sequence lengths do not match (t-grid quadrature, field shapes).
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Input carries a spatial mean mode where a zero-mean field is required.
    #[error("nonzero spatial mean: |mean| = {mean:.3e} exceeds 1e-12")]
    NonzeroMean { mean: f64 },

    /// Invalid configuration or parameters.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Requested generator parameters cannot be met.
    #[error("infeasible coefficient parameters: {0}")]
    Infeasible(String),

    /// I/O or (de)serialization failure on an external interface.
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

/// Convenient result alias.
pub type Result<T> = std::result::Result<T, LabError>;
