use thiserror::Error;

/// Errors raised while configuring or stepping the thermal plant.
#[derive(Debug, Error)]
pub enum PlantError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("curing domain error: degree of cure {0} outside [0, 1]")]
    CureDomain(f64),
    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },
}

/// Errors raised by system identification.
#[derive(Debug, Error)]
pub enum IdentError {
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error("not enough samples: need more than {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("rank-deficient regressor; deficient channels: {}", channels.join(", "))]
    RankDeficient { channels: Vec<String> },
    #[error("identified model is unstable (spectral radius {0:.6})")]
    Unstable(f64),
    #[error("model file error: {0}")]
    ModelFile(String),
}

/// Errors raised by the Kalman observer.
#[derive(Debug, Error)]
pub enum ObserverError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular innovation covariance")]
    SingularInnovation,
    #[error("invalid observer configuration: {0}")]
    Config(String),
}

/// Errors raised by the predictive controller.
#[derive(Debug, Error)]
pub enum MpcError {
    #[error("invalid controller configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("Hessian is not positive definite")]
    NotPositiveDefinite,
}

/// Errors raised by the experiment harness and CLI plumbing.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Ident(#[from] IdentError),
    #[error(transparent)]
    Observer(#[from] ObserverError),
    #[error(transparent)]
    Mpc(#[from] MpcError),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("non-finite value in closed loop at row {row}: {what}")]
    NonFinite { row: usize, what: String },
    #[error("empty indicator window [{t_i}, {t_f}]")]
    EmptyWindow { t_i: f64, t_f: f64 },
    #[error("I/O error")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}
