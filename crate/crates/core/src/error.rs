use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("operator is not in the image of the dissipator (max |tr_H0 x| = {residual:.3e})")]
    NotInImage { residual: f64 },

    #[error("dissipator kernel on H_0 is not a single pure state (kernel dimension {dimension})")]
    DegenerateDarkSpace { dimension: usize },

    #[error("jump operator {index} does not act on H_0 alone")]
    JumpOutsideH0 { index: usize },

    #[error("target state is not an eigenvector of h_00 (residual {residual:.3e})")]
    TargetNotEigenvector { residual: f64 },

    #[error("targeting criterion not satisfied (residual {residual:.3e}, |kappa| = {kappa:.3e})")]
    CriterionNotSatisfied { residual: f64, kappa: f64 },

    #[error("lambda_0 is degenerate with lambda_{index} (gap {gap:.3e})")]
    DegenerateTarget { index: usize, gap: f64 },

    #[error("K matrix is singular (det K = {det:.3e})")]
    SingularK { det: f64 },

    #[error("secular conditions are inconsistent or underdetermined ({0})")]
    Secular(String),

    #[error("no steady state within tolerance (smallest |eigenvalue| {smallest:.3e})")]
    NoSteadyState { smallest: f64 },

    #[error("steady state is not unique (nullity {nullity})")]
    NonUniqueSteadyState { nullity: usize },

    #[error("steady state is not positive semidefinite (smallest eigenvalue {min:.3e})")]
    NotPositive { min: f64 },

    #[error("{location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: message.into(),
        }
    }
}
