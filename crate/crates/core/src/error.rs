use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what}: argument {value} outside the admissible domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "quadrature on [{a}, {b}] did not reach tolerance: estimate {estimate}, error {error}"
    )]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("grid with {n} interior nodes is too coarse (need at least {min})")]
    GridTooCoarse { n: usize, min: usize },

    #[error("eigenvalue bisection failed to bracket eigenvalue #{index}")]
    SolverNonConvergence { index: usize },

    #[error("zero mode is not separated: lambda0 = {lambda0}, lambda1 = {lambda1}, threshold = {threshold}")]
    ZeroModeAmbiguity {
        lambda0: f64,
        lambda1: f64,
        threshold: f64,
    },

    #[error("meridian grid is not mirror symmetric (deviation {deviation})")]
    AsymmetricGrid { deviation: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}
