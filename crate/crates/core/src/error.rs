use thiserror::Error;

/// Errors raised while building or interrogating a model manifold.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("potential vanishes identically; at least one vertex needs sigma > 0")]
    ZeroPotential,
    #[error("operation needs at least {needed} ends, model has {found}")]
    TooFewEnds { needed: usize, found: usize },
    #[error("no vertices on the level set at radius {0}")]
    EmptyLayer(f64),
}

/// Errors raised by the Dirichlet solver and the end-function construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("linear solve stagnated after {iterations} iterations (relative residual {residual:e})")]
    SingularSystem { iterations: usize, residual: f64 },
    #[error("domain radius {radius} must exceed the inner cutoff R0 = {r0}")]
    DomainTooSmall { radius: f64, r0: f64 },
    #[error("radius {0} is not a layer radius of the model")]
    NotALayer(f64),
    #[error("interior vertex {0} is adjacent to a vertex outside the domain")]
    OpenBoundary(usize),
    #[error("dirichlet problem has no fixed boundary vertices")]
    NoBoundary,
    #[error("maximum principle violated at vertex {vertex}: value {value}")]
    MaximumPrinciple { vertex: usize, value: f64 },
    #[error("exhaustion ladder did not settle: gap {gap:e} exceeds tolerance {tol:e} (increase r_max)")]
    NotConverged { gap: f64, tol: f64 },
    #[error("function is not positive at vertex {vertex} (value {value})")]
    NonPositiveInput { vertex: usize, value: f64 },
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
}

/// Errors raised by the estimate diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("need at least {needed} radii in the window, found {found}")]
    InsufficientLayers { needed: usize, found: usize },
    #[error("growth fit needs positive values; found {value} at radius {radius}")]
    NonPositiveValues { radius: f64, value: f64 },
    #[error("input is not a subsolution at vertex {vertex}: Lu - sigma*u = {defect:e}")]
    NotSubsolution { vertex: usize, defect: f64 },
    #[error("no trial functions supplied")]
    EmptyTrialSet,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Errors raised by the soliton quadratures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolitonError {
    #[error("tail bound {bound:e} beyond r = {radius} exceeds the quadrature tolerance {tol:e}")]
    TailTooFat { radius: f64, bound: f64, tol: f64 },
    #[error("unknown soliton example `{0}`")]
    UnknownExample(String),
    #[error("invalid soliton parameter: {0}")]
    InvalidParameter(String),
}
