//! Quantitative functionals of the potential and of positive solutions, with
//! the inequalities they are expected to satisfy.

mod alpha;
mod exponents;
mod growth;
mod moser;
mod pipeline;
mod radial;
mod sobolev;

pub use alpha::{
    alpha_report, ball_functionals, ball_functionals_profile, compute_alpha_end, compute_alpha_level, AlphaReport,
    BallFunctionals, RadialProfile,
};
pub use exponents::{
    alpha_bar, alpha_tilde, dimension_bound, epsilon_of, exponent_a, gamma_epsilon, quadratic_decay_bound,
    DimensionBound, Epsilon,
};
pub use growth::{
    effective_upsilon, fit_power, growth_fit, level_maxima, GrowthParams, GrowthReport, PowerFit, DEFAULT_FIT_TOL,
};
pub use moser::{
    check_subsolution, moser_ladder, moser_radii, moser_verify, moser_verify_localized, MeanValueReport,
    MoserLadder, MoserOptions, DEFAULT_SUBSOLUTION_TOL, DEFAULT_THETAS, MOSER_STABILITY,
};
pub use pipeline::{end_count_pipeline, EndCountReport, PipelineConfig, Stages};
pub use radial::{chi_diagnostics, discrete_gradient, omega_diagnostics, ChiParams, ChiReport, OmegaReport};
pub use sobolev::{
    default_trials, jacobi_smooth, sobolev_measure, sobolev_ratio, tent, SobolevReport, Trial, JACOBI_SWEEPS,
    TENT_SCALES,
};
