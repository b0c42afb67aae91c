//! Exhaustion Dirichlet problems for `L u = sigma u` and the end functions
//! they produce.
//!
//! For an end `E_i` and a radius `R`, the solution `v_R` on `D(R)` takes the
//! value 1 on the part of the level set `Sigma(R)` inside `E_i` and 0 on the
//! rest. Normalizing so that `max_{D(r0)} u_R = 1` and letting `R` run up the
//! ladder `r_max/4, r_max/2, r_max` gives the end function `u_i`.

mod checks;
mod dirichlet;
mod end_function;

pub use checks::{
    gram_rank, harnack_check, harnack_ladder, layer_maxima, verify_separation, ComparisonCheck,
    EndSeparation, GramReport, SeparationReport,
};
pub use dirichlet::{
    check_strict_bounds, dirichlet_nodes, dirichlet_solve, normalize, DirichletSolution, Node,
    Normalized, SchrodingerSystem, SolveOptions,
};
pub use end_function::{construct_end_function, exhaustion_ladder, ladder_gaps, EndFunction, Rung};

/// Default `tol_limit` for the ladder gap.
pub const DEFAULT_TOL_LIMIT: f64 = 1e-6;
/// Default relative threshold for the Gram rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
