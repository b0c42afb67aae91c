//! Positive solutions of discrete Schrödinger equations on manifolds with
//! several ends.
//!
//! A [`model::ModelSpec`] describes a core with radial ends. The
//! [`model::build_manifold`] function turns it into a weighted graph. The
//! [`solver`] builds one end function per end through an exhaustion ladder,
//! and [`estimates`] measures growth, mean-value constants and the resulting
//! bound on the number of ends. [`solitons`] holds radial examples of
//! gradient shrinking solitons and their entropy.
//!
//! ```
//! use endslab::estimates::{end_count_pipeline, PipelineConfig};
//! use endslab::model::{build_manifold, EndSpec, ModelSpec, SigmaLaw};
//!
//! let bump = SigmaLaw::Bump { c: 1.0, r_lo: 0.0, r_hi: 1.0 };
//! let spec = ModelSpec::symmetric(3, 3, EndSpec::new(1.0, 2.0, 1), 1.0, 48.0, bump);
//! let man = build_manifold(&spec).unwrap();
//! let cfg = PipelineConfig { tol_limit: 2e-3, ..PipelineConfig::default() };
//! let report = end_count_pipeline(&man, &cfg).unwrap();
//! assert_eq!(report.ends, 3);
//! assert_eq!(report.gram.rank, 3);
//! ```

pub mod error;
pub mod estimates;
pub mod geometry;
pub mod graph;
pub mod limsup;
pub mod linalg;
pub mod model;
pub mod profile;
pub mod solitons;
pub mod solver;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/end_functions.md")]
    mod end_functions {}
    #[doc = include_str!("../../../book/src/estimates.md")]
    mod estimates {}
    #[doc = include_str!("../../../book/src/solitons.md")]
    mod solitons {}
}
