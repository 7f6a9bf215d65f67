//! Numerics for fractional nonlocal operators on bounded domains.
//!
//! The crate evaluates the fractional Laplacian, the regional fractional
//! Laplacian and the normalized nonlocal normal derivative on intervals,
//! discs and rectangles, and computes the exterior-mediated kernel `k_beta`
//! that appears when exterior values are eliminated through a nonlocal
//! Robin condition `beta u + (1 - beta) N_s u = 0`. On top of this sit a
//! verification harness for the resulting operator identities, a Monte
//! Carlo simulator of the associated resurrection jump process, and a CLI.
//!
//! Module map:
//! - [`geometry`]: domains, points, boundary and support distances.
//! - [`field`]: scalar fields, exterior rules and Robin weights.
//! - [`quadrature`]: adaptive Gauss-Kronrod with singularity-aware maps.
//! - [`operators`]: the nonlocal operators themselves.
//! - [`kernel`]: `k_beta` and its logarithmic envelopes.
//! - [`verify`]: identity and bound checks producing [`verify::VerificationReport`]s.
//! - [`montecarlo`]: resurrection sampler, generator estimator, jump chain.
//! - [`config`] and [`cli`]: the command-line front end.

pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod geometry;
pub mod kernel;
pub mod montecarlo;
pub mod operators;
pub mod quadrature;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use field::{ExteriorRule, FieldRule, Region, RobinWeight, ScalarField, WeightRegion};
pub use geometry::{Domain, Point};
pub use kernel::KernelEvaluation;
pub use operators::{FractionalOrder, Operators};
pub use quadrature::{QuadratureResult, QuadratureSpec};
pub use verify::{VerificationReport, Verdict};
