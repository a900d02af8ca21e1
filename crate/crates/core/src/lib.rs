//! Metric Lie algebras given by structure constants, and mechanical checks of
//! the harmonic-morphism and conformal-foliation criteria built on them.
//!
//! The crate is organised around [`MetricLieAlgebra`]: a finite-dimensional
//! real Lie algebra with a (not necessarily orthonormal) inner product. On
//! top of it sit
//!
//! * [`conditions`]: the bracket/trace/conformality conditions that yield a
//!   harmonic morphism `G -> R^m`, and the analogous foliation criterion,
//! * [`geometry`]: Levi-Civita connection, curvature and a seeded
//!   sectional-curvature scan,
//! * [`rootspace`]: generalized root spaces of an abelian action, normality
//!   tests and Carnot algebras,
//! * [`symbolic`]: exact parametric structure constants and their Jacobi
//!   polynomial systems,
//! * [`catalog`]: the parametrised example families.

pub mod algebra;
pub mod catalog;
pub mod conditions;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod report;
pub mod rootspace;
pub mod symbolic;

pub use algebra::{Decomposition, JacobiResidual, MetricLieAlgebra, Subspace};
pub use error::{Error, Result};
pub use report::{CheckItem, CheckReport, Verdict, Witness};

/// Absolute tolerance used by every residual check unless overridden.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Jacobi residual above which the morphism/foliation conditions are not
/// evaluated at all.
pub const UNSOUND_JACOBI: f64 = 1e-6;
