//! Identification of PDE-based models from noisy spatio-temporal data.
//!
//! The pipeline has two stages. Stage one fits penalized natural cubic
//! smoothing splines along each grid axis and reads value, first- and
//! second-derivative estimates off the knots; every linear solve runs
//! through banded LDL^T factorizations, so the whole stage costs O(MN)
//! arithmetic for an M x N grid. Stage two assembles a dictionary of
//! candidate PDE terms (derivative powers and pairwise products) and
//! selects the active ones by an l1-penalized regression solved with
//! cyclic coordinate descent, including solution paths across the
//! penalty, an OLS refit on the selected support, and support-recovery
//! diagnostics.
//!
//! Supporting modules provide closed-form and reference solvers for the
//! three benchmark PDEs (transport, inviscid and viscous Burgers), a
//! local-polynomial baseline estimator used for complexity comparisons,
//! an explicit-Euler forecaster, and CSV import/export of fields.
//!
//! With the default `parallel` feature, independent per-slice fits and
//! dictionary assembly fan out over rayon; disabling the feature yields
//! a dependency-free sequential build with identical results.

pub mod banded;
pub mod conditions;
pub(crate) mod dense;
pub mod dictionary;
mod error;
pub mod forecast;
pub mod grid;
pub mod io;
pub mod lasso;
pub mod localpoly;
pub mod opcount;
pub(crate) mod parallel;
pub mod simulate;
pub mod spline;
pub mod terms;

pub use error::{Error, Result};
pub use grid::{Field, Grid1D};
pub use spline::DerivativeEstimates;
pub use terms::TermLabel;
