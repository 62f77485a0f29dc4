//! Numerical laboratory for local multilinear fractional maximal operators
//! on discretized bounded domains.
//!
//! The crate rasterizes a small catalog of planar/axis-aligned domains onto
//! uniform grids, computes ball and sphere averages over grid stencils, and
//! evaluates the local maximal operators
//!
//! ```text
//!   M_{a}(f1,...,fm)(x) = sup { r^a * prod_j avg_{B(x,r)} |f_j| : 0 < r < delta(x) }
//! ```
//!
//! where `delta(x)` is the distance from `x` to the complement of the domain.
//! On top of the operators sits a verification layer that turns pointwise
//! gradient estimates, Sobolev norm bounds, zero-boundary-value criteria and
//! continuity/stability statements into quantified numerical checks with
//! structured reports.
//!
//! Module map:
//!
//! - [`lattice`]: domains, rasterization, the distance field `delta`.
//! - [`averaging`]: stencils, ball/sphere averages, radial profiles, the
//!   fixed-fraction average operator.
//! - [`maxops`]: maximal operators (brute-force oracle and fast engine),
//!   argmax radius sets, Hausdorff distance.
//! - [`sobolev`]: discrete gradients, `L^p`/`W^{1,p}` norms, the
//!   distance-weighted boundary norm, exponent bookkeeping.
//! - [`generate`]: deterministic test-field generators with analytic
//!   gradients.
//! - [`verify`]: the check suite emitting [`verify::VerificationReport`]s.
//! - [`cli`]: JSON run configuration, CSV/JSON artifacts, batch driver.

pub mod averaging;
pub mod cli;
mod error;
pub mod generate;
pub mod lattice;
pub mod maxops;
pub mod sobolev;
pub mod verify;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
