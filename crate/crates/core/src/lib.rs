//! Numerical library for elliptic Cauchy problems: reconstruct the unknown
//! Neumann trace on an inaccessible boundary part by alternating well-posed
//! mixed boundary value problems, driven as a segmenting Mann fixed-point
//! iteration with discrepancy-principle stopping.
//!
//! The crate is organized around the operator `T(φ) = L_d(L_n(φ))`, where
//! `L_n` maps a Neumann guess on Γ2 to the Dirichlet trace of one mixed solve
//! and `L_d` maps a Dirichlet trace back to a conormal flux. The sought trace
//! is the fixed point of the affine map `T = T_l + z`. Modules:
//!
//! - [`geometry`]: domains, grids, sampled boundary functions, quadrature.
//! - [`bvp`]: symmetric finite-difference/finite-volume assembly and solves,
//!   Dirichlet traces, consistent conormal fluxes, energy inner products.
//! - [`fixed_point`]: the cached fixed-point operator, its linear part and
//!   affine term, and the solution-energy (`*`) metric on Neumann traces.
//! - [`mann`]: segmenting schedules, the iteration engine, stopping rules
//!   (successive difference and discrepancy principle), restarts, and the
//!   `R_k` regularization family.
//! - [`oracle`]: exact sequence-space model of the strip geometry used as
//!   ground truth for stopping-index and convergence-rate experiments.
//! - [`noise`]: reproducible data perturbation, spectral smoothing, and
//!   perturbed affine terms with certified deviation.

pub mod bvp;
pub mod error;
pub mod fixed_point;
pub mod geometry;
pub mod linalg;
pub mod mann;
pub mod noise;
pub mod oracle;

pub use error::{Error, Result};
