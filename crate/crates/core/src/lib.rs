//! Extended Lorentz cones and Picard iteration for mixed complementarity
//! problems.
//!
//! For a split `R^p x R^q` the extended Lorentz cone is
//! `L = {(x, u) : x >= ||u|| e}`. Projection onto any product `R^p x C`
//! preserves the order induced by `L`, so when `I - F` is `L`-isotone the
//! Picard iteration `z <- P_K(z - F(z))` with `K = R^p x C` is `L`-increasing
//! and converges to a solution of the complementarity problem whenever it is
//! bounded above.
//!
//! Modules:
//! - [`cone`]: points, cone descriptions, `L`/`L*` membership, the order.
//! - [`projection`]: metric projections, including exact polyhedral ones.
//! - [`isotone`]: isotone combinations and hyperplane classification.
//! - [`solver`]: problems, Picard steps, the solve loop and its certificates.
//! - [`exact`]: the same iteration in rational arithmetic.
//! - [`example`]: the built-in two-by-two test problem.
//! - [`verify`]: sampled property suites.

pub mod cone;
pub mod error;
pub mod exact;
pub mod example;
pub mod isotone;
pub mod linalg;
pub mod map;
pub mod projection;
pub mod reproduce;
pub mod sampling;
pub mod solver;
pub mod verify;

pub use cone::{contains_l, contains_m, leq, ConeSpec, Point, Tolerance};
pub use error::{Error, Result};
pub use map::Mapping;
pub use projection::{project, ProjectionResult};
pub use solver::{solve, Direction, Problem, SolveOptions, SolveReport, Termination};
