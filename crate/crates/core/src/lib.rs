//! Simulation and analysis toolkit for the piecewise-continuous
//! Matsumoto-Chua relay system
//!
//! ```text
//! x1' = -beta x2
//! x2' = x1 - x2 + x3
//! x3' = alpha (x2 - x3 + sgn(x3))
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`system`]: parameters, states, the discontinuous field and its equilibria.
//! - [`spectrum`]: characteristic polynomial, real root, quadratic factor and
//!   the parameter predicates that guarantee a limit cycle.
//! - [`surface`]: Lie derivatives on the switching plane, sewing/escaping
//!   partition, fold and cusp points, the escaping vector field.
//! - [`flow`]: exact affine flows, crossing detection and the event-driven
//!   integrator (exact or RK4).
//! - [`poincare`]: semi-Poincaré maps, the first return map and fixed-point
//!   iteration for limit cycles.
//! - [`regularize`]: transition functions, the regularized and blown-up fields,
//!   layer transits and the regularized return map.
//! - [`scan`]: evaluation of all predicates over an `(alpha, beta)` grid.

pub mod error;
pub mod flow;
pub mod linalg;
pub mod poincare;
pub mod regularize;
pub mod scan;
pub mod spectrum;
pub mod surface;
pub mod system;

pub use error::{Error, Result};
pub use flow::{integrate, IntegratorConfig, Method, Trajectory};
pub use poincare::{find_cycle, first_return, semi_poincare, CycleResult, SectionPoint};
pub use spectrum::{GeometryClass, SpectrumReport};
pub use surface::{PlanarPoint, SurfaceClassification, SurfaceTag};
pub use system::{HalfSpace, Params, PhysicalParams, State};
