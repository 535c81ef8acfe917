use thiserror::Error;

use crate::surface::SurfaceTag;
use crate::system::State;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The discontinuous field is not defined on the plane `x3 = 0`.
    #[error("state {0} lies on the switching plane x3 = 0")]
    OnSwitchingSurface(State),

    /// A configuration value failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The half-space flow never returned to the section within the horizon.
    #[error("no return to the switching plane within t = {horizon} (captured near {near})")]
    NoReturn { horizon: f64, near: State },

    /// A half-space flow landed on the plane outside the sewing region.
    #[error("landing at {state} is not a sewing point ({})", tag.label())]
    EscapingLanding { state: State, tag: SurfaceTag },

    /// The layer field is tangent to the layer faces (`y2 = 0`).
    #[error("layer transit undefined at y2 = 0")]
    TangentLayer,

    /// A return-map iterate left its admissible domain.
    #[error("iterate left the admissible domain: {0}")]
    LeftDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
