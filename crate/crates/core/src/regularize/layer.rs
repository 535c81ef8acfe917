//! Leading-order passage through the boundary layer `|x3| < 1`.

use super::fields::FastState;
use crate::error::{Error, Result};
use crate::system::{HalfSpace, Params};

/// Tolerance on `|x3| = 1` for a state to count as sitting on a face.
pub const FACE_TOL: f64 = 1e-9;

/// Cross the layer from the face `x3 = -q` to `x3 = q`.
///
/// At leading order in `ε` the layer coordinate moves with speed `α y2`
/// while the slow coordinates are frozen, so `x3 ↦ x3 + 2q` after the fast
/// time `Δτ = 2q / (α y2)`.
pub fn layer_transit(u: FastState, q: HalfSpace, p: &Params) -> Result<(FastState, f64)> {
    if u.y2 == 0.0 {
        return Err(Error::TangentLayer);
    }
    if q.sign() * u.y2 < 0.0 {
        return Err(Error::Domain(format!("y2 = {} moves against the transit direction {q}", u.y2)));
    }
    if (u.x3 + q.sign()).abs() > FACE_TOL {
        return Err(Error::Domain(format!("x3 = {} is not on the entry face {}", u.x3, -q.sign())));
    }
    let out = FastState::new(u.y1, u.y2, u.x3 + 2.0 * q.sign());
    Ok((out, 2.0 * q.sign() / (p.alpha * u.y2)))
}
