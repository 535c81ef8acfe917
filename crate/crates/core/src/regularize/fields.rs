//! The rescaled relay field, its ε-regularization and the blown-up
//! slow/fast fields.
//!
//! With `y = ε x` the relay system reads `y' = T y + ε α b sgn(y3)`. The
//! regularization replaces `sgn(y3)` by `φ(y3/ε)`, and the blow-up
//! `y = (u1, u2, ε u3)` opens the band `|y3| < ε` to `|u3| < 1`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::transition::{transition_eval, TransitionKind};
use crate::error::{Error, Result};
use crate::system::{Params, State};

/// Blown-up coordinates `u = (y1, y2, x3)`, with `y3 = ε x3`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FastState {
    pub y1: f64,
    pub y2: f64,
    pub x3: f64,
}

impl FastState {
    pub const fn new(y1: f64, y2: f64, x3: f64) -> Self {
        Self { y1, y2, x3 }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.y1, self.y2, self.x3)
    }

    /// `y = (u1, u2, ε u3)`.
    pub fn blow_down(self, eps: f64) -> State {
        State::new(self.y1, self.y2, eps * self.x3)
    }

    pub fn from_blown_down(y: State, eps: f64) -> Self {
        Self::new(y.x1, y.x2, y.x3 / eps)
    }

    pub fn is_finite(self) -> bool {
        self.y1.is_finite() && self.y2.is_finite() && self.x3.is_finite()
    }
}

impl std::ops::Neg for FastState {
    type Output = FastState;
    fn neg(self) -> FastState {
        FastState::new(-self.y1, -self.y2, -self.x3)
    }
}

/// Time scale of the blown-up field: `Fast` uses `τ` with `t = ε τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Timescale {
    Slow,
    Fast,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("eps must be positive, got {eps}")))
    }
}

/// `T y + ε α b s`, shared by the relay and regularized forms so that
/// both agree bit for bit whenever `s = ±1`.
fn forced_linear(y: State, p: &Params, eps: f64, s: f64) -> Vector3<f64> {
    Vector3::new(-p.beta * y.x2, y.x1 - y.x2 + y.x3, p.alpha * (y.x2 - y.x3) + eps * p.alpha * s)
}

/// `T y + ε α b sgn(y3)`.
pub fn rescaled_field(y: State, p: &Params, eps: f64) -> Result<Vector3<f64>> {
    check_eps(eps)?;
    if y.x3 == 0.0 {
        return Err(Error::OnSwitchingSurface(y));
    }
    Ok(forced_linear(y, p, eps, y.x3.signum()))
}

/// `T y + ε α b φ(y3/ε)`.
pub fn regularized_field(y: State, p: &Params, eps: f64, k: TransitionKind) -> Result<Vector3<f64>> {
    check_eps(eps)?;
    Ok(forced_linear(y, p, eps, transition_eval(k, y.x3 / eps)))
}

/// The regularized field in blown-up coordinates.
///
/// On the fast scale: `(-ε β y2, ε (y1 - y2 + ε x3), α y2 - ε α x3 + ε α φ(x3))`;
/// the slow field is the same vector divided by `ε`.
pub fn fast_field(u: FastState, p: &Params, eps: f64, k: TransitionKind, scale: Timescale) -> Result<Vector3<f64>> {
    check_eps(eps)?;
    let (a, b) = (p.alpha, p.beta);
    let phi = transition_eval(k, u.x3);
    let fast =
        Vector3::new(-eps * b * u.y2, eps * (u.y1 - u.y2 + eps * u.x3), a * u.y2 - eps * a * u.x3 + eps * a * phi);
    Ok(match scale {
        Timescale::Fast => fast,
        Timescale::Slow => fast / eps,
    })
}
