//! The regularized first return map on the band face `x3 = ε`.
//!
//! The regularized system `x' = T x + α b φ(x3/ε)` coincides with the
//! relay field outside the band `|x3| < ε`, so the outer legs are exact
//! affine arcs from a face back to the same face. Inside the band the
//! layer coordinate `x3/ε` is crossed with the leading-order transit.
//! States are stored blown up, `u = (x1, x2, x3/ε)`.

use serde::Serialize;

use super::fields::FastState;
use super::layer::layer_transit;
use crate::error::{Error, Result};
use crate::flow::{level_crossing_time, HalfSpaceFlow, DEFAULT_CROSSING_TOL};
use crate::poincare::{geometric_ratio, DEFAULT_HORIZON};
use crate::system::{HalfSpace, Params, State};

pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_EPS0: f64 = 0.05;

fn check_scales(eps: f64, eps0: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0 && eps0.is_finite() && eps < eps0) {
        return Err(Error::InvalidConfig(format!("need 0 < eps < eps0, got eps = {eps}, eps0 = {eps0}")));
    }
    Ok(())
}

/// From the face `x3 = q` through `H_q` and back across the band to `x3 = -q`.
fn half_return(u: FastState, q: HalfSpace, p: &Params, eps: f64, eps0: f64) -> Result<(FastState, f64)> {
    let start = State::new(u.y1, u.y2, q.sign() * eps);
    let level = start.x3;
    let t = level_crossing_time(start, q, p, level, DEFAULT_HORIZON, DEFAULT_CROSSING_TOL)?.ok_or_else(|| {
        Error::NoReturn { horizon: DEFAULT_HORIZON, near: HalfSpaceFlow::new(q, p).at(start, DEFAULT_HORIZON) }
    })?;
    let landing = HalfSpaceFlow::new(q, p).at(start, t);
    if landing.x2.abs() < eps0 {
        return Err(Error::LeftDomain(format!("|y2| = {} < eps0 = {eps0} on the face", landing.x2.abs())));
    }
    let (across, dtau) = layer_transit(FastState::new(landing.x1, landing.x2, q.sign()), q.opposite(), p)?;
    Ok((across, t + eps * dtau))
}

/// `P_ε`: two outer legs and two layer transits. Returns the image on the
/// starting face and the elapsed time.
pub fn fast_return_map(u: FastState, p: &Params, eps: f64, eps0: f64) -> Result<(FastState, f64)> {
    check_scales(eps, eps0)?;
    if !u.is_finite() || (u.x3.abs() - 1.0).abs() > super::layer::FACE_TOL {
        return Err(Error::Domain(format!("u = ({}, {}, {}) is not on a band face", u.y1, u.y2, u.x3)));
    }
    let q = if u.x3 > 0.0 { HalfSpace::PLUS } else { HalfSpace::MINUS };
    if q.sign() * u.y2 < eps0 {
        return Err(Error::LeftDomain(format!("y2 = {} does not enter H{q} with margin eps0 = {eps0}", u.y2)));
    }
    let (mid, t1) = half_return(FastState { x3: q.sign(), ..u }, q, p, eps, eps0)?;
    let (end, t2) = half_return(mid, q.opposite(), p, eps, eps0)?;
    Ok((end, t1 + t2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FastCycleResult {
    pub fixed_point: FastState,
    pub period: f64,
    pub contraction: f64,
    pub iterations: usize,
    pub converged: bool,
    pub failure: Option<String>,
}

/// Fixed-point iteration of [`fast_return_map`].
pub fn find_fast_cycle(
    u0: FastState,
    p: &Params,
    eps: f64,
    eps0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FastCycleResult> {
    check_scales(eps, eps0)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be positive, got {tol}")));
    }
    let mut u = u0;
    let mut steps = Vec::new();
    let mut period = f64::NAN;
    let mut failure = None;
    let mut converged = false;
    for _ in 0..max_iter {
        match fast_return_map(u, p, eps, eps0) {
            Ok((next, t)) => {
                let d = (next.y1 - u.y1).hypot(next.y2 - u.y2);
                steps.push(d);
                u = next;
                period = t;
                if d <= tol {
                    converged = true;
                    break;
                }
            }
            Err(e) if steps.is_empty() => return Err(e),
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }
    let contraction = geometric_ratio(&steps);
    Ok(FastCycleResult {
        fixed_point: u,
        period,
        contraction,
        iterations: steps.len(),
        converged: converged && contraction < 1.0,
        failure,
    })
}
