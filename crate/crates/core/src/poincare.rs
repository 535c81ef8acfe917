//! Semi-Poincaré maps on the sewing region, the first return map and the
//! fixed-point iteration that certifies limit cycles.
//!
//! The section is `{x3 = 0, |x2| > 1}`. A point with `x2 > 1` enters `H_+`,
//! one with `x2 < -1` enters `H_-`; the first return map composes the two
//! half-space legs and comes back to the branch it started on.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::flow::{crossing_time, HalfSpaceFlow, DEFAULT_CROSSING_TOL};
use crate::surface::{classify_planar, PlanarPoint};
use crate::system::{HalfSpace, Params, State};

/// Seeds closer than this to the fold lines `|x2| = 1` are rejected.
pub const SEED_MARGIN: f64 = 1e-6;

/// Default time budget for one half-space leg.
pub const DEFAULT_HORIZON: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionPoint {
    pub x1: f64,
    pub x2: f64,
}

impl SectionPoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !(x1.is_finite() && x2.is_finite() && x2.abs() > 1.0) {
            return Err(Error::Domain(format!("({x1}, {x2}) is not a sewing point (need |x2| > 1)")));
        }
        Ok(Self { x1, x2 })
    }

    /// The half-space the orbit through this point enters.
    pub fn branch(self) -> HalfSpace {
        if self.x2 > 0.0 {
            HalfSpace::PLUS
        } else {
            HalfSpace::MINUS
        }
    }

    pub fn lift(self) -> State {
        State::new(self.x1, self.x2, 0.0)
    }

    pub fn reflected(self) -> SectionPoint {
        SectionPoint { x1: -self.x1, x2: -self.x2 }
    }

    pub fn distance(self, o: SectionPoint) -> f64 {
        (self.x1 - o.x1).hypot(self.x2 - o.x2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnOptions {
    pub horizon: f64,
    pub crossing_tol: f64,
}

impl Default for ReturnOptions {
    fn default() -> Self {
        Self { horizon: DEFAULT_HORIZON, crossing_tol: DEFAULT_CROSSING_TOL }
    }
}

/// Flow `x` through `H_q` back to the plane: `(landing point, flight time)`.
pub fn semi_poincare(x: SectionPoint, q: HalfSpace, p: &Params) -> Result<(SectionPoint, f64)> {
    semi_poincare_with(x, q, p, &ReturnOptions::default())
}

pub fn semi_poincare_with(
    x: SectionPoint,
    q: HalfSpace,
    p: &Params,
    opts: &ReturnOptions,
) -> Result<(SectionPoint, f64)> {
    if x.x2.abs() <= 1.0 || x.branch() != q {
        return Err(Error::Domain(format!("({}, {}) does not enter H{q} through the sewing region", x.x1, x.x2)));
    }
    let start = x.lift();
    let t = crossing_time(start, q, p, opts.horizon, opts.crossing_tol)?.ok_or_else(|| Error::NoReturn {
        horizon: opts.horizon,
        near: HalfSpaceFlow::new(q, p).at(start, opts.horizon),
    })?;
    let landing = HalfSpaceFlow::new(q, p).at(start, t);
    let tag = classify_planar(PlanarPoint::new(landing.x1, landing.x2));
    if !tag.is_sewing() {
        return Err(Error::EscapingLanding { state: State::new(landing.x1, landing.x2, 0.0), tag });
    }
    Ok((SectionPoint { x1: landing.x1, x2: landing.x2 }, t))
}

/// `P = φ_{-q} ∘ φ_q`: `(return point, period)`.
pub fn first_return(x: SectionPoint, p: &Params) -> Result<(SectionPoint, f64)> {
    first_return_with(x, p, &ReturnOptions::default())
}

pub fn first_return_with(x: SectionPoint, p: &Params, opts: &ReturnOptions) -> Result<(SectionPoint, f64)> {
    let q = x.branch();
    let (mid, t1) = semi_poincare_with(x, q, p, opts)?;
    let (end, t2) = semi_poincare_with(mid, q.opposite(), p, opts)?;
    Ok((end, t1 + t2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleResult {
    pub fixed_point: SectionPoint,
    pub period: f64,
    /// Geometric mean of successive step-length ratios.
    pub contraction: f64,
    pub iterates: Vec<SectionPoint>,
    pub converged: bool,
    pub iterations: usize,
    #[serde(serialize_with = "failure_message")]
    pub failure: Option<Error>,
}

fn failure_message<S: Serializer>(e: &Option<Error>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match e {
        Some(e) => s.serialize_some(&e.to_string()),
        None => s.serialize_none(),
    }
}

/// Iterate the first return map from `x0` until successive iterates are
/// within `tol` or `max_iter` returns have been taken.
///
/// Failures of the map along the way produce a non-converged result that
/// carries the error; only invalid input is reported as `Err`.
pub fn find_cycle(x0: SectionPoint, p: &Params, tol: f64, max_iter: usize) -> Result<CycleResult> {
    find_cycle_with(x0, p, tol, max_iter, &ReturnOptions::default())
}

pub fn find_cycle_with(
    x0: SectionPoint,
    p: &Params,
    tol: f64,
    max_iter: usize,
    opts: &ReturnOptions,
) -> Result<CycleResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be positive, got {tol}")));
    }
    if !(x0.x1.is_finite() && x0.x2.abs() >= 1.0 + SEED_MARGIN) {
        return Err(Error::Domain(format!("seed ({}, {}) is too close to the fold lines |x2| = 1", x0.x1, x0.x2)));
    }

    let mut iterates = vec![x0];
    let mut steps: Vec<f64> = Vec::new();
    let mut period = f64::NAN;
    let mut x = x0;
    let mut failure = None;
    let mut converged = false;

    for _ in 0..max_iter {
        match first_return_with(x, p, opts) {
            Ok((next, t)) => {
                let d = next.distance(x);
                steps.push(d);
                iterates.push(next);
                period = t;
                x = next;
                if d <= tol {
                    converged = true;
                    break;
                }
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }

    let contraction = geometric_ratio(&steps);
    Ok(CycleResult {
        fixed_point: x,
        period,
        contraction,
        iterations: steps.len(),
        iterates,
        converged: converged && contraction < 1.0,
        failure,
    })
}

/// `(d_n / d_1)^(1/(n-1))`, the geometric mean of `d_{k+1} / d_k`.
pub(crate) fn geometric_ratio(steps: &[f64]) -> f64 {
    match steps {
        [first, .., last] if *first > 0.0 && *last > 0.0 => (last / first).powf(1.0 / (steps.len() - 1) as f64),
        [_, .., 0.0] => 0.0,
        _ => f64::NAN,
    }
}
