//! Half-space flows, crossing detection and the event-driven integrator.
//!
//! Inside `H_q` the system is affine, so its flow is known in closed form:
//! `φ^q_t(x) = x*_q + exp(tT)(x - x*_q)`. A trajectory of the discontinuous
//! system is a concatenation of such arcs glued at sewing points of the
//! plane `x3 = 0`. Landing anywhere else on the plane ends the trajectory.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::spectrum::{quadratic_factor, real_root};
use crate::surface::{classify_planar, PlanarPoint, SurfaceTag};
use crate::system::{equilibrium, half_space_field, HalfSpace, Params, State};

pub const DEFAULT_CROSSING_TOL: f64 = 1e-10;
pub const DEFAULT_EQUILIBRIUM_TOL: f64 = 1e-9;
pub const DEFAULT_RK4_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Closed-form matrix-exponential arcs; `step` is only the output spacing.
    AffineExact,
    /// Classical fourth-order Runge–Kutta with fixed `step`.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub step: f64,
    pub t_max: f64,
    /// Time tolerance of the crossing search.
    pub crossing_tol: f64,
    /// Distance to `x*_q` at which a trajectory counts as converged.
    pub equilibrium_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::AffineExact,
            step: DEFAULT_RK4_STEP,
            t_max: 500.0,
            crossing_tol: DEFAULT_CROSSING_TOL,
            equilibrium_tol: DEFAULT_EQUILIBRIUM_TOL,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("step", self.step),
            ("t_max", self.t_max),
            ("crossing_tol", self.crossing_tol),
            ("equilibrium_tol", self.equilibrium_tol),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    Crossing {
        from: HalfSpace,
        to: HalfSpace,
    },
    /// Landed on the plane outside the sewing region; carries the landing tag.
    EnteredEscaping {
        tag: SurfaceTag,
    },
    ReachedTmax,
    ConvergedToEquilibrium {
        q: HalfSpace,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub state: State,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, State)>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn last_state(&self) -> Option<State> {
        self.samples.last().map(|s| s.1)
    }

    pub fn final_event(&self) -> Option<&Event> {
        self.events.last()
    }

    pub fn crossings(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| matches!(e.kind, EventKind::Crossing { .. }))
    }

    /// Pointwise image under `x ↦ -x`.
    pub fn reflected(&self) -> Trajectory {
        let reflect_kind = |k: EventKind| match k {
            EventKind::Crossing { from, to } => EventKind::Crossing { from: from.opposite(), to: to.opposite() },
            EventKind::EnteredEscaping { tag } => EventKind::EnteredEscaping { tag: tag.reflected() },
            EventKind::ConvergedToEquilibrium { q } => EventKind::ConvergedToEquilibrium { q: q.opposite() },
            EventKind::ReachedTmax => EventKind::ReachedTmax,
        };
        Trajectory {
            samples: self.samples.iter().map(|&(t, x)| (t, -x)).collect(),
            events: self
                .events
                .iter()
                .map(|e| Event { time: e.time, kind: reflect_kind(e.kind), state: -e.state })
                .collect(),
        }
    }
}

/// `φ^q_t(x) = x*_q + exp(tT)(x - x*_q)`.
pub fn affine_flow(x: State, q: HalfSpace, t: f64, p: &Params) -> State {
    HalfSpaceFlow::new(q, p).at(x, t)
}

/// Closed-form flow of the affine field `T x + q α b`.
#[derive(Debug, Clone)]
pub struct HalfSpaceFlow {
    q: HalfSpace,
    matrix: Matrix3<f64>,
    center: Vector3<f64>,
    params: Params,
}

impl HalfSpaceFlow {
    pub fn new(q: HalfSpace, p: &Params) -> Self {
        Self { q, matrix: p.system_matrix(), center: equilibrium(q, p).to_vector(), params: *p }
    }

    pub fn half_space(&self) -> HalfSpace {
        self.q
    }

    pub fn at(&self, x: State, t: f64) -> State {
        if t == 0.0 {
            return x;
        }
        let d = x.to_vector() - self.center;
        State::from_vector(&(self.center + expm(&(self.matrix * t)) * d))
    }

    fn rate_x3(&self, d: &Vector3<f64>) -> f64 {
        // x3' = (T d)_3 with d = x - x*
        self.params.alpha * (d[1] - d[2])
    }
}

/// Coarse sampling interval of the crossing search: an eighth of the fastest
/// time scale `1/‖T‖₁` and a sixteenth of the rotation period.
pub fn search_spacing(p: &Params) -> f64 {
    let norm = crate::linalg::one_norm(&p.system_matrix());
    let mut dt = 0.25 / norm;
    let q = quadratic_factor(p, real_root(p, 1e-12));
    if q.is_complex() {
        let period = 2.0 * std::f64::consts::PI / q.roots[0].im.abs();
        dt = dt.min(period / 16.0);
    }
    dt
}

/// Smallest `t ∈ (0, t_max]` at which the `H_q` flow of `x` reaches `x3 = 0`.
///
/// Returns `Err` when `x` is strictly on the wrong side of the plane.
pub fn crossing_time(x: State, q: HalfSpace, p: &Params, t_max: f64, tol: f64) -> Result<Option<f64>> {
    level_crossing_time(x, q, p, 0.0, t_max, tol)
}

/// Same as [`crossing_time`] for the level `x3 = level`, with `q (x3 - level) >= 0` at the start.
///
/// The analytic flow is sampled on a grid of spacing [`search_spacing`]. A
/// sign change of `q (x3 - level)` brackets the crossing; a sub-grid dip
/// (derivative turning from negative to positive between two positive
/// samples) is located on the derivative and checked as well. The bracket
/// is refined by Newton steps safeguarded with bisection until its width is
/// below `tol` and the level residual is at rounding level.
pub fn level_crossing_time(
    x: State,
    q: HalfSpace,
    p: &Params,
    level: f64,
    t_max: f64,
    tol: f64,
) -> Result<Option<f64>> {
    let s = q.sign();
    if s * (x.x3 - level) < 0.0 {
        return Err(Error::Domain(format!("state {x} is not in the closure of H{q} relative to x3 = {level}")));
    }
    let flow = HalfSpaceFlow::new(q, p);
    let d0 = x.to_vector() - flow.center;
    let offset = flow.center[2] - level;
    let g = |d: &Vector3<f64>| s * (offset + d[2]);
    let dg = |d: &Vector3<f64>| s * flow.rate_x3(d);
    let at = |t: f64| expm(&(flow.matrix * t)) * d0;
    let g_at = |t: f64| {
        let d = at(t);
        (g(&d), dg(&d))
    };

    let dt = search_spacing(p);
    let step = expm(&(flow.matrix * dt));

    let (g0, dg0) = (g(&d0), dg(&d0));
    if g0 == 0.0 && dg0 < 0.0 {
        // already leaving through the level
        return Ok(Some(0.0));
    }

    let mut t_prev = 0.0;
    let mut d_prev = d0;
    let (mut g_prev, mut dg_prev) = (g0, dg0);
    let mut k = 0u64;
    while t_prev < t_max {
        k += 1;
        let t_next = (k as f64 * dt).min(t_max);
        let d_next = if t_next - t_prev == dt { step * d_prev } else { at(t_next) };
        let (g_next, dg_next) = (g(&d_next), dg(&d_next));

        if g_prev <= 0.0 {
            // started on the level and the excursion is shorter than dt
            if g_next <= 0.0 {
                if let Some(t_top) = derivative_zero(&g_at, t_prev, t_next, 1.0) {
                    let (g_top, _) = g_at(t_top);
                    if g_top > 0.0 {
                        return Ok(Some(refine(&g_at, t_top, t_next, tol)));
                    }
                    return Ok(Some(t_top));
                }
            }
        } else if g_next <= 0.0 {
            return Ok(Some(refine(&g_at, t_prev, t_next, tol)));
        } else if dg_prev < 0.0 && dg_next > 0.0 {
            if let Some(t_low) = derivative_zero(&g_at, t_prev, t_next, -1.0) {
                if g_at(t_low).0 <= 0.0 {
                    return Ok(Some(refine(&g_at, t_prev, t_low, tol)));
                }
            }
        }
        t_prev = t_next;
        d_prev = d_next;
        g_prev = g_next;
        dg_prev = dg_next;
    }
    Ok(None)
}

/// Bisect on the derivative for the extremum of `g` inside `[a, b]`;
/// `sign = 1` looks for a maximum (`g'` from + to -), `-1` for a minimum.
fn derivative_zero(g_at: &impl Fn(f64) -> (f64, f64), a: f64, b: f64, sign: f64) -> Option<f64> {
    let (mut lo, mut hi) = (a, b);
    if sign * g_at(lo).1 < 0.0 || sign * g_at(hi).1 > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sign * g_at(mid).1 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Root of `g` in `[lo, hi]` with `g(lo) > 0 >= g(hi)`.
fn refine(g_at: &impl Fn(f64) -> (f64, f64), lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let mut t = 0.5 * (lo + hi);
    let mut best = (hi, g_at(hi).0.abs());
    for _ in 0..200 {
        let (gt, dgt) = g_at(t);
        if gt.abs() < best.1 || (gt.abs() == best.1 && t < best.0) {
            best = (t, gt.abs());
        }
        if gt == 0.0 {
            return t;
        }
        if gt > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - gt / dgt;
        let converged = hi - lo <= tol && (newton - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(1e-300);
        if converged || hi - lo <= 2.0 * f64::EPSILON * hi.abs() {
            break;
        }
        t = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    best.0
}

/// One classical RK4 step of the `H_q` field (the relay term frozen to `q`).
pub fn rk4_step(x: State, p: &Params, h: f64, q: HalfSpace) -> State {
    let f = |v: &Vector3<f64>| half_space_field(State::from_vector(v), q, p);
    let y = x.to_vector();
    let k1 = f(&y);
    let k2 = f(&(y + k1 * (0.5 * h)));
    let k3 = f(&(y + k2 * (0.5 * h)));
    let k4 = f(&(y + k3 * h));
    State::from_vector(&(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)))
}

/// Half-space of a starting point; points on the plane must be sewing points.
fn initial_half_space(x0: State) -> Result<HalfSpace> {
    if !x0.is_finite() {
        return Err(Error::Domain(format!("non-finite initial state {x0}")));
    }
    if let Some(q) = x0.half_space() {
        return Ok(q);
    }
    match classify_planar(PlanarPoint::new(x0.x1, x0.x2)) {
        // both fields point into H_{sgn x2}
        SurfaceTag::Sewing => Ok(if x0.x2 > 0.0 { HalfSpace::PLUS } else { HalfSpace::MINUS }),
        tag => Err(Error::Domain(format!(
            "initial state {x0} lies on the switching plane at a {} point: forward flow undefined",
            tag.label()
        ))),
    }
}

/// Integrate the discontinuous system from `x0` up to `cfg.t_max`.
pub fn integrate(x0: State, p: &Params, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let mut q = initial_half_space(x0)?;
    let mut traj = Trajectory { samples: vec![(0.0, x0)], events: Vec::new() };
    let (mut t, mut x) = (0.0, x0);

    loop {
        let leg = match cfg.method {
            Method::AffineExact => exact_leg(x, q, t, p, cfg, &mut traj.samples)?,
            Method::Rk4 => rk4_leg(x, q, t, p, cfg, &mut traj.samples),
        };
        match leg {
            LegEnd::Crossing { time, state } => {
                traj.samples.push((time, state));
                let tag = classify_planar(PlanarPoint::new(state.x1, state.x2));
                if tag.is_sewing() {
                    traj.events.push(Event { time, kind: EventKind::Crossing { from: q, to: q.opposite() }, state });
                    q = q.opposite();
                    t = time;
                    x = state;
                } else {
                    traj.events.push(Event { time, kind: EventKind::EnteredEscaping { tag }, state });
                    return Ok(traj);
                }
            }
            LegEnd::Converged { time, state } => {
                traj.events.push(Event { time, kind: EventKind::ConvergedToEquilibrium { q }, state });
                return Ok(traj);
            }
            LegEnd::Horizon { time, state } => {
                traj.events.push(Event { time, kind: EventKind::ReachedTmax, state });
                return Ok(traj);
            }
        }
    }
}

enum LegEnd {
    Crossing { time: f64, state: State },
    Converged { time: f64, state: State },
    Horizon { time: f64, state: State },
}

fn near_equilibrium(x: State, q: HalfSpace, p: &Params, tol: f64) -> bool {
    (x - equilibrium(q, p)).norm() < tol
}

fn exact_leg(
    x: State,
    q: HalfSpace,
    t0: f64,
    p: &Params,
    cfg: &IntegratorConfig,
    samples: &mut Vec<(f64, State)>,
) -> Result<LegEnd> {
    let flow = HalfSpaceFlow::new(q, p);
    if near_equilibrium(x, q, p, cfg.equilibrium_tol) {
        return Ok(LegEnd::Converged { time: t0, state: x });
    }
    let horizon = cfg.t_max - t0;
    let crossing = if horizon > 0.0 { crossing_time(x, q, p, horizon, cfg.crossing_tol)? } else { None };
    let t_end = crossing.map_or(cfg.t_max, |tc| t0 + tc);

    // output grid: multiples of `step` strictly inside (t0, t_end)
    let step_map = expm(&(flow.matrix * cfg.step));
    let mut k = (t0 / cfg.step).floor() as u64 + 1;
    let mut tk = k as f64 * cfg.step;
    let mut d = if tk < t_end { Some(expm(&(flow.matrix * (tk - t0))) * (x.to_vector() - flow.center)) } else { None };
    while let Some(dk) = d {
        if tk >= t_end {
            break;
        }
        let state = State::from_vector(&(flow.center + dk));
        samples.push((tk, state));
        if crossing.is_none() && dk.norm() < cfg.equilibrium_tol {
            return Ok(LegEnd::Converged { time: tk, state });
        }
        k += 1;
        tk = k as f64 * cfg.step;
        d = Some(step_map * dk);
    }

    match crossing {
        Some(tc) => {
            let mut state = flow.at(x, tc);
            state.x3 = 0.0;
            Ok(LegEnd::Crossing { time: t0 + tc, state })
        }
        None => {
            let state = flow.at(x, cfg.t_max - t0);
            if near_equilibrium(state, q, p, cfg.equilibrium_tol) {
                samples.push((cfg.t_max, state));
                return Ok(LegEnd::Converged { time: cfg.t_max, state });
            }
            samples.push((cfg.t_max, state));
            Ok(LegEnd::Horizon { time: cfg.t_max, state })
        }
    }
}

/// Cubic Hermite interpolant of `g` on `[0, h]` from end values and slopes.
fn hermite(g0: f64, d0: f64, g1: f64, d1: f64, h: f64) -> impl Fn(f64) -> (f64, f64) {
    move |s: f64| {
        let u = s / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
            u * (1.0 - u) * (1.0 - u),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        let v = h00 * g0 + h10 * h * d0 + h01 * g1 + h11 * h * d1;
        let dv = (6.0 * u * u - 6.0 * u) * g0 / h
            + (3.0 * u * u - 4.0 * u + 1.0) * d0
            + (6.0 * u - 6.0 * u * u) * g1 / h
            + (3.0 * u * u - 2.0 * u) * d1;
        (v, dv)
    }
}

fn rk4_leg(
    x: State,
    q: HalfSpace,
    t0: f64,
    p: &Params,
    cfg: &IntegratorConfig,
    samples: &mut Vec<(f64, State)>,
) -> LegEnd {
    let s = q.sign();
    let g = |y: State| s * y.x3;
    let dg = |y: State| s * half_space_field(y, q, p)[2];
    let (mut t, mut y) = (t0, x);
    let mut k = 0u64;
    if near_equilibrium(y, q, p, cfg.equilibrium_tol) {
        return LegEnd::Converged { time: t, state: y };
    }
    loop {
        let remaining = cfg.t_max - t;
        if remaining <= 0.0 {
            return LegEnd::Horizon { time: t, state: y };
        }
        let h = cfg.step.min(remaining);
        let next = rk4_step(y, p, h, q);
        let (g0, d0, g1, d1) = (g(y), dg(y), g(next), dg(next));

        // bracket [lo, hi] on the step length with g(lo) > 0 >= g(hi)
        let bracket = if g0 <= 0.0 {
            // on the plane at the start of the leg: look past the initial hump
            if g1 <= 0.0 {
                let herm = hermite(g0, d0, g1, d1, h);
                derivative_zero(&herm, 0.0, h, 1.0).map(|s_top| (s_top, h))
            } else {
                None
            }
        } else if g1 <= 0.0 {
            Some((0.0, h))
        } else if d0 < 0.0 && d1 > 0.0 {
            let herm = hermite(g0, d0, g1, d1, h);
            derivative_zero(&herm, 0.0, h, -1.0)
                .filter(|&s_low| g(rk4_step(y, p, s_low, q)) <= 0.0)
                .map(|s_low| (0.0, s_low))
        } else {
            None
        };

        if let Some((lo, hi)) = bracket {
            let g_step = |len: f64| {
                let z = rk4_step(y, p, len, q);
                (g(z), dg(z))
            };
            if g_step(lo).0 > 0.0 {
                let sc = refine(&g_step, lo, hi, cfg.crossing_tol);
                let mut state = rk4_step(y, p, sc, q);
                state.x3 = 0.0;
                return LegEnd::Crossing { time: t + sc, state };
            }
        }

        k += 1;
        t = if h < cfg.step { cfg.t_max } else { t0 + k as f64 * cfg.step };
        y = next;
        samples.push((t, y));
        if near_equilibrium(y, q, p, cfg.equilibrium_tol) {
            return LegEnd::Converged { time: t, state: y };
        }
    }
}
