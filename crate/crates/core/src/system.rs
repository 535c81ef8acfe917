//! Parameters, states and the discontinuous relay field.
//!
//! In each open half-space `H_q = {q x3 > 0}` the field is affine,
//! `f_q(x) = T x + q alpha b`, with
//!
//! ```text
//!     [ 0  -beta    0    ]        [0]
//! T = [ 1   -1      1    ]    b = [0]
//!     [ 0  alpha  -alpha ]        [1]
//! ```
//!
//! `sgn` is deliberately left undefined at zero: callers that need the
//! dynamics on the plane `x3 = 0` go through [`crate::surface`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensionless parameters `alpha = C2/C1` and `beta = r^2 C2 / L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub alpha: f64,
    pub beta: f64,
}

impl Params {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    /// The linear part `T` of the field.
    pub fn system_matrix(&self) -> Matrix3<f64> {
        let (a, b) = (self.alpha, self.beta);
        Matrix3::new(
            0.0, -b, 0.0, //
            1.0, -1.0, 1.0, //
            0.0, a, -a,
        )
    }
}

/// Circuit values: resistance `r`, inductance and the two capacitances.
///
/// Any consistent unit system works; the reference current drops out of
/// the dimensionless parameters and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub r: f64,
    pub inductance: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn params_from_physical(p: &PhysicalParams) -> Result<Params> {
    for (name, v) in [("r", p.r), ("L", p.inductance), ("C1", p.c1), ("C2", p.c2)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Params::new(p.c2 / p.c1, p.r * p.r * p.c2 / p.inductance)
}

/// A point `(x1, x2, x3)` of the dimensionless phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl State {
    pub const ORIGIN: State = State { x1: 0.0, x2: 0.0, x3: 0.0 };

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x1, self.x2, self.x3)
    }

    pub fn norm(self) -> f64 {
        self.to_vector().norm()
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// The half-space containing this state, or `None` on the plane.
    pub fn half_space(self) -> Option<HalfSpace> {
        if self.x3 > 0.0 {
            Some(HalfSpace::PLUS)
        } else if self.x3 < 0.0 {
            Some(HalfSpace::MINUS)
        } else {
            None
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

impl Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, o: State) -> State {
        State::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        State::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(self, s: f64) -> State {
        State::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

/// Label `q = ±1` of the half-space `H_q = {q x3 > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub struct HalfSpace(i8);

impl HalfSpace {
    pub const PLUS: HalfSpace = HalfSpace(1);
    pub const MINUS: HalfSpace = HalfSpace(-1);

    pub fn new(q: i8) -> Result<Self> {
        match q {
            1 | -1 => Ok(HalfSpace(q)),
            _ => Err(Error::Domain(format!("half-space tag must be ±1, got {q}"))),
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn sign(self) -> f64 {
        f64::from(self.0)
    }

    pub fn opposite(self) -> HalfSpace {
        HalfSpace(-self.0)
    }

    pub fn both() -> [HalfSpace; 2] {
        [HalfSpace::PLUS, HalfSpace::MINUS]
    }
}

impl TryFrom<i8> for HalfSpace {
    type Error = Error;
    fn try_from(q: i8) -> Result<Self> {
        HalfSpace::new(q)
    }
}

impl From<HalfSpace> for i8 {
    fn from(q: HalfSpace) -> i8 {
        q.0
    }
}

impl fmt::Display for HalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 > 0 { "+" } else { "-" })
    }
}

/// Extension `f̄_q(x) = T x + q alpha b` of the half-space field to all of R^3.
pub fn half_space_field(x: State, q: HalfSpace, p: &Params) -> Vector3<f64> {
    Vector3::new(-p.beta * x.x2, x.x1 - x.x2 + x.x3, p.alpha * (x.x2 - x.x3 + q.sign()))
}

/// The discontinuous field `T x + alpha b sgn(x3)`, undefined on `x3 = 0`.
pub fn vector_field(x: State, p: &Params) -> Result<Vector3<f64>> {
    match x.half_space() {
        Some(q) => Ok(half_space_field(x, q, p)),
        None => Err(Error::OnSwitchingSurface(x)),
    }
}

/// The involution `x ↦ -x`, under which the field is equivariant.
pub fn reflect(x: State) -> State {
    -x
}

/// Equilibrium `x*_q = q (-1, 0, 1)` of the affine field in `H_q`.
///
/// It satisfies `T x*_q + q alpha b = 0` for every valid parameter pair
/// and lies inside `H_q`.
pub fn equilibrium(q: HalfSpace, _p: &Params) -> State {
    State::new(-1.0, 0.0, 1.0) * q.sign()
}
