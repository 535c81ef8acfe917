//! Transition functions `φ` replacing `sgn`: monotone on `]-1, 1[`,
//! saturated at `±1` outside.

use std::fmt;

#[derive(Clone, Copy)]
pub enum TransitionKind {
    /// `(3x - x³)/2`, C¹ with `φ'(0) = 3/2`.
    CubicC1,
    /// `-1 + 2S((x+1)/2)` with the flat step `S(t) = 1/(1 + e^{1/t - 1/(1-t)})`;
    /// C^∞, every derivative vanishes at `±1`, `φ'(0) = 2`.
    SmoothFlat,
    /// `x - x³ + x⁵`, monotone with `φ'(0) = 1`.
    UnitSlope,
    /// User-supplied evaluator and derivative on `]-1, 1[`; saturation is applied outside.
    Custom { phi: fn(f64) -> f64, dphi: fn(f64) -> f64 },
}

impl TransitionKind {
    pub fn name(&self) -> &'static str {
        match self {
            TransitionKind::CubicC1 => "cubic",
            TransitionKind::SmoothFlat => "smooth",
            TransitionKind::UnitSlope => "unit-slope",
            TransitionKind::Custom { .. } => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "cubic" => Some(TransitionKind::CubicC1),
            "smooth" => Some(TransitionKind::SmoothFlat),
            "unit-slope" => Some(TransitionKind::UnitSlope),
            _ => None,
        }
    }

    pub fn is_odd(&self) -> bool {
        !matches!(self, TransitionKind::Custom { .. })
    }
}

impl fmt::Debug for TransitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn flat_step(t: f64) -> f64 {
    1.0 / (1.0 + (1.0 / t - 1.0 / (1.0 - t)).exp())
}

fn flat_step_slope(t: f64) -> f64 {
    let s = flat_step(t);
    (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) * s * (1.0 - s)
}

pub fn transition_eval(k: TransitionKind, x: f64) -> f64 {
    if x >= 1.0 {
        return 1.0;
    }
    if x <= -1.0 {
        return -1.0;
    }
    match k {
        TransitionKind::CubicC1 => 0.5 * x * (3.0 - x * x),
        // evaluated on |x| so oddness is exact
        TransitionKind::SmoothFlat => x.signum() * (2.0 * flat_step(0.5 * (x.abs() + 1.0)) - 1.0),
        TransitionKind::UnitSlope => {
            let x2 = x * x;
            x * (1.0 - x2 + x2 * x2)
        }
        TransitionKind::Custom { phi, .. } => phi(x),
    }
}

/// `φ'(x)`; zero in the saturated region.
pub fn transition_derivative(k: TransitionKind, x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    match k {
        TransitionKind::CubicC1 => 1.5 * (1.0 - x * x),
        TransitionKind::SmoothFlat => flat_step_slope(0.5 * (x.abs() + 1.0)),
        TransitionKind::UnitSlope => {
            let x2 = x * x;
            1.0 - 3.0 * x2 + 5.0 * x2 * x2
        }
        TransitionKind::Custom { dphi, .. } => dphi(x),
    }
}
