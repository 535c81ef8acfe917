//! The interior rest point created by the regularization.
//!
//! For `x' = T x + α b φ(x3/ε)` the rest points satisfy `x2 = 0`,
//! `x1 = -x3` and `φ(s) = ε s` with `s = x3/ε`. Besides the two outer
//! equilibria (`s = ±1/ε`) there is one inside the band. Its linearization
//! `T + (α φ'(s)/ε) e3 e3ᵀ` has a large positive eigenvalue along the layer
//! and a planar pair close to the escaping-field spectrum.

use nalgebra::Matrix3;
use serde::Serialize;

use super::fields::FastState;
use super::transition::{transition_derivative, transition_eval, TransitionKind};
use crate::error::{Error, Result};
use crate::spectrum::Root;
use crate::system::Params;

/// Relative size below which a real part counts as zero.
pub const HYPERBOLICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Linearization {
    /// Sorted by decreasing real part.
    pub eigenvalues: [Root; 3],
    pub hyperbolic: bool,
    pub is_saddle: bool,
}

impl Linearization {
    fn of(m: &Matrix3<f64>) -> Self {
        let ev = m.complex_eigenvalues();
        let mut eigenvalues: [Root; 3] = [ev[0].into(), ev[1].into(), ev[2].into()];
        eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        let scale = m.norm().max(1.0);
        let hyperbolic = eigenvalues.iter().all(|r| r.re.abs() > HYPERBOLICITY_TOL * scale);
        let positive = eigenvalues.iter().any(|r| r.re > HYPERBOLICITY_TOL * scale);
        let negative = eigenvalues.iter().any(|r| r.re < -HYPERBOLICITY_TOL * scale);
        Self { eigenvalues, hyperbolic, is_saddle: hyperbolic && positive && negative }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedEquilibrium {
    /// Blown-up location `(x1, x2, x3/ε)`.
    pub state: FastState,
    /// `φ'` at the layer coordinate of the rest point.
    pub slope: f64,
    /// Linearization of the regularized field in original time.
    pub linearization: Linearization,
    /// Linearization of the rescaled form `T y + ε α b φ(y3/ε)` at the
    /// rest point of `φ(s) = s`; degenerate exactly when `φ'(s) = 1`.
    pub normal_form: Linearization,
}

/// Root of `g` on `[-1, 1]` with `g(-1) < 0 < g(1)`, zero checked first.
fn bisect_layer(g: impl Fn(f64) -> f64) -> f64 {
    if g(0.0) == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (-1.0, 1.0);
    while hi - lo > 4.0 * f64::EPSILON {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn forced_matrix(p: &Params, layer_gain: f64) -> Matrix3<f64> {
    let mut m = p.system_matrix();
    m[(2, 2)] += layer_gain;
    m
}

pub fn regularized_equilibrium(p: &Params, eps: f64, k: TransitionKind) -> Result<RegularizedEquilibrium> {
    if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in ]0, 1[, got {eps}")));
    }
    // φ(s) - ε s changes sign on [-1, 1] because ε < 1
    let s = bisect_layer(|s| transition_eval(k, s) - eps * s);
    let slope = transition_derivative(k, s);
    let y1 = if s == 0.0 { 0.0 } else { -eps * s };
    let state = FastState::new(y1, 0.0, s);
    let linearization = Linearization::of(&forced_matrix(p, p.alpha * slope / eps));

    // interior solution of φ(s) = s; both sides agree at ±1, so only an
    // interior sign change (or the odd root 0) is usable
    let s_nf = if transition_eval(k, 0.0) == 0.0 {
        0.0
    } else {
        let g = |s: f64| transition_eval(k, s) - s;
        let grid: Vec<f64> = (1..200).map(|i| -1.0 + f64::from(i) / 100.0).collect();
        grid.windows(2)
            .find(|w| g(w[0]) * g(w[1]) <= 0.0)
            .map(|w| {
                let (mut lo, mut hi) = (w[0], w[1]);
                let up = g(lo) < 0.0;
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if (g(mid) < 0.0) == up {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .unwrap_or(s)
    };
    let normal_form = Linearization::of(&forced_matrix(p, p.alpha * transition_derivative(k, s_nf)));

    Ok(RegularizedEquilibrium { state, slope, linearization, normal_form })
}
