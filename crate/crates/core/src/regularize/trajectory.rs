//! Direct RK4 integration of the regularized field in original coordinates.

use nalgebra::Vector3;

use super::transition::{transition_eval, TransitionKind};
use crate::error::{Error, Result};
use crate::system::{Params, State};

/// `T x + α b φ(x3/ε)`.
pub fn band_field(x: State, p: &Params, eps: f64, k: TransitionKind) -> Vector3<f64> {
    Vector3::new(-p.beta * x.x2, x.x1 - x.x2 + x.x3, p.alpha * (x.x2 - x.x3 + transition_eval(k, x.x3 / eps)))
}

/// Fixed-step RK4 of [`band_field`] up to `t_max`, keeping every
/// `sample_every`-th state. The band is stiff: the step must resolve the
/// layer rate `α φ' / ε`.
pub fn integrate_regularized(
    x0: State,
    p: &Params,
    eps: f64,
    k: TransitionKind,
    step: f64,
    t_max: f64,
    sample_every: usize,
) -> Result<Vec<(f64, State)>> {
    for (name, v) in [("eps", eps), ("step", step), ("t_max", t_max)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
        }
    }
    if sample_every == 0 {
        return Err(Error::InvalidConfig("sample_every must be at least 1".into()));
    }
    let f = |v: &Vector3<f64>| band_field(State::from_vector(v), p, eps, k);
    let n = (t_max / step).ceil() as usize;
    let mut out = vec![(0.0, x0)];
    let mut y = x0.to_vector();
    for i in 1..=n {
        let h = if i == n { t_max - (n - 1) as f64 * step } else { step };
        let k1 = f(&y);
        let k2 = f(&(y + k1 * (0.5 * h)));
        let k3 = f(&(y + k2 * (0.5 * h)));
        let k4 = f(&(y + k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!("integration blew up at t = {}; reduce the step", i as f64 * step)));
        }
        if i % sample_every == 0 || i == n {
            let t = if i == n { t_max } else { i as f64 * step };
            out.push((t, State::from_vector(&y)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{integrate, IntegratorConfig};

    #[test]
    fn outside_band_matches_relay_flow() {
        let p = Params::new(5.0, 5.0).unwrap();
        let x0 = State::new(0.0, 2.0, 1.0);
        let traj = integrate_regularized(x0, &p, 1e-3, TransitionKind::CubicC1, 1e-4, 0.05, 100).unwrap();
        let exact = integrate(x0, &p, &IntegratorConfig { t_max: 0.05, ..Default::default() }).unwrap();
        let (t, x) = *traj.last().unwrap();
        assert_eq!(t, 0.05);
        assert!((x - exact.last_state().unwrap()).norm() < 1e-10);
    }

    #[test]
    fn tracks_the_cycle_amplitude() {
        let p = Params::new(5.0, 5.0).unwrap();
        let traj =
            integrate_regularized(State::new(10.0, 10.0, 0.0), &p, 1e-3, TransitionKind::CubicC1, 1e-4, 60.0, 100)
                .unwrap();
        let peak = |samples: &[(f64, State)], from: f64| {
            samples.iter().filter(|s| s.0 > from).map(|s| s.1.x1).fold(f64::MIN, f64::max)
        };
        let relay =
            integrate(State::new(10.0, 10.0, 1e-9), &p, &IntegratorConfig { t_max: 60.0, ..Default::default() })
                .unwrap();
        let (a, b) = (peak(&traj, 40.0), peak(&relay.samples, 40.0));
        assert!(((a - b) / b).abs() < 0.01, "{a} vs {b}");
    }
}
