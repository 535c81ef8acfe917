//! Dynamics on the switching plane `H0 = {x3 = 0}`.
//!
//! With `h(x) = x3` the first Lie derivatives are `L_{f̄q} h = α(x2 + q)`,
//! so the plane splits into the sewing region `|x2| > 1`, the escaping
//! region `|x2| < 1` and the two fold lines `x2 = ±1`. There is no sliding
//! region.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Root;
use crate::system::{half_space_field, HalfSpace, Params, State};

/// Relative tolerance for deciding that a point sits on a fold line or at a cusp.
pub const LINE_TOL: f64 = 1e-12;

/// Region or singularity type of a point of the switching plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceTag {
    Sewing,
    Escaping,
    FoldHyperbolic(HalfSpace),
    FoldElliptic(HalfSpace),
    Cusp(HalfSpace),
    BoundaryDegenerate,
}

impl SurfaceTag {
    pub fn is_sewing(self) -> bool {
        self == SurfaceTag::Sewing
    }

    /// Image of the tag under `x ↦ -x`.
    pub fn reflected(self) -> SurfaceTag {
        match self {
            SurfaceTag::FoldHyperbolic(q) => SurfaceTag::FoldHyperbolic(q.opposite()),
            SurfaceTag::FoldElliptic(q) => SurfaceTag::FoldElliptic(q.opposite()),
            SurfaceTag::Cusp(q) => SurfaceTag::Cusp(q.opposite()),
            other => other,
        }
    }

    pub fn label(self) -> String {
        match self {
            SurfaceTag::Sewing => "sewing".into(),
            SurfaceTag::Escaping => "escaping".into(),
            SurfaceTag::FoldHyperbolic(q) => format!("fold-hyperbolic({q})"),
            SurfaceTag::FoldElliptic(q) => format!("fold-elliptic({q})"),
            SurfaceTag::Cusp(q) => format!("cusp({q})"),
            SurfaceTag::BoundaryDegenerate => "degenerate".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceClassification {
    pub tag: SurfaceTag,
    pub lie1_plus: f64,
    pub lie1_minus: f64,
}

/// Coordinates `(x1, x2)` inside the plane `x3 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x1: f64,
    pub x2: f64,
}

impl PlanarPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn lift(self) -> State {
        State::new(self.x1, self.x2, 0.0)
    }
}

fn require_on_plane(x: State) -> Result<()> {
    if x.x3 != 0.0 {
        return Err(Error::Domain(format!("point {x} is not on the plane x3 = 0")));
    }
    Ok(())
}

/// `L^k_{f̄q} h` for `k ∈ {1, 2, 3}`, evaluated with the general formulas
/// (on the fold line and at the cusp they reduce to `α(x1+q)` and `qαβ`).
pub fn lie_derivative(x: State, q: HalfSpace, p: &Params, order: u8) -> Result<f64> {
    require_on_plane(x)?;
    let a = p.alpha;
    let v = half_space_field(x, q, p);
    // L h = x3' ; L² h = α(x2' - x3') ; L³ h = α(x1' - x2' + x3') - α²(x2' - x3')
    match order {
        1 => Ok(a * (x.x2 + q.sign())),
        2 => Ok(a * (v[1] - v[2])),
        3 => Ok(a * (v[0] - v[1] + v[2]) - a * a * (v[1] - v[2])),
        _ => Err(Error::Domain(format!("Lie derivative order must be 1, 2 or 3, got {order}"))),
    }
}

pub fn classify_point(x: State, p: &Params) -> Result<SurfaceClassification> {
    require_on_plane(x)?;
    let lie1_plus = p.alpha * (x.x2 + 1.0);
    let lie1_minus = p.alpha * (x.x2 - 1.0);
    Ok(SurfaceClassification { tag: classify_planar(PlanarPoint::new(x.x1, x.x2)), lie1_plus, lie1_minus })
}

/// Tag of a planar point; the Lie-derivative signs do not depend on `α > 0`.
pub fn classify_planar(pt: PlanarPoint) -> SurfaceTag {
    let PlanarPoint { x1, x2 } = pt;
    if !(x1.is_finite() && x2.is_finite()) {
        return SurfaceTag::BoundaryDegenerate;
    }
    let off_line = x2.abs() - 1.0;
    if off_line.abs() <= LINE_TOL * x2.abs().max(1.0) {
        // fold line of f_q is x2 = -q
        let q = if x2 < 0.0 { HalfSpace::PLUS } else { HalfSpace::MINUS };
        let s = q.sign() * x1 + 1.0;
        if s.abs() <= LINE_TOL * x1.abs().max(1.0) {
            SurfaceTag::Cusp(q)
        } else if s > 0.0 {
            SurfaceTag::FoldHyperbolic(q)
        } else {
            SurfaceTag::FoldElliptic(q)
        }
    } else if off_line > 0.0 {
        SurfaceTag::Sewing
    } else {
        SurfaceTag::Escaping
    }
}

/// `L_{f̄-} h < L_{f̄+} h`, i.e. `α(x2-1) < α(x2+1)`: never a sliding point.
pub fn no_sliding_check(x2: f64, p: &Params) -> bool {
    p.alpha * (x2 - 1.0) < p.alpha * (x2 + 1.0)
}

/// Convex weight `μ = (1 + q x2)/2` of the Filippov combination.
pub fn filippov_mu(x2: f64, q: HalfSpace) -> Result<f64> {
    if x2.is_nan() || x2.abs() > 1.0 {
        return Err(Error::Domain(format!("|x2| = {} exceeds 1: outside the escaping closure", x2.abs())));
    }
    Ok(0.5 * (1.0 + q.sign() * x2))
}

/// `μ f̄_{-q} + (1-μ) f̄_q` at a planar point; tangent to the plane.
pub fn filippov_combination(pt: PlanarPoint, q: HalfSpace, p: &Params) -> Result<Vector3<f64>> {
    let mu = filippov_mu(pt.x2, q)?;
    let x = pt.lift();
    Ok(half_space_field(x, q.opposite(), p) * mu + half_space_field(x, q, p) * (1.0 - mu))
}

/// Escaping field `(-β x2, x1 - x2)` on the open region `|x2| < 1`, in forward time.
pub fn escaping_field(pt: PlanarPoint, p: &Params) -> Result<Vector2<f64>> {
    if pt.x2.is_nan() || pt.x2.abs() >= 1.0 {
        return Err(Error::Domain(format!("({}, {}) is outside the escaping region", pt.x1, pt.x2)));
    }
    Ok(escaping_matrix(p) * Vector2::new(pt.x1, pt.x2))
}

/// The escaping field is linear; this is its matrix.
pub fn escaping_matrix(p: &Params) -> Matrix2<f64> {
    Matrix2::new(0.0, -p.beta, 1.0, -1.0)
}

/// Eigenvalues `-1/2 ± sqrt(1/4 - β)` of the escaping field, larger real part first.
pub fn escaping_equilibrium_spectrum(p: &Params) -> [Root; 2] {
    let disc = 0.25 - p.beta;
    if disc < 0.0 {
        let im = (-disc).sqrt();
        [Root { re: -0.5, im }, Root { re: -0.5, im: -im }]
    } else {
        let s = disc.sqrt();
        [Root { re: -0.5 + s, im: 0.0 }, Root { re: -0.5 - s, im: 0.0 }]
    }
}

/// Cusp point `x^c_q = -q(1, 1, 0)` of `f_q`.
pub fn cusp_point(q: HalfSpace) -> State {
    State::new(1.0, 1.0, 0.0) * (-q.sign())
}

/// Rows `grad h`, `grad L h`, `grad L² h` (the same for both `f̄_q`).
///
/// At the cusps these are linearly independent, with determinant `-α²`.
pub fn contact_gradients(p: &Params) -> Matrix3<f64> {
    let a = p.alpha;
    Matrix3::new(
        0.0,
        0.0,
        1.0, //
        0.0,
        a,
        -a, //
        a,
        -a * (1.0 + a),
        a * (1.0 + a),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p55() -> Params {
        Params::new(5.0, 5.0).unwrap()
    }

    #[test]
    fn lie_derivative_examples() {
        let p = p55();
        assert_eq!(lie_derivative(State::new(0.0, 2.0, 0.0), HalfSpace::PLUS, &p, 1).unwrap(), 15.0);
        assert_eq!(lie_derivative(State::new(0.0, -1.0, 0.0), HalfSpace::PLUS, &p, 1).unwrap(), 0.0);
        let cusp = State::new(-1.0, -1.0, 0.0);
        assert_eq!(lie_derivative(cusp, HalfSpace::PLUS, &p, 3).unwrap(), 25.0);
        assert_eq!(lie_derivative(cusp, HalfSpace::PLUS, &p, 2).unwrap(), 0.0);
        // on the fold line x2 = -q the second derivative is α(x1 + q)
        for x1 in [-3.0, -0.5, 0.0, 2.0] {
            let x = State::new(x1, -1.0, 0.0);
            let l2 = lie_derivative(x, HalfSpace::PLUS, &p, 2).unwrap();
            assert!((l2 - 5.0 * (x1 + 1.0)).abs() < 1e-12);
        }
        assert!(lie_derivative(State::new(0.0, 0.0, 1.0), HalfSpace::PLUS, &p, 1).is_err());
        assert!(lie_derivative(State::ORIGIN, HalfSpace::PLUS, &p, 4).is_err());
    }

    #[test]
    fn classification_table() {
        let p = p55();
        let tag = |x1, x2| classify_point(State::new(x1, x2, 0.0), &p).unwrap().tag;
        assert_eq!(tag(0.0, 2.0), SurfaceTag::Sewing);
        assert_eq!(tag(0.0, 0.5), SurfaceTag::Escaping);
        assert_eq!(tag(-1.0, -1.0), SurfaceTag::Cusp(HalfSpace::PLUS));
        assert_eq!(tag(0.0, -1.0), SurfaceTag::FoldHyperbolic(HalfSpace::PLUS));
        assert_eq!(tag(-2.0, -1.0), SurfaceTag::FoldElliptic(HalfSpace::PLUS));
        assert_eq!(tag(1.0, 1.0), SurfaceTag::Cusp(HalfSpace::MINUS));
        assert_eq!(tag(2.0, 1.0), SurfaceTag::FoldElliptic(HalfSpace::MINUS));
        assert!(classify_point(State::new(0.0, 2.0, 1.0), &p).is_err());
    }

    #[test]
    fn classification_matches_lie_signs() {
        let p = p55();
        let c = classify_point(State::new(0.3, 1.7, 0.0), &p).unwrap();
        assert!(c.lie1_plus * c.lie1_minus > 0.0);
        let c = classify_point(State::new(0.3, -0.2, 0.0), &p).unwrap();
        assert!(c.lie1_plus > 0.0 && c.lie1_minus < 0.0);
    }

    #[test]
    fn no_sliding() {
        assert!(no_sliding_check(0.0, &p55()));
        assert!(no_sliding_check(10.0, &Params::new(1.0, 1.0).unwrap()));
    }

    #[test]
    fn mu_values() {
        assert_eq!(filippov_mu(0.0, HalfSpace::PLUS).unwrap(), 0.5);
        assert_eq!(filippov_mu(1.0, HalfSpace::PLUS).unwrap(), 1.0);
        assert_eq!(filippov_mu(-1.0, HalfSpace::PLUS).unwrap(), 0.0);
        assert!(filippov_mu(1.5, HalfSpace::PLUS).is_err());
    }

    #[test]
    fn escaping_field_examples() {
        let p = p55();
        assert_eq!(escaping_field(PlanarPoint::new(1.0, 0.0), &p).unwrap(), Vector2::new(0.0, 1.0));
        assert_eq!(escaping_field(PlanarPoint::new(0.0, 0.0), &p).unwrap(), Vector2::zeros());
        assert!(escaping_field(PlanarPoint::new(0.0, 1.0), &p).is_err());

        let pt = PlanarPoint::new(0.3, 0.2);
        let direct = escaping_field(pt, &p).unwrap();
        assert!((direct - Vector2::new(-1.0, 0.1)).norm() < 1e-15);
        for q in HalfSpace::both() {
            let comb = filippov_combination(pt, q, &p).unwrap();
            assert!((comb[0] - direct[0]).abs() < 1e-14);
            assert!((comb[1] - direct[1]).abs() < 1e-14);
            assert!(comb[2].abs() < 1e-14);
        }
    }

    #[test]
    fn escaping_spectrum() {
        let s = escaping_equilibrium_spectrum(&Params::new(1.0, 5.0).unwrap());
        assert_eq!(s[0].re, -0.5);
        assert!((s[0].im - 19f64.sqrt() / 2.0).abs() < 1e-15);
        let s = escaping_equilibrium_spectrum(&Params::new(1.0, 0.25).unwrap());
        assert_eq!((s[0].re, s[1].re), (-0.5, -0.5));
        let s = escaping_equilibrium_spectrum(&Params::new(1.0, 0.1).unwrap());
        assert!((s[0].re + 0.1127).abs() < 1e-4 && (s[1].re + 0.8873).abs() < 1e-4);
    }

    #[test]
    fn cusp_geometry() {
        for a in [0.2, 1.0, 5.0] {
            let p = Params::new(a, 3.0).unwrap();
            for q in HalfSpace::both() {
                assert!((contact_gradients(&p).determinant() + a * a).abs() < 1e-12);
                let c = cusp_point(q);
                assert_eq!(lie_derivative(c, q, &p, 1).unwrap(), 0.0);
                assert_eq!(lie_derivative(c, q, &p, 2).unwrap(), 0.0);
                // the opposite field crosses the plane transversally there
                let l = lie_derivative(c, q.opposite(), &p, 1).unwrap();
                assert!((q.sign() * l + 2.0 * a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn escaping_field_transverse_at_fold_points() {
        let p = p55();
        for q in HalfSpace::both() {
            for x1 in [-4.0, -2.0, -0.5, 0.0, 0.7, 3.0] {
                if (q.sign() * x1 + 1.0).abs() < 1e-9 {
                    continue;
                }
                let x2 = -q.sign();
                // normal to ∂E = {x2 = ±1} is e2
                let normal = x1 - x2;
                assert!(normal.abs() > 1e-9);
                assert!(lie_derivative(State::new(x1, x2, 0.0), q.opposite(), &p, 1).unwrap() != 0.0);
            }
        }
    }
}
