//! Characteristic-polynomial analysis of the linear part `T`.
//!
//! `p_T(λ) = -(λ³ + (1+α)λ² + βλ + αβ)` always has a real root in the open
//! interval `]-(1+α), -α[`, because `p_T(-α) = -α²` and `p_T(-(1+α)) = β`.
//! When the remaining two roots are complex their real part relative to
//! that real root decides how the half-space flow maps the entry part of
//! the layer faces onto the exit part; see [`GeometryClass`].

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::Params;

/// Width at which the bracketed real-root search stops.
pub const ROOT_BRACKET_WIDTH: f64 = 1e-12;

/// Tolerance on `|ratio - 1|` for the measure-zero bijection case.
pub const BIJECTION_TOL: f64 = 1e-12;

/// How the flow of one half-space maps the entry face onto the exit face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeometryClass {
    /// `Re(λ12)/λ* > 1`: only a strict subdomain of the entry face reaches the exit face.
    StrictSubdomain,
    /// `Re(λ12)/λ* = 1`: the transition is a bijection.
    Bijection,
    /// `0 < Re(λ12)/λ* < 1`: the entry face maps strictly into the exit face.
    Contracting,
    /// The cubic has three real roots.
    AllReal,
}

impl GeometryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GeometryClass::StrictSubdomain => "StrictSubdomain",
            GeometryClass::Bijection => "Bijection",
            GeometryClass::Contracting => "Contracting",
            GeometryClass::AllReal => "AllReal",
        }
    }
}

impl std::fmt::Display for GeometryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A root of the quadratic factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for Root {
    fn from(c: Complex<f64>) -> Self {
        Root { re: c.re, im: c.im }
    }
}

impl From<Root> for Complex<f64> {
    fn from(r: Root) -> Self {
        Complex::new(r.re, r.im)
    }
}

/// Monic quadratic `λ² + b λ + c` left after dividing out the real root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFactor {
    pub quad_b: f64,
    pub quad_c: f64,
    pub roots: [Root; 2],
}

impl QuadraticFactor {
    pub fn is_complex(&self) -> bool {
        self.roots[0].im != 0.0
    }
}

/// Everything the spectrum module knows about one parameter pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: Params,
    pub lambda_star: f64,
    pub quad_b: f64,
    pub quad_c: f64,
    pub complex_pair: [Root; 2],
    /// `Re(λ12)/λ*`, present when the pair is non-real.
    pub ratio: Option<f64>,
    pub geometry_class: GeometryClass,
    pub routh: bool,
    pub single_root: bool,
    pub in_theorem_region: bool,
    pub triple_root: bool,
    /// `|quad_c + αβ/λ*|`: agreement of the two forms of the constant term.
    pub constant_term_mismatch: f64,
}

impl SpectrumReport {
    pub fn compute(p: &Params) -> Self {
        let lambda_star = real_root(p, 1e-12);
        let q = quadratic_factor(p, lambda_star);
        let geometry_class = geometry_class(p);
        let ratio = q.is_complex().then(|| q.roots[0].re / lambda_star);
        SpectrumReport {
            params: *p,
            lambda_star,
            quad_b: q.quad_b,
            quad_c: q.quad_c,
            complex_pair: q.roots,
            ratio,
            geometry_class,
            routh: routh_stable(p),
            single_root: single_real_root(p),
            in_theorem_region: theorem_region(p),
            triple_root: is_triple_root(p),
            constant_term_mismatch: (q.quad_c + p.alpha * p.beta / lambda_star).abs(),
        }
    }
}

/// `p_T(λ) = -[λ³ + (1+α)λ² + βλ + αβ]`.
pub fn char_poly_eval(lambda: f64, p: &Params) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    -(((lambda + (1.0 + a)) * lambda + b) * lambda + a * b)
}

/// `p_T` and its first two derivatives at `lambda`.
pub fn char_poly_derivatives(lambda: f64, p: &Params) -> [f64; 3] {
    let (a, b) = (p.alpha, p.beta);
    [char_poly_eval(lambda, p), -((3.0 * lambda + 2.0 * (1.0 + a)) * lambda + b), -(6.0 * lambda + 2.0 * (1.0 + a))]
}

/// The real root of `p_T` inside `]-(1+α), -α[`.
///
/// Bisection on the analytic bracket, accelerated by a secant step whenever
/// the secant point falls well inside the bracket and the previous step
/// shrank it at least by half. Stops once the bracket is narrower than
/// [`ROOT_BRACKET_WIDTH`] (scaled by the magnitude of the root) or
/// `|p_T| <= tol`, whichever comes last.
pub fn real_root(p: &Params, tol: f64) -> f64 {
    let f = |l: f64| char_poly_eval(l, p);
    // p_T(lo) = β > 0, p_T(hi) = -α² < 0
    let (mut lo, mut hi) = (-(1.0 + p.alpha), -p.alpha);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    let width_tol = ROOT_BRACKET_WIDTH * hi.abs().max(1.0);
    let mut last_width = hi - lo;
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };

    for _ in 0..400 {
        let width = hi - lo;
        if width <= width_tol && best.1.abs() <= tol {
            break;
        }
        if width <= f64::EPSILON * hi.abs() {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let secant = hi - fhi * (hi - lo) / (fhi - flo);
        let margin = 0.05 * width;
        let x = if width <= 0.5 * last_width && secant > lo + margin && secant < hi - margin { secant } else { mid };
        last_width = width;
        let fx = f(x);
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 {
            return x;
        }
        if fx > 0.0 {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    best.0
}

/// Divide the real root out of the cubic.
///
/// The constant term is `β + (1+α+λ*)λ*`, which equals `-αβ/λ*` whenever
/// `λ*` is a root.
pub fn quadratic_factor(p: &Params, lambda_star: f64) -> QuadraticFactor {
    let quad_b = 1.0 + p.alpha + lambda_star;
    let quad_c = p.beta + quad_b * lambda_star;
    QuadraticFactor { quad_b, quad_c, roots: quadratic_roots(quad_b, quad_c) }
}

fn quadratic_roots(b: f64, c: f64) -> [Root; 2] {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [Root { re, im }, Root { re, im: -im }]
    } else {
        // cancellation-free form
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return [Root { re: 0.0, im: 0.0 }, Root { re: -b, im: 0.0 }];
        }
        let (r1, r2) = (q, c / q);
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        [Root { re: hi, im: 0.0 }, Root { re: lo, im: 0.0 }]
    }
}

/// Routh–Hurwitz test for `λ³ + (1+α)λ² + βλ + αβ`.
pub fn routh_stable(p: &Params) -> bool {
    let (a2, a1, a0) = (1.0 + p.alpha, p.beta, p.alpha * p.beta);
    a2 > 0.0 && a0 > 0.0 && a2 * a1 > a0
}

/// Real critical points `-(α+1)/3 ± sqrt(((α+1)/3)² - β/3)` of `p_T`, larger first.
pub fn critical_points(p: &Params) -> Option<(f64, f64)> {
    let m = (p.alpha + 1.0) / 3.0;
    let radicand = m * m - p.beta / 3.0;
    if radicand < 0.0 {
        return None;
    }
    let s = radicand.sqrt();
    Some((-m + s, -m - s))
}

/// `β(1+20α) < 4[α(1+α)³ + β(β+2α²)]`: the cubic has exactly one real root.
pub fn single_real_root(p: &Params) -> bool {
    let (a, b) = (p.alpha, p.beta);
    b * (1.0 + 20.0 * a) < 4.0 * (a * (1.0 + a).powi(3) + b * (b + 2.0 * a * a))
}

/// `β(λ) = -λ² (1+α+λ)/(α+λ)`, strictly increasing on `]-(1+α), -α[`.
pub fn beta_of_lambda(lambda: f64, alpha: f64) -> Result<f64> {
    if !(lambda > -(1.0 + alpha) && lambda < -alpha) {
        return Err(Error::Domain(format!("lambda = {lambda} outside ]-(1+alpha), -alpha[ for alpha = {alpha}")));
    }
    Ok(-lambda * lambda * (1.0 + alpha + lambda) / (alpha + lambda))
}

/// `Re(λ12)/λ* = ((1+α)/(-λ*) - 1)/2`.
pub fn real_part_ratio(p: &Params, lambda_star: f64) -> f64 {
    0.5 * ((1.0 + p.alpha) / (-lambda_star) - 1.0)
}

pub fn geometry_class(p: &Params) -> GeometryClass {
    if !single_real_root(p) {
        return GeometryClass::AllReal;
    }
    let ratio = real_part_ratio(p, real_root(p, 1e-12));
    if (ratio - 1.0).abs() <= BIJECTION_TOL {
        GeometryClass::Bijection
    } else if ratio > 1.0 {
        GeometryClass::StrictSubdomain
    } else {
        GeometryClass::Contracting
    }
}

/// `2(1+α)³ / (9(1-2α))`, the value of `β(λ)` at `λ = -(1+α)/3`.
pub(crate) fn branch_bound(alpha: f64) -> f64 {
    2.0 * (1.0 + alpha).powi(3) / (9.0 * (1.0 - 2.0 * alpha))
}

/// Parameter region in which a stable limit cycle is guaranteed.
///
/// The conditions are sufficient only: outside the region a cycle is
/// "not guaranteed", not ruled out.
pub fn theorem_region(p: &Params) -> bool {
    let a = p.alpha;
    single_real_root(p) && (a >= 0.5 || (a > 0.125 && a < 0.5 && p.beta < branch_bound(a)))
}

/// `(1/8, 27/64)` and nothing else gives a triple root; detected by both the
/// cubic and the derivative discriminants vanishing.
pub fn is_triple_root(p: &Params) -> bool {
    let (a, b) = (p.alpha, p.beta);
    let m = (a + 1.0) / 3.0;
    let crit = m * m - b / 3.0;
    let lhs = b * (1.0 + 20.0 * a);
    let rhs = 4.0 * (a * (1.0 + a).powi(3) + b * (b + 2.0 * a * a));
    let scale = lhs.abs().max(rhs.abs()).max(1e-300);
    crit.abs() <= 1e-12 * m * m && (rhs - lhs).abs() <= 1e-12 * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    /// Plain bisection, used as the oracle for `real_root`.
    fn bisect_oracle(par: &Params) -> f64 {
        let (mut lo, mut hi) = (-(1.0 + par.alpha), -par.alpha);
        while hi - lo > 1e-13 {
            let m = 0.5 * (lo + hi);
            if char_poly_eval(m, par) > 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn poly_bracket_values() {
        for (a, b) in [(5.0, 5.0), (0.25, 5.0), (1.7, 0.3)] {
            let par = p(a, b);
            assert!((char_poly_eval(-a, &par) + a * a).abs() < 1e-12);
            assert!((char_poly_eval(-(1.0 + a), &par) - b).abs() < 1e-12);
        }
        assert_eq!(char_poly_eval(-0.375, &p(0.125, 27.0 / 64.0)), 0.0);
    }

    #[test]
    fn real_root_examples() {
        let l = real_root(&p(5.0, 5.0), 1e-12);
        assert!((l - bisect_oracle(&p(5.0, 5.0))).abs() < 1e-11);
        assert!((l + 5.8734).abs() < 1e-4, "{l}");
        let l = real_root(&p(0.25, 5.0), 1e-12);
        assert!((l + 0.2637).abs() < 1e-4, "{l}");
        assert!((l - bisect_oracle(&p(0.25, 5.0))).abs() < 1e-11);
        let l = real_root(&p(0.125, 27.0 / 64.0), 1e-12);
        assert!((l + 0.375).abs() < 1e-6, "{l}");
    }

    #[test]
    fn quadratic_factor_examples() {
        let par = p(5.0, 5.0);
        let l = real_root(&par, 1e-12);
        let q = quadratic_factor(&par, l);
        assert!((q.quad_b - 0.1266).abs() < 1e-4);
        assert!((q.quad_c - 4.2564).abs() < 1e-3);
        assert!((q.quad_c + 25.0 / l).abs() < 1e-9);
        assert!((q.roots[0].re + 0.0633).abs() < 1e-4);
        assert!((q.roots[0].im.abs() - 2.0622).abs() < 1e-4);

        let par = p(0.125, 27.0 / 64.0);
        let q = quadratic_factor(&par, -0.375);
        assert_eq!((q.quad_b, q.quad_c), (0.75, 0.140625));
        assert_eq!(q.roots[0], Root { re: -0.375, im: 0.0 });
        assert_eq!(q.roots[1], Root { re: -0.375, im: 0.0 });
    }

    #[test]
    fn factorization_recovers_cubic() {
        for (a, b) in [(5.0, 5.0), (0.25, 5.0), (0.3, 0.1), (9.0, 0.2)] {
            let par = p(a, b);
            let l = real_root(&par, 1e-12);
            let q = quadratic_factor(&par, l);
            // (λ - l)(λ² + Bλ + C) = λ³ + (B - l)λ² + (C - lB)λ - lC
            let coeffs = [q.quad_b - l, q.quad_c - l * q.quad_b, -l * q.quad_c];
            let want = [1.0 + a, b, a * b];
            for (c, w) in coeffs.iter().zip(want) {
                assert!((c - w).abs() < 1e-9, "{a} {b}: {coeffs:?}");
            }
        }
    }

    #[test]
    fn routh() {
        assert!(routh_stable(&p(5.0, 5.0)));
        assert!(routh_stable(&p(0.25, 5.0)));
    }

    #[test]
    fn critical_point_examples() {
        let (c1, c2) = critical_points(&p(5.0, 5.0)).unwrap();
        assert!((c1 + 0.4725).abs() < 1e-4 && (c2 + 3.5275).abs() < 1e-4);
        assert_eq!(critical_points(&p(0.125, 27.0 / 64.0)), Some((-0.375, -0.375)));
        assert_eq!(critical_points(&p(0.1, 10.0)), None);
    }

    #[test]
    fn single_root_examples() {
        assert!(single_real_root(&p(5.0, 5.0)));
        assert!(single_real_root(&p(0.25, 5.0)));
        assert!(!single_real_root(&p(0.01, 0.05)));
    }

    #[test]
    fn beta_of_lambda_values() {
        let a: f64 = 0.25;
        let v = beta_of_lambda(-(1.0 + a) / 3.0, a).unwrap();
        assert!((v - 2.0 * (1.0 + a).powi(3) / (9.0 * (1.0 - 2.0 * a))).abs() < 1e-12);
        assert!((v - 0.8681).abs() < 1e-4);
        assert!(beta_of_lambda(-a, a).is_err());
        assert!(beta_of_lambda(-2.0, a).is_err());
    }

    #[test]
    fn geometry_examples() {
        assert_eq!(geometry_class(&p(5.0, 5.0)), GeometryClass::Contracting);
        let l = real_root(&p(5.0, 5.0), 1e-12);
        assert!((real_part_ratio(&p(5.0, 5.0), l) - 0.01078).abs() < 1e-4);
        assert_eq!(geometry_class(&p(0.25, 5.0)), GeometryClass::StrictSubdomain);
        let l = real_root(&p(0.25, 5.0), 1e-12);
        assert!((real_part_ratio(&p(0.25, 5.0), l) - 1.87).abs() < 1e-2);
        assert_eq!(geometry_class(&p(0.125, 27.0 / 64.0)), GeometryClass::AllReal);
    }

    #[test]
    fn bijection_on_the_curve() {
        // On β = β(-(1+α)/3) the real root is exactly -(1+α)/3 and the ratio is 1.
        let a = 0.25;
        let b = branch_bound(a);
        let par = p(a, b);
        let l = real_root(&par, 1e-14);
        assert!((l + (1.0 + a) / 3.0).abs() < 1e-10);
        assert!((real_part_ratio(&par, l) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn theorem_examples() {
        assert!(theorem_region(&p(5.0, 5.0)));
        assert!(!theorem_region(&p(0.25, 5.0)));
        assert!(theorem_region(&p(0.25, 0.5)));
        for b in [0.01, 0.3, 1.0, 10.0] {
            assert!(!theorem_region(&p(0.05, b)));
        }
    }

    #[test]
    fn triple_root_detection() {
        assert!(is_triple_root(&p(0.125, 27.0 / 64.0)));
        assert!(!is_triple_root(&p(5.0, 5.0)));
        let r = SpectrumReport::compute(&p(0.125, 27.0 / 64.0));
        assert!(r.triple_root && r.ratio.is_none());
    }

    #[test]
    fn report_is_consistent() {
        let r = SpectrumReport::compute(&p(5.0, 5.0));
        assert_eq!(r.geometry_class, GeometryClass::Contracting);
        assert!(r.in_theorem_region && r.routh && r.single_root);
        assert!(r.constant_term_mismatch < 1e-9);
        assert!(r.ratio.unwrap() > 0.0 && r.ratio.unwrap() < 1.0);
    }
}
