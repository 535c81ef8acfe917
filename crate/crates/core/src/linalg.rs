//! Small dense helpers for the 3×3 affine flows.

use nalgebra::Matrix3;

const TAYLOR_DEGREE: u32 = 18;

/// Matrix exponential by scaling and squaring.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// exponential of the scaled matrix is summed as a degree-18 Taylor
/// polynomial (truncation error below 1e-22), and the result is squared
/// `s` times.
pub fn expm(a: &Matrix3<f64>) -> Matrix3<f64> {
    let norm = one_norm(a);
    let mut squarings = 0;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as i32;
    }
    let scaled = a * 0.5f64.powi(squarings);

    // Horner: I + A(I + A/2(I + A/3(...)))
    let id = Matrix3::identity();
    let mut e = id;
    for k in (1..=TAYLOR_DEGREE).rev() {
        e = id + scaled * e / f64::from(k);
    }
    for _ in 0..squarings {
        e = e * e;
    }
    e
}

pub fn one_norm(a: &Matrix3<f64>) -> f64 {
    (0..3).map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}
