//! Scalar abstraction: all numerics are generic over a floating type.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumCast, Signed};
use std::fmt;
use std::iter::Sum;

/// Floating scalar the whole crate is generic over: f32 or f64.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumCast
    + Signed
    + Sum
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + rustfft::FftNum
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from f64 literals and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate scalar.
pub type C<R> = Complex<R>;

/// Builds a complex value from f64 parts.
pub fn c64<R: Real>(re: f64, im: f64) -> C<R> {
    Complex::new(R::of(re), R::of(im))
}

/// Unit-modulus complex number `e^{i t}`.
pub fn unit<R: Real>(t: R) -> C<R> {
    let (s, c) = t.sin_cos();
    Complex::new(c, s)
}

/// Angular distance on the circle, reduced to `[0, pi]`.
pub fn angle_dist<R: Real>(a: R, b: R) -> R {
    let tau = R::TAU();
    let mut d = (a - b) % tau;
    if d < R::zero() {
        d = d + tau;
    }
    if d > R::PI() {
        tau - d
    } else {
        d
    }
}

/// Reduces an angle to `[0, 2*pi)`.
pub fn wrap_angle<R: Real>(t: R) -> R {
    let tau = R::TAU();
    let mut a = t % tau;
    if a < R::zero() {
        a = a + tau;
    }
    // `% tau` can return tau itself after the negative fixup when t is a
    // tiny negative number; clamp that back to zero.
    if a >= tau {
        a = a - tau;
    }
    a
}
