//! Thin FFT helpers shared by boundary sampling and disk quadrature.

use crate::scalar::{unit, Real, C};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Plans an unnormalized inverse DFT of the given length.
pub fn plan_inverse<R: Real>(len: usize) -> Arc<dyn Fft<R>> {
    FftPlanner::<R>::new().plan_fft_inverse(len)
}

/// Evaluates `sum_n a_n z^n` at the `m` points `radius * e^{i(2*pi*k/m + offset)}`.
///
/// Folds coefficients modulo `m` with the radius and offset twist absorbed,
/// then applies one inverse DFT: `f(r e^{i(theta_k)}) = sum_j c_j e^{2*pi*i jk/m}`.
pub fn eval_on_ring<R: Real>(
    coeffs: &[C<R>],
    radius: R,
    offset: R,
    plan: &Arc<dyn Fft<R>>,
) -> Vec<C<R>> {
    let m = plan.len();
    let mut bins = vec![C::<R>::new(R::zero(), R::zero()); m];
    let mut rn = R::one();
    for (n, a) in coeffs.iter().enumerate() {
        let twist = unit(offset * R::of(n as f64)) * rn;
        bins[n % m] = bins[n % m] + *a * twist;
        rn = rn * radius;
    }
    plan.process(&mut bins);
    bins
}
