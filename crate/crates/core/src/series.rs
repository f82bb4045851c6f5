//! Truncated power series: the working representation of analytic functions
//! on the unit disk.

use crate::error::{CoreError, Result};
use crate::fft;
use crate::scalar::{c64, Real, C};

/// Finite Taylor expansion `sum_{n<=N} a_n z^n` around 0.
///
/// Coefficient index n holds the n-th Taylor coefficient; the vector is never
/// empty. Values are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries<R: Real> {
    coeffs: Vec<C<R>>,
}

impl<R: Real> TaylorSeries<R> {
    pub fn new(coeffs: Vec<C<R>>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![C::new(R::zero(), R::zero())])
    }

    pub fn one() -> Self {
        Self::new(vec![C::new(R::one(), R::zero())])
    }

    /// The monomial `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![C::new(R::zero(), R::zero()); n + 1];
        coeffs[n] = C::new(R::one(), R::zero());
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> C<R> {
        self.coeffs
            .get(n)
            .copied()
            .unwrap_or_else(|| C::new(R::zero(), R::zero()))
    }

    /// Evaluation inside the disk. Rejects |z| >= 1: boundary values are only
    /// reached through radial sampling.
    pub fn evaluate(&self, z: C<R>) -> Result<C<R>> {
        if z.norm() >= R::one() {
            return Err(CoreError::Domain(format!(
                "evaluate requires |z| < 1, got |z| = {}",
                z.norm()
            )));
        }
        Ok(self.horner(z))
    }

    /// Plain Horner evaluation without the domain guard (used internally for
    /// points on or outside the circle, e.g. winding numbers).
    pub fn horner(&self, z: C<R>) -> C<R> {
        let mut acc = C::new(R::zero(), R::zero());
        for a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    /// Samples the series at `m` equispaced points of the circle of the given
    /// radius, angles `2*pi*k/m + offset`.
    pub fn values_on_ring(&self, radius: R, m: usize, offset: R) -> Vec<C<R>> {
        let plan = fft::plan_inverse::<R>(m);
        fft::eval_on_ring(&self.coeffs, radius, offset, &plan)
    }

    /// Termwise derivative: output coefficient n is `(n+1) a_{n+1}`.
    pub fn differentiate(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, a)| *a * R::of(n as f64))
            .collect();
        Self::new(coeffs)
    }

    /// Radial primitive vanishing at 0: output coefficient n+1 is `a_n/(n+1)`.
    pub fn integrate_from_zero(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C::new(R::zero(), R::zero()));
        for (n, a) in self.coeffs.iter().enumerate() {
            coeffs.push(*a / R::of((n + 1) as f64));
        }
        Self::new(coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, s: C<R>) -> Self {
        Self::new(self.coeffs.iter().map(|a| *a * s).collect())
    }

    /// Full Cauchy product (no truncation): degree adds.
    pub fn mul_full(&self, other: &Self) -> Self {
        self.mul_truncated(other, self.degree() + other.degree())
    }

    /// Cauchy product truncated at `max_degree`, via FFT convolution.
    pub fn mul_truncated(&self, other: &Self, max_degree: usize) -> Self {
        let out_len = (self.degree() + other.degree() + 1).min(max_degree + 1);
        // small products stay direct; FFT pays off from a few hundred terms
        if self.coeffs.len().min(other.coeffs.len()) <= 32 {
            let mut out = vec![C::new(R::zero(), R::zero()); out_len];
            for (i, a) in self.coeffs.iter().enumerate() {
                if i >= out_len {
                    break;
                }
                for (j, b) in other.coeffs.iter().enumerate() {
                    if i + j >= out_len {
                        break;
                    }
                    out[i + j] = out[i + j] + *a * *b;
                }
            }
            return Self::new(out);
        }
        let full = self.degree() + other.degree() + 1;
        let m = full.next_power_of_two().max(2);
        let mut fa = vec![C::new(R::zero(), R::zero()); m];
        let mut fb = vec![C::new(R::zero(), R::zero()); m];
        fa[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        fb[..other.coeffs.len()].copy_from_slice(&other.coeffs);
        let mut planner = rustfft::FftPlanner::<R>::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        fwd.process(&mut fa);
        fwd.process(&mut fb);
        for (x, y) in fa.iter_mut().zip(fb.iter()) {
            *x = *x * *y;
        }
        inv.process(&mut fa);
        let scale = R::one() / R::of(m as f64);
        Self::new(fa.into_iter().take(out_len).map(|x| x * scale).collect())
    }

    /// Largest trailing-coefficient ratio `|a_N| / max_n |a_n|`; a crude
    /// proxy for how much mass a truncation at the current degree discards.
    pub fn tail_ratio(&self) -> R {
        let max = self
            .coeffs
            .iter()
            .map(|a| a.norm())
            .fold(R::zero(), |m, x| m.max(x));
        if max == R::zero() {
            return R::zero();
        }
        self.coeffs.last().unwrap().norm() / max
    }

    /// Drops trailing zero coefficients (keeps at least one).
    pub fn trimmed(&self) -> Self {
        let mut n = self.coeffs.len();
        while n > 1 && self.coeffs[n - 1].norm() == R::zero() {
            n -= 1;
        }
        Self::new(self.coeffs[..n].to_vec())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// Normalized reproducing-kernel power `f_a(z) = ((1-|a|^2)/(1-conj(a) z)^2)^{1/p}`,
/// expanded to the requested degree. Unit H^p norm by construction; tends to 0
/// on compact subsets as |a| -> 1.
pub fn atom<R: Real>(a: C<R>, p: R, degree: usize) -> Result<TaylorSeries<R>> {
    if a.norm() >= R::one() {
        return Err(CoreError::Domain(format!(
            "atom requires |a| < 1, got {}",
            a.norm()
        )));
    }
    if p < R::one() {
        return Err(CoreError::Domain(format!("atom requires p >= 1, got {p}")));
    }
    // (1 - conj(a) z)^{-s} with s = 2/p has coefficients pochhammer(s,n)/n! conj(a)^n;
    // the principal branch is unambiguous because 1 - conj(a) z never vanishes
    // on the closed disk.
    let s = R::of(2.0) / p;
    let front = (R::one() - a.norm_sqr()).powf(R::one() / p);
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut cur = C::new(front, R::zero());
    coeffs.push(cur);
    let abar = a.conj();
    for n in 0..degree {
        let nf = R::of(n as f64);
        cur = cur * abar * ((s + nf) / (nf + R::one()));
        coeffs.push(cur);
    }
    Ok(TaylorSeries::new(coeffs))
}

/// Truncation of `log(1/(1-z)) = sum_{n>=1} z^n / n`.
pub fn log1z<R: Real>(degree: usize) -> TaylorSeries<R> {
    let mut coeffs = vec![C::new(R::zero(), R::zero()); degree + 1];
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = C::new(R::one() / R::of(n as f64), R::zero());
    }
    TaylorSeries::new(coeffs)
}
