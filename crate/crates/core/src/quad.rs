//! Area quadrature on the unit disk, normalized so that the disk has mass 1.
//!
//! Tensor rule: R-point Gauss-Legendre in the radius (the 2r Jacobian of the
//! normalized area measure absorbed into the weights) times M equispaced
//! angles. Angular nodes sit at half-cell offsets (k + 1/2) 2*pi/M so no node
//! lands exactly on the real axis, where several symbols of interest have
//! their boundary singularity.

use crate::fft;
use crate::scalar::{Real, C};
use crate::series::TaylorSeries;
use rayon::prelude::*;

/// Deterministic sum: fixed-size chunks reduced in index order, so the result
/// does not depend on the thread count.
pub fn det_sum<R: Real>(values: &[R]) -> R {
    const CHUNK: usize = 4096;
    if values.len() <= CHUNK {
        return values.iter().fold(R::zero(), |a, &x| a + x);
    }
    let partials: Vec<R> = values
        .par_chunks(CHUNK)
        .map(|c| c.iter().fold(R::zero(), |a, &x| a + x))
        .collect();
    partials.iter().fold(R::zero(), |a, &x| a + x)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Abramowitz-Stegun initial guess, then Newton on P_n
        let mut x = R::of((std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos());
        let mut dp = R::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x = x - step;
            if step.abs() <= R::epsilon() * (R::one() + x.abs()) {
                break;
            }
        }
        let w = R::of(2.0) / ((R::one() - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = R::of(k as f64);
        let p2 = ((R::of(2.0) * kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = R::of(n as f64) * (x * p1 - p0) / (x * x - R::one());
    (p1, d)
}

/// Tensor quadrature for `integral_D u dA` with `A(D) = 1`.
#[derive(Debug, Clone)]
pub struct DiskQuadrature<R: Real> {
    radii: Vec<R>,
    /// Radial weights with the 2r factor absorbed; they sum to 1.
    radial_weights: Vec<R>,
    m: usize,
}

impl<R: Real> DiskQuadrature<R> {
    /// `r_count` radial Gauss points on (0,1), `m` angular nodes (power of two).
    pub fn new(r_count: usize, m: usize) -> Self {
        assert!(m.is_power_of_two(), "angular node count must be a power of two");
        assert!(r_count >= 2);
        let (x, w) = gauss_legendre::<R>(r_count);
        let half = R::of(0.5);
        let mut radii = Vec::with_capacity(r_count);
        let mut radial_weights = Vec::with_capacity(r_count);
        for i in 0..r_count {
            let r = (x[i] + R::one()) * half;
            let w01 = w[i] * half;
            radii.push(r);
            radial_weights.push(R::of(2.0) * r * w01);
        }
        Self {
            radii,
            radial_weights,
            m,
        }
    }

    pub fn radial_count(&self) -> usize {
        self.radii.len()
    }

    pub fn angular_count(&self) -> usize {
        self.m
    }

    pub fn node_count(&self) -> usize {
        self.radii.len() * self.m
    }

    pub fn radius(&self, i: usize) -> R {
        self.radii[i]
    }

    pub fn radial_weight(&self, i: usize) -> R {
        self.radial_weights[i]
    }

    /// Angle of column k: (k + 1/2) 2*pi/m.
    pub fn angle(&self, k: usize) -> R {
        R::TAU() * (R::of(k as f64) + R::of(0.5)) / R::of(self.m as f64)
    }

    pub fn angular_offset(&self) -> R {
        R::PI() / R::of(self.m as f64)
    }

    /// Integrates a scalar field given by its values at the grid nodes,
    /// ring-major layout (`values[i * m + k]`).
    pub fn integrate(&self, values: &[R]) -> R {
        assert_eq!(values.len(), self.node_count());
        let m_inv = R::one() / R::of(self.m as f64);
        let ring_sums: Vec<R> = values
            .par_chunks(self.m)
            .map(|ring| ring.iter().fold(R::zero(), |a, &x| a + x))
            .collect();
        let mut acc = R::zero();
        for (i, s) in ring_sums.iter().enumerate() {
            acc = acc + self.radial_weights[i] * *s * m_inv;
        }
        acc
    }

    /// Evaluates `map(f(z), |z|)` at every node; rings in parallel, each via
    /// one FFT, written to disjoint slices (deterministic).
    pub fn map_series<F>(&self, f: &TaylorSeries<R>, map: F) -> Vec<R>
    where
        F: Fn(C<R>, R) -> R + Sync,
    {
        let m = self.m;
        let offset = self.angular_offset();
        let mut out = vec![R::zero(); self.node_count()];
        let plan = fft::plan_inverse::<R>(m);
        out.par_chunks_mut(m)
            .enumerate()
            .for_each(|(i, slot)| {
                let r = self.radii[i];
                let vals = fft::eval_on_ring(f.coeffs(), r, offset, &plan);
                for (k, v) in vals.into_iter().enumerate() {
                    slot[k] = map(v, r);
                }
            });
        out
    }

    /// Same, with two series evaluated on the shared grid.
    pub fn map_series2<F>(&self, f: &TaylorSeries<R>, g: &TaylorSeries<R>, map: F) -> Vec<R>
    where
        F: Fn(C<R>, C<R>, usize, usize) -> R + Sync,
    {
        let m = self.m;
        let offset = self.angular_offset();
        let mut out = vec![R::zero(); self.node_count()];
        let plan = fft::plan_inverse::<R>(m);
        out.par_chunks_mut(m)
            .enumerate()
            .for_each(|(i, slot)| {
                let vf = fft::eval_on_ring(f.coeffs(), self.radii[i], offset, &plan);
                let vg = fft::eval_on_ring(g.coeffs(), self.radii[i], offset, &plan);
                for k in 0..m {
                    slot[k] = map(vf[k], vg[k], i, k);
                }
            });
        out
    }
}
