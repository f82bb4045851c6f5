//! Boundary sampling of the unit circle and H^p norms.
//!
//! H^p sits inside L^p(T): the norm of a (truncated) series is the L^p mean
//! of its boundary samples. Two estimators are provided. `hp_norm` samples
//! the circle itself, which is exact in spirit for the stored truncations
//! (they are polynomials, analytic across the boundary). The radius ladder
//! `hp_norm_extrapolated` climbs r_k = 1 - 2^-k with Richardson extrapolation;
//! it reproduces the direct value for moderate degrees but degrades once the
//! content lives at Taylor frequencies beyond ~2^kmax, so the direct form is
//! the default everywhere.

use crate::arcs::ArcSet;
use crate::error::{CoreError, Result};
use crate::scalar::{Real, C};
use crate::series::TaylorSeries;

/// Samples of an analytic function on `m` equispaced nodes of the circle of
/// radius `radius` (angles `2*pi*k/m`).
#[derive(Debug, Clone)]
pub struct BoundaryGrid<R: Real> {
    m: usize,
    radius: R,
    values: Vec<C<R>>,
}

impl<R: Real> BoundaryGrid<R> {
    /// Samples `f` on the ring. `m` must be a power of two.
    pub fn sample(f: &TaylorSeries<R>, radius: R, m: usize) -> Result<Self> {
        if !m.is_power_of_two() {
            return Err(CoreError::Domain(format!(
                "node count must be a power of two, got {m}"
            )));
        }
        if radius <= R::zero() || radius > R::one() {
            return Err(CoreError::Domain(format!(
                "grid radius must lie in (0, 1], got {radius}"
            )));
        }
        let values = f.values_on_ring(radius, m, R::zero());
        Ok(Self { m, radius, values })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn radius(&self) -> R {
        self.radius
    }

    pub fn values(&self) -> &[C<R>] {
        &self.values
    }

    pub fn node_angle(&self, k: usize) -> R {
        R::TAU() * R::of(k as f64) / R::of(self.m as f64)
    }

    /// Mean of |values|^p over the nodes.
    pub fn mean_abs_pow(&self, p: R) -> Result<R> {
        let mut acc = R::zero();
        for v in &self.values {
            let a = v.norm();
            if !a.is_finite() {
                return Err(CoreError::Numeric(
                    "non-finite boundary sample".to_string(),
                ));
            }
            acc = acc + a.powf(p);
        }
        Ok(acc / R::of(self.m as f64))
    }
}

/// How hp_norm resolves the circle.
#[derive(Debug, Clone, Copy)]
pub struct NormPolicy {
    /// Angular nodes per unit of (degree+1); the node count is the next power
    /// of two of `oversample * (degree+1)`, at least `min_nodes`.
    pub oversample: usize,
    pub min_nodes: usize,
    /// Radius ladder depth for the extrapolated estimator.
    pub kmax: u32,
    /// Relative agreement between successive extrapolants that counts as
    /// converged.
    pub rel_tol: f64,
}

impl Default for NormPolicy {
    fn default() -> Self {
        Self {
            oversample: 4,
            min_nodes: 256,
            kmax: 10,
            rel_tol: 1e-6,
        }
    }
}

impl NormPolicy {
    pub fn nodes_for(&self, degree: usize) -> usize {
        (self.oversample * (degree + 1))
            .next_power_of_two()
            .max(self.min_nodes)
    }
}

/// `(integral_T |f|^p dm)^{1/p}` by direct boundary sampling at r = 1.
///
/// For p = 2 (and p = 4) the trapezoid sum is exact once the node count
/// exceeds p*degree, so this agrees with Parseval to rounding.
pub fn hp_norm<R: Real>(f: &TaylorSeries<R>, p: R, policy: &NormPolicy) -> Result<R> {
    if p < R::one() {
        return Err(CoreError::Domain(format!("hp_norm requires p >= 1, got {p}")));
    }
    if !f.is_finite() {
        return Err(CoreError::Numeric("non-finite coefficients".to_string()));
    }
    let m = policy.nodes_for(f.degree());
    let grid = BoundaryGrid::sample(f, R::one(), m)?;
    Ok(grid.mean_abs_pow(p)?.powf(R::one() / p))
}

/// Convenience wrapper with the default policy.
pub fn hp_norm_default<R: Real>(f: &TaylorSeries<R>, p: R) -> Result<R> {
    hp_norm(f, p, &NormPolicy::default())
}

/// The p-means along the radius ladder r_k = 1 - 2^-k, k = 1..=kmax.
pub fn radial_means<R: Real>(
    f: &TaylorSeries<R>,
    p: R,
    policy: &NormPolicy,
) -> Result<Vec<(R, R)>> {
    let m = policy.nodes_for(f.degree());
    let mut out = Vec::with_capacity(policy.kmax as usize);
    for k in 1..=policy.kmax {
        let r = R::one() - R::of(0.5).powi(k as i32);
        let grid = BoundaryGrid::sample(f, r, m)?;
        out.push((r, grid.mean_abs_pow(p)?));
    }
    Ok(out)
}

/// Radius-ladder estimator: Richardson extrapolation of the p-means at
/// r_k = 1 - 2^-k toward r = 1, declared converged when successive table
/// heads differ by less than `rel_tol` relatively.
pub fn hp_norm_extrapolated<R: Real>(
    f: &TaylorSeries<R>,
    p: R,
    policy: &NormPolicy,
) -> Result<R> {
    if p < R::one() {
        return Err(CoreError::Domain(format!("hp_norm requires p >= 1, got {p}")));
    }
    let means = radial_means(f, p, policy)?;
    // Richardson in h = 2^-k: the mean is smooth in h for a polynomial, so
    // successive columns kill one power of h each.
    let mut rows: Vec<Vec<R>> = Vec::new();
    let mut best = means[0].1;
    let mut prev_best = best;
    for (i, &(_, v)) in means.iter().enumerate() {
        let mut row = vec![v];
        for j in 1..=i {
            let factor = R::of(2f64.powi(j as i32));
            let extrap = (factor * row[j - 1] - rows[i - 1][j - 1]) / (factor - R::one());
            row.push(extrap);
        }
        best = *row.last().unwrap();
        rows.push(row);
        if i > 0 {
            let denom = best.abs().max(R::of(1e-300));
            if ((best - prev_best) / denom).abs() < R::of(policy.rel_tol) {
                return Ok(best.max(R::zero()).powf(R::one() / p));
            }
        }
        prev_best = best;
    }
    Ok(best.max(R::zero()).powf(R::one() / p))
}

/// `integral_E |f|^p dm` for a boundary arc set E: the mean over all circle
/// nodes of the indicator times |f|^p (so the full-circle value is the p-th
/// power of the norm).
pub fn mean_pow_on_set<R: Real>(
    f: &TaylorSeries<R>,
    p: R,
    set: &ArcSet<R>,
    policy: &NormPolicy,
) -> Result<R> {
    let m = policy.nodes_for(f.degree());
    let grid = BoundaryGrid::sample(f, R::one(), m)?;
    let mut acc = R::zero();
    for (k, v) in grid.values().iter().enumerate() {
        let a = v.norm();
        if !a.is_finite() {
            return Err(CoreError::Numeric("non-finite boundary sample".to_string()));
        }
        if set.contains(grid.node_angle(k)) {
            acc = acc + a.powf(p);
        }
    }
    Ok(acc / R::of(m as f64))
}

/// Report from the pointwise growth bound `|f(z)| <= 2^{1/p} ||f||_p / (1-|z|)^{1/p}`.
#[derive(Debug, Clone)]
pub struct GrowthReport<R: Real> {
    /// max over samples of |f(z)| (1-|z|)^{1/p} / (2^{1/p} ||f||_p)
    pub max_ratio: R,
    pub worst: C<R>,
    pub violations: usize,
}

/// Checks the growth bound at every sample; ratios beyond 1 + 1e-9 indicate
/// a quadrature or expansion bug and are reported as an invariant violation.
pub fn growth_bound_check<R: Real>(
    f: &TaylorSeries<R>,
    p: R,
    samples: &[C<R>],
    policy: &NormPolicy,
) -> Result<GrowthReport<R>> {
    let norm = hp_norm(f, p, policy)?;
    let bound_scale = R::of(2.0).powf(R::one() / p) * norm;
    let mut max_ratio = R::zero();
    let mut worst = C::new(R::zero(), R::zero());
    let mut violations = 0usize;
    for &z in samples {
        let v = f.evaluate(z)?;
        let allowed = bound_scale / (R::one() - z.norm()).powf(R::one() / p);
        let ratio = v.norm() / allowed;
        if ratio > max_ratio {
            max_ratio = ratio;
            worst = z;
        }
        if ratio > R::one() + R::of(1e-9) {
            violations += 1;
        }
    }
    if violations > 0 {
        return Err(CoreError::Numeric(format!(
            "growth bound violated at {violations} samples, max ratio {max_ratio}"
        )));
    }
    Ok(GrowthReport {
        max_ratio,
        worst,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;
    use crate::series::{atom, TaylorSeries};
    use approx::assert_relative_eq;

    type S = TaylorSeries<f64>;

    fn parseval(f: &S) -> f64 {
        f.coeffs().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn monomial_norm_is_one() {
        for n in [0usize, 1, 5, 17] {
            let f = S::monomial(n);
            for p in [1.0, 4.0 / 3.0, 2.0, 4.0] {
                let v = hp_norm_default(&f, p).unwrap();
                assert_relative_eq!(v, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn one_plus_z_h2_is_sqrt2() {
        let f = S::from_real(&[1.0, 1.0]);
        let v = hp_norm_default(&f, 2.0).unwrap();
        assert_relative_eq!(v, 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn h2_matches_parseval_on_polynomials() {
        let f = S::new(
            (0..21)
                .map(|n| c64((n as f64 * 0.7).sin(), (n as f64 * 0.3).cos() * 0.5))
                .collect(),
        );
        let v = hp_norm_default(&f, 2.0).unwrap();
        assert_relative_eq!(v, parseval(&f), max_relative = 1e-10);
    }

    #[test]
    fn atom_norms_are_one() {
        // the Poisson kernel integrates to one, so atoms are unit vectors
        for &(re, im) in &[(0.0, 0.0), (0.5, 0.0), (0.9, 0.0)] {
            for p in [1.0, 2.0, 4.0] {
                let f = atom::<f64>(c64(re, im), p, 1024).unwrap();
                let v = hp_norm_default(&f, p).unwrap();
                assert_relative_eq!(v, 1.0, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn extrapolated_agrees_with_direct_for_moderate_degree() {
        let f = S::new((0..33).map(|n| c64(1.0 / (n as f64 + 1.0), 0.02 * n as f64)).collect());
        let policy = NormPolicy::default();
        for p in [1.0, 2.0, 4.0] {
            let a = hp_norm(&f, p, &policy).unwrap();
            let b = hp_norm_extrapolated(&f, p, &policy).unwrap();
            assert_relative_eq!(a, b, max_relative = 5e-6);
        }
    }

    #[test]
    fn extrapolated_h2_hits_parseval_on_random_polys() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..10 {
            let f = S::new((0..=20).map(|_| c64(rnd(), rnd())).collect());
            let v = hp_norm_extrapolated(&f, 2.0, &NormPolicy::default()).unwrap();
            assert_relative_eq!(v, parseval(&f), max_relative = 1e-8);
        }
    }

    #[test]
    fn subharmonic_means_increase_with_radius() {
        let f = atom::<f64>(c64(0.7, 0.2), 2.0, 256).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let means = radial_means(&f, p, &NormPolicy::default()).unwrap();
            for w in means.windows(2) {
                assert!(
                    w[1].1 >= w[0].1 - 1e-12,
                    "p-mean decreased: {:?} -> {:?}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn growth_bound_examples() {
        let policy = NormPolicy::default();
        // constant: ratio 1/2^{1/2} at z = 0
        let one = S::one();
        let rep = growth_bound_check(&one, 2.0, &[c64(0.0, 0.0)], &policy).unwrap();
        assert_relative_eq!(rep.max_ratio, 1.0 / 2f64.sqrt(), max_relative = 1e-12);
        // identity at p = 1, z = 0.5: |0.5| / (2 / 0.5) = 0.125
        let id = S::monomial(1);
        let rep = growth_bound_check(&id, 1.0, &[c64(0.5, 0.0)], &policy).unwrap();
        assert_relative_eq!(rep.max_ratio, 0.125, max_relative = 1e-12);
        // an atom stays under the bound at its own concentration point
        let f = atom::<f64>(c64(0.9, 0.0), 2.0, 1024).unwrap();
        let rep = growth_bound_check(&f, 2.0, &[c64(0.9, 0.0)], &policy).unwrap();
        assert!(rep.max_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = S::one();
        assert!(hp_norm_default(&f, 0.5).is_err());
        assert!(BoundaryGrid::sample(&f, 1.0, 100).is_err());
        let nan = S::new(vec![c64(f64::NAN, 0.0)]);
        assert!(hp_norm_default(&nan, 2.0).is_err());
    }
}
