//! Stolz-domain unions over a compact boundary set, harmonic measure by
//! walk-on-spheres, the density lower bound on the vertex set, the direct
//! window-covering estimate for the boundary mass off the circle, and the
//! restricted-compactness probes.
//!
//! The Riemann map onto Omega is never computed: every quantity that the
//! underlying arguments route through the map is reached through harmonic
//! measure instead (the push-forward identity), which walk-on-spheres
//! estimates directly.

use crate::arcs::ArcSet;
use crate::boundary::{mean_pow_on_set, NormPolicy};
use crate::error::{CoreError, Result};
use crate::operators::{volterra_apply, SymbolG};
use crate::scalar::{unit, wrap_angle, Real, C};
use crate::series::TaylorSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Union of Stolz domains S(zeta) over the vertices zeta in K, where S(zeta)
/// is the interior of the convex hull of {|z| < 1/2} and zeta. Membership and
/// a certified inscribed radius come in closed form: with Delta the angular
/// distance from z to K and (x, y) = |z| (cos Delta, sin Delta),
/// z is in S(nearest vertex) iff |z| < 1/2, or Delta < pi/3 and
/// x + sqrt(3) y < 1.
#[derive(Debug, Clone)]
pub struct StolzUnion<R: Real> {
    k: ArcSet<R>,
}

impl<R: Real> StolzUnion<R> {
    pub fn new(k: ArcSet<R>) -> Self {
        Self { k }
    }

    pub fn vertex_set(&self) -> &ArcSet<R> {
        &self.k
    }

    pub fn contains(&self, z: C<R>) -> bool {
        if self.k.is_empty() {
            return false;
        }
        let r = z.norm();
        if r >= R::one() {
            return false;
        }
        if r < R::of(0.5) {
            return true;
        }
        let delta = self.k.distance(wrap_angle(z.arg()));
        if delta >= R::PI() / R::of(3.0) {
            return false;
        }
        let x = r * delta.cos();
        let y = r * delta.sin();
        x + R::of(SQRT3) * y < R::one()
    }

    /// A radius rho > 0 with disk(z, rho) inside Omega, from the half-disk and
    /// the wedge of the angularly nearest vertex (both subsets of one Stolz
    /// domain, so the bound is certified). Non-positive iff z is outside.
    pub fn safe_radius(&self, z: C<R>) -> R {
        if self.k.is_empty() {
            return R::neg_infinity();
        }
        let r = z.norm();
        let disk_term = R::of(0.5) - r;
        let delta = self.k.distance(wrap_angle(z.arg()));
        let x = r * delta.cos();
        let y = r * delta.sin();
        let s3 = R::of(SQRT3);
        let wedge_term = if x > y / s3 && x + s3 * y < R::one() {
            ((R::one() - x - s3 * y) / R::of(2.0)).min((s3 * x - y) / R::of(2.0))
        } else {
            R::neg_infinity()
        };
        disk_term.max(wedge_term)
    }

    /// Height of the boundary over a gap angle: the polar radius where the
    /// wedge side of the nearest gap endpoint cuts the ray, capped by the
    /// half-disk for angles far from every vertex.
    pub fn boundary_radius_in_gap(&self, delta_to_k: R) -> R {
        if delta_to_k >= R::PI() / R::of(3.0) {
            R::of(0.5)
        } else {
            R::one() / (R::of(2.0) * (delta_to_k + R::FRAC_PI_6()).sin())
        }
    }
}

/// Walk-on-spheres tuning.
#[derive(Debug, Clone, Copy)]
pub struct WosParams {
    /// Absorb once the certified inscribed radius drops below this.
    pub absorb: f64,
    pub max_steps: u32,
    /// Fraction of step-capped walkers above which the run fails.
    pub max_fail_fraction: f64,
}

impl Default for WosParams {
    fn default() -> Self {
        Self {
            absorb: 1e-4,
            max_steps: 100_000,
            max_fail_fraction: 1e-3,
        }
    }
}

/// One absorbed walker.
#[derive(Debug, Clone, Copy)]
pub struct ExitSample<R: Real> {
    /// Last interior position (within the absorption layer of the boundary).
    pub interior: C<R>,
    /// Angular coordinate of the nearest-boundary projection.
    pub angle: R,
    /// Exit classified on K (subset of the circle) vs the rest of d(Omega).
    pub on_k: bool,
    pub steps: u32,
}

fn classify_exit<R: Real>(omega: &StolzUnion<R>, z: C<R>, steps: u32) -> ExitSample<R> {
    let theta = wrap_angle(z.arg());
    let r = z.norm();
    let k = omega.vertex_set();
    let s3 = R::of(SQRT3);
    let mut best_d = R::infinity();
    let mut best: (C<R>, R, bool) = (z, theta, false);
    if k.contains(theta) {
        let d = R::one() - r;
        if d < best_d {
            best_d = d;
            best = (unit(theta), theta, true);
        }
    }
    // wedge sides of every arc endpoint, facing their gap; the full circle
    // has no endpoints (its stored seam at angle 0 is not a boundary vertex)
    for &(a, b) in k.arcs().iter().filter(|_| !k.is_full()) {
        for (eta, sign) in [(b, R::one()), (a, -R::one())] {
            let local = z * unit(-eta);
            let x = local.re;
            let y = local.im;
            let d = (R::one() - x - s3 * sign * y) / R::of(2.0);
            if d >= R::zero() && d < best_d {
                let n = C::new(R::one(), s3 * sign) * R::of(0.5);
                let foot_local = local + n * d;
                let foot = foot_local * unit(eta);
                best_d = d;
                best = (foot, wrap_angle(foot.arg()), false);
            }
        }
    }
    // half-disk cap in the middle of wide gaps
    if !k.contains(theta) {
        let delta = k.distance(theta);
        if delta >= R::PI() / R::of(3.0) {
            let d = (R::of(0.5) - r).abs();
            if d < best_d {
                best = (unit(theta) * R::of(0.5), theta, false);
            }
        }
    }
    let (_, angle, on_k) = best;
    ExitSample {
        interior: z,
        angle,
        on_k,
        steps,
    }
}

fn walk_one<R: Real>(
    omega: &StolzUnion<R>,
    params: &WosParams,
    seed: u64,
    stream: u64,
) -> Option<ExitSample<R>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut z = C::new(R::zero(), R::zero());
    let absorb = R::of(params.absorb);
    for step in 0..params.max_steps {
        let rho = omega.safe_radius(z);
        if rho < absorb {
            return Some(classify_exit(omega, z, step));
        }
        let t: f64 = rng.gen();
        // a hair under the certified radius keeps the landing strictly interior
        z = z + unit(R::of(t) * R::TAU()) * (rho * R::of(1.0 - 1e-9));
    }
    None
}

/// Runs `walkers` independent walks from the origin; per-walker RNG streams
/// derive from (seed, index) so parallel and serial runs agree bit-exactly.
pub fn walk_exits<R: Real>(
    omega: &StolzUnion<R>,
    walkers: u64,
    seed: u64,
    params: &WosParams,
) -> Result<(Vec<ExitSample<R>>, u64)> {
    if !omega.contains(C::new(R::zero(), R::zero())) {
        return Err(CoreError::Precondition(
            "walk-on-spheres needs 0 inside Omega (nonempty vertex set)".to_string(),
        ));
    }
    let results: Vec<Option<ExitSample<R>>> = (0..walkers)
        .into_par_iter()
        .map(|i| walk_one(omega, params, seed, i))
        .collect();
    let failed = results.iter().filter(|r| r.is_none()).count() as u64;
    if walkers > 0 && (failed as f64) / (walkers as f64) > params.max_fail_fraction {
        return Err(CoreError::Statistical(format!(
            "{failed} of {walkers} walkers hit the step cap"
        )));
    }
    Ok((results.into_iter().flatten().collect(), failed))
}

/// Boundary histogram of the exit distribution: per-angle bins split into the
/// mass landing on K and the mass landing on the rest of the boundary.
#[derive(Debug, Clone)]
pub struct HarmonicMeasure<R: Real> {
    pub bins: usize,
    pub on_k_mass: Vec<R>,
    pub off_k_mass: Vec<R>,
    pub walkers: u64,
    pub failed: u64,
    pub seed: u64,
}

impl<R: Real> HarmonicMeasure<R> {
    pub fn total_mass(&self) -> R {
        let on: R = self.on_k_mass.iter().fold(R::zero(), |a, &x| a + x);
        let off: R = self.off_k_mass.iter().fold(R::zero(), |a, &x| a + x);
        on + off
    }

    pub fn on_k_total(&self) -> R {
        self.on_k_mass.iter().fold(R::zero(), |a, &x| a + x)
    }

    pub fn off_k_total(&self) -> R {
        self.off_k_mass.iter().fold(R::zero(), |a, &x| a + x)
    }

    pub fn bin_width(&self) -> R {
        R::TAU() / R::of(self.bins as f64)
    }
}

/// Estimates harmonic measure of Omega at 0 with the given walker budget.
pub fn harmonic_measure<R: Real>(
    omega: &StolzUnion<R>,
    walkers: u64,
    seed: u64,
    bins: usize,
    params: &WosParams,
) -> Result<HarmonicMeasure<R>> {
    let mut on_k_mass = vec![R::zero(); bins];
    let mut off_k_mass = vec![R::zero(); bins];
    if walkers == 0 {
        return Ok(HarmonicMeasure {
            bins,
            on_k_mass,
            off_k_mass,
            walkers,
            failed: 0,
            seed,
        });
    }
    let (exits, failed) = walk_exits(omega, walkers, seed, params)?;
    let unit_mass = R::one() / R::of(walkers as f64);
    for e in &exits {
        let bin = ((e.angle / R::TAU() * R::of(bins as f64))
            .floor()
            .to_usize()
            .unwrap_or(0))
        .min(bins - 1);
        if e.on_k {
            on_k_mass[bin] = on_k_mass[bin] + unit_mass;
        } else {
            off_k_mass[bin] = off_k_mass[bin] + unit_mass;
        }
    }
    Ok(HarmonicMeasure {
        bins,
        on_k_mass,
        off_k_mass,
        walkers,
        failed,
        seed,
    })
}

/// Per-bin density of the harmonic measure against arc length on K, and the
/// sub-level set extraction E = {density > delta}.
#[derive(Debug, Clone)]
pub struct DensityReport<R: Real> {
    pub e_set: ArcSet<R>,
    pub complement_measure: R,
    pub k_minus_e: R,
    pub densities: Vec<R>,
}

/// Returns E = union of the histogram bins (clipped to K) whose estimated
/// density exceeds delta. Fails when the kept set misses the measure budget
/// m(K \ E) < eps at this walker count.
pub fn density_lower_bound<R: Real>(
    nu: &HarmonicMeasure<R>,
    k: &ArcSet<R>,
    delta: R,
    eps: R,
) -> Result<DensityReport<R>> {
    let (e_set, densities) = density_level_set(nu, k, delta);
    let k_minus_e = k.measure() - e_set.measure();
    if k_minus_e >= eps {
        return Err(CoreError::Statistical(format!(
            "no bins reach density > {delta} on measure {k_minus_e} of K; \
             more walkers or a smaller delta needed"
        )));
    }
    Ok(DensityReport {
        complement_measure: R::one() - e_set.measure(),
        k_minus_e,
        e_set,
        densities,
    })
}

fn density_level_set<R: Real>(
    nu: &HarmonicMeasure<R>,
    k: &ArcSet<R>,
    delta: R,
) -> (ArcSet<R>, Vec<R>) {
    let bins = nu.bins;
    let width = nu.bin_width();
    let mut densities = vec![R::zero(); bins];
    let mut kept: Vec<(R, R)> = Vec::new();
    for b in 0..bins {
        let arc = ArcSet::new([(width * R::of(b as f64), width * R::of((b + 1) as f64))]);
        let overlap = arc.intersect(k);
        let len = overlap.measure();
        if len <= R::zero() {
            continue;
        }
        let h = nu.on_k_mass[b] / len;
        densities[b] = h;
        if h > delta {
            kept.extend(overlap.arcs().iter().copied());
        }
    }
    (ArcSet::new(kept), densities)
}

/// Report of the direct estimate: complementary-arc windows cover the
/// off-circle boundary, the off-K harmonic mass is controlled by the total
/// gap length, and the half-density set F keeps measure at least
/// `1 - 2 nu(dOmega \ K)`.
#[derive(Debug, Clone)]
pub struct Remark2Report<R: Real> {
    pub coverage_ok: bool,
    pub nu_off_k: R,
    pub gap_measure_sum: R,
    pub c_hat: R,
    pub f_measure: R,
    pub bound: R,
    pub holds: bool,
    pub margin: R,
}

pub fn remark2_estimate<R: Real>(
    omega: &StolzUnion<R>,
    nu: &HarmonicMeasure<R>,
) -> Result<Remark2Report<R>> {
    let k = omega.vertex_set();
    let gaps = k.gaps();
    // windows W_j = W(midpoint, gap length in radians); a gap of length >= 1
    // radian degenerates to the whole disk and covers everything
    struct Win<R> {
        center: R,
        h: R,
        whole_disk: bool,
    }
    let windows: Vec<Win<R>> = gaps
        .iter()
        .map(|&(a, b)| {
            let len = b - a;
            Win {
                center: wrap_angle((a + b) / R::of(2.0)),
                h: len,
                whole_disk: len >= R::one(),
            }
        })
        .collect();
    // sampled covering check of dOmega \ K by the closed windows
    let mut coverage_ok = true;
    'gaps: for &(a, b) in &gaps {
        let len = b - a;
        for i in 1..64 {
            let theta = a + len * R::of(i as f64 / 64.0);
            let delta = k.distance(wrap_angle(theta));
            let rho = omega.boundary_radius_in_gap(delta);
            let p_angle = wrap_angle(theta);
            let covered = windows.iter().any(|w| {
                w.whole_disk
                    || (rho >= R::one() - w.h
                        && crate::scalar::angle_dist(p_angle, w.center) <= w.h)
            });
            if !covered {
                coverage_ok = false;
                break 'gaps;
            }
        }
    }
    if !coverage_ok {
        return Err(CoreError::Geometry(
            "a sampled boundary point escapes every complementary-arc window".to_string(),
        ));
    }
    let nu_off_k = nu.off_k_total();
    let gap_measure_sum = R::one() - k.measure();
    let c_hat = if gap_measure_sum > R::zero() {
        nu_off_k / gap_measure_sum
    } else {
        R::zero()
    };
    // F = {density > 1/2} on K; the bound needs no budget, so bypass the
    // eps check of density_lower_bound
    let (f_set, _) = density_level_set(nu, k, R::of(0.5));
    let f_measure = f_set.measure();
    let bound = R::one() - R::of(2.0) * c_hat * gap_measure_sum;
    // 3-sigma slack on the off-K mass estimate
    let sigma = (nu_off_k.max(R::of(1e-12)) * (R::one() - nu_off_k)
        / R::of(nu.walkers.max(1) as f64))
    .sqrt();
    let slack = R::of(6.0) * sigma;
    let margin = f_measure - bound;
    Ok(Remark2Report {
        coverage_ok,
        nu_off_k,
        gap_measure_sum,
        c_hat,
        f_measure,
        bound,
        holds: f_measure + slack >= bound,
        margin,
    })
}

/// One function's worth of the harmonic-measure lower bound
/// `integral_dOmega |T_g f|^p d nu >= delta integral_E |T_g f|^p dm`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ProductReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin_sigmas: f64,
    pub holds: bool,
    pub walkers: u64,
    pub seed: u64,
}

/// Checks the inequality for each f in the suite. The left side is the walker
/// average of |T_g f|^p at the absorbed interior points; the right side is
/// delta times the boundary-grid integral over E.
#[allow(clippy::too_many_arguments)]
pub fn product_inequality_check<R: Real>(
    g: &SymbolG<R>,
    omega: &StolzUnion<R>,
    e_set: &ArcSet<R>,
    delta: R,
    suite: &[TaylorSeries<R>],
    p: R,
    walkers: u64,
    seed: u64,
    params: &WosParams,
    policy: &NormPolicy,
) -> Result<Vec<ProductReport>> {
    let (exits, _) = walk_exits(omega, walkers, seed, params)?;
    let mut out = Vec::with_capacity(suite.len());
    for f in suite {
        let tg = volterra_apply(g, f);
        let values: Vec<R> = exits
            .par_iter()
            .map(|e| tg.horner(e.interior).norm().powf(p))
            .collect();
        let n = R::of(values.len().max(1) as f64);
        let lhs = values.iter().fold(R::zero(), |a, &x| a + x) / n;
        let var = values
            .iter()
            .fold(R::zero(), |a, &x| a + (x - lhs) * (x - lhs))
            / n;
        let sigma = (var / n).sqrt();
        let rhs = delta * mean_pow_on_set(&tg, p, e_set, policy)?;
        let margin_sigmas = if sigma > R::zero() {
            ((lhs - rhs) / sigma).to_f64().unwrap_or(f64::INFINITY)
        } else if lhs >= rhs {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        let holds = lhs + R::of(3.0) * sigma >= rhs;
        if !holds {
            return Err(CoreError::Statistical(format!(
                "inequality violated beyond 3 sigma: lhs {lhs}, rhs {rhs}"
            )));
        }
        out.push(ProductReport {
            lhs: lhs.to_f64().unwrap_or(f64::NAN),
            rhs: rhs.to_f64().unwrap_or(f64::NAN),
            margin_sigmas,
            holds,
            walkers,
            seed,
        });
    }
    Ok(out)
}

/// Decay table of `integral_E |T_g f_n|^p dm` along a sequence, with the full
/// norms alongside for the non-compactness contrast.
#[derive(Debug, Clone)]
pub struct CompactnessTable<R: Real> {
    pub restricted: Vec<R>,
    pub full_norm: Vec<R>,
}

impl<R: Real> CompactnessTable<R> {
    pub fn decayed(&self) -> bool {
        match (self.restricted.first(), self.restricted.last()) {
            (Some(&first), Some(&last)) if first > R::zero() => last < R::of(0.1) * first,
            _ => false,
        }
    }
}

pub fn chi_e_compactness_probe<R: Real>(
    g: &SymbolG<R>,
    e_set: &ArcSet<R>,
    p: R,
    sequence: &[TaylorSeries<R>],
    policy: &NormPolicy,
) -> Result<CompactnessTable<R>> {
    let mut restricted = Vec::with_capacity(sequence.len());
    let mut full_norm = Vec::with_capacity(sequence.len());
    for f in sequence {
        let tg = volterra_apply(g, f);
        restricted.push(mean_pow_on_set(&tg, p, e_set, policy)?);
        full_norm.push(crate::boundary::hp_norm(&tg, p, policy)?);
    }
    Ok(CompactnessTable {
        restricted,
        full_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;
    use crate::series::atom;
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, TAU};

    fn full_omega() -> StolzUnion<f64> {
        StolzUnion::new(ArcSet::full_circle())
    }

    #[test]
    fn membership_examples() {
        let omega = StolzUnion::new(ArcSet::<f64>::new([(TAU - 0.05, TAU + 0.05)]));
        assert!(omega.contains(c64(0.0, 0.0)));
        // radial segment toward a vertex
        assert!(omega.contains(c64(0.9, 0.0)));
        // opposite side, outside the half-disk
        assert!(!omega.contains(c64(-0.9, 0.0)));
        // empty vertex set: empty domain
        assert!(!StolzUnion::new(ArcSet::<f64>::empty()).contains(c64(0.0, 0.0)));
    }

    #[test]
    fn omega_sits_between_half_disk_and_disk() {
        let omega = StolzUnion::new(ArcSet::<f64>::new([(1.0, 2.0)]));
        for i in 0..64 {
            let t = TAU * i as f64 / 64.0;
            assert!(omega.contains(c64(0.49 * t.cos(), 0.49 * t.sin())));
            assert!(!omega.contains(c64(1.01 * t.cos(), 1.01 * t.sin())));
        }
        // the part of T touching dOmega is exactly K: points just inside the
        // circle are in Omega iff their angle is in K
        for i in 0..128 {
            let t = TAU * i as f64 / 128.0;
            let z = c64(0.999 * t.cos(), 0.999 * t.sin());
            let inside = omega.vertex_set().distance(t) < 1e-4;
            assert_eq!(omega.contains(z), inside, "angle {t}");
        }
    }

    #[test]
    fn safe_radius_is_certified() {
        let omega = StolzUnion::new(ArcSet::<f64>::new([(0.0, 1.0), (3.0, 4.5)]));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tested = 0;
        while tested < 2000 {
            let x: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            let y: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            let z = c64(x, y);
            if !omega.contains(z) {
                continue;
            }
            tested += 1;
            let rho = omega.safe_radius(z);
            assert!(rho > 0.0, "inside point with nonpositive radius at {z}");
            for j in 0..16 {
                let t = TAU * j as f64 / 16.0;
                let w = z + c64((rho * 0.999) * t.cos(), (rho * 0.999) * t.sin());
                assert!(omega.contains(w), "disk({z}, {rho}) leaves Omega at {w}");
            }
        }
    }

    #[test]
    fn walkers_stay_inside_and_absorb() {
        let omega = StolzUnion::new(ArcSet::<f64>::new([(0.5, 2.5)]));
        let (exits, failed) = walk_exits(&omega, 500, 42, &WosParams::default()).unwrap();
        assert_eq!(failed, 0);
        assert_eq!(exits.len(), 500);
        for e in &exits {
            assert!(omega.contains(e.interior), "absorbed outside at {}", e.interior);
            // exits on K have their angle in K
            if e.on_k {
                assert!(omega.vertex_set().distance(e.angle) < 1e-6);
            }
        }
    }

    #[test]
    fn full_circle_harmonic_measure_is_uniform() {
        let omega = full_omega();
        let nu = harmonic_measure(&omega, 100_000, 7, 16, &WosParams::default()).unwrap();
        assert_relative_eq!(nu.total_mass(), 1.0, epsilon = 1e-9);
        assert_eq!(nu.off_k_total(), 0.0);
        let expect = 1.0 / 16.0;
        let mut chi2 = 0.0;
        for &m in &nu.on_k_mass {
            assert!((m - expect).abs() / expect < 0.05, "bin deviates: {m}");
            let o = m * 1e5;
            let e = expect * 1e5;
            chi2 += (o - e) * (o - e) / e;
        }
        // chi^2_{15} at the 0.001 level is 37.7
        assert!(chi2 < 37.7, "chi2 = {chi2}");
    }

    #[test]
    fn upper_half_vertices_split_the_mass() {
        let k = ArcSet::<f64>::new([(0.2, PI - 0.2)]);
        let omega = StolzUnion::new(k);
        let nu = harmonic_measure(&omega, 50_000, 19, 64, &WosParams::default()).unwrap();
        let on = nu.on_k_total();
        assert!(on > 0.2 && on < 0.95, "on-K mass {on}");
        assert!(nu.off_k_total() > 0.0);
        assert_relative_eq!(nu.total_mass(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_walkers_and_empty_domain() {
        let omega = full_omega();
        let nu = harmonic_measure(&omega, 0, 1, 8, &WosParams::default()).unwrap();
        assert_eq!(nu.total_mass(), 0.0);
        let empty = StolzUnion::new(ArcSet::<f64>::empty());
        assert!(matches!(
            harmonic_measure(&empty, 10, 1, 8, &WosParams::default()),
            Err(CoreError::Precondition(_))
        ));
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let omega = StolzUnion::new(ArcSet::<f64>::new([(0.5, 2.5)]));
        let a = harmonic_measure(&omega, 20_000, 123, 32, &WosParams::default()).unwrap();
        let b = harmonic_measure(&omega, 20_000, 123, 32, &WosParams::default()).unwrap();
        assert_eq!(a.on_k_mass, b.on_k_mass);
        assert_eq!(a.off_k_mass, b.off_k_mass);
    }

    #[test]
    fn density_on_full_disk_is_one() {
        let omega = full_omega();
        let nu = harmonic_measure(&omega, 100_000, 3, 32, &WosParams::default()).unwrap();
        let rep = density_lower_bound(&nu, omega.vertex_set(), 0.8, 0.05).unwrap();
        assert!(rep.e_set.measure() > 0.97);
        assert!(rep.k_minus_e < 0.05);
        for &h in rep.densities.iter() {
            assert_relative_eq!(h, 1.0, max_relative = 0.2);
        }
        // delta = 1: density cannot exceed 1, error path
        assert!(density_lower_bound(&nu, omega.vertex_set(), 1.2, 0.05).is_err());
    }

    #[test]
    fn one_gap_density_depressed_at_corners() {
        let gap = 0.05 * TAU;
        let k = ArcSet::<f64>::new([(gap / 2.0, TAU - gap / 2.0)]);
        let omega = StolzUnion::new(k.clone());
        let nu = harmonic_measure(&omega, 100_000, 5, 64, &WosParams::default()).unwrap();
        let rep = density_lower_bound(&nu, &k, 0.5, 0.2).unwrap();
        // corner bins (adjacent to the gap) carry depressed density
        let densities = &rep.densities;
        let corner = densities[0].max(densities[63]);
        let deep: f64 = densities[30];
        assert!(corner < deep, "corner {corner} vs interior {deep}");
        assert!(!rep.e_set.contains(0.0));
    }

    #[test]
    fn remark2_trivial_and_one_gap() {
        let omega = full_omega();
        let nu = harmonic_measure(&omega, 50_000, 9, 32, &WosParams::default()).unwrap();
        let rep = remark2_estimate(&omega, &nu).unwrap();
        assert!(rep.coverage_ok);
        assert_eq!(rep.nu_off_k, 0.0);
        assert!(rep.f_measure > 0.99);
        assert!(rep.holds);

        let gap = 0.05 * TAU;
        let k = ArcSet::<f64>::new([(gap / 2.0, TAU - gap / 2.0)]);
        let omega = StolzUnion::new(k);
        let nu = harmonic_measure(&omega, 100_000, 21, 64, &WosParams::default()).unwrap();
        let rep = remark2_estimate(&omega, &nu).unwrap();
        assert!(rep.coverage_ok);
        assert!(rep.nu_off_k > 0.0);
        assert!(rep.holds, "m(F) = {} < bound {}", rep.f_measure, rep.bound);
    }

    #[test]
    fn product_inequality_on_full_disk_is_tight() {
        let g = SymbolG::new(crate::series::log1z::<f64>(256), "log1z");
        let omega = full_omega();
        let e = ArcSet::full_circle();
        let f = atom::<f64>(c64(0.5, 0.0), 2.0, 256).unwrap();
        let reports = product_inequality_check(
            &g,
            &omega,
            &e,
            1.0,
            &[TaylorSeries::zero(), f],
            2.0,
            50_000,
            31,
            &WosParams::default(),
            &NormPolicy::default(),
        )
        .unwrap();
        assert_eq!(reports[0].lhs, 0.0);
        assert_eq!(reports[0].rhs, 0.0);
        assert!(reports[0].holds);
        // with E = T and delta = 1 both sides estimate the same integral
        let r = &reports[1];
        assert!(r.holds);
        assert_relative_eq!(r.lhs, r.rhs, max_relative = 0.05);
    }

    #[test]
    fn compactness_probe_decays_for_vmoa_symbol() {
        let g = SymbolG::new(TaylorSeries::<f64>::monomial(1), "id");
        let e = ArcSet::full_circle();
        let seq: Vec<_> = (1..=10)
            .map(|n| atom::<f64>(c64(1.0 - 0.5f64.powi(n), 0.0), 2.0, 16384).unwrap())
            .collect();
        let table =
            chi_e_compactness_probe(&g, &e, 2.0, &seq, &NormPolicy::default()).unwrap();
        assert!(table.decayed(), "restricted = {:?}", table.restricted);
        assert!(table.restricted[9] < 1e-2);
    }
}
