//! The integral operators: T_g, the Cesaro operator in both of its numeric
//! forms, composition operators, and the norm formula for the product
//! C_phi T_g through the Nevanlinna counting function.

use crate::error::{CoreError, Result};
use crate::fft;
use crate::quad::DiskQuadrature;
use crate::scalar::{unit, Real, C};
use crate::series::TaylorSeries;
use rayon::prelude::*;

/// A symbol g together with its cached derivative.
#[derive(Debug, Clone)]
pub struct SymbolG<R: Real> {
    g: TaylorSeries<R>,
    gprime: TaylorSeries<R>,
    name: String,
}

impl<R: Real> SymbolG<R> {
    pub fn new(g: TaylorSeries<R>, name: impl Into<String>) -> Self {
        let gprime = g.differentiate();
        Self {
            g,
            gprime,
            name: name.into(),
        }
    }

    /// Builds from precomputed parts, verifying the derivative cache.
    pub fn from_parts(
        g: TaylorSeries<R>,
        gprime: TaylorSeries<R>,
        name: impl Into<String>,
    ) -> Result<Self> {
        let expect = g.differentiate();
        let expect_t = expect.trimmed();
        let given_t = gprime.trimmed();
        if expect_t.degree() != given_t.degree() {
            return Err(CoreError::Domain("gprime is not the derivative of g".into()));
        }
        for n in 0..=expect_t.degree() {
            if (expect_t.coeff(n) - given_t.coeff(n)).norm() > R::of(1e-12) {
                return Err(CoreError::Domain(format!(
                    "gprime mismatches differentiate(g) at coefficient {n}"
                )));
            }
        }
        Ok(Self {
            g,
            gprime,
            name: name.into(),
        })
    }

    pub fn g(&self) -> &TaylorSeries<R> {
        &self.g
    }

    pub fn gprime(&self) -> &TaylorSeries<R> {
        &self.gprime
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scaled(&self, lambda: C<R>) -> Self {
        Self {
            g: self.g.scale(lambda),
            gprime: self.gprime.scale(lambda),
            name: format!("{}*scaled", self.name),
        }
    }
}

/// Analytic self-map of the disk, used as a composition symbol.
#[derive(Debug, Clone)]
pub struct SelfMap<R: Real> {
    phi: TaylorSeries<R>,
    phi_prime: TaylorSeries<R>,
    name: String,
    univalent: bool,
}

impl<R: Real> SelfMap<R> {
    /// Validates |phi| < 1 on a dense interior grid, and pairwise-distinct
    /// values there when the univalent flag is set.
    pub fn new(phi: TaylorSeries<R>, name: impl Into<String>, univalent: bool) -> Result<Self> {
        let name = name.into();
        let mut samples = Vec::new();
        for i in 0..16 {
            let r = R::of((i as f64 + 0.5) / 16.0 * 0.98);
            for j in 0..24 {
                let t = R::TAU() * R::of(j as f64 / 24.0);
                let z = unit(t) * r;
                let v = phi.horner(z);
                if v.norm() >= R::one() {
                    return Err(CoreError::Domain(format!(
                        "{name}: |phi| >= 1 at sample z = {z}"
                    )));
                }
                samples.push(v);
            }
        }
        if univalent {
            for i in 0..samples.len() {
                for j in (i + 1)..samples.len() {
                    if (samples[i] - samples[j]).norm() < R::of(1e-12) {
                        return Err(CoreError::Domain(format!(
                            "{name}: univalent flag set but values collide on the test grid"
                        )));
                    }
                }
            }
        }
        let phi_prime = phi.differentiate();
        Ok(Self {
            phi,
            phi_prime,
            name,
            univalent,
        })
    }

    pub fn phi(&self) -> &TaylorSeries<R> {
        &self.phi
    }

    pub fn phi0(&self) -> C<R> {
        self.phi.coeff(0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn univalent(&self) -> bool {
        self.univalent
    }
}

/// `T_g f = integral_0^z f g'`, as a coefficient operation. The product keeps
/// its full degree, so the only truncation is the one already present in the
/// inputs; (T_g f)(0) = 0 exactly.
pub fn volterra_apply<R: Real>(g: &SymbolG<R>, f: &TaylorSeries<R>) -> TaylorSeries<R> {
    f.mul_full(g.gprime()).integrate_from_zero()
}

/// Cesaro operator through the integral route: T_{log1z} f, then the shift
/// down by one (exact: the primitive vanishes at 0). Output truncated at
/// `degree`.
pub fn cesaro_apply_integral<R: Real>(f: &TaylorSeries<R>, degree: usize) -> TaylorSeries<R> {
    let geometric = TaylorSeries::new(vec![C::new(R::one(), R::zero()); degree + 1]);
    let product = f.mul_truncated(&geometric, degree);
    let primitive = product.integrate_from_zero();
    let coeffs = (0..=degree).map(|n| primitive.coeff(n + 1)).collect();
    TaylorSeries::new(coeffs)
}

/// Cesaro operator in coefficient form: `b_n = (1/(n+1)) sum_{k<=n} a_k`.
/// Serves as the independent oracle for the integral route.
pub fn cesaro_apply_coeff<R: Real>(f: &TaylorSeries<R>, degree: usize) -> TaylorSeries<R> {
    let mut partial = C::new(R::zero(), R::zero());
    let mut coeffs = Vec::with_capacity(degree + 1);
    for n in 0..=degree {
        partial = partial + f.coeff(n);
        coeffs.push(partial / R::of((n + 1) as f64));
    }
    TaylorSeries::new(coeffs)
}

/// Taylor composition `f o phi` by Horner over the coefficients of f, every
/// intermediate product truncated at `max_degree`.
///
/// Errors with a truncation warning when the result still carries
/// non-negligible mass at the cut-off degree (|phi| close to 1, or phi of
/// high degree pushing content past the cap).
pub fn compose_apply<R: Real>(
    phi: &SelfMap<R>,
    f: &TaylorSeries<R>,
    max_degree: usize,
) -> Result<TaylorSeries<R>> {
    let mut acc = TaylorSeries::new(vec![f.coeff(f.degree())]);
    for n in (0..f.degree()).rev() {
        acc = acc.mul_truncated(phi.phi(), max_degree);
        let mut coeffs = acc.coeffs().to_vec();
        coeffs[0] = coeffs[0] + f.coeff(n);
        acc = TaylorSeries::new(coeffs);
    }
    // tail estimate: mass sitting in the top 5% of retained degrees
    let len = acc.coeffs().len();
    if len > 32 {
        let head = len - len / 20 - 1;
        let top: R = acc.coeffs()[head..]
            .iter()
            .map(|c| c.norm())
            .fold(R::zero(), |a, x| a.max(x));
        let peak: R = acc
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .fold(R::zero(), |a, x| a.max(x));
        if peak > R::zero() && top / peak > R::of(1e-9) {
            return Err(CoreError::Truncation {
                tail_bound: (top / peak).to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(acc)
}

/// Winding number of the closed polyline `points` around w, by summed turn
/// angles. For a Jordan curve this is 0 or +-1 away from the curve itself.
fn winding_number<R: Real>(points: &[C<R>], w: C<R>) -> i32 {
    let mut total = R::zero();
    let n = points.len();
    for k in 0..n {
        let a = points[k] - w;
        let b = points[(k + 1) % n] - w;
        let cross = a.re * b.im - a.im * b.re;
        let dot = a.re * b.re + a.im * b.im;
        total = total + cross.atan2(dot);
    }
    let turns = total / R::TAU();
    turns.round().to_i32().unwrap_or(0)
}

/// Damped Newton solve of phi(z) = w from one seed; stays inside the disk.
fn newton_from<R: Real>(
    phi: &TaylorSeries<R>,
    phi_prime: &TaylorSeries<R>,
    w: C<R>,
    seed: C<R>,
    max_iter: usize,
    tol: R,
) -> Option<C<R>> {
    let mut z = seed;
    let mut res = (phi.horner(z) - w).norm();
    for _ in 0..max_iter {
        if res < tol {
            return (z.norm() < R::one()).then_some(z);
        }
        let d = phi_prime.horner(z);
        if d.norm() < R::of(1e-300) {
            return None;
        }
        let full = (phi.horner(z) - w) / d;
        let mut lambda = R::one();
        let mut improved = false;
        for _ in 0..30 {
            let mut cand = z - full * lambda;
            let n = cand.norm();
            if n >= R::one() {
                cand = cand * (R::of(0.999999) / n);
            }
            let r = (phi.horner(cand) - w).norm();
            if r < res {
                z = cand;
                res = r;
                improved = true;
                break;
            }
            lambda = lambda * R::of(0.5);
        }
        if !improved {
            return None;
        }
    }
    (res < tol && z.norm() < R::one()).then_some(z)
}

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 200;
const IMAGE_RING_RADIUS: f64 = 0.999;
const IMAGE_RING_NODES: usize = 2048;

/// The boundary curve `phi(rho e^{i theta})` used to decide membership in
/// phi(D); slightly inside the circle so truncated symbols stay reliable.
fn image_ring<R: Real>(phi: &SelfMap<R>) -> Vec<C<R>> {
    phi.phi()
        .values_on_ring(R::of(IMAGE_RING_RADIUS), IMAGE_RING_NODES, R::zero())
}

fn preimage<R: Real>(phi: &SelfMap<R>, w: C<R>, warm: Option<C<R>>) -> Option<C<R>> {
    let tol = R::of(NEWTON_TOL);
    if let Some(seed) = warm {
        if let Some(z) = newton_from(&phi.phi, &phi.phi_prime, w, seed, 40, tol) {
            return Some(z);
        }
    }
    for i in 0..32 {
        let r = R::of((i as f64 + 0.5) / 32.0 * 0.999);
        for j in 0..32 {
            let seed = unit(R::TAU() * R::of(j as f64 / 32.0)) * r;
            if let Some(z) = newton_from(&phi.phi, &phi.phi_prime, w, seed, NEWTON_MAX_ITER, tol) {
                return Some(z);
            }
        }
    }
    None
}

/// Nevanlinna counting function `N_phi(w) = log(1/|phi^{-1}(w)|)` for
/// univalent phi, and 0 outside the image of the disk.
pub fn nevanlinna<R: Real>(phi: &SelfMap<R>, w: C<R>) -> Result<R> {
    if !phi.univalent() {
        return Err(CoreError::Unsupported(format!(
            "{}: Nevanlinna counting needs the univalent flag",
            phi.name()
        )));
    }
    if w.norm() >= R::one() {
        return Ok(R::zero());
    }
    let ring = image_ring(phi);
    if winding_number(&ring, w) == 0 {
        return Ok(R::zero());
    }
    match preimage(phi, w, None) {
        Some(z) => Ok((R::one() / z.norm().max(R::of(1e-12))).ln()),
        None => Err(CoreError::Numeric(format!(
            "Newton did not converge for w = {w} under {}",
            phi.name()
        ))),
    }
}

/// `||C_phi T_g f||_{H^2}^2` through the change-of-variables norm formula:
/// `|T_g f(phi(0))|^2 + 2 integral |f|^2 |g'|^2 N_phi dA`.
pub fn stanton_norm<R: Real>(
    phi: &SelfMap<R>,
    g: &SymbolG<R>,
    f: &TaylorSeries<R>,
    quad: &DiskQuadrature<R>,
) -> Result<R> {
    if !phi.univalent() {
        return Err(CoreError::Unsupported(format!(
            "{}: the norm formula is implemented for univalent symbols",
            phi.name()
        )));
    }
    let tg = volterra_apply(g, f);
    let term1 = tg.horner(phi.phi0()).norm_sqr();
    let ring = image_ring(phi);
    let m = quad.angular_count();
    let offset = quad.angular_offset();
    let plan = fft::plan_inverse::<R>(m);
    let ring_integrals: Vec<Result<R>> = (0..quad.radial_count())
        .into_par_iter()
        .map(|i| {
            let r = quad.radius(i);
            let vf = fft::eval_on_ring(f.coeffs(), r, offset, &plan);
            let vg = fft::eval_on_ring(g.gprime().coeffs(), r, offset, &plan);
            let mut warm: Option<C<R>> = None;
            let mut acc = R::zero();
            for k in 0..m {
                let w = unit(quad.angle(k)) * r;
                // a converged preimage proves w is in the image; the winding
                // test is only consulted when the warm start fails
                let hot = warm.and_then(|seed| {
                    newton_from(&phi.phi, &phi.phi_prime, w, seed, 40, R::of(NEWTON_TOL))
                });
                let z = match hot {
                    Some(z) => z,
                    None => {
                        if winding_number(&ring, w) == 0 {
                            warm = None;
                            continue;
                        }
                        match preimage(phi, w, None) {
                            Some(z) => z,
                            None => {
                                return Err(CoreError::Numeric(format!(
                                    "Newton did not converge for node w = {w}"
                                )))
                            }
                        }
                    }
                };
                warm = Some(z);
                let nphi = (R::one() / z.norm().max(R::of(1e-12))).ln();
                acc = acc + vf[k].norm_sqr() * vg[k].norm_sqr() * nphi;
            }
            Ok(acc / R::of(m as f64))
        })
        .collect();
    let mut integral = R::zero();
    for (i, ri) in ring_integrals.into_iter().enumerate() {
        integral = integral + quad.radial_weight(i) * ri?;
    }
    Ok(term1 + R::of(2.0) * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::hp_norm_default;
    use crate::scalar::c64;
    use crate::series::{atom, log1z};
    use approx::assert_relative_eq;

    type S = TaylorSeries<f64>;

    fn sym_z() -> SymbolG<f64> {
        SymbolG::new(S::monomial(1), "id")
    }

    fn sym_log1z(degree: usize) -> SymbolG<f64> {
        SymbolG::new(log1z::<f64>(degree), "log1z")
    }

    #[test]
    fn volterra_with_identity_symbol_integrates() {
        let g = sym_z();
        for n in [0usize, 1, 4] {
            let out = volterra_apply(&g, &S::monomial(n));
            assert_relative_eq!(out.coeff(n + 1).re, 1.0 / (n as f64 + 1.0));
            assert_eq!(out.coeff(0), c64(0.0, 0.0));
        }
    }

    #[test]
    fn volterra_log1z_on_one_gives_log_series() {
        let g = sym_log1z(16);
        let out = volterra_apply(&g, &S::one());
        for n in 1..=16 {
            assert_relative_eq!(out.coeff(n).re, 1.0 / n as f64, max_relative = 1e-14);
        }
        assert_eq!(out.coeff(0), c64(0.0, 0.0));
    }

    #[test]
    fn symbol_from_parts_checks_cache() {
        let g = log1z::<f64>(8);
        let good = SymbolG::from_parts(g.clone(), g.differentiate(), "log1z");
        assert!(good.is_ok());
        let bad = SymbolG::from_parts(g.clone(), S::one(), "broken");
        assert!(bad.is_err());
    }

    #[test]
    fn cesaro_of_one_and_telescoping() {
        let one = S::one();
        let ci = cesaro_apply_integral(&one, 12);
        for n in 0..=12 {
            assert_relative_eq!(ci.coeff(n).re, 1.0 / (n as f64 + 1.0), max_relative = 1e-14);
        }
        let f = S::from_real(&[1.0, -1.0]);
        let cc = cesaro_apply_coeff(&f, 12);
        assert_relative_eq!(cc.coeff(0).re, 1.0);
        for n in 1..=12 {
            assert!(cc.coeff(n).norm() < 1e-15);
        }
        let zero = S::zero();
        assert!(cesaro_apply_integral(&zero, 6)
            .coeffs()
            .iter()
            .all(|c| c.norm() == 0.0));
    }

    #[test]
    fn cesaro_routes_agree() {
        let mut state = 1u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..5 {
            let f = S::new((0..=64).map(|_| c64(rnd(), rnd())).collect());
            let a = cesaro_apply_integral(&f, 64);
            let b = cesaro_apply_coeff(&f, 64);
            for n in 0..=64 {
                assert!(
                    (a.coeff(n) - b.coeff(n)).norm() < 1e-10,
                    "coefficient {n} disagrees"
                );
            }
        }
    }

    #[test]
    fn volterra_log1z_factors_through_cesaro() {
        // T_{log1z} f = M_z C f: the integral route shifted up reproduces it
        // (symbol truncated past deg f so the compared partial sums are full)
        let f = S::from_real(&[1.0, -1.0, 0.5, 0.25]);
        let g = sym_log1z(4);
        let tg = volterra_apply(&g, &f);
        let ces = cesaro_apply_integral(&f, 3);
        for n in 0..=3 {
            assert!((tg.coeff(n + 1) - ces.coeff(n)).norm() < 1e-15);
        }
    }

    fn selfmap_scale(r: f64) -> SelfMap<f64> {
        SelfMap::new(S::from_real(&[0.0, r]), format!("scale:{r}"), true).unwrap()
    }

    #[test]
    fn compose_identity_and_square() {
        let id = selfmap_scale(1.0 - 1e-12); // numerically the identity is not a strict self-map sample-wise
        let f = S::from_real(&[1.0, 2.0, 3.0]);
        let out = compose_apply(&id, &f, 8).unwrap();
        for n in 0..=2 {
            assert_relative_eq!(out.coeff(n).re, f.coeff(n).re, max_relative = 1e-9);
        }
        let sq = SelfMap::new(S::monomial(2), "power:2", false).unwrap();
        let z = S::monomial(1);
        let out = compose_apply(&sq, &z, 4).unwrap();
        assert_relative_eq!(out.coeff(2).re, 1.0);
    }

    #[test]
    fn compose_geometric_with_half_scale() {
        let phi = selfmap_scale(0.5);
        let f = S::new(vec![c64(1.0, 0.0); 40]);
        let out = compose_apply(&phi, &f, 39).unwrap();
        for n in 0..=20 {
            assert_relative_eq!(out.coeff(n).re, 0.5f64.powi(n as i32), max_relative = 1e-12);
        }
    }

    #[test]
    fn compose_matches_pointwise_evaluation() {
        let phi = SelfMap::new(
            S::from_real(&[0.1, 0.5, 0.2]),
            "poly-map",
            false,
        )
        .unwrap();
        let f = atom::<f64>(c64(0.4, 0.2), 2.0, 64).unwrap();
        let comp = compose_apply(&phi, &f, 512).unwrap();
        let mut state = 7u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..100 {
            let z = c64(rnd() * 0.9, rnd() * 0.9);
            let direct = f.evaluate(phi.phi().horner(z)).unwrap();
            let via = comp.evaluate(z).unwrap();
            assert!((direct - via).norm() < 1e-8, "mismatch at {z}");
        }
    }

    #[test]
    fn compose_flags_truncation_blowup() {
        let cubic = SelfMap::new(S::monomial(3), "power:3", false).unwrap();
        let f = log1z::<f64>(512);
        let r = compose_apply(&cubic, &f, 600);
        assert!(matches!(r, Err(CoreError::Truncation { .. })));
    }

    #[test]
    fn nevanlinna_closed_forms() {
        let id = SelfMap::new(S::monomial(1), "id", true).unwrap();
        assert_relative_eq!(
            nevanlinna(&id, c64(0.5, 0.0)).unwrap(),
            2f64.ln(),
            max_relative = 1e-9
        );
        assert_eq!(nevanlinna(&id, c64(1.5, 0.0)).unwrap(), 0.0);
        let half = selfmap_scale(0.5);
        assert_relative_eq!(
            nevanlinna(&half, c64(0.25, 0.0)).unwrap(),
            2f64.ln(),
            max_relative = 1e-9
        );
        // outside the image of z/2
        assert_eq!(nevanlinna(&half, c64(0.75, 0.0)).unwrap(), 0.0);
        let non_univalent = SelfMap::new(S::monomial(2), "power:2", false).unwrap();
        assert!(nevanlinna(&non_univalent, c64(0.1, 0.0)).is_err());
    }

    #[test]
    fn stanton_closed_form_scale_half() {
        // phi = z/2, g = z, f = 1: C_phi T_g f = z/2, squared norm 1/4
        let phi = selfmap_scale(0.5);
        let g = sym_z();
        let quad = DiskQuadrature::<f64>::new(128, 128);
        let v = stanton_norm(&phi, &g, &S::one(), &quad).unwrap();
        assert_relative_eq!(v, 0.25, max_relative = 1e-3);
    }

    #[test]
    fn stanton_identity_reduces_to_littlewood_paley() {
        let id = SelfMap::new(S::monomial(1), "id", true).unwrap();
        let g = sym_log1z(64);
        let f = atom::<f64>(c64(0.5, 0.0), 2.0, 64).unwrap();
        let quad = DiskQuadrature::<f64>::new(256, 256);
        let v = stanton_norm(&id, &g, &f, &quad).unwrap();
        let direct = hp_norm_default(&volterra_apply(&g, &f), 2.0).unwrap();
        assert_relative_eq!(v, direct * direct, max_relative = 1e-2);
    }

    #[test]
    fn stanton_dual_route_on_automorphism() {
        // phi = sigma_{0.5}, g = log1z, f an atom: quadrature route vs
        // compose-then-boundary route agree within 1%
        let a = 0.5f64;
        let mut coeffs = vec![c64(a, 0.0)];
        for n in 1..256 {
            coeffs.push(c64((a.powi(n as i32 - 1)) * (a * a - 1.0), 0.0));
        }
        let phi = SelfMap::new(S::new(coeffs), "auto:0.5", true).unwrap();
        let g = sym_log1z(128);
        let f = atom::<f64>(c64(0.7, 0.0), 2.0, 128).unwrap();
        let quad = DiskQuadrature::<f64>::new(256, 512);
        let lhs = stanton_norm(&phi, &g, &f, &quad).unwrap();
        let composed = compose_apply(&phi, &volterra_apply(&g, &f), 2048).unwrap();
        let rhs = hp_norm_default(&composed, 2.0).unwrap().powi(2);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-2);
    }

    #[test]
    fn selfmap_rejects_escaping_values() {
        let too_big = S::from_real(&[0.0, 1.2]);
        assert!(SelfMap::new(too_big, "bad", false).is_err());
        let collapsing = S::from_real(&[0.3]); // constant map collides with itself
        assert!(SelfMap::new(collapsing, "const", true).is_err());
    }
}
