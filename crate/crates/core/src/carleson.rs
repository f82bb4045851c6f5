//! The measure mu_g, Carleson-window statistics, the Littlewood-Paley
//! identity, and the constructive localization of the set where the measure
//! keeps linear window mass.
//!
//! mu_g has density |g'(z)|^2 log(1/|z|) against normalized area measure.
//! Window mass growing like O(h) characterizes bounded T_g, o(h) compact T_g;
//! `localize` carves out of the circle a compact set K of prescribed
//! co-measure on which the window ratios vanish, following the projection /
//! maximal-function / threshold route at grid scale.

use crate::arcs::ArcSet;
use crate::error::{CoreError, Result};
use crate::operators::SymbolG;
use crate::quad::DiskQuadrature;
use crate::scalar::{angle_dist, wrap_angle, Real};

/// Nonnegative density sampled on the quadrature nodes (ring-major layout),
/// with its total mass cached.
#[derive(Debug, Clone)]
pub struct MeasureDensity<R: Real> {
    values: Vec<R>,
    mass: R,
    provenance: String,
}

impl<R: Real> MeasureDensity<R> {
    pub fn new(values: Vec<R>, quad: &DiskQuadrature<R>, provenance: impl Into<String>) -> Self {
        assert_eq!(values.len(), quad.node_count());
        debug_assert!(values.iter().all(|v| *v >= R::zero()));
        let mass = quad.integrate(&values);
        Self {
            values,
            mass,
            provenance: provenance.into(),
        }
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn mass(&self) -> R {
        self.mass
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Pointwise scaling (new provenance tag).
    pub fn scaled(&self, factor: R, quad: &DiskQuadrature<R>, provenance: &str) -> Self {
        Self::new(
            self.values.iter().map(|v| *v * factor).collect(),
            quad,
            provenance,
        )
    }

    /// Restriction: zero out nodes where `keep` is false.
    pub fn restricted<F>(&self, quad: &DiskQuadrature<R>, keep: F, provenance: &str) -> Self
    where
        F: Fn(usize, usize) -> bool,
    {
        let m = quad.angular_count();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                if keep(idx / m, idx % m) {
                    *v
                } else {
                    R::zero()
                }
            })
            .collect();
        Self::new(values, quad, provenance)
    }
}

/// Carleson window `W(zeta, h) = {1-h < |z| < 1, |arg(z/zeta)| < h}`.
#[derive(Debug, Clone, Copy)]
pub struct CarlesonWindow<R: Real> {
    pub center_angle: R,
    pub h: R,
}

impl<R: Real> CarlesonWindow<R> {
    pub fn new(center_angle: R, h: R) -> Self {
        Self {
            center_angle: wrap_angle(center_angle),
            h,
        }
    }

    pub fn contains(&self, r: R, angle: R) -> bool {
        r > R::one() - self.h && r < R::one() && angle_dist(angle, self.center_angle) < self.h
    }
}

/// `d mu_g = |g'|^2 log(1/|z|) dA` sampled on the grid.
pub fn mu_density<R: Real>(g: &SymbolG<R>, quad: &DiskQuadrature<R>) -> MeasureDensity<R> {
    let values = quad.map_series(g.gprime(), |v, r| v.norm_sqr() * (R::one() / r).ln());
    MeasureDensity::new(values, quad, format!("mu_g:{}", g.name()))
}

/// Littlewood-Paley residual `| ||g||_2^2 - |g(0)|^2 - 2 mass(mu_g) |`,
/// with the coefficient side computed by Parseval (the independent route).
#[derive(Debug, Clone, Copy)]
pub struct LpResidual<R: Real> {
    pub residual: R,
    pub relative: R,
    pub norm_sq: R,
}

pub fn littlewood_paley_residual<R: Real>(
    g: &SymbolG<R>,
    quad: &DiskQuadrature<R>,
) -> LpResidual<R> {
    let norm_sq = g
        .g()
        .coeffs()
        .iter()
        .fold(R::zero(), |acc, c| acc + c.norm_sqr());
    let mu = mu_density(g, quad);
    let residual = (norm_sq - g.g().coeff(0).norm_sqr() - R::of(2.0) * mu.mass()).abs();
    let relative = if norm_sq > R::zero() {
        residual / norm_sq
    } else {
        residual
    };
    LpResidual {
        residual,
        relative,
        norm_sq,
    }
}

/// Minimum node count inside a window before its mass is trusted.
pub const MIN_WINDOW_NODES: usize = 16;

/// Quadrature mass of one Carleson window. Errors when fewer than
/// [`MIN_WINDOW_NODES`] grid nodes fall inside.
pub fn window_measure<R: Real>(
    quad: &DiskQuadrature<R>,
    mu: &MeasureDensity<R>,
    window: &CarlesonWindow<R>,
) -> Result<R> {
    let m = quad.angular_count();
    let m_inv = R::one() / R::of(m as f64);
    let mut acc = R::zero();
    let mut nodes = 0usize;
    for i in 0..quad.radial_count() {
        let r = quad.radius(i);
        if r <= R::one() - window.h {
            continue;
        }
        let mut ring = R::zero();
        for k in 0..m {
            if angle_dist(quad.angle(k), window.center_angle) < window.h {
                ring = ring + mu.values()[i * m + k];
                nodes += 1;
            }
        }
        acc = acc + quad.radial_weight(i) * ring * m_inv;
    }
    if nodes < MIN_WINDOW_NODES {
        return Err(CoreError::Resolution(format!(
            "window h = {} holds only {nodes} grid nodes; refine the grid",
            window.h
        )));
    }
    Ok(acc)
}

/// Window statistics `c(h_k) = sup_centers mu(W(center, h_k)) / h_k` over the
/// dyadic scales `h_k = 2^-k`, k = 1..=kmax.
#[derive(Debug, Clone)]
pub struct CarlesonProfile<R: Real> {
    pub h: Vec<R>,
    pub c: Vec<R>,
    pub argmax_angle: Vec<R>,
    pub centers: usize,
}

impl<R: Real> CarlesonProfile<R> {
    /// Least-squares log-log slope over the last `levels` dyadic scales.
    pub fn tail_slope(&self, levels: usize) -> R {
        let n = self.h.len();
        assert!(levels >= 2 && levels <= n);
        let hs = &self.h[n - levels..];
        let cs = &self.c[n - levels..];
        let mut sx = R::zero();
        let mut sy = R::zero();
        let mut sxx = R::zero();
        let mut sxy = R::zero();
        let lf = R::of(levels as f64);
        for (h, c) in hs.iter().zip(cs.iter()) {
            let x = h.ln();
            let y = c.max(R::of(1e-300)).ln();
            sx = sx + x;
            sy = sy + y;
            sxx = sxx + x * x;
            sxy = sxy + x * y;
        }
        (lf * sxy - sx * sy) / (lf * sxx - sx * sx)
    }
}

/// Per-level angular mass profiles: `profile[k][col]` is the mass of the
/// annulus `1 - 2^-(k+1) < r < 1` in angular column `col`. Shared by the
/// profile scan and the localization.
fn annulus_column_profiles<R: Real>(
    quad: &DiskQuadrature<R>,
    mu: &MeasureDensity<R>,
    kmax: u32,
) -> Vec<Vec<R>> {
    let m = quad.angular_count();
    let m_inv = R::one() / R::of(m as f64);
    let thresholds: Vec<R> = (1..=kmax)
        .map(|k| R::one() - R::of(0.5).powi(k as i32))
        .collect();
    let mut snapshots: Vec<Option<Vec<R>>> = vec![None; kmax as usize];
    let mut current = vec![R::zero(); m];
    for i in (0..quad.radial_count()).rev() {
        let r = quad.radius(i);
        for (k, &t) in thresholds.iter().enumerate() {
            if r <= t && snapshots[k].is_none() {
                snapshots[k] = Some(current.clone());
            }
        }
        let w = quad.radial_weight(i) * m_inv;
        let ring = &mu.values()[i * m..(i + 1) * m];
        for (c, v) in current.iter_mut().zip(ring.iter()) {
            *c = *c + w * *v;
        }
    }
    snapshots
        .into_iter()
        .map(|s| s.unwrap_or_else(|| current.clone()))
        .collect()
}

/// Circular prefix-sum query helper.
struct CircularSums<R: Real>(Vec<R>);

impl<R: Real> CircularSums<R> {
    fn new(values: &[R]) -> Self {
        let mut acc = R::zero();
        let mut p = Vec::with_capacity(values.len() + 1);
        p.push(R::zero());
        for v in values {
            acc = acc + *v;
            p.push(acc);
        }
        Self(p)
    }

    fn total(&self) -> R {
        *self.0.last().unwrap()
    }

    /// Sum of columns a..=b taken modulo the length.
    fn range(&self, a: isize, b: isize) -> R {
        let n = self.0.len() as isize - 1;
        if b - a + 1 >= n {
            return self.total();
        }
        let a = a.rem_euclid(n);
        let b = b.rem_euclid(n);
        if a <= b {
            self.0[(b + 1) as usize] - self.0[a as usize]
        } else {
            self.total() - (self.0[a as usize] - self.0[(b + 1) as usize])
        }
    }
}

/// Columns whose node angle `(col + 1/2) 2 pi / m` lies strictly within
/// `(center - h, center + h)`, as an inclusive index range.
fn window_columns<R: Real>(m: usize, center: R, h: R) -> Option<(isize, isize)> {
    let delta = R::TAU() / R::of(m as f64);
    let lo = (center - h) / delta - R::of(0.5);
    let hi = (center + h) / delta - R::of(0.5);
    let a = lo.floor().to_isize().unwrap() + 1;
    let mut b = hi.ceil().to_isize().unwrap() - 1;
    // ties: the window is open, nodes exactly at distance h are outside
    let bf = R::of(b as f64);
    if (bf + R::of(0.5)) * delta >= center + h {
        b -= 1;
    }
    if b < a {
        None
    } else {
        Some((a, b))
    }
}

/// Computes the dyadic window profile with the sup taken over `centers`
/// uniformly spaced window centers (angles `j 2 pi / centers`), optionally
/// restricted to centers inside `allowed`.
pub fn carleson_profile_restricted<R: Real>(
    quad: &DiskQuadrature<R>,
    mu: &MeasureDensity<R>,
    kmax: u32,
    centers: usize,
    allowed: Option<&ArcSet<R>>,
) -> Result<CarlesonProfile<R>> {
    let m = quad.angular_count();
    // resolution pre-check at the smallest scale
    let h_min = R::of(0.5).powi(kmax as i32);
    let radial_nodes = (0..quad.radial_count())
        .filter(|&i| quad.radius(i) > R::one() - h_min)
        .count();
    let angular_nodes = window_columns(m, R::zero(), h_min)
        .map(|(a, b)| (b - a + 1) as usize)
        .unwrap_or(0);
    if radial_nodes * angular_nodes < MIN_WINDOW_NODES {
        return Err(CoreError::Resolution(format!(
            "h = 2^-{kmax} windows hold only {} nodes; refine the grid",
            radial_nodes * angular_nodes
        )));
    }
    let profiles = annulus_column_profiles(quad, mu, kmax);
    let mut h_out = Vec::with_capacity(kmax as usize);
    let mut c_out = Vec::with_capacity(kmax as usize);
    let mut arg_out = Vec::with_capacity(kmax as usize);
    for (ki, profile) in profiles.iter().enumerate() {
        let h = R::of(0.5).powi(ki as i32 + 1);
        let sums = CircularSums::new(profile);
        let mut best = R::zero();
        let mut best_angle = R::zero();
        for j in 0..centers {
            let center = R::TAU() * R::of(j as f64) / R::of(centers as f64);
            if let Some(allowed) = allowed {
                if !allowed.contains(center) {
                    continue;
                }
            }
            if let Some((a, b)) = window_columns(m, center, h) {
                let mass = sums.range(a, b);
                if mass > best {
                    best = mass;
                    best_angle = center;
                }
            }
        }
        h_out.push(h);
        c_out.push(best / h);
        arg_out.push(best_angle);
    }
    Ok(CarlesonProfile {
        h: h_out,
        c: c_out,
        argmax_angle: arg_out,
        centers,
    })
}

/// Unrestricted profile over all centers.
pub fn carleson_profile<R: Real>(
    quad: &DiskQuadrature<R>,
    mu: &MeasureDensity<R>,
    kmax: u32,
    centers: usize,
) -> Result<CarlesonProfile<R>> {
    carleson_profile_restricted(quad, mu, kmax, centers, None)
}

/// Numeric rule for "the profile vanishes": the last dyadic value has dropped
/// below a tenth of the first and the tail log-log slope is at least 1/2.
/// Thresholds are configuration, not truth claims.
#[derive(Debug, Clone, Copy)]
pub struct VmoaVerdict<R: Real> {
    pub vanishing: bool,
    pub drop_ratio: R,
    pub tail_slope: R,
}

pub fn vmoa_verdict<R: Real>(profile: &CarlesonProfile<R>) -> VmoaVerdict<R> {
    let first = profile.c.first().copied().unwrap_or(R::zero());
    let last = profile.c.last().copied().unwrap_or(R::zero());
    let drop_ratio = if first > R::zero() { last / first } else { R::zero() };
    let tail_slope = if profile.c.len() >= 3 {
        profile.tail_slope(3)
    } else {
        R::zero()
    };
    VmoaVerdict {
        vanishing: drop_ratio < R::of(0.1) && tail_slope >= R::of(0.5),
        drop_ratio,
        tail_slope,
    }
}

/// Table of annulus masses `mu(S_k)`, `S_k = {1 - 1/k < |z| < 1}`.
pub fn annulus_masses<R: Real>(
    quad: &DiskQuadrature<R>,
    mu: &MeasureDensity<R>,
    kmax: u32,
) -> Vec<R> {
    let m = quad.angular_count();
    let m_inv = R::one() / R::of(m as f64);
    let mut ring_mass: Vec<R> = Vec::with_capacity(quad.radial_count());
    for i in 0..quad.radial_count() {
        let ring = &mu.values()[i * m..(i + 1) * m];
        let s = ring.iter().fold(R::zero(), |a, &x| a + x);
        ring_mass.push(quad.radial_weight(i) * s * m_inv);
    }
    (1..=kmax)
        .map(|k| {
            let cutoff = R::one() - R::one() / R::of(k as f64);
            (0..quad.radial_count())
                .filter(|&i| quad.radius(i) > cutoff)
                .fold(R::zero(), |a, i| a + ring_mass[i])
        })
        .collect()
}

/// Knobs of the localization algorithm.
#[derive(Debug, Clone, Copy)]
pub struct LocalizeParams {
    /// Boundary bins for the projected measures.
    pub bins: usize,
    /// Depth of the annulus ladder S_k, k = 1..=annuli.
    pub annuli: u32,
    /// Dyadic depth of the reported localized profile.
    pub profile_kmax: u32,
    /// Centers for the localized profile sup.
    pub centers: usize,
    /// Floor under the vanishing thresholds.
    pub tau_floor: f64,
}

impl Default for LocalizeParams {
    fn default() -> Self {
        Self {
            bins: 4096,
            annuli: 8,
            profile_kmax: 8,
            centers: 4096,
            tau_floor: 1e-9,
        }
    }
}

/// Diagnostics accompanying the localized set.
#[derive(Debug, Clone)]
pub struct LocalizeDiagnostics<R: Real> {
    /// nu_k(T) = mu(S_k) per annulus level.
    pub nu_totals: Vec<R>,
    /// Vanishing thresholds tau_k = max(2 nu_k(T)/eps, floor) actually used.
    pub thresholds: Vec<R>,
    pub excised_measure: R,
    pub localized_profile: CarlesonProfile<R>,
    /// Text record of the threshold rule (the constructive stand-in for the
    /// almost-everywhere convergence step).
    pub rule: String,
}

#[derive(Debug, Clone)]
pub struct Localized<R: Real> {
    pub k_set: ArcSet<R>,
    pub diagnostics: LocalizeDiagnostics<R>,
}

/// Constructive localization: projects mu restricted to the annuli S_k onto
/// boundary bins, takes the discrete maximal function over dyadic arc widths,
/// and keeps the bins where every level stays under the vanishing threshold
/// tau_k = max(2 nu_k(T)/eps, floor). Returns the kept set K (measure budget
/// m(T \ K) < eps enforced) and the window profile restricted to K.
pub fn localize<R: Real>(
    quad: &DiskQuadrature<R>,
    mu: &MeasureDensity<R>,
    eps: R,
    params: &LocalizeParams,
) -> Result<Localized<R>> {
    if eps <= R::zero() || eps > R::one() {
        return Err(CoreError::Domain(format!(
            "localize needs eps in (0, 1], got {eps}"
        )));
    }
    if eps >= R::one() {
        // degenerate budget: everything may be discarded
        let profile = CarlesonProfile {
            h: (1..=params.profile_kmax)
                .map(|k| R::of(0.5).powi(k as i32))
                .collect(),
            c: vec![R::zero(); params.profile_kmax as usize],
            argmax_angle: vec![R::zero(); params.profile_kmax as usize],
            centers: params.centers,
        };
        return Ok(Localized {
            k_set: ArcSet::empty(),
            diagnostics: LocalizeDiagnostics {
                nu_totals: Vec::new(),
                thresholds: Vec::new(),
                excised_measure: R::one(),
                localized_profile: profile,
                rule: "eps = 1: empty set allowed".to_string(),
            },
        });
    }
    let b = params.bins;
    let m = quad.angular_count();
    let m_inv = R::one() / R::of(m as f64);

    // nu_k per boundary bin, one pass over rings from the outside in
    let cutoffs: Vec<R> = (1..=params.annuli)
        .map(|k| R::one() - R::one() / R::of(k as f64))
        .collect();
    let col_bin: Vec<usize> = (0..m)
        .map(|k| (((k as f64 + 0.5) * b as f64 / m as f64) as usize).min(b - 1))
        .collect();
    let mut snapshots: Vec<Option<Vec<R>>> = vec![None; params.annuli as usize];
    let mut current = vec![R::zero(); b];
    for i in (0..quad.radial_count()).rev() {
        let r = quad.radius(i);
        for (k, &t) in cutoffs.iter().enumerate() {
            if r <= t && snapshots[k].is_none() {
                snapshots[k] = Some(current.clone());
            }
        }
        let w = quad.radial_weight(i) * m_inv;
        let ring = &mu.values()[i * m..(i + 1) * m];
        for (col, v) in ring.iter().enumerate() {
            current[col_bin[col]] = current[col_bin[col]] + w * *v;
        }
    }
    let nus: Vec<Vec<R>> = snapshots
        .into_iter()
        .map(|s| s.unwrap_or_else(|| current.clone()))
        .collect();

    let mut bad = vec![false; b];
    let mut nu_totals = Vec::with_capacity(nus.len());
    let mut thresholds = Vec::with_capacity(nus.len());
    for nu in &nus {
        let total = nu.iter().fold(R::zero(), |a, &x| a + x);
        let tau = (R::of(2.0) * total / eps).max(R::of(params.tau_floor));
        nu_totals.push(total);
        thresholds.push(tau);
        // discrete maximal function over dyadic half-widths (factor-2 loss
        // against the true sup is harmless for detecting vanishing ratios)
        let sums = CircularSums::new(nu);
        let mut d = 1usize;
        let mut widths = vec![0usize];
        while d <= b / 2 {
            widths.push(d);
            d *= 2;
        }
        for (bin, flag) in bad.iter_mut().enumerate() {
            if *flag {
                continue;
            }
            let mut maximal = R::zero();
            for &w in &widths {
                let mass = sums.range(bin as isize - w as isize, bin as isize + w as isize);
                let measure = R::of((2 * w + 1) as f64) / R::of(b as f64);
                let ratio = mass / measure;
                if ratio > maximal {
                    maximal = ratio;
                }
            }
            if maximal > tau {
                *flag = true;
            }
        }
    }
    let excised = R::of(bad.iter().filter(|&&x| x).count() as f64) / R::of(b as f64);
    if excised >= eps {
        return Err(CoreError::Resolution(format!(
            "cannot keep m(T \\ K) < {eps}: thresholds excise measure {excised} at {b} bins"
        )));
    }
    let good: Vec<bool> = bad.iter().map(|&x| !x).collect();
    let k_set = ArcSet::from_bins(&good);
    let localized_profile = carleson_profile_restricted(
        quad,
        mu,
        params.profile_kmax,
        params.centers,
        Some(&k_set),
    )?;
    Ok(Localized {
        k_set,
        diagnostics: LocalizeDiagnostics {
            nu_totals,
            thresholds,
            excised_measure: excised,
            localized_profile,
            rule: format!(
                "tau_k = max(2 nu_k(T)/eps, {:.0e}) over dyadic maximal widths",
                params.tau_floor
            ),
        },
    })
}
