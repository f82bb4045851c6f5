//! The invariant suite behind `hvlab selftest`: one named check per module
//! invariant, each returning pass, fail with detail, or skip when the
//! configured resolution cannot support it.

use crate::config::RunConfig;
use hvlab_core::arcs::ArcSet;
use hvlab_core::boundary::{hp_norm_default, NormPolicy};
use hvlab_core::carleson::{
    carleson_profile, littlewood_paley_residual, localize, mu_density, window_measure,
    CarlesonWindow, LocalizeParams,
};
use hvlab_core::domains::{harmonic_measure, StolzUnion, WosParams};
use hvlab_core::operators::{cesaro_apply_coeff, cesaro_apply_integral, volterra_apply, SymbolG};
use hvlab_core::registry::parse_symbol;
use hvlab_core::rigidity::{l2_singularity_probe, ProbeOptions};
use hvlab_core::scalar::C;
use hvlab_core::series::{atom, TaylorSeries};
use hvlab_core::{CoreError, DiskQuadrature};

pub enum Outcome {
    Pass,
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(detail)
    }
}

/// Turns resolution errors into skips, other errors into failures.
fn run_catching(f: impl FnOnce() -> Result<Outcome, CoreError>) -> Outcome {
    match f() {
        Ok(o) => o,
        Err(CoreError::Resolution(msg)) => Outcome::Skip(msg),
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

fn deterministic_poly(len: usize, seed: u64) -> TaylorSeries<f64> {
    let mut state = seed;
    let mut rnd = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    TaylorSeries::new((0..len).map(|_| C::new(rnd(), rnd())).collect())
}

pub fn run_all(cfg: &RunConfig) -> Vec<(String, Outcome)> {
    let policy = NormPolicy::default();
    let mut out: Vec<(String, Outcome)> = Vec::new();
    let mut push = |name: &str, o: Outcome| out.push((name.to_string(), o));

    push(
        "parseval-h2",
        run_catching(|| {
            let f = deterministic_poly(21, 1);
            let direct = hp_norm_default(&f, 2.0)?;
            let pars = f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            Ok(check(
                (direct * direct - pars * pars).abs() < 1e-10 * (1.0 + pars * pars),
                format!("direct {direct} vs parseval {pars}"),
            ))
        }),
    );

    push(
        "differentiate-integrate-roundtrip",
        run_catching(|| {
            let f = deterministic_poly(16, 2);
            let back = f.differentiate().integrate_from_zero();
            let ok = (1..=f.degree())
                .all(|n| (back.coeff(n) - f.coeff(n)).norm() < 1e-14 * (1.0 + f.coeff(n).norm()));
            Ok(check(ok && back.coeff(0).norm() == 0.0, "roundtrip drift".into()))
        }),
    );

    push(
        "atom-normalization",
        run_catching(|| {
            for &(re, im) in &[(0.0, 0.0), (0.5, 0.0), (0.9, 0.0)] {
                for p in [1.0, 4.0 / 3.0, 2.0, 4.0] {
                    let f = atom::<f64>(C::new(re, im), p, 1024)?;
                    let v = hp_norm_default(&f, p)?;
                    if (v - 1.0).abs() > 1e-4 {
                        return Ok(Outcome::Fail(format!("a=({re},{im}) p={p}: norm {v}")));
                    }
                }
            }
            Ok(Outcome::Pass)
        }),
    );

    push(
        "cesaro-dual-oracle",
        run_catching(|| {
            for s in 0..5u64 {
                let f = deterministic_poly(65, 10 + s);
                let a = cesaro_apply_integral(&f, 64);
                let b = cesaro_apply_coeff(&f, 64);
                for n in 0..=64 {
                    if (a.coeff(n) - b.coeff(n)).norm() > 1e-10 {
                        return Ok(Outcome::Fail(format!("coefficient {n} disagrees")));
                    }
                }
            }
            Ok(Outcome::Pass)
        }),
    );

    push(
        "volterra-linearity",
        run_catching(|| {
            let g = parse_symbol::<f64>("log1z", 64)?;
            let f1 = deterministic_poly(12, 20);
            let f2 = deterministic_poly(12, 21);
            let lhs = volterra_apply(
                &g,
                &f1.scale(C::new(0.7, 0.0)).add(&f2.scale(C::new(-1.3, 0.0))),
            );
            let rhs = volterra_apply(&g, &f1)
                .scale(C::new(0.7, 0.0))
                .add(&volterra_apply(&g, &f2).scale(C::new(-1.3, 0.0)));
            let ok = (0..=lhs.degree().max(rhs.degree()))
                .all(|n| (lhs.coeff(n) - rhs.coeff(n)).norm() < 1e-12);
            Ok(check(ok, "linearity defect".into()))
        }),
    );

    let quad = DiskQuadrature::<f64>::new(cfg.radial.min(1024), cfg.angular.min(2048));

    push(
        "littlewood-paley",
        run_catching(|| {
            let id = parse_symbol::<f64>("id", 4)?;
            let r1 = littlewood_paley_residual(&id, &quad);
            let poly = parse_symbol::<f64>("poly:0.4,1.0,-0.2,0.8,0.1", 8)?;
            let r2 = littlewood_paley_residual(&poly, &quad);
            Ok(check(
                r1.relative < 1e-8 && r2.relative < 1e-6,
                format!("residuals {} / {}", r1.relative, r2.relative),
            ))
        }),
    );

    push(
        "window-monotonicity-and-shift",
        run_catching(|| {
            let g = parse_symbol::<f64>("log1z", 256)?;
            let mu = mu_density(&g, &quad);
            let small = window_measure(&quad, &mu, &CarlesonWindow::new(0.2, 0.06))?;
            let grown = window_measure(&quad, &mu, &CarlesonWindow::new(0.2, 0.12))?;
            let shifted = window_measure(&quad, &mu, &CarlesonWindow::new(0.2 + 0.1, 0.18))?;
            Ok(check(
                small <= grown && small <= shifted,
                format!("{small} / {grown} / {shifted}"),
            ))
        }),
    );

    push(
        "profile-scaling",
        run_catching(|| {
            let g = parse_symbol::<f64>("log1z", 256)?;
            let mu = mu_density(&g, &quad);
            let mu3 = mu_density(&SymbolG::new(g.g().scale(C::new(0.0, 3.0)), "3ig"), &quad);
            let p1 = carleson_profile(&quad, &mu, 6, 256)?;
            let p2 = carleson_profile(&quad, &mu3, 6, 256)?;
            let ok = p1
                .c
                .iter()
                .zip(p2.c.iter())
                .all(|(a, b)| (b - 9.0 * a).abs() <= 1e-12 * (1.0 + a.abs()));
            Ok(check(ok, "quadratic scaling defect".into()))
        }),
    );

    push(
        "localize-vmoa-keeps-circle",
        run_catching(|| {
            let g = parse_symbol::<f64>("id", 4)?;
            let mu = mu_density(&g, &quad);
            let params = LocalizeParams {
                bins: cfg.bins.min(2048),
                annuli: cfg.annuli,
                profile_kmax: cfg.kmax.min(7),
                centers: cfg.centers.min(2048),
                ..Default::default()
            };
            let loc = localize(&quad, &mu, 0.1, &params)?;
            Ok(check(
                loc.k_set.is_full() && loc.diagnostics.excised_measure == 0.0,
                format!("excised {}", loc.diagnostics.excised_measure),
            ))
        }),
    );

    push(
        "harmonic-uniformity",
        run_catching(|| {
            let omega = StolzUnion::new(ArcSet::<f64>::full_circle());
            let walkers = cfg.walkers.min(20_000);
            let params = WosParams {
                absorb: cfg.absorb,
                ..Default::default()
            };
            let nu = harmonic_measure(&omega, walkers, cfg.seed, 8, &params)?;
            let expect = 1.0 / 8.0;
            let worst = nu
                .on_k_mass
                .iter()
                .map(|m| (m - expect).abs() / expect)
                .fold(0.0f64, f64::max);
            Ok(check(
                worst < 0.1 && (nu.total_mass() - 1.0).abs() < 0.01,
                format!("max bin deviation {worst}"),
            ))
        }),
    );

    push(
        "harmonic-determinism",
        run_catching(|| {
            let omega = StolzUnion::new(ArcSet::<f64>::new([(0.4, 2.8)]));
            let params = WosParams {
                absorb: cfg.absorb,
                ..Default::default()
            };
            let a = harmonic_measure(&omega, 5_000, cfg.seed, 16, &params)?;
            let b = harmonic_measure(&omega, 5_000, cfg.seed, 16, &params)?;
            Ok(check(
                a.on_k_mass == b.on_k_mass && a.off_k_mass == b.off_k_mass,
                "same seed produced different histograms".into(),
            ))
        }),
    );

    push(
        "probe-closed-form",
        run_catching(|| {
            let g = parse_symbol::<f64>("id", 4)?;
            let opts = ProbeOptions {
                random_starts: 40,
                sweeps: 8,
                descent_starts: 3,
                seed: cfg.seed,
                degree: 512,
            };
            let table = l2_singularity_probe(&g, 4.0, 4, &opts, &policy)?;
            for &(k, beta) in &table {
                let exact = 1.0 / (2f64.powi(k as i32) + 1.0);
                if (beta - exact).abs() > 1e-8 {
                    return Ok(Outcome::Fail(format!("K={k}: {beta} vs {exact}")));
                }
            }
            Ok(Outcome::Pass)
        }),
    );

    out
}
