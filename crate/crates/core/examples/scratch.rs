use hvlab_core::arcs::ArcSet;
use hvlab_core::boundary::NormPolicy;
use hvlab_core::carleson::{localize, mu_density, LocalizeParams};
use hvlab_core::domains::*;
use hvlab_core::operators::volterra_apply;
use hvlab_core::registry::parse_symbol;
use hvlab_core::rigidity::{l2_singularity_probe, ProbeOptions};
use hvlab_core::series::{atom, TaylorSeries};
use hvlab_core::{hp_norm, DiskQuadrature};
use std::f64::consts::TAU;
use std::time::Instant;

fn main() {
    let policy = NormPolicy::default();
    // criterion 7: uniform histogram at B=16, 1e5 walkers
    let t = Instant::now();
    let omega = StolzUnion::new(ArcSet::<f64>::full_circle());
    let nu = harmonic_measure(&omega, 100_000, 42, 16, &WosParams::default()).unwrap();
    let expect = 1.0 / 16.0;
    let worst = nu.on_k_mass.iter().map(|m| (m - expect).abs() / expect).fold(0.0f64, f64::max);
    println!("c7: worst bin dev {worst:.4} total {:.6} [{:?}]", nu.total_mass(), t.elapsed());

    // criterion 8 setup: localize log1z, harmonic on Omega, E at delta=0.5
    let t = Instant::now();
    let quad = DiskQuadrature::<f64>::new(2048, 4096);
    let g = parse_symbol::<f64>("log1z", 1024).unwrap();
    let mu = mu_density(&g, &quad);
    let loc = localize(&quad, &mu, 0.1, &LocalizeParams::default()).unwrap();
    let omega = StolzUnion::new(loc.k_set.clone());
    let nu = harmonic_measure(&omega, 100_000, 42, 64, &WosParams::default()).unwrap();
    println!("c8: on_k {:.4} off_k {:.4} [{:?}]", nu.on_k_total(), nu.off_k_total(), t.elapsed());
    let rep = density_lower_bound(&nu, &loc.k_set, 0.5, 0.35);
    match &rep {
        Ok(r) => println!("c8: E measure {:.4}, m(K\\E) {:.4}", r.e_set.measure(), r.k_minus_e),
        Err(e) => println!("c8 density error: {e}"),
    }
    if let Ok(r) = rep {
        let suite = vec![
            TaylorSeries::zero(),
            atom::<f64>(num_complex::Complex64::new(0.7, 0.0), 2.0, 1024).unwrap(),
            TaylorSeries::from_real(&[1.0, 1.0]),
        ];
        let t = Instant::now();
        let reports = product_inequality_check(
            &g, &omega, &r.e_set, 0.5, &suite, 2.0, 100_000, 42,
            &WosParams::default(), &policy,
        );
        match reports {
            Ok(rs) => {
                for (i, rr) in rs.iter().enumerate() {
                    println!("c8 f{i}: lhs {:.5e} rhs {:.5e} margin {:.1} sigma", rr.lhs, rr.rhs, rr.margin_sigmas);
                }
            }
            Err(e) => println!("c8 product error: {e}"),
        }
        println!("c8 product [{:?}]", t.elapsed());
    }

    // criterion 9: two-gap fixture
    let t = Instant::now();
    for gaps in [vec![0.05f64], vec![0.05, 0.05]] {
        let mut arcs = Vec::new();
        let g1 = gaps[0] * TAU;
        if gaps.len() == 1 {
            arcs.push((g1 / 2.0, TAU - g1 / 2.0));
        } else {
            // symmetric two gaps at angles 0 and pi
            arcs.push((g1 / 2.0, std::f64::consts::PI - g1 / 2.0));
            arcs.push((std::f64::consts::PI + g1 / 2.0, TAU - g1 / 2.0));
        }
        let k = ArcSet::<f64>::new(arcs);
        let om = StolzUnion::new(k);
        let nu = harmonic_measure(&om, 100_000, 9, 64, &WosParams::default()).unwrap();
        let rep = remark2_estimate(&om, &nu).unwrap();
        println!(
            "c9 gaps {}: cov {} nu_off {:.4} c_hat {:.3} mF {:.4} bound {:.4} holds {}",
            gaps.len(), rep.coverage_ok, rep.nu_off_k, rep.c_hat, rep.f_measure, rep.bound, rep.holds
        );
    }
    println!("c9 [{:?}]", t.elapsed());

    // criterion 10: compactness probe log1z on localized E, p=2, n=1..10
    let t = Instant::now();
    let seq: Vec<_> = (1..=10)
        .map(|n| {
            let f = atom::<f64>(num_complex::Complex64::new(1.0 - 0.5f64.powi(n), 0.0), 2.0, 16384).unwrap();
            let nn = hp_norm(&f, 2.0, &policy).unwrap();
            f.scale(num_complex::Complex64::new(1.0 / nn, 0.0))
        })
        .collect();
    let table = chi_e_compactness_probe(&g, &loc.k_set, 2.0, &seq, &policy).unwrap();
    println!("c10 restricted: {:?}", table.restricted.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>());
    println!("c10 norms: {:?}", table.full_norm.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>());
    println!("c10 [{:?}]", t.elapsed());

    // criterion 12: log1z probe p=4 K<=10 at degree 8192
    let t = Instant::now();
    let gp = parse_symbol::<f64>("log1z", 8192).unwrap();
    let opts = ProbeOptions { degree: 8192, ..Default::default() };
    let table = l2_singularity_probe(&gp, 4.0, 10, &opts, &policy).unwrap();
    for &(k, b) in &table {
        println!("c12 K {k} beta {b:.5e}");
    }
    println!("c12 ratio beta10/beta2 = {:.4} [{:?}]", table[9].1 / table[1].1, t.elapsed());

    // criterion 1 log1z LP vs pi^2/6
    let basel = std::f64::consts::PI.powi(2) / 6.0;
    let resid = (basel - 2.0 * mu.mass()).abs() / basel;
    println!("c1 log1z residual vs basel: {resid:.3e}");

    // criterion 10/11 cross-check: norms of T_g atoms p=2
    let norms2: Vec<f64> = seq.iter().map(|f| hp_norm(&volterra_apply(&g, f), 2.0, &policy).unwrap()).collect();
    println!("T_log1z atom norms p=2: {:?}", norms2.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>());
}
