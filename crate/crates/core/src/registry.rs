//! Named symbol registries: strings accepted by the CLI and the fixtures.
//!
//! Analytic symbols: "id" (z), "log1z" (log 1/(1-z)), "poly:<c0,c1,...>",
//! "blaschke:<a>" ((a-z)/(1-a z), real a), "lacunary:<q,K>" (sum of z^{q^k},
//! k = 0..=K).
//!
//! Self-maps: "id", "scale:<r>", "auto:<a>" (the disk automorphism
//! (a-z)/(1-a z), real a), "power:<k>" (univalent only for k = 1),
//! "sector:<beta>" (z -> 1 - (1-z)^beta, the map onto a sector-like region
//! with vertex 1 and opening beta*pi, beta in (0,1)).

use crate::error::{CoreError, Result};
use crate::operators::{SelfMap, SymbolG};
use crate::scalar::{Real, C};
use crate::series::{log1z, TaylorSeries};

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CoreError::Parse(format!("bad {what}: {s:?}")))
}

/// Series for the Blaschke factor / disk automorphism `(a - z)/(1 - a z)`
/// with real `a`, to the requested degree.
fn moebius_series<R: Real>(a: f64, degree: usize) -> TaylorSeries<R> {
    let af = R::of(a);
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(C::new(af, R::zero()));
    let factor = af * af - R::one();
    let mut pw = R::one();
    for _ in 1..=degree {
        coeffs.push(C::new(pw * factor, R::zero()));
        pw = pw * af;
    }
    TaylorSeries::new(coeffs)
}

/// Series of `1 - (1-z)^beta` to the requested degree.
fn sector_series<R: Real>(beta: f64, degree: usize) -> TaylorSeries<R> {
    // (1-z)^beta = sum_n d_n z^n with d_0 = 1, d_{n+1} = d_n (n - beta)/(n + 1)
    let mut coeffs = vec![C::new(R::zero(), R::zero()); degree + 1];
    let b = R::of(beta);
    let mut d = R::one();
    for n in 0..degree {
        let nf = R::of(n as f64);
        d = d * (nf - b) / (nf + R::one());
        coeffs[n + 1] = C::new(-d, R::zero());
    }
    TaylorSeries::new(coeffs)
}

/// Parses an analytic symbol name into g (truncated at `degree`).
pub fn parse_symbol<R: Real>(name: &str, degree: usize) -> Result<SymbolG<R>> {
    let series = match name {
        "id" => TaylorSeries::monomial(1),
        "log1z" => log1z::<R>(degree),
        _ => {
            if let Some(rest) = name.strip_prefix("poly:") {
                let coeffs: Result<Vec<f64>> = rest
                    .split(',')
                    .map(|s| parse_f64(s, "poly coefficient"))
                    .collect();
                let coeffs = coeffs?;
                if coeffs.is_empty() {
                    return Err(CoreError::Parse("poly: needs coefficients".into()));
                }
                TaylorSeries::from_real(&coeffs)
            } else if let Some(rest) = name.strip_prefix("blaschke:") {
                let a = parse_f64(rest, "blaschke parameter")?;
                if a.abs() >= 1.0 {
                    return Err(CoreError::Parse(format!("blaschke needs |a| < 1, got {a}")));
                }
                moebius_series::<R>(a, degree)
            } else if let Some(rest) = name.strip_prefix("lacunary:") {
                let mut it = rest.split(',');
                let q = it
                    .next()
                    .ok_or_else(|| CoreError::Parse("lacunary needs q,K".into()))
                    .and_then(|s| parse_f64(s, "lacunary q"))? as usize;
                let kmax = it
                    .next()
                    .ok_or_else(|| CoreError::Parse("lacunary needs q,K".into()))
                    .and_then(|s| parse_f64(s, "lacunary K"))? as usize;
                if q < 2 {
                    return Err(CoreError::Parse("lacunary gap q must be >= 2".into()));
                }
                let top = q.pow(kmax as u32);
                let mut coeffs = vec![C::new(R::zero(), R::zero()); top + 1];
                for k in 0..=kmax {
                    coeffs[q.pow(k as u32)] = C::new(R::one(), R::zero());
                }
                TaylorSeries::new(coeffs)
            } else {
                return Err(CoreError::Parse(format!("unknown symbol {name:?}")));
            }
        }
    };
    Ok(SymbolG::new(series, name))
}

/// Parses a self-map name (truncated at `degree` where a series is needed).
pub fn parse_selfmap<R: Real>(name: &str, degree: usize) -> Result<SelfMap<R>> {
    match name {
        "id" => SelfMap::new(TaylorSeries::monomial(1), name, true),
        _ => {
            if let Some(rest) = name.strip_prefix("scale:") {
                let r = parse_f64(rest, "scale factor")?;
                if !(0.0..1.0).contains(&r.abs()) {
                    return Err(CoreError::Parse(format!("scale needs |r| < 1, got {r}")));
                }
                SelfMap::new(TaylorSeries::from_real(&[0.0, r]), name, true)
            } else if let Some(rest) = name.strip_prefix("auto:") {
                let a = parse_f64(rest, "automorphism parameter")?;
                if a.abs() >= 1.0 {
                    return Err(CoreError::Parse(format!("auto needs |a| < 1, got {a}")));
                }
                SelfMap::new(moebius_series::<R>(a, degree), name, true)
            } else if let Some(rest) = name.strip_prefix("power:") {
                let k = parse_f64(rest, "power exponent")? as usize;
                if k == 0 {
                    return Err(CoreError::Parse("power needs k >= 1".into()));
                }
                SelfMap::new(TaylorSeries::monomial(k), name, k == 1)
            } else if let Some(rest) = name.strip_prefix("sector:") {
                let beta = parse_f64(rest, "sector opening")?;
                if !(0.0 < beta && beta < 1.0) {
                    return Err(CoreError::Parse(format!(
                        "sector needs beta in (0,1), got {beta}"
                    )));
                }
                SelfMap::new(sector_series::<R>(beta, degree), name, true)
            } else {
                Err(CoreError::Parse(format!("unknown self-map {name:?}")))
            }
        }
    }
}
