//! File formats: series as `.ts.json` (array of [re, im] pairs), arc sets as
//! JSON pairs of radians, and the CSV tables the CLI emits. All numeric text
//! uses '.' decimals regardless of locale; floats are formatted explicitly so
//! identical runs produce identical bytes.

use crate::arcs::ArcSet;
use crate::carleson::CarlesonProfile;
use crate::domains::HarmonicMeasure;
use crate::error::{CoreError, Result};
use crate::rigidity::ExtractionResult;
use crate::scalar::{Real, C};
use crate::series::TaylorSeries;
use std::io::Write;
use std::path::Path;

/// Serializes a series as a JSON array of [re, im] pairs.
pub fn series_to_json<R: Real>(f: &TaylorSeries<R>) -> String {
    let pairs: Vec<[f64; 2]> = f
        .coeffs()
        .iter()
        .map(|c| {
            [
                c.re.to_f64().unwrap_or(f64::NAN),
                c.im.to_f64().unwrap_or(f64::NAN),
            ]
        })
        .collect();
    serde_json::to_string(&pairs).expect("series serialization")
}

pub fn series_from_json<R: Real>(text: &str) -> Result<TaylorSeries<R>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)
        .map_err(|e| CoreError::Parse(format!("bad series JSON: {e}")))?;
    if pairs.is_empty() {
        return Err(CoreError::Parse("series JSON needs coefficients".into()));
    }
    Ok(TaylorSeries::new(
        pairs
            .into_iter()
            .map(|[re, im]| C::new(R::of(re), R::of(im)))
            .collect(),
    ))
}

pub fn write_series<R: Real>(path: &Path, f: &TaylorSeries<R>) -> Result<()> {
    std::fs::write(path, series_to_json(f))?;
    Ok(())
}

pub fn read_series<R: Real>(path: &Path) -> Result<TaylorSeries<R>> {
    let text = std::fs::read_to_string(path)?;
    series_from_json(&text)
}

/// Arc sets as a JSON list of [start, end] radian pairs, 12 significant
/// digits.
pub fn arcs_to_json<R: Real>(set: &ArcSet<R>) -> String {
    let mut out = String::from("[");
    for (i, &(a, b)) in set.arcs().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "[{:.11e},{:.11e}]",
            a.to_f64().unwrap_or(f64::NAN),
            b.to_f64().unwrap_or(f64::NAN)
        ));
    }
    out.push(']');
    out
}

pub fn arcs_from_json<R: Real>(text: &str) -> Result<ArcSet<R>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)
        .map_err(|e| CoreError::Parse(format!("bad arcs JSON: {e}")))?;
    Ok(ArcSet::new(
        pairs.into_iter().map(|[a, b]| (R::of(a), R::of(b))),
    ))
}

pub fn write_arcs<R: Real>(path: &Path, set: &ArcSet<R>) -> Result<()> {
    std::fs::write(path, arcs_to_json(set))?;
    Ok(())
}

pub fn read_arcs<R: Real>(path: &Path) -> Result<ArcSet<R>> {
    let text = std::fs::read_to_string(path)?;
    arcs_from_json(&text)
}

/// profile.csv: `h, c_global, c_localized, argmax_angle` per dyadic level.
pub fn write_profile_csv<R: Real>(
    path: &Path,
    global: &CarlesonProfile<R>,
    localized: Option<&CarlesonProfile<R>>,
) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "h,c_global,c_localized,argmax_angle")?;
    for i in 0..global.h.len() {
        let loc = localized
            .and_then(|l| l.c.get(i))
            .copied()
            .unwrap_or_else(R::nan);
        writeln!(
            w,
            "{:.12e},{:.12e},{:.12e},{:.12e}",
            global.h[i].to_f64().unwrap_or(f64::NAN),
            global.c[i].to_f64().unwrap_or(f64::NAN),
            loc.to_f64().unwrap_or(f64::NAN),
            global.argmax_angle[i].to_f64().unwrap_or(f64::NAN),
        )?;
    }
    Ok(())
}

/// histogram.csv: `bin_start_angle, bin_end_angle, on_k, mass`, two rows per
/// bin (the on-K and off-K masses).
pub fn write_histogram_csv<R: Real>(path: &Path, nu: &HarmonicMeasure<R>) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "bin_start_angle,bin_end_angle,on_k,mass")?;
    let width = nu.bin_width().to_f64().unwrap_or(f64::NAN);
    for b in 0..nu.bins {
        let start = width * b as f64;
        let end = width * (b + 1) as f64;
        writeln!(
            w,
            "{:.12e},{:.12e},1,{:.12e}",
            start,
            end,
            nu.on_k_mass[b].to_f64().unwrap_or(f64::NAN)
        )?;
        writeln!(
            w,
            "{:.12e},{:.12e},0,{:.12e}",
            start,
            end,
            nu.off_k_mass[b].to_f64().unwrap_or(f64::NAN)
        )?;
    }
    Ok(())
}

/// decay.csv for the singularity probe: `K, beta_K`.
pub fn write_decay_csv<R: Real>(path: &Path, table: &[(usize, R)]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "K,beta_K")?;
    for &(k, beta) in table {
        writeln!(w, "{k},{:.12e}", beta.to_f64().unwrap_or(f64::NAN))?;
    }
    Ok(())
}

/// extraction.json with the per-stage integrals and basis constants.
pub fn extraction_to_json<R: Real>(
    result: &ExtractionResult<R>,
    c_lower: Option<R>,
    c_upper: Option<R>,
) -> String {
    let stage_integrals: Vec<[f64; 3]> = result
        .stages
        .iter()
        .map(|s| [s.tg1_max, s.tg2, s.tg3])
        .collect();
    let value = serde_json::json!({
        "indices": result.indices,
        "windows": result.window_indices,
        "delta": result.delta.to_f64().unwrap_or(f64::NAN),
        "d": result.d.to_f64().unwrap_or(f64::NAN),
        "stage_integrals": stage_integrals,
        "stage_thresholds": result.stages.iter().map(|s| s.threshold).collect::<Vec<_>>(),
        "complete": result.complete,
        "c_lower": c_lower.map(|v| v.to_f64().unwrap_or(f64::NAN)),
        "c_upper": c_upper.map(|v| v.to_f64().unwrap_or(f64::NAN)),
    });
    serde_json::to_string_pretty(&value).expect("extraction serialization")
}
