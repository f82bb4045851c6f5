//! Flat key = value run configuration with command-line overrides.
//!
//! Resolutions must be powers of two; unknown keys are rejected. The default
//! path comes from the HVLAB_CONFIG environment variable.

use hvlab_core::{CoreError, Result};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Truncation degree of constructed series.
    pub degree: usize,
    /// Radial Gauss nodes of the disk quadrature.
    pub radial: usize,
    /// Angular nodes of the disk quadrature.
    pub angular: usize,
    /// Boundary bins of the localization projections.
    pub bins: usize,
    /// Bins of harmonic-measure histograms.
    pub histogram_bins: usize,
    pub walkers: u64,
    pub seed: u64,
    /// 0 = leave the global thread pool alone.
    pub threads: usize,
    /// Dyadic depth of window profiles (h down to 2^-kmax).
    pub kmax: u32,
    /// Window centers scanned by profiles.
    pub centers: usize,
    /// Annulus ladder depth of the localization.
    pub annuli: u32,
    /// Walk-on-spheres absorption layer.
    pub absorb: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            degree: 1024,
            radial: 2048,
            angular: 4096,
            bins: 4096,
            histogram_bins: 64,
            walkers: 100_000,
            seed: 42,
            threads: 0,
            kmax: 8,
            centers: 4096,
            annuli: 8,
            absorb: 1e-4,
        }
    }
}

impl RunConfig {
    pub fn apply_line(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| CoreError::Parse(format!("bad value for {what}: {value:?}"));
        match key {
            "degree" => self.degree = value.parse().map_err(|_| bad("degree"))?,
            "radial" => self.radial = value.parse().map_err(|_| bad("radial"))?,
            "angular" => self.angular = value.parse().map_err(|_| bad("angular"))?,
            "bins" => self.bins = value.parse().map_err(|_| bad("bins"))?,
            "histogram_bins" => {
                self.histogram_bins = value.parse().map_err(|_| bad("histogram_bins"))?
            }
            "walkers" => self.walkers = value.parse().map_err(|_| bad("walkers"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "threads" => self.threads = value.parse().map_err(|_| bad("threads"))?,
            "kmax" => self.kmax = value.parse().map_err(|_| bad("kmax"))?,
            "centers" => self.centers = value.parse().map_err(|_| bad("centers"))?,
            "annuli" => self.annuli = value.parse().map_err(|_| bad("annuli"))?,
            "absorb" => self.absorb = value.parse().map_err(|_| bad("absorb"))?,
            _ => return Err(CoreError::Parse(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CoreError::Parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            cfg.apply_line(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("degree", self.degree),
            ("radial", self.radial),
            ("angular", self.angular),
            ("bins", self.bins),
            ("histogram_bins", self.histogram_bins),
            ("centers", self.centers),
        ] {
            if !v.is_power_of_two() {
                return Err(CoreError::Parse(format!(
                    "{name} must be a power of two, got {v}"
                )));
            }
        }
        if self.absorb <= 0.0 || self.absorb >= 0.1 {
            return Err(CoreError::Parse(format!(
                "absorb must lie in (0, 0.1), got {}",
                self.absorb
            )));
        }
        Ok(())
    }

    /// Canonical sorted key-value view (for manifests and hashing).
    pub fn as_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("degree".into(), self.degree.to_string());
        m.insert("radial".into(), self.radial.to_string());
        m.insert("angular".into(), self.angular.to_string());
        m.insert("bins".into(), self.bins.to_string());
        m.insert("histogram_bins".into(), self.histogram_bins.to_string());
        m.insert("walkers".into(), self.walkers.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("threads".into(), self.threads.to_string());
        m.insert("kmax".into(), self.kmax.to_string());
        m.insert("centers".into(), self.centers.to_string());
        m.insert("annuli".into(), self.annuli.to_string());
        m.insert("absorb".into(), format!("{:e}", self.absorb));
        m
    }
}
