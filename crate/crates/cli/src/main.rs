//! hvlab: experiments on Volterra-type integral operators over Hardy spaces
//! of the unit disk, as reproducible subcommands with file outputs.
//!
//! Exit codes: 0 success, 2 usage/parse, 3 precondition, 4 numeric or
//! resolution trouble.

mod config;
mod selftest;

use clap::{Parser, Subcommand};
use config::RunConfig;
use hvlab_core::boundary::NormPolicy;
use hvlab_core::carleson::{carleson_profile, localize, mu_density, vmoa_verdict, LocalizeParams};
use hvlab_core::domains::{harmonic_measure, StolzUnion, WosParams};
use hvlab_core::registry::parse_symbol;
use hvlab_core::rigidity::{
    basis_equivalence_constants, generate, gliding_hump_extract_quadrature, l2_singularity_probe,
    ExtractionOptions, FamilyKind, ProbeOptions, SequenceFamily,
};
use hvlab_core::{hp_norm, io, CoreError, DiskQuadrature, Result, TaylorSeries};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "hvlab", version, about = "Volterra operator laboratory on Hardy spaces")]
struct Cli {
    /// Config file (flat key = value); defaults to $HVLAB_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for files and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true)]
    radial: Option<usize>,
    #[arg(long, global = true)]
    angular: Option<usize>,
    #[arg(long, global = true)]
    bins: Option<usize>,
    #[arg(long, global = true)]
    histogram_bins: Option<usize>,
    #[arg(long, global = true)]
    walkers: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the H^p norm of a registry symbol or a .ts.json file.
    Norm {
        symbol_or_file: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Window profile and localization of a symbol: profile.csv + arcs.json.
    Carleson {
        symbol: String,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        kmax: Option<u32>,
    },
    /// Harmonic measure of the Stolz union over an arc set: histogram.csv.
    Harmonic {
        arcs_json: PathBuf,
        #[arg(long)]
        walkers: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Gliding-hump extraction against a localization chain: extraction.json.
    Extract {
        symbol: String,
        /// Family spec: atoms:<angle>:<count>, lacunary:<q>:<count>, zn:<count>
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        length: usize,
    },
    /// l^2-singularity decay probe: decay.csv.
    Probe {
        symbol: String,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// Run the module invariant suite and print a pass/fail table.
    Selftest,
}

fn exit_code(err: &CoreError) -> i32 {
    match err {
        CoreError::Parse(_) | CoreError::Domain(_) => 2,
        CoreError::Precondition(_) => 3,
        _ => 4,
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os("HVLAB_CONFIG").map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.degree {
        cfg.degree = v;
    }
    if let Some(v) = cli.radial {
        cfg.radial = v;
    }
    if let Some(v) = cli.angular {
        cfg.angular = v;
    }
    if let Some(v) = cli.bins {
        cfg.bins = v;
    }
    if let Some(v) = cli.histogram_bins {
        cfg.histogram_bins = v;
    }
    if let Some(v) = cli.walkers {
        cfg.walkers = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.threads {
        cfg.threads = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_manifest(out: &Path, command: &str, cfg: &RunConfig) -> Result<()> {
    let map = cfg.as_map();
    let mut canonical = String::new();
    for (k, v) in &map {
        canonical.push_str(k);
        canonical.push('=');
        canonical.push_str(v);
        canonical.push('\n');
    }
    let digest = Sha256::digest(canonical.as_bytes());
    let manifest = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.seed,
        "config": map,
        "config_sha256": format!("{digest:x}"),
    });
    std::fs::create_dir_all(out)?;
    std::fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest"),
    )?;
    Ok(())
}

fn load_symbol_or_file(arg: &str, degree: usize) -> Result<TaylorSeries<f64>> {
    let path = Path::new(arg);
    if arg.ends_with(".ts.json") || path.is_file() {
        io::read_series::<f64>(path)
    } else {
        Ok(parse_symbol::<f64>(arg, degree)?.g().clone())
    }
}

fn parse_family(spec: &str, cfg: &RunConfig, p: f64) -> Result<SequenceFamily<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["atoms", angle, count] => {
            let angle: f64 = angle
                .parse()
                .map_err(|_| CoreError::Parse(format!("bad angle in {spec:?}")))?;
            let count: usize = count
                .parse()
                .map_err(|_| CoreError::Parse(format!("bad count in {spec:?}")))?;
            // deep atoms need the truncation to follow the radii schedule
            let need = 16usize << count.min(20);
            Ok(SequenceFamily {
                kind: FamilyKind::BoundaryAtoms {
                    target_angle: angle,
                    radii: (1..=count as i32).map(|n| 1.0 - 0.5f64.powi(n)).collect(),
                    p,
                },
                degree: cfg.degree.max(need),
            })
        }
        ["lacunary", q, count] => Ok(SequenceFamily {
            kind: FamilyKind::Lacunary {
                q: q.parse()
                    .map_err(|_| CoreError::Parse(format!("bad gap in {spec:?}")))?,
                count: count
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad count in {spec:?}")))?,
                p,
            },
            degree: cfg.degree,
        }),
        ["zn", count] => Ok(SequenceFamily {
            kind: FamilyKind::VanishingDerivative {
                base: TaylorSeries::one(),
                count: count
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad count in {spec:?}")))?,
                p,
            },
            degree: cfg.degree,
        }),
        _ => Err(CoreError::Parse(format!("unknown family spec {spec:?}"))),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    if cfg.threads > 0 {
        // ignore the error when a pool already exists (tests, repeat calls)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }
    let out = &cli.out;
    let policy = NormPolicy::default();
    match &cli.command {
        Command::Norm { symbol_or_file, p } => {
            let f = load_symbol_or_file(symbol_or_file, cfg.degree)?;
            let v = hp_norm(&f, *p, &policy)?;
            println!("{v:.12e}");
            write_manifest(out, "norm", &cfg)?;
        }
        Command::Carleson {
            symbol,
            epsilon,
            kmax,
        } => {
            let kmax = kmax.unwrap_or(cfg.kmax);
            let g = parse_symbol::<f64>(symbol, cfg.degree)?;
            let quad = DiskQuadrature::<f64>::new(cfg.radial, cfg.angular);
            let mu = mu_density(&g, &quad);
            let profile = carleson_profile(&quad, &mu, kmax, cfg.centers)?;
            let params = LocalizeParams {
                bins: cfg.bins,
                annuli: cfg.annuli,
                profile_kmax: kmax,
                centers: cfg.centers,
                ..Default::default()
            };
            let loc = localize(&quad, &mu, *epsilon, &params)?;
            write_manifest(out, "carleson", &cfg)?;
            io::write_profile_csv(
                &out.join("profile.csv"),
                &profile,
                Some(&loc.diagnostics.localized_profile),
            )?;
            io::write_arcs(&out.join("arcs.json"), &loc.k_set)?;
            let verdict = vmoa_verdict(&profile);
            println!(
                "mass {:.6e}  vanishing {}  drop {:.3e}  slope {:.3}  excised {:.4}",
                mu.mass(),
                verdict.vanishing,
                verdict.drop_ratio,
                verdict.tail_slope,
                loc.diagnostics.excised_measure
            );
        }
        Command::Harmonic {
            arcs_json,
            walkers,
            seed,
        } => {
            let k = io::read_arcs::<f64>(arcs_json)?;
            let omega = StolzUnion::new(k);
            let params = WosParams {
                absorb: cfg.absorb,
                ..Default::default()
            };
            let nu = harmonic_measure(
                &omega,
                walkers.unwrap_or(cfg.walkers),
                seed.unwrap_or(cfg.seed),
                cfg.histogram_bins,
                &params,
            )?;
            write_manifest(out, "harmonic", &cfg)?;
            io::write_histogram_csv(&out.join("histogram.csv"), &nu)?;
            println!(
                "total {:.6}  on_k {:.6}  off_k {:.6}  failed {}",
                nu.total_mass(),
                nu.on_k_total(),
                nu.off_k_total(),
                nu.failed
            );
        }
        Command::Extract {
            symbol,
            family,
            delta,
            p,
            length,
        } => {
            let g = parse_symbol::<f64>(symbol, cfg.degree)?;
            let fam = parse_family(family, &cfg, *p)?;
            let sequence = generate(&fam, &policy)?;
            let quad = DiskQuadrature::<f64>::new(cfg.radial, cfg.angular);
            let mu = mu_density(&g, &quad);
            let params = LocalizeParams {
                bins: cfg.bins,
                annuli: cfg.annuli,
                profile_kmax: cfg.kmax,
                centers: cfg.centers,
                ..Default::default()
            };
            // increasing chain from repeated localization with shrinking
            // budgets, headed by the degenerate empty set (eps = 1)
            let mut chain = Vec::new();
            for eps in [1.0, 0.4, 0.2, 0.1, 0.05] {
                chain.push(localize(&quad, &mu, eps, &params)?.k_set);
            }
            let opts = ExtractionOptions::new(*length);
            let (result, _provider) =
                gliding_hump_extract_quadrature(&g, &sequence, &chain, *delta, *p, &opts, &policy)?;
            let constants = if result.indices.is_empty() {
                None
            } else {
                let picked: Vec<TaylorSeries<f64>> = result
                    .indices
                    .iter()
                    .map(|&n| sequence[n].clone())
                    .collect();
                Some(basis_equivalence_constants(
                    &g, &picked, *p, 2000, cfg.seed, &policy,
                )?)
            };
            write_manifest(out, "extract", &cfg)?;
            std::fs::write(
                out.join("extraction.json"),
                io::extraction_to_json(
                    &result,
                    constants.map(|c| c.0),
                    constants.map(|c| c.1),
                ),
            )?;
            println!(
                "extracted {} of {} requested (complete: {})  d {:.4}",
                result.indices.len(),
                length,
                result.complete,
                result.d
            );
        }
        Command::Probe { symbol, p, kmax } => {
            let g = parse_symbol::<f64>(symbol, cfg.degree.max(4096))?;
            let opts = ProbeOptions {
                seed: cfg.seed,
                degree: cfg.degree.max(4096),
                ..Default::default()
            };
            let table = l2_singularity_probe(&g, *p, *kmax, &opts, &policy)?;
            write_manifest(out, "probe", &cfg)?;
            io::write_decay_csv(&out.join("decay.csv"), &table)?;
            for &(k, beta) in &table {
                println!("K {k}  beta {beta:.6e}");
            }
        }
        Command::Selftest => {
            let results = selftest::run_all(&cfg);
            let mut text = String::new();
            let mut failed = 0usize;
            for (name, outcome) in &results {
                let line = match outcome {
                    selftest::Outcome::Pass => format!("PASS {name}"),
                    selftest::Outcome::Skip(reason) => format!("SKIP {name}: {reason}"),
                    selftest::Outcome::Fail(detail) => {
                        failed += 1;
                        format!("FAIL {name}: {detail}")
                    }
                };
                println!("{line}");
                text.push_str(&line);
                text.push('\n');
            }
            write_manifest(out, "selftest", &cfg)?;
            std::fs::write(out.join("selftest.txt"), text)?;
            if failed > 0 {
                return Err(CoreError::Numeric(format!("{failed} selftest failures")));
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
