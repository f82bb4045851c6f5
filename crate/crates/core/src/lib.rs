//! Numerical laboratory for Volterra-type integral operators T_g on Hardy
//! spaces H^p of the unit disk.
//!
//! The crate computes the operators themselves (Volterra, Cesaro,
//! composition and their products), Carleson-measure diagnostics of the
//! associated measure mu_g, a constructive localization of the
//! non-compactness support on the circle, harmonic-measure estimates on
//! unions of Stolz domains by walk-on-spheres, and the gliding-hump
//! subsequence machinery with l^p basis-equivalence constants.
//!
//! All numerics are generic over the scalar type (f32 / f64) through the
//! [`scalar::Real`] trait; the `*64` aliases below are what the CLI and the
//! test suites use.

pub mod arcs;
pub mod boundary;
pub mod carleson;
pub mod domains;
pub mod error;
mod fft;
pub mod io;
pub mod operators;
pub mod quad;
pub mod registry;
pub mod rigidity;
pub mod scalar;
pub mod series;

pub use arcs::ArcSet;
pub use boundary::{hp_norm, hp_norm_default, BoundaryGrid, NormPolicy};
pub use carleson::{
    carleson_profile, littlewood_paley_residual, localize, mu_density, window_measure,
    CarlesonProfile, CarlesonWindow, LocalizeParams, MeasureDensity,
};
pub use error::{CoreError, Result};
pub use operators::{
    cesaro_apply_coeff, cesaro_apply_integral, compose_apply, nevanlinna, stanton_norm,
    volterra_apply, SelfMap, SymbolG,
};
pub use domains::{
    chi_e_compactness_probe, density_lower_bound, harmonic_measure, product_inequality_check,
    remark2_estimate, walk_exits, HarmonicMeasure, StolzUnion, WosParams,
};
pub use quad::DiskQuadrature;
pub use registry::{parse_selfmap, parse_symbol};
pub use rigidity::{
    basis_equivalence_constants, cesaro_appetiser, generate, gliding_hump_extract,
    gliding_hump_extract_quadrature, l2_singularity_probe, verify_extraction, ExtractionOptions,
    ExtractionResult, FamilyKind, ProbeOptions, SequenceFamily,
};
pub use scalar::{Real, C};
pub use series::{atom, log1z, TaylorSeries};

/// Concrete double-precision aliases.
pub type Series64 = TaylorSeries<f64>;
pub type Complex64 = C<f64>;
pub type Quad64 = DiskQuadrature<f64>;
pub type Grid64 = BoundaryGrid<f64>;
