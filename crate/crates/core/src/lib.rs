//! Numerical laboratory for the one-parameter family
//! `f(z) = lambda + z + tan z`.
//!
//! * [`map`]: overflow-safe evaluation of `tan`, `f`, `f'` and orbits.
//! * [`analysis`]: fixed points, critical points and values, multipliers,
//!   parameter regions, the auxiliary real maps and preimage counting.
//! * [`classify`]: theorem-backed orbit fates with explicit `Undecided`.
//! * [`raster`]: deterministic parallel dynamical/parameter-plane rasters
//!   and binary PPM output.
//! * [`verify`]: the registry of named numerical checks.

pub mod analysis;
pub mod classify;
pub mod error;
pub mod map;
pub mod raster;
pub mod verify;

pub use num_complex::Complex64;

pub use analysis::{normalize_lambda, Half, ParamInfo, Region, ScalarMap};
pub use classify::{
    classify_orbit, in_trap_region, ClassifyConfig, Fate, OrbitClassifier, OrbitOutcome,
};
pub use error::{Error, Result};
pub use map::{derivative, evaluate, orbit, tan_stable, ComplexPoint, EvalLimits, Orbit, OrbitEnd};
pub use raster::{Cell, FatePalette, GridSpec, ParamMode, ParamRaster, Raster, Rgb};
pub use verify::{registered_checks, run_all, run_check, run_selected, CheckResult, VerifyReport};
