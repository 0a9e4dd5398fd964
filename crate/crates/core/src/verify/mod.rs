//! Named numerical checks of the quantitative facts about `f_lambda`, with a
//! text and JSON report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod checks;

pub use checks::degree_probes;

/// What a check function measures before the tolerance is applied.
#[derive(Debug, Clone, Default)]
struct Measured {
    max_error: f64,
    samples: usize,
    violations: usize,
    note: String,
}

struct CheckSpec {
    name: &'static str,
    tolerance: f64,
    run: fn(&mut ChaCha8Rng) -> Measured,
}

const REGISTRY: &[CheckSpec] = &[
    CheckSpec {
        name: "pi-equivariance",
        tolerance: 1e-12,
        run: checks::pi_equivariance,
    },
    CheckSpec {
        name: "conjugacy",
        tolerance: 1e-12,
        run: checks::conjugacy,
    },
    CheckSpec {
        name: "line-map",
        tolerance: 1e-12,
        run: checks::line_map,
    },
    CheckSpec {
        name: "phi-drift",
        tolerance: 0.0,
        run: checks::phi_drift,
    },
    CheckSpec {
        name: "critical-set",
        tolerance: 1e-10,
        run: checks::critical_set,
    },
    CheckSpec {
        name: "fixed-multiplier",
        tolerance: 1e-8,
        run: checks::fixed_multiplier,
    },
    CheckSpec {
        name: "g-map",
        tolerance: 1e-10,
        run: checks::g_map,
    },
    CheckSpec {
        name: "estimates-1",
        tolerance: 0.0,
        run: checks::estimates_1,
    },
    CheckSpec {
        name: "estimates-2",
        tolerance: 1e-9,
        run: checks::estimates_2,
    },
    CheckSpec {
        name: "estimates-3",
        tolerance: 0.0,
        run: checks::estimates_3,
    },
    CheckSpec {
        name: "trap-invariance",
        tolerance: 0.0,
        run: checks::trap_invariance,
    },
    CheckSpec {
        name: "half-line-map",
        tolerance: 1e-9,
        run: checks::half_line_map,
    },
    CheckSpec {
        name: "degree-2",
        tolerance: 0.0,
        run: checks::degree_2,
    },
    CheckSpec {
        name: "vertical-line-up",
        tolerance: 0.0,
        run: checks::vertical_line_up,
    },
];

/// Names of all registered checks, in report order.
pub fn registered_checks() -> Vec<&'static str> {
    REGISTRY.iter().map(|c| c.name).collect()
}

/// Shipped tolerance of a check.
pub fn default_tolerance(name: &str) -> Result<f64> {
    Ok(lookup(name)?.1.tolerance)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    /// Samples that broke a qualitative condition (containment, sign,
    /// count); a check passes only with none.
    pub violations: usize,
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub results: Vec<CheckResult>,
    pub all_passed: bool,
}

impl VerifyReport {
    fn new(results: Vec<CheckResult>) -> Self {
        let all_passed = results.iter().all(|r| r.passed);
        VerifyReport {
            results,
            all_passed,
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.name == name)
    }

    /// One line per check: `name max_error tolerance PASS|FAIL # note`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let _ = write!(
                out,
                "{} {:.3e} {:.1e} {}",
                r.name,
                r.max_error,
                r.tolerance,
                if r.passed { "PASS" } else { "FAIL" }
            );
            if !r.note.is_empty() {
                let _ = write!(out, " # {}", r.note);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn lookup(name: &str) -> Result<(usize, &'static CheckSpec)> {
    REGISTRY
        .iter()
        .enumerate()
        .find(|(_, c)| c.name == name)
        .ok_or_else(|| Error::UnknownCheck {
            name: name.to_string(),
            registered: registered_checks(),
        })
}

fn execute(index: usize, spec: &CheckSpec, seed: u64, tolerance: Option<f64>) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let m = (spec.run)(&mut rng);
    let tolerance = tolerance.unwrap_or(spec.tolerance);
    CheckResult {
        name: spec.name.to_string(),
        passed: m.max_error <= tolerance && m.violations == 0,
        max_error: m.max_error,
        tolerance,
        samples: m.samples,
        violations: m.violations,
        note: m.note,
    }
}

pub fn run_check(name: &str, seed: u64) -> Result<CheckResult> {
    let (index, spec) = lookup(name)?;
    Ok(execute(index, spec, seed, None))
}

/// Runs the named checks concurrently, with per-check tolerance overrides.
pub fn run_selected(
    names: &[&str],
    seed: u64,
    tolerances: &BTreeMap<String, f64>,
) -> Result<VerifyReport> {
    let specs = names
        .iter()
        .map(|n| lookup(n))
        .collect::<Result<Vec<_>>>()?;
    for name in tolerances.keys() {
        lookup(name)?;
    }
    let results = specs
        .par_iter()
        .map(|&(index, spec)| execute(index, spec, seed, tolerances.get(spec.name).copied()))
        .collect();
    Ok(VerifyReport::new(results))
}

pub fn run_all(seed: u64) -> VerifyReport {
    run_selected(&registered_checks(), seed, &BTreeMap::new()).expect("registered names resolve")
}
