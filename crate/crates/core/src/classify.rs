//! Orbit fates from sufficient conditions.
//!
//! Each rule fires only when the orbit has reached a set that provably lies
//! in the named Fatou component: the closed upper half plane minus the poles
//! (primary Baker domain), a far lower half plane (second Baker domain for
//! `0 < Im lambda < 1`), a converged fixed point (attracting lobe) or a run of
//! trapping regions `R_m` (wandering line). Everything else is `Undecided`,
//! which covers both Julia-set points and slow Fatou points.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{fixed_point_representative, ParamInfo, Region, TRAP_CEILING};
use crate::error::{Error, Result};
use crate::map::{evaluate, pole_distance, ComplexPoint, EvalLimits};

/// Half-width of a trapping region around `m pi + pi/2`.
pub const TRAP_HALFWIDTH: f64 = PI / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Maximum number of iterations.
    pub budget: usize,
    /// Escape height used by the upward-drift checks.
    pub y_up: f64,
    /// Depth below which an orbit is inside the lower Baker domain.
    pub y_down: f64,
    /// `|z_{n+1} - z_n|` below which an orbit counts as converged.
    pub fp_tol: f64,
    /// Consecutive trap hits, with the index advancing by `k`, required for
    /// the wandering verdict.
    pub trap_patience: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            budget: 1000,
            y_up: 50.0,
            y_down: -50.0,
            fp_tol: 1e-9,
            trap_patience: 5,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::InvalidConfig("budget must be at least 1".into()));
        }
        if !(self.y_up > 0.0 && self.y_down < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "need y_up > 0 > y_down, got y_up = {}, y_down = {}",
                self.y_up, self.y_down
            )));
        }
        if self.fp_tol.is_nan() || self.fp_tol <= 0.0 {
            return Err(Error::InvalidConfig("fp_tol must be positive".into()));
        }
        if self.trap_patience < 1 {
            return Err(Error::InvalidConfig(
                "trap_patience must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fate {
    PrimaryBaker,
    LowerBaker,
    /// Converged to the fixed point `z*_0 + m pi`.
    AttractingFixed(i64),
    /// Trapped in `R_m, R_{m+k}, ...`; carries the sign of `k`.
    WanderingStrip(i8),
    /// Landed within `pole_eps` of a real pole at this step.
    PoleHit(usize),
    Undecided,
}

impl Fate {
    pub fn name(&self) -> &'static str {
        match self {
            Fate::PrimaryBaker => "primary-baker",
            Fate::LowerBaker => "lower-baker",
            Fate::AttractingFixed(_) => "attracting-fixed",
            Fate::WanderingStrip(_) => "wandering-strip",
            Fate::PoleHit(_) => "pole-hit",
            Fate::Undecided => "undecided",
        }
    }

    /// The fate tag with payloads dropped, for counting.
    pub fn kind(&self) -> Fate {
        match self {
            Fate::AttractingFixed(_) => Fate::AttractingFixed(0),
            Fate::WanderingStrip(_) => Fate::WanderingStrip(1),
            Fate::PoleHit(_) => Fate::PoleHit(0),
            other => *other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitOutcome {
    pub fate: Fate,
    /// Iteration at which the verdict was reached.
    pub steps: usize,
    /// The iterate that triggered the verdict.
    pub last: Complex64,
}

impl OrbitOutcome {
    /// Transports an outcome through `z -> -z`.
    pub fn mirrored(self) -> OrbitOutcome {
        let fate = match self.fate {
            Fate::AttractingFixed(m) => Fate::AttractingFixed(-m),
            Fate::WanderingStrip(s) => Fate::WanderingStrip(-s),
            other => other,
        };
        OrbitOutcome {
            fate,
            steps: self.steps,
            last: -self.last,
        }
    }
}

/// `R_m = {|Re z - (m pi + pi/2)| < pi/16, Im z <= -0.6658}`.
pub fn in_trap_region(z: Complex64, m: i64) -> bool {
    let center = m as f64 * PI + FRAC_PI_2;
    (z.re - center).abs() < TRAP_HALFWIDTH && z.im <= TRAP_CEILING
}

/// Index of the trapping region column nearest to `Re z`.
pub fn trap_index(z: Complex64) -> i64 {
    ((z.re - FRAC_PI_2) / PI).round() as i64
}

/// Classifier bound to one parameter, with the fixed-point lattice
/// precomputed.
#[derive(Debug, Clone)]
pub struct OrbitClassifier {
    param: ParamInfo,
    cfg: ClassifyConfig,
    limits: EvalLimits,
    fixed_anchor: Option<Complex64>,
}

impl OrbitClassifier {
    pub fn new(param: ParamInfo, cfg: ClassifyConfig, limits: EvalLimits) -> Result<Self> {
        cfg.validate()?;
        limits.validate()?;
        let fixed_anchor = match param.region {
            Region::AttractingLobe => Some(fixed_point_representative(param.lambda)?),
            _ => None,
        };
        Ok(OrbitClassifier {
            param,
            cfg,
            limits,
            fixed_anchor,
        })
    }

    pub fn param(&self) -> &ParamInfo {
        &self.param
    }

    pub fn config(&self) -> &ClassifyConfig {
        &self.cfg
    }

    pub fn limits(&self) -> &EvalLimits {
        &self.limits
    }

    /// Classifies `z0` given in the plane of the stored (normalized) `lambda`.
    pub fn classify(&self, z0: Complex64) -> OrbitOutcome {
        let lambda = self.param.lambda;
        let cfg = &self.cfg;
        let mut z = z0;
        let mut trap_run = 0usize;
        let mut last_trap: Option<i64> = None;

        let done = |fate, steps, last| OrbitOutcome { fate, steps, last };

        for step in 0..=cfg.budget {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return done(Fate::Undecided, step, z);
            }
            if pole_distance(z) < self.limits.pole_eps {
                return done(Fate::PoleHit(step), step, z);
            }
            if z.im >= 0.0 {
                return done(Fate::PrimaryBaker, step, z);
            }
            match self.param.region {
                Region::BakerStrip | Region::BakerStripAligned if z.im < cfg.y_down => {
                    return done(Fate::LowerBaker, step, z);
                }
                Region::WanderingLine(k) => {
                    let m = trap_index(z);
                    if in_trap_region(z, m) {
                        trap_run = match last_trap {
                            Some(prev) if prev + k == m => trap_run + 1,
                            _ => 1,
                        };
                        last_trap = Some(m);
                    } else {
                        trap_run = 0;
                        last_trap = None;
                    }
                    if trap_run >= cfg.trap_patience {
                        return done(Fate::WanderingStrip(k.signum() as i8), step, z);
                    }
                }
                _ => {}
            }
            if step == cfg.budget {
                break;
            }
            let next = match evaluate(lambda, z, &self.limits) {
                ComplexPoint::Finite(next) => next,
                ComplexPoint::AtInfinity => return done(Fate::PoleHit(step), step, z),
            };
            if let Some(anchor) = self.fixed_anchor {
                if (next - z).norm() < cfg.fp_tol {
                    let m = ((next.re - anchor.re) / PI).round() as i64;
                    return done(Fate::AttractingFixed(m), step + 1, next);
                }
            }
            if next.norm() > self.limits.blowup {
                return done(Fate::Undecided, step + 1, next);
            }
            z = next;
        }
        done(Fate::Undecided, cfg.budget, z)
    }

    /// Classifies `z0` given in the plane of the parameter as it was passed
    /// to [`crate::normalize_lambda`], undoing the conjugation if needed.
    pub fn classify_input_plane(&self, z0: Complex64) -> OrbitOutcome {
        if self.param.conjugated {
            self.classify(-z0).mirrored()
        } else {
            self.classify(z0)
        }
    }
}

/// One-shot classification; see [`OrbitClassifier::classify`].
pub fn classify_orbit(
    param: &ParamInfo,
    z0: Complex64,
    cfg: &ClassifyConfig,
    limits: &EvalLimits,
) -> Result<OrbitOutcome> {
    Ok(OrbitClassifier::new(*param, *cfg, *limits)?.classify(z0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{critical_points, fixed_points, normalize_lambda, Half};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn run(lambda: Complex64, z0: Complex64) -> OrbitOutcome {
        classify_orbit(
            &normalize_lambda(lambda),
            z0,
            &ClassifyConfig::default(),
            &EvalLimits::default(),
        )
        .unwrap()
    }

    #[test]
    fn trap_membership() {
        assert!(in_trap_region(c(FRAC_PI_2, -0.7), 0));
        assert!(!in_trap_region(c(FRAC_PI_2 + PI / 16.0, -0.7), 0));
        assert!(in_trap_region(c(1.5 * PI, -0.7248), 1));
        assert!(in_trap_region(c(FRAC_PI_2, TRAP_CEILING), 0));
        assert!(!in_trap_region(c(FRAC_PI_2, -0.6657), 0));
        assert!(!in_trap_region(c(FRAC_PI_2, -0.7), 1));
    }

    #[test]
    fn upper_half_plane_is_primary_immediately() {
        for lambda in [c(0.0, 1.5), c(PI, 0.5), c(2.0, 3.0), c(PI, FRAC_PI_2)] {
            let out = run(lambda, c(0.0, 1.0));
            assert_eq!(out.fate, Fate::PrimaryBaker);
            assert!(out.steps <= 1);
        }
    }

    #[test]
    fn lower_baker_in_aligned_strip() {
        let out = run(c(PI, 0.5), c(FRAC_PI_2, -2.0));
        assert_eq!(out.fate, Fate::LowerBaker);
        assert!(out.last.im < -50.0);
    }

    #[test]
    fn lower_critical_point_wanders() {
        let cp = critical_points(Half::Lower, 0, 0).unwrap()[0];
        let out = run(c(PI, FRAC_PI_2), cp);
        assert_eq!(out.fate, Fate::WanderingStrip(1));
        let out = run(c(-PI, FRAC_PI_2), cp);
        assert_eq!(out.fate, Fate::WanderingStrip(-1));
    }

    #[test]
    fn attracting_fixed_point_near_seed() {
        let lambda = c(0.0, 1.5);
        let zstar = fixed_points(lambda, 0, 0).unwrap()[0];
        // Oracle: plain iteration converges to z* (multiplier -0.25).
        let mut z = zstar + 0.05;
        for _ in 0..60 {
            z = lambda + z + z.tan();
        }
        assert!((z - zstar).norm() < 1e-12);

        let out = run(lambda, zstar + 0.05);
        assert_eq!(out.fate, Fate::AttractingFixed(0));
        assert!((out.last - zstar).norm() < 1e-8);
        let out = run(lambda, zstar + 0.05 + 2.0 * PI);
        assert_eq!(out.fate, Fate::AttractingFixed(2));
    }

    #[test]
    fn exact_pole_is_hit_at_step_zero() {
        let out = run(c(0.0, 1.5), c(FRAC_PI_2, 0.0));
        assert_eq!(out.fate, Fate::PoleHit(0));
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn undecided_when_budget_runs_out() {
        // Deep in the lower half plane with Im lambda = 2 the orbit climbs
        // slowly; a tiny budget cannot see it reach the real axis.
        let cfg = ClassifyConfig {
            budget: 3,
            ..ClassifyConfig::default()
        };
        let out = classify_orbit(
            &normalize_lambda(c(PI, 2.0)),
            c(0.3, -40.0),
            &cfg,
            &EvalLimits::default(),
        )
        .unwrap();
        assert_eq!(out.fate, Fate::Undecided);
        assert_eq!(out.steps, 3);
    }

    #[test]
    fn conjugated_parameter_round_trip() {
        let cp = critical_points(Half::Lower, 0, 0).unwrap()[0];
        let direct = OrbitClassifier::new(
            normalize_lambda(c(PI, FRAC_PI_2)),
            ClassifyConfig::default(),
            EvalLimits::default(),
        )
        .unwrap()
        .classify(cp);
        let mirrored = OrbitClassifier::new(
            normalize_lambda(c(-PI, -FRAC_PI_2)),
            ClassifyConfig::default(),
            EvalLimits::default(),
        )
        .unwrap()
        .classify_input_plane(-cp);
        assert_eq!(mirrored.fate, Fate::WanderingStrip(-1));
        assert_eq!(mirrored, direct.mirrored());
    }

    #[test]
    fn config_validation() {
        let bad = ClassifyConfig {
            budget: 0,
            ..ClassifyConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ClassifyConfig {
            y_down: 1.0,
            ..ClassifyConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ClassifyConfig {
            trap_patience: 0,
            ..ClassifyConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
