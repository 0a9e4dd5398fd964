//! Evaluation of `tan z`, of the family `f(z) = lambda + z + tan z`, of its
//! derivative, and of finite orbits.
//!
//! `tan` is evaluated after reducing `Re z` modulo the binary64 value of
//! `pi` with a single fused multiply-add. The reduced argument `r` lies in
//! `[-pi/2, pi/2]` and
//!
//! ```text
//! tan(r + iy) = (sin r cos r + i sinh y cosh y) / (cos^2 r + sinh^2 y)
//! ```
//!
//! which is the split real/imaginary formula with
//! `cos 2x + cosh 2y = 2 (cos^2 x + sinh^2 y)` substituted, so nothing
//! cancels next to a pole. For `|y| >= y_sat` the hyperbolic terms are
//! replaced by the overflow-free form in `t = exp(-2|y|)`.
//!
//! Because the reduction subtracts whole multiples of the stored `pi`,
//! `tan_stable(z + PI) == tan_stable(z)` holds bit-for-bit whenever `z + PI`
//! is exact, and the translation identity `f(z + pi) = f(z) + pi` holds up
//! to the rounding of the final additions.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the plane, or the point at infinity produced by hitting a pole.
///
/// `AtInfinity` only ever appears in results; every input to arithmetic is a
/// finite `Complex64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexPoint {
    Finite(Complex64),
    AtInfinity,
}

impl ComplexPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ComplexPoint::Finite(z) => Some(z),
            ComplexPoint::AtInfinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ComplexPoint::AtInfinity)
    }

    /// Panics on `AtInfinity`; for tests and call sites that have already
    /// excluded poles.
    #[track_caller]
    pub fn unwrap(self) -> Complex64 {
        self.finite().expect("point at infinity")
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint::Finite(z)
    }
}

/// Numerical thresholds shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalLimits {
    /// `|Im z|` at and above which the asymptotic form of `tan` is used.
    pub y_sat: f64,
    /// Magnitude treated as divergence to infinity.
    pub blowup: f64,
    /// Distance to a real pole treated as hitting the pole.
    pub pole_eps: f64,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits {
            y_sat: 20.0,
            blowup: 1e15,
            pole_eps: 1e-12,
        }
    }
}

impl EvalLimits {
    pub fn new(y_sat: f64, blowup: f64, pole_eps: f64) -> Result<Self> {
        let limits = EvalLimits {
            y_sat,
            blowup,
            pole_eps,
        };
        limits.validate()?;
        Ok(limits)
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.y_sat, self.blowup, self.pole_eps]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !all_positive {
            return Err(Error::InvalidLimits(format!(
                "all limits must be finite and positive, got {self:?}"
            )));
        }
        if self.y_sat < 2.0 {
            return Err(Error::InvalidLimits(format!(
                "y_sat must be at least 2, got {}",
                self.y_sat
            )));
        }
        Ok(())
    }
}

/// Largest `|k|` for which `k * PI` is subtracted exactly by the fma.
const MAX_EXACT_MULTIPLE: f64 = 4_503_599_627_370_496.0; // 2^52

/// Reduces `x` to `r` in `[-pi/2, pi/2]` with `x = r + k * PI` (`PI` the
/// binary64 constant).
fn reduce(x: f64) -> f64 {
    if x.abs() <= FRAC_PI_2 {
        return x;
    }
    let k = (x / PI).round();
    if k.abs() >= MAX_EXACT_MULTIPLE {
        // Float spacing here already exceeds the period; leave it to libm.
        return x;
    }
    (-k).mul_add(PI, x)
}

/// Horizontal distance from `x` to the nearest pole `pi/2 + m pi`.
fn pole_gap(r: f64) -> f64 {
    if r.abs() > PI {
        // Unreduced fallback: |cos x| is the gap to first order.
        return r.cos().abs();
    }
    (FRAC_PI_2 - r.abs()).abs()
}

/// Euclidean distance from `z` to the nearest real pole of `tan`.
pub fn pole_distance(z: Complex64) -> f64 {
    pole_gap(reduce(z.re)).hypot(z.im)
}

/// Index `m` of the pole `pi/2 + m pi` nearest to `x`.
pub fn nearest_pole_index(x: f64) -> i64 {
    ((x - FRAC_PI_2) / PI).round() as i64
}

/// `tan z`, or `AtInfinity` when `z` is within `pole_eps` of a real pole.
pub fn tan_stable(z: Complex64, limits: &EvalLimits) -> ComplexPoint {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return ComplexPoint::AtInfinity;
    }
    let r = reduce(z.re);
    let y = z.im;
    if pole_gap(r).hypot(y) < limits.pole_eps {
        return ComplexPoint::AtInfinity;
    }
    if y.abs() >= limits.y_sat {
        let t = (-2.0 * y.abs()).exp();
        let (s2, c2) = (2.0 * r).sin_cos();
        let d = 1.0 + 2.0 * t * c2 + t * t;
        let re = 2.0 * t * s2 / d;
        let im = y.signum() * (1.0 - t * t) / d;
        return ComplexPoint::Finite(Complex64::new(re, im));
    }
    let (s, c) = r.sin_cos();
    let (sh, ch) = (y.sinh(), y.cosh());
    let d = c * c + sh * sh;
    // Im tan = tanh y / (1 - q^2) with q = sin r / cosh y; exact on the
    // imaginary axis, but only usable away from the poles.
    let q = s / ch;
    let im = if q * q <= 0.5 {
        y.tanh() / (1.0 - q * q)
    } else {
        sh * ch / d
    };
    ComplexPoint::Finite(Complex64::new(s * c / d, im))
}

/// `f(z) = lambda + z + tan z`.
pub fn evaluate(lambda: Complex64, z: Complex64, limits: &EvalLimits) -> ComplexPoint {
    match tan_stable(z, limits) {
        ComplexPoint::Finite(t) => ComplexPoint::Finite(lambda + z + t),
        ComplexPoint::AtInfinity => ComplexPoint::AtInfinity,
    }
}

/// `f'(z) = 1 + sec^2 z = 2 + tan^2 z`; independent of `lambda`.
pub fn derivative(z: Complex64, limits: &EvalLimits) -> ComplexPoint {
    match tan_stable(z, limits) {
        ComplexPoint::Finite(t) => ComplexPoint::Finite(2.0 + t * t),
        ComplexPoint::AtInfinity => ComplexPoint::AtInfinity,
    }
}

/// Why an orbit stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitEnd {
    /// All requested steps were taken.
    Completed,
    /// The last point sits on a pole; its image is infinity.
    PoleHit,
    /// The last point exceeded `blowup` in magnitude.
    Escaped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    /// `[z0, f(z0), f(f(z0)), ...]`, at most `n + 1` points.
    pub points: Vec<Complex64>,
    pub end: OrbitEnd,
}

/// Iterates `f` up to `n` times from `z0`.
pub fn orbit(lambda: Complex64, z0: Complex64, n: usize, limits: &EvalLimits) -> Orbit {
    let mut points = Vec::with_capacity(n.min(1 << 16) + 1);
    points.push(z0);
    if z0.norm() > limits.blowup {
        return Orbit {
            points,
            end: OrbitEnd::Escaped,
        };
    }
    let mut z = z0;
    for _ in 0..n {
        match evaluate(lambda, z, limits) {
            ComplexPoint::AtInfinity => {
                return Orbit {
                    points,
                    end: OrbitEnd::PoleHit,
                }
            }
            ComplexPoint::Finite(next) => {
                points.push(next);
                if next.norm() > limits.blowup {
                    return Orbit {
                        points,
                        end: OrbitEnd::Escaped,
                    };
                }
                z = next;
            }
        }
    }
    Orbit {
        points,
        end: OrbitEnd::Completed,
    }
}
