//! Closed-form dynamical data of `f(z) = lambda + z + tan z`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{derivative, evaluate, tan_stable, ComplexPoint, EvalLimits};

mod preimage;
mod scalar;

pub use preimage::{count_preimages, Preimage, PreimageCount, Strip};
pub use scalar::{solve_g_fixed_point, GFixedPoint, ScalarMap, TRAP_CEILING};

/// `sinh^-1(1) = ln(1 + sqrt 2)`, the height of every critical point.
pub const ASINH_1: f64 = 0.881_373_587_019_543;

/// `sqrt 2 + sinh^-1(1)`: the height gap between a critical point and its
/// value, and the lower edge of the high strip.
pub const HIGH_STRIP_FLOOR: f64 = SQRT_2 + ASINH_1;

/// Tolerance for the measure-zero region conditions (`Re lambda = k pi`,
/// `lambda = k pi + i pi/2`, `Im lambda` on the high-strip edge).
pub const REGION_TOL: f64 = 1e-9;

/// Parameter-plane region of a normalized `lambda` (`Im lambda >= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    RealAxis,
    /// `|2 + lambda^2| < 1`: every fixed point is attracting.
    AttractingLobe,
    /// `0 < Im lambda < 1`.
    BakerStrip,
    /// `0 < Im lambda < 1` and `Re lambda = k pi`.
    BakerStripAligned,
    /// `Im lambda` above `sqrt 2 + sinh^-1 1` (or on it, off the pole line).
    HighStrip,
    /// `lambda = k pi + i pi/2` with `k != 0`.
    WanderingLine(i64),
    Other,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::RealAxis => "real-axis",
            Region::AttractingLobe => "attracting-lobe",
            Region::BakerStrip => "baker-strip",
            Region::BakerStripAligned => "baker-strip-aligned",
            Region::HighStrip => "high-strip",
            Region::WanderingLine(_) => "wandering-line",
            Region::Other => "other",
        }
    }
}

/// A parameter after the `lambda -> -lambda` normalization, with its region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamInfo {
    /// Stored parameter; `Im lambda >= 0`.
    pub lambda: Complex64,
    /// The input had `Im lambda < 0` and was negated. Dynamics of the input
    /// are those of `lambda` conjugated by `z -> -z`.
    pub conjugated: bool,
    pub region: Region,
}

impl ParamInfo {
    /// Maps a point of the input parameter's plane into the plane of the
    /// stored `lambda`.
    pub fn to_normalized(&self, z: Complex64) -> Complex64 {
        if self.conjugated {
            -z
        } else {
            z
        }
    }

    /// Inverse of [`ParamInfo::to_normalized`] (the map is an involution).
    pub fn from_normalized(&self, z: Complex64) -> Complex64 {
        self.to_normalized(z)
    }
}

fn near_multiple_of_pi(x: f64, offset: f64) -> Option<i64> {
    let k = ((x - offset) / PI).round();
    ((x - offset - k * PI).abs() <= REGION_TOL).then_some(k as i64)
}

fn region_of(lambda: Complex64) -> Region {
    let (re, im) = (lambda.re, lambda.im);
    if im == 0.0 {
        return Region::RealAxis;
    }
    if multiplier(lambda).norm() < 1.0 {
        return Region::AttractingLobe;
    }
    if im > 0.0 && im < 1.0 {
        return match near_multiple_of_pi(re, 0.0) {
            Some(_) => Region::BakerStripAligned,
            None => Region::BakerStrip,
        };
    }
    if im > HIGH_STRIP_FLOOR + REGION_TOL {
        return Region::HighStrip;
    }
    if (im - HIGH_STRIP_FLOOR).abs() <= REGION_TOL && near_multiple_of_pi(re, FRAC_PI_2).is_none() {
        return Region::HighStrip;
    }
    if (im - FRAC_PI_2).abs() <= REGION_TOL {
        if let Some(k) = near_multiple_of_pi(re, 0.0) {
            if k != 0 {
                return Region::WanderingLine(k);
            }
        }
    }
    Region::Other
}

/// Replaces `lambda` by `-lambda` when `Im lambda < 0` and tags the region.
pub fn normalize_lambda(lambda: Complex64) -> ParamInfo {
    let conjugated = lambda.im < 0.0;
    let lambda = if conjugated { -lambda } else { lambda };
    ParamInfo {
        lambda,
        conjugated,
        region: region_of(lambda),
    }
}

/// Multiplier shared by every fixed point.
pub fn multiplier(lambda: Complex64) -> Complex64 {
    2.0 + lambda * lambda
}

/// Principal `atan` through logarithms:
/// `atan w = (i/2) (ln(1 - iw) - ln(1 + iw))`.
fn atan_principal(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    let iw = i * w;
    (i / 2.0) * ((1.0 - iw).ln() - (1.0 + iw).ln())
}

const POLISH_STEPS: usize = 8;

/// The fixed point with `Re` in `(-pi/2, pi/2]`; every other one is a
/// translate by a multiple of `pi`.
pub fn fixed_point_representative(lambda: Complex64) -> Result<Complex64> {
    let i = Complex64::i();
    if (lambda - i).norm() < 1e-12 || (lambda + i).norm() < 1e-12 {
        return Err(Error::NoFixedPoints { lambda });
    }
    let mut z = atan_principal(-lambda);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NoFixedPoints { lambda });
    }
    let shift = (z.re / PI).round();
    z.re -= shift * PI;
    if z.re <= -FRAC_PI_2 {
        z.re += PI;
    } else if z.re > FRAC_PI_2 {
        z.re -= PI;
    }
    // Newton on lambda + tan z = 0 absorbs rounding near the branch cut.
    let limits = EvalLimits::default();
    for step in 0..POLISH_STEPS {
        let Some(t) = tan_stable(z, &limits).finite() else {
            break;
        };
        let residual = lambda + t;
        let slope = 1.0 + t * t;
        if slope.norm() == 0.0 {
            break;
        }
        let next = z - residual / slope;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        let moved = (next - z).norm();
        z = next;
        if step > 0 && moved <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    Ok(z)
}

/// Fixed points `z_m = arctan(-lambda) + m pi` for `m` in `[m_lo, m_hi]`.
pub fn fixed_points(lambda: Complex64, m_lo: i64, m_hi: i64) -> Result<Vec<Complex64>> {
    if m_lo > m_hi {
        return Err(Error::InvalidRange { lo: m_lo, hi: m_hi });
    }
    let z0 = fixed_point_representative(lambda)?;
    Ok((m_lo..=m_hi).map(|m| z0 + m as f64 * PI).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Half {
    Upper,
    Lower,
}

impl Half {
    fn sign(self) -> f64 {
        match self {
            Half::Upper => 1.0,
            Half::Lower => -1.0,
        }
    }
}

/// Critical points `pi/2 + n pi +- i sinh^-1 1`.
pub fn critical_points(half: Half, n_lo: i64, n_hi: i64) -> Result<Vec<Complex64>> {
    if n_lo > n_hi {
        return Err(Error::InvalidRange { lo: n_lo, hi: n_hi });
    }
    Ok((n_lo..=n_hi)
        .map(|n| Complex64::new(FRAC_PI_2 + n as f64 * PI, half.sign() * ASINH_1))
        .collect())
}

/// Critical values `lambda + pi/2 + n pi +- i (sinh^-1 1 + sqrt 2)`.
pub fn critical_values(
    lambda: Complex64,
    half: Half,
    n_lo: i64,
    n_hi: i64,
) -> Result<Vec<Complex64>> {
    if n_lo > n_hi {
        return Err(Error::InvalidRange { lo: n_lo, hi: n_hi });
    }
    Ok((n_lo..=n_hi)
        .map(|n| lambda + Complex64::new(FRAC_PI_2 + n as f64 * PI, half.sign() * HIGH_STRIP_FLOOR))
        .collect())
}

/// `|f(z) - z|` at a candidate fixed point; `inf` on a pole.
pub fn fixed_point_residual(lambda: Complex64, z: Complex64, limits: &EvalLimits) -> f64 {
    match evaluate(lambda, z, limits) {
        ComplexPoint::Finite(fz) => (fz - z).norm(),
        ComplexPoint::AtInfinity => f64::INFINITY,
    }
}

/// `f'` at `z` as a finite value, `None` on a pole.
pub(crate) fn derivative_finite(z: Complex64, limits: &EvalLimits) -> Option<Complex64> {
    derivative(z, limits).finite()
}
