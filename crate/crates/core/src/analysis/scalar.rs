//! Real one-dimensional maps: the restriction of `f` to vertical lines and
//! the three bounding functions of the trapping-region argument.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ceiling of the trapping regions `R_m` (`Im z <= TRAP_CEILING`).
pub const TRAP_CEILING: f64 = -0.6658;

/// `2 |TRAP_CEILING|`, as it appears in the bottom-edge estimate.
const TRAP_DOUBLE_DEPTH: f64 = 1.3316;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScalarMap {
    /// `y -> lambda2 + y + tanh y`: `Im f` along `Re z = m pi` when
    /// `Im lambda = lambda2`.
    Phi { lambda2: f64 },
    /// `y -> pi/2 + y + coth y`: `Im f` along `Re z = m pi + pi/2` when
    /// `Im lambda = pi/2`.
    G,
    /// `g'(y) = 2 - coth^2 y`.
    GPrime,
    /// `x -> sin(pi/8) / (cosh 2x - cos(pi/8))`: the real drift on the side
    /// edges of a trapping region.
    H1,
    /// `x -> pi/2 + x + sinh 2x / (cosh 2x - cos(pi/8))`: `Im f` on the side
    /// edges.
    H2,
    /// `x -> pi/2 - 0.6658 - sinh 1.3316 / (cos 2x + cosh 1.3316)`: `Im f`
    /// on the top edge.
    H3,
}

impl ScalarMap {
    pub fn name(&self) -> &'static str {
        match self {
            ScalarMap::Phi { .. } => "phi",
            ScalarMap::G => "g",
            ScalarMap::GPrime => "g'",
            ScalarMap::H1 => "h1",
            ScalarMap::H2 => "h2",
            ScalarMap::H3 => "h3",
        }
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        let domain = |ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::Domain {
                    map: self.name(),
                    y,
                })
            }
        };
        match *self {
            ScalarMap::Phi { lambda2 } => Ok(lambda2 + y + y.tanh()),
            ScalarMap::G => {
                domain(y < 0.0)?;
                Ok(FRAC_PI_2 + y + y.tanh().recip())
            }
            ScalarMap::GPrime => {
                domain(y < 0.0)?;
                let coth = y.tanh().recip();
                Ok(2.0 - coth * coth)
            }
            ScalarMap::H1 => {
                domain(y < 0.0)?;
                Ok(FRAC_PI_8.sin() / ((2.0 * y).cosh() - FRAC_PI_8.cos()))
            }
            ScalarMap::H2 => {
                domain(y < 0.0)?;
                let two_y = 2.0 * y;
                Ok(FRAC_PI_2 + y + two_y.sinh() / (two_y.cosh() - FRAC_PI_8.cos()))
            }
            ScalarMap::H3 => Ok(FRAC_PI_2 + TRAP_CEILING
                - TRAP_DOUBLE_DEPTH.sinh() / ((2.0 * y).cos() + TRAP_DOUBLE_DEPTH.cosh())),
        }
    }
}

/// The attracting fixed point of `g` on the negative axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GFixedPoint {
    pub y0: f64,
    pub multiplier: f64,
}

/// Locates the root of `g(y) - y = pi/2 + coth y` in `(-2, -0.1)` by
/// bisection, then sharpens it with Newton.
pub fn solve_g_fixed_point() -> GFixedPoint {
    let gap = |y: f64| FRAC_PI_2 + y.tanh().recip();
    let (mut lo, mut hi) = (-2.0_f64, -0.1_f64);
    debug_assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..20 {
        let sh = y.sinh();
        // d/dy coth y = -csch^2 y
        let step = gap(y) / (-1.0 / (sh * sh));
        y -= step;
        if step.abs() < 1e-17 {
            break;
        }
    }
    let multiplier = ScalarMap::GPrime.eval(y).expect("y0 is negative");
    GFixedPoint { y0: y, multiplier }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn h1_spot_value() {
        let v = ScalarMap::H1.eval(-0.6658).unwrap();
        assert!((v - 0.3473).abs() < 5e-4, "{v}");
        assert!(v < FRAC_PI_8);
    }

    #[test]
    fn h3_at_interval_ends() {
        for m in [-2.0, 0.0, 3.0] {
            for side in [-1.0, 1.0] {
                let x = m * PI + FRAC_PI_2 + side * PI / 16.0;
                let v = ScalarMap::H3.eval(x).unwrap();
                assert!((v + 0.6939).abs() < 5e-4, "{v}");
            }
        }
    }

    #[test]
    fn phi_exceeds_identity_when_lambda2_above_one() {
        let phi = ScalarMap::Phi { lambda2: 1.5 };
        let y = -5.0;
        let d = phi.eval(y).unwrap() - y;
        assert!((d - (1.5 + y.tanh())).abs() < 1e-15);
        assert!(d > 0.0);
    }

    #[test]
    fn g_rejects_nonnegative_input() {
        assert!(matches!(
            ScalarMap::G.eval(0.0),
            Err(Error::Domain { map: "g", .. })
        ));
        assert!(ScalarMap::GPrime.eval(0.5).is_err());
        assert!(ScalarMap::H2.eval(0.0).is_err());
        assert!(ScalarMap::H3.eval(0.0).is_ok());
    }

    #[test]
    fn g_fixed_point_matches_closed_form() {
        let fp = solve_g_fixed_point();
        let closed = 0.5 * ((PI - 2.0) / (PI + 2.0)).ln();
        assert!((fp.y0 - closed).abs() < 1e-10);
        assert!((fp.y0 + 0.7524).abs() < 1e-4);
        assert!((fp.multiplier - (2.0 - PI * PI / 4.0)).abs() < 1e-10);
        assert!((fp.multiplier + 0.467401).abs() < 1e-6);
        assert!(fp.multiplier.abs() < 1.0);
        let g = ScalarMap::G.eval(fp.y0).unwrap();
        assert!((g - fp.y0).abs() < 1e-12);
    }
}
