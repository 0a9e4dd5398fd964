//! Counting solutions of `f(z) = w` in a vertical strip by launching Newton
//! from a seed grid. The count is a lower bound: a root no seed converges to
//! is missed.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::derivative_finite;
use crate::error::{Error, Result};
use crate::map::{evaluate, tan_stable, EvalLimits};

const MAX_NEWTON_ITERS: usize = 100;
/// Newton steps are clipped to this length; `tan` sends long steps across
/// many periods otherwise.
const MAX_STEP: f64 = 1.0;
const DEDUP_RADIUS: f64 = 1e-6;
/// Below this `|f'|` a converged root is refined towards a critical point.
const CRITICAL_SLOPE: f64 = 1e-3;

/// `{z : |Re z - center_re| <= halfwidth, im_lo <= Im z <= im_hi}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub center_re: f64,
    pub halfwidth: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Strip {
    pub fn contains(&self, z: Complex64) -> bool {
        (z.re - self.center_re).abs() <= self.halfwidth && z.im >= self.im_lo && z.im <= self.im_hi
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.center_re, self.halfwidth, self.im_lo, self.im_hi]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.halfwidth <= 0.0 || self.im_lo >= self.im_hi {
            return Err(Error::InvalidGrid(format!("degenerate strip {self:?}")));
        }
        Ok(())
    }

    fn seeds(&self, per_axis: usize) -> impl IndexedParallelIterator<Item = Complex64> + '_ {
        let n = per_axis as f64;
        (0..per_axis * per_axis).into_par_iter().map(move |idx| {
            let (i, j) = ((idx % per_axis) as f64, (idx / per_axis) as f64);
            Complex64::new(
                self.center_re - self.halfwidth + (i + 0.5) * 2.0 * self.halfwidth / n,
                self.im_lo + (j + 0.5) * (self.im_hi - self.im_lo) / n,
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preimage {
    pub z: Complex64,
    /// 2 at a critical point, 1 otherwise.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageCount {
    /// Sum of multiplicities of the distinct roots inside the strip.
    pub count: usize,
    /// Roots in lexicographic `(re, im)` order.
    pub roots: Vec<Preimage>,
    /// No seed converged at all; a count of 0 then says nothing.
    pub no_roots_found: bool,
}

fn newton(
    lambda: Complex64,
    w: Complex64,
    seed: Complex64,
    limits: &EvalLimits,
) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..MAX_NEWTON_ITERS {
        let fz = evaluate(lambda, z, limits).finite()? - w;
        let slope = derivative_finite(z, limits)?;
        if slope.norm() == 0.0 {
            return None;
        }
        let mut step = fz / slope;
        let len = step.norm();
        if !len.is_finite() {
            return None;
        }
        if len > MAX_STEP {
            step *= MAX_STEP / len;
        }
        z -= step;
        if len <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let residual = (evaluate(lambda, z, limits).finite()? - w).norm();
    (residual <= 1e-9 * (1.0 + w.norm())).then_some(z)
}

/// Newton on `f'(z) = 0`, i.e. `2 + tan^2 z = 0`, with
/// `f''(z) = 2 tan z (1 + tan^2 z)`.
fn nearby_critical_point(z: Complex64, limits: &EvalLimits) -> Option<Complex64> {
    let mut c = z;
    for _ in 0..30 {
        let t = tan_stable(c, limits).finite()?;
        let fp = 2.0 + t * t;
        let fpp = 2.0 * t * (1.0 + t * t);
        if fpp.norm() == 0.0 {
            return None;
        }
        let step = fp / fpp;
        c -= step;
        if step.norm() <= 1e-16 * (1.0 + c.norm()) {
            break;
        }
    }
    Some(c)
}

fn classify_root(lambda: Complex64, w: Complex64, z: Complex64, limits: &EvalLimits) -> Preimage {
    let slope = derivative_finite(z, limits).map_or(f64::INFINITY, |d| d.norm());
    if slope < CRITICAL_SLOPE {
        if let Some(c) = nearby_critical_point(z, limits) {
            let hits = evaluate(lambda, c, limits)
                .finite()
                .is_some_and(|fc| (fc - w).norm() <= 1e-8 * (1.0 + w.norm()));
            if hits && (c - z).norm() < 1e-3 {
                return Preimage {
                    z: c,
                    multiplicity: 2,
                };
            }
        }
    }
    Preimage { z, multiplicity: 1 }
}

/// Counts solutions of `f(z) = w` inside `strip` from a
/// `seeds_per_axis x seeds_per_axis` grid of Newton starts.
pub fn count_preimages(
    lambda: Complex64,
    w: Complex64,
    strip: &Strip,
    seeds_per_axis: usize,
    limits: &EvalLimits,
) -> Result<PreimageCount> {
    strip.validate()?;
    if seeds_per_axis == 0 {
        return Err(Error::InvalidGrid("seeds_per_axis must be positive".into()));
    }
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::InvalidGrid(format!("target {w} is not finite")));
    }

    let mut converged: Vec<Preimage> = strip
        .seeds(seeds_per_axis)
        .filter_map(|seed| newton(lambda, w, seed, limits))
        .map(|z| classify_root(lambda, w, z, limits))
        .collect();
    let no_roots_found = converged.is_empty();

    converged.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    let mut distinct: Vec<Preimage> = Vec::new();
    for root in converged {
        match distinct
            .iter_mut()
            .find(|kept| (kept.z - root.z).norm() <= DEDUP_RADIUS)
        {
            Some(kept) => kept.multiplicity = kept.multiplicity.max(root.multiplicity),
            None => distinct.push(root),
        }
    }
    distinct.retain(|r| strip.contains(r.z));

    Ok(PreimageCount {
        count: distinct.iter().map(|r| r.multiplicity as usize).sum(),
        roots: distinct,
        no_roots_found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{critical_points, critical_values, Half};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vertical_line_is_mapped_bijectively() {
        let lambda = c(0.0, 1.0);
        // f(iy) = i (1 + y + tanh y); pick the image of y = -0.5
        let y = -0.5_f64;
        let w = c(0.0, 1.0 + y + y.tanh());
        let strip = Strip {
            center_re: 0.0,
            halfwidth: 0.1,
            im_lo: -3.0,
            im_hi: 3.0,
        };
        let res = count_preimages(lambda, w, &strip, 30, &EvalLimits::default()).unwrap();
        assert_eq!(res.count, 1, "{res:?}");
        assert!((res.roots[0].z - c(0.0, y)).norm() < 1e-9);
    }

    #[test]
    fn critical_value_has_a_double_preimage() {
        let lambda = c(PI, FRAC_PI_2);
        let cp = critical_points(Half::Lower, 1, 1).unwrap()[0];
        let cv = critical_values(lambda, Half::Lower, 1, 1).unwrap()[0];
        let strip = Strip {
            center_re: cp.re,
            halfwidth: 0.3,
            im_lo: cp.im - 0.3,
            im_hi: cp.im + 0.3,
        };
        let res = count_preimages(lambda, cv, &strip, 20, &EvalLimits::default()).unwrap();
        assert_eq!(res.roots.len(), 1, "{res:?}");
        assert_eq!(res.roots[0].multiplicity, 2);
        assert_eq!(res.count, 2);
        assert!((res.roots[0].z - cp).norm() < 1e-8);
    }

    #[test]
    fn nothing_found_is_flagged() {
        // Im f(z) > Im lambda + Im z on the upper half plane, so nothing in a
        // strip at height 5..6 maps to -100 i.
        let strip = Strip {
            center_re: 0.0,
            halfwidth: 0.5,
            im_lo: 5.0,
            im_hi: 6.0,
        };
        let res = count_preimages(
            c(0.0, 1.0),
            c(0.0, -100.0),
            &strip,
            4,
            &EvalLimits::default(),
        )
        .unwrap();
        assert_eq!(res.count, 0);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let strip = Strip {
            center_re: 0.0,
            halfwidth: 0.0,
            im_lo: 0.0,
            im_hi: 1.0,
        };
        let lim = EvalLimits::default();
        assert!(count_preimages(c(0.0, 1.0), c(0.0, 0.0), &strip, 4, &lim).is_err());
        let strip = Strip {
            halfwidth: 1.0,
            ..strip
        };
        assert!(count_preimages(c(0.0, 1.0), c(0.0, 0.0), &strip, 0, &lim).is_err());
    }
}
