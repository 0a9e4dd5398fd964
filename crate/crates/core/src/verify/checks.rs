use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Measured;
use crate::analysis::{
    count_preimages, critical_points, critical_values, fixed_points, multiplier,
    solve_g_fixed_point, Half, ScalarMap, Strip, ASINH_1, TRAP_CEILING,
};
use crate::classify::{in_trap_region, ClassifyConfig, TRAP_HALFWIDTH};
use crate::map::{derivative, evaluate, pole_distance, ComplexPoint, EvalLimits};

const ESTIMATE_POINTS: usize = 100_000;
/// Length of the certified `x <= -0.6658` range sampled by the estimates.
const ESTIMATE_SPAN: f64 = 10.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eval(lambda: Complex64, z: Complex64) -> Option<Complex64> {
    evaluate(lambda, z, &EvalLimits::default()).finite()
}

fn random_lambda(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.random_range(-5.0..5.0), rng.random_range(-3.0..3.0))
}

/// `i`-th of `n` jittered grid points on `[lo, hi]`; the first is `lo`.
fn grid_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    let u = if i == 0 {
        0.0
    } else {
        rng.random_range(0.0..1.0)
    };
    lo + (hi - lo) * (i as f64 + u) / n as f64
}

fn fmt_point(z: Complex64) -> String {
    format!("{:.10}{:+.10}i", z.re, z.im)
}

pub(super) fn pi_equivariance(rng: &mut ChaCha8Rng) -> Measured {
    // Re z on a 2^-40 grid, |Re z| <= 12: z + pi is then exact.
    const SCALE: f64 = (1u64 << 40) as f64;
    let span = (12.0 * SCALE) as i64;
    let mut m = Measured::default();
    while m.samples < 10_000 {
        let lambda = random_lambda(rng);
        let z = c(
            rng.random_range(-span..=span) as f64 / SCALE,
            rng.random_range(-25.0..25.0),
        );
        if pole_distance(z) < 1e-3 {
            continue;
        }
        let shifted = z + PI;
        debug_assert_eq!(shifted.re - PI, z.re);
        let (Some(a), Some(b)) = (eval(lambda, shifted), eval(lambda, z)) else {
            m.violations += 1;
            m.samples += 1;
            continue;
        };
        m.max_error = m.max_error.max((a - b - PI).norm());
        m.samples += 1;
    }
    m.note = "pole distance >= 1e-3".into();
    m
}

pub(super) fn conjugacy(rng: &mut ChaCha8Rng) -> Measured {
    let mut m = Measured::default();
    while m.samples < 10_000 {
        let lambda = random_lambda(rng);
        let z = c(rng.random_range(-12.0..12.0), rng.random_range(-25.0..25.0));
        if pole_distance(z) < 1e-3 {
            continue;
        }
        m.samples += 1;
        match (eval(lambda, z), eval(-lambda, -z)) {
            (Some(a), Some(b)) => m.max_error = m.max_error.max((a + b).norm()),
            _ => m.violations += 1,
        }
    }
    m.note = "|f_l(z) + f_-l(-z)|".into();
    m
}

pub(super) fn line_map(rng: &mut ChaCha8Rng) -> Measured {
    let mut m = Measured::default();
    for _ in 0..20 {
        let lambda = random_lambda(rng);
        let line = rng.random_range(-5i64..=5);
        let x = line as f64 * PI;
        let target = x + lambda.re;
        let mut prev_im = f64::NEG_INFINITY;
        for j in 0..=600 {
            let y = -30.0 + 0.1 * j as f64;
            m.samples += 1;
            let Some(w) = eval(lambda, c(x, y)) else {
                m.violations += 1;
                continue;
            };
            m.max_error = m.max_error.max((w.re - target).abs());
            if w.im <= prev_im {
                m.violations += 1;
            }
            prev_im = w.im;
        }
    }
    m.note = "Re offset on l_(m pi); violations = non-increasing Im".into();
    m
}

pub(super) fn phi_drift(rng: &mut ChaCha8Rng) -> Measured {
    let y_up = ClassifyConfig::default().y_up;
    let mut m = Measured::default();
    let mut escaped = 0;
    for _ in 0..1000 {
        let lambda2 = rng.random_range(1.25..3.0);
        let phi = ScalarMap::Phi { lambda2 };
        let mut y = rng.random_range(-5.0..5.0);
        m.samples += 1;
        for _ in 0..200 {
            let next = phi.eval(y).expect("phi is total");
            m.max_error = m.max_error.max((lambda2 - 1.0) - (next - y));
            y = next;
            if y > y_up {
                break;
            }
        }
        if y > y_up {
            escaped += 1;
        } else {
            m.violations += 1;
        }
    }
    m.max_error = m.max_error.max(0.0);
    m.note = format!(
        "{escaped}/{} orbits passed y_up = {y_up} within 200 steps",
        m.samples
    );
    m
}

pub(super) fn critical_set(rng: &mut ChaCha8Rng) -> Measured {
    let limits = EvalLimits::default();
    let mut lambdas: Vec<Complex64> = (0..10).map(|_| random_lambda(rng)).collect();
    lambdas.push(c(PI, FRAC_PI_2));
    let mut m = Measured::default();
    for half in [Half::Upper, Half::Lower] {
        let points = critical_points(half, -10, 10).expect("valid range");
        for &cp in &points {
            match derivative(cp, &limits) {
                ComplexPoint::Finite(d) => m.max_error = m.max_error.max(d.norm()),
                ComplexPoint::AtInfinity => m.violations += 1,
            }
        }
        for &lambda in &lambdas {
            let values = critical_values(lambda, half, -10, 10).expect("valid range");
            for (&cp, &cv) in points.iter().zip(&values) {
                m.samples += 1;
                match eval(lambda, cp) {
                    Some(w) => m.max_error = m.max_error.max((w - cv).norm()),
                    None => m.violations += 1,
                }
            }
        }
    }
    m.note = "|f'| at critical points and |f(c) - closed form|".into();
    m
}

pub(super) fn fixed_multiplier(rng: &mut ChaCha8Rng) -> Measured {
    let limits = EvalLimits::default();
    let mut m = Measured::default();
    let mut lambdas = 0;
    while lambdas < 100 {
        let lambda = c(rng.random_range(-5.0..5.0), rng.random_range(0.0..3.0));
        if lambda.im <= 0.0 || (lambda - Complex64::i()).norm() < 0.05 {
            continue;
        }
        lambdas += 1;
        let want = multiplier(lambda);
        for z in fixed_points(lambda, -3, 3).expect("lambda != i") {
            m.samples += 1;
            match derivative(z, &limits) {
                ComplexPoint::Finite(d) => m.max_error = m.max_error.max((d - want).norm()),
                ComplexPoint::AtInfinity => m.violations += 1,
            }
            if z.im >= 0.0 {
                m.violations += 1;
            }
        }
    }
    m.note = format!("{lambdas} parameters, m in [-3, 3]; violations = Im z* >= 0");
    m
}

pub(super) fn g_map(rng: &mut ChaCha8Rng) -> Measured {
    let fp = solve_g_fixed_point();
    let closed = 0.5 * ((PI - 2.0) / (PI + 2.0)).ln();
    let mult_want = 2.0 - PI * PI / 4.0;
    let mut m = Measured {
        max_error: (fp.y0 - closed).abs(),
        ..Measured::default()
    };
    let mut failures = Vec::new();
    if (fp.multiplier - mult_want).abs() > 1e-9 {
        m.violations += 1;
        failures.push("multiplier");
    }

    let g = |y: f64| ScalarMap::G.eval(y).expect("negative argument");
    let gp = |y: f64| ScalarMap::GPrime.eval(y).expect("negative argument");
    for eps in [1e-6, 1e-3, 0.1, 0.5] {
        m.samples += 2;
        if !(gp(-ASINH_1 - eps) > 0.0 && gp(-ASINH_1 + eps) < 0.0) {
            m.violations += 1;
            failures.push("g' sign");
        }
    }

    // g is decreasing on [-asinh 1, 0), so [-asinh 1, g(-asinh 1)] is mapped
    // into itself; g(-asinh 1) = pi/2 - asinh 1 - sqrt 2 ~ -0.7248.
    let lo = -ASINH_1;
    let hi = FRAC_PI_2 - ASINH_1 - SQRT_2;
    const SLACK: f64 = 1e-12;
    let n = 10_000;
    for i in 0..=n {
        let y = if i == n {
            hi
        } else {
            grid_point(rng, lo, hi, i, n)
        };
        m.samples += 1;
        let gy = g(y);
        if gy < lo - SLACK || gy > hi + SLACK {
            m.violations += 1;
            failures.push("trap");
        }
        let mut z = y;
        for _ in 0..200 {
            z = g(z);
        }
        if (z - fp.y0).abs() > 1e-9 {
            m.violations += 1;
            failures.push("convergence");
        }
    }
    failures.dedup();
    m.note = format!(
        "y0 = {:.10}, g'(y0) = {:.10}, trap [{lo:.6}, {hi:.6}]{}",
        fp.y0,
        fp.multiplier,
        if failures.is_empty() {
            String::new()
        } else {
            format!("; failed: {}", failures.join(", "))
        }
    );
    m
}

/// Samples `x` on the certified range `[-0.6658 - 10, -0.6658]`.
fn estimate_grid(rng: &mut ChaCha8Rng) -> impl Iterator<Item = f64> + '_ {
    let hi = TRAP_CEILING;
    let lo = hi - ESTIMATE_SPAN;
    (0..ESTIMATE_POINTS).map(move |i| grid_point(rng, hi, lo, i, ESTIMATE_POINTS))
}

pub(super) fn estimates_1(rng: &mut ChaCha8Rng) -> Measured {
    let mut m = Measured::default();
    let mut max_h1 = f64::NEG_INFINITY;
    for x in estimate_grid(rng) {
        let h = ScalarMap::H1.eval(x).expect("x < 0");
        m.samples += 1;
        max_h1 = max_h1.max(h);
        if !(h > 0.0 && h < FRAC_PI_8) {
            m.violations += 1;
            m.max_error = m.max_error.max((h - FRAC_PI_8).max(-h));
        }
    }
    m.note = format!("max h1 = {max_h1:.6} < pi/8 = {FRAC_PI_8:.6}");
    m
}

pub(super) fn estimates_2(rng: &mut ChaCha8Rng) -> Measured {
    let mut m = Measured::default();
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for x in estimate_grid(rng) {
        let h = ScalarMap::H2.eval(x).expect("x < 0");
        m.samples += 1;
        if h > worst.0 {
            worst = (h, x);
        }
        if h > TRAP_CEILING + 1e-9 {
            m.violations += 1;
        }
    }
    m.max_error = (worst.0 - TRAP_CEILING).max(0.0);
    m.note = format!(
        "max h2 = {:.12} at x = {:.9} ({} samples above -0.6658 + 1e-9)",
        worst.0, worst.1, m.violations
    );
    m
}

pub(super) fn estimates_3(rng: &mut ChaCha8Rng) -> Measured {
    let windows = -5i64..=5;
    let per_window = ESTIMATE_POINTS.div_ceil(windows.clone().count());
    let mut m = Measured::default();
    let mut max_h3 = f64::NEG_INFINITY;
    for k in windows {
        let center = k as f64 * PI + FRAC_PI_2;
        let (lo, hi) = (center - TRAP_HALFWIDTH, center + TRAP_HALFWIDTH);
        for i in 0..per_window {
            let x = if i + 1 == per_window {
                hi
            } else {
                grid_point(rng, lo, hi, i, per_window - 1)
            };
            let h = ScalarMap::H3.eval(x).expect("total");
            m.samples += 1;
            max_h3 = max_h3.max(h);
            if h >= TRAP_CEILING {
                m.violations += 1;
                m.max_error = m.max_error.max(h - TRAP_CEILING);
            }
        }
    }
    m.note = format!("max h3 = {max_h3:.6} < -0.6658");
    m
}

/// How far `w` lies outside `R_k`; zero inside.
fn trap_excess(w: Complex64, k: i64) -> f64 {
    let center = k as f64 * PI + FRAC_PI_2;
    ((w.im - TRAP_CEILING).max((w.re - center).abs() - TRAP_HALFWIDTH)).max(0.0)
}

/// Sample points of `R_0` and its boundary pieces: the side edges `l1`, `l2`
/// (densely in the first 0.3 below the top, coarser further down) and the top
/// edge `l3`.
fn trap_samples(rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let (left, right) = (FRAC_PI_2 - TRAP_HALFWIDTH, FRAC_PI_2 + TRAP_HALFWIDTH);
    let mut pts = Vec::with_capacity(3334);
    for i in 0..1000 {
        let re = rng.random_range(left..right);
        let depth = if i % 2 == 0 {
            rng.random_range(0.0..1.0)
        } else {
            rng.random_range(0.0..20.0)
        };
        pts.push(c(re, TRAP_CEILING - depth));
    }
    for edge in [left, right] {
        for i in 0..1000 {
            pts.push(c(edge, TRAP_CEILING - grid_point(rng, 0.0, 0.3, i, 1000)));
        }
        for _ in 0..100 {
            pts.push(c(edge, TRAP_CEILING - rng.random_range(0.3..20.0)));
        }
    }
    for i in 0..134 {
        let re = if i == 133 {
            right
        } else {
            grid_point(rng, left, right, i, 133)
        };
        pts.push(c(re, TRAP_CEILING));
    }
    pts
}

pub(super) fn trap_invariance(rng: &mut ChaCha8Rng) -> Measured {
    let mut m = Measured::default();
    let mut worst: Option<(f64, Complex64, i64)> = None;
    for k in 1..=3i64 {
        let lambda = c(k as f64 * PI, FRAC_PI_2);
        for z in trap_samples(rng) {
            m.samples += 1;
            let inside = eval(lambda, z).is_some_and(|w| in_trap_region(w, k));
            if inside {
                continue;
            }
            m.violations += 1;
            let excess = eval(lambda, z).map_or(f64::INFINITY, |w| trap_excess(w, k));
            if worst.is_none_or(|(e, _, _)| excess > e) {
                worst = Some((excess, z, k));
            }
            m.max_error = m.max_error.max(excess);
        }
    }
    m.note = match worst {
        None => "every sample of R_0 mapped into R_k".into(),
        Some((e, z, k)) => format!(
            "{} of {} samples escaped; worst k = {k}, z = {}, excess {e:.3e}",
            m.violations,
            m.samples,
            fmt_point(z)
        ),
    };
    m
}

pub(super) fn half_line_map(rng: &mut ChaCha8Rng) -> Measured {
    let mut m = Measured::default();
    while m.samples < 10_000 {
        let k = rng.random_range(-3i64..=3);
        if k == 0 {
            continue;
        }
        let line = rng.random_range(-5i64..=5);
        let lambda = c(k as f64 * PI, FRAC_PI_2);
        let z = c(line as f64 * PI + FRAC_PI_2, rng.random_range(-20.0..-0.01));
        let target = (line + k) as f64 * PI + FRAC_PI_2;
        m.samples += 1;
        match eval(lambda, z) {
            Some(w) => {
                m.max_error = m.max_error.max((w.re - target).abs());
                if w.im >= 0.0 {
                    m.violations += 1;
                }
            }
            None => m.violations += 1,
        }
    }
    m.note = "Re offset from l_((m+k) pi + pi/2); violations = Im >= 0".into();
    m
}

/// Probe targets deep in `R_{n+1}` and the strip around `R_n` holding their
/// preimages, for `lambda = pi + i pi/2`.
pub fn degree_probes(rng: &mut ChaCha8Rng) -> Vec<(Complex64, Strip)> {
    (0..10)
        .map(|n| {
            let center = n as f64 * PI + FRAC_PI_2;
            let w = c(
                center + PI + rng.random_range(-PI / 32.0..PI / 32.0),
                -0.75 - 0.15 * n as f64,
            );
            let strip = Strip {
                center_re: center,
                halfwidth: FRAC_PI_2 - 0.01,
                im_lo: -8.0,
                im_hi: -0.05,
            };
            (w, strip)
        })
        .collect()
}

pub(super) fn degree_2(rng: &mut ChaCha8Rng) -> Measured {
    let lambda = c(PI, FRAC_PI_2);
    let limits = EvalLimits::default();
    let mut m = Measured::default();
    let mut misses = Vec::new();
    for (w, strip) in degree_probes(rng) {
        m.samples += 1;
        let found = count_preimages(lambda, w, &strip, 60, &limits).expect("valid strip");
        if found.count != 2 {
            m.violations += 1;
            misses.push(format!("w = {} -> {}", fmt_point(w), found.count));
        }
    }
    m.max_error = m.violations as f64;
    m.note = if misses.is_empty() {
        "all probes have 2 preimages".into()
    } else {
        format!("misses: {}", misses.join("; "))
    };
    m
}

pub(super) fn vertical_line_up(rng: &mut ChaCha8Rng) -> Measured {
    let cfg = ClassifyConfig::default();
    let mut m = Measured::default();
    let mut slowest = 0;
    for _ in 0..500 {
        let k = rng.random_range(-3i64..=3);
        let lambda = c(k as f64 * PI, rng.random_range(1.05..3.0));
        let line = rng.random_range(-5i64..=5);
        let mut z = c(line as f64 * PI, rng.random_range(-10.0..5.0));
        m.samples += 1;
        let mut steps = 0;
        while z.im <= cfg.y_up && steps < cfg.budget {
            match eval(lambda, z) {
                Some(w) => z = w,
                None => break,
            }
            steps += 1;
        }
        if z.im > cfg.y_up {
            slowest = slowest.max(steps);
        } else {
            m.violations += 1;
        }
    }
    m.note = format!(
        "slowest orbit passed y_up = {} after {slowest} steps",
        cfg.y_up
    );
    m
}
