use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tandyn_core::analysis::{multiplier, Region};
use tandyn_core::classify::trap_index;
use tandyn_core::map::pole_distance;
use tandyn_core::{
    evaluate, in_trap_region, normalize_lambda, orbit, ClassifyConfig, Complex64, EvalLimits, Fate,
    OrbitClassifier,
};

const DYADIC: f64 = (1u64 << 40) as f64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn classifier(lambda: Complex64) -> OrbitClassifier {
    OrbitClassifier::new(
        normalize_lambda(lambda),
        ClassifyConfig::default(),
        EvalLimits::default(),
    )
    .unwrap()
}

fn parameters() -> [Complex64; 4] {
    [c(0.0, 1.5), c(PI, FRAC_PI_2), c(PI, 0.5), c(0.7, 0.4)]
}

fn random_seed(rng: &mut ChaCha8Rng) -> Complex64 {
    let k = rng.random_range(-(6.0 * DYADIC) as i64..=(6.0 * DYADIC) as i64);
    c(k as f64 / DYADIC, rng.random_range(-4.0..1.0))
}

#[test]
fn fates_respect_regions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for lambda in parameters() {
        let cl = classifier(lambda);
        let region = cl.param().region;
        for _ in 0..300 {
            let out = cl.classify(random_seed(&mut rng));
            assert!(out.steps <= cl.config().budget);
            match out.fate {
                Fate::AttractingFixed(_) => {
                    assert_eq!(region, Region::AttractingLobe);
                    assert!(multiplier(cl.param().lambda).norm() < 1.0);
                }
                Fate::LowerBaker => assert!(matches!(
                    region,
                    Region::BakerStrip | Region::BakerStripAligned
                )),
                Fate::WanderingStrip(_) => assert!(matches!(region, Region::WanderingLine(_))),
                _ => {}
            }
        }
    }
}

#[test]
fn primary_verdicts_replay() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let limits = EvalLimits::default();
    for lambda in parameters() {
        let cl = classifier(lambda);
        for _ in 0..300 {
            let z0 = random_seed(&mut rng);
            let out = cl.classify(z0);
            if out.fate != Fate::PrimaryBaker {
                continue;
            }
            let replay = orbit(cl.param().lambda, z0, out.steps, &limits);
            let last = *replay.points.last().unwrap();
            assert_eq!(last, out.last);
            assert!(last.im >= 0.0 && pole_distance(last) > limits.pole_eps);
        }
    }
}

#[test]
fn translation_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut mismatches = Vec::new();
    for lambda in parameters() {
        let cl = classifier(lambda);
        for _ in 0..250 {
            let z0 = random_seed(&mut rng);
            let (a, b) = (cl.classify(z0), cl.classify(z0 + PI));
            let expected = match a.fate {
                Fate::AttractingFixed(m) => Fate::AttractingFixed(m + 1),
                other => other,
            };
            if b.fate != expected {
                mismatches.push((lambda, z0, a.fate, b.fate));
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

#[test]
fn wandering_verdict_is_forward_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let limits = EvalLimits::default();
    for k in [1i64, 2, -1] {
        let lambda = c(k as f64 * PI, FRAC_PI_2);
        let cl = classifier(lambda);
        let mut seen = 0;
        for _ in 0..200 {
            let out = cl.classify(random_seed(&mut rng));
            if !matches!(out.fate, Fate::WanderingStrip(_)) {
                continue;
            }
            seen += 1;
            assert_eq!(out.fate, Fate::WanderingStrip(k.signum() as i8));
            let mut z = out.last;
            let mut m = trap_index(z);
            for _ in out.steps..cl.config().budget {
                z = evaluate(lambda, z, &limits).unwrap();
                m += k;
                assert!(in_trap_region(z, m), "k = {k}, z = {z}");
            }
        }
        assert!(seen > 0, "no wandering seeds for k = {k}");
    }
}

#[test]
fn classification_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for lambda in parameters() {
        let cl = classifier(lambda);
        for _ in 0..100 {
            let z0 = random_seed(&mut rng);
            assert_eq!(cl.classify(z0), cl.classify(z0));
        }
    }
}

#[test]
fn high_strip_has_only_primary_component() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let cl = classifier(c(PI, 3.0));
    assert_eq!(cl.param().region, Region::HighStrip);
    for _ in 0..500 {
        let fate = cl.classify(random_seed(&mut rng)).fate;
        assert!(
            matches!(
                fate,
                Fate::PrimaryBaker | Fate::PoleHit(_) | Fate::Undecided
            ),
            "{fate:?}"
        );
    }
}
