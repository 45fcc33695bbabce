use super::*;
use crate::gen_euler::{mandel_q, pmf_table};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HIGH_Q: [f64; 4] = [0.85, 0.9, 0.95, 0.99];

#[test]
fn cubic_coefficients() {
    for i in 1..100 {
        let q = f64::from(i) / 100.0;
        assert!(CubicCoeffs::new(q).unwrap().a > 0.0);
    }
    let c = CubicCoeffs::new(1.0 - 1e-12).unwrap();
    assert!((c.a - 4.0).abs() < 1e-10 && (c.b + 4.0).abs() < 1e-10);
    assert!(c.c.abs() < 1e-10 && c.d.abs() < 1e-10);
    assert!(CubicCoeffs::new(1.0).is_err());
}

#[test]
fn sign_poly_examples() {
    for &q in &[0.2, 0.6, 0.95] {
        for m in 1..=40 {
            let mq = q_number(f64::from(m), q).unwrap();
            assert!((sign_poly(0.0, q, m).unwrap() + mq).abs() < 1e-15);
            let (a, _, _) = sign_poly_coeffs(q, m).unwrap();
            assert!(a < 0.0);
        }
    }
    assert!(sign_poly(0.1, 0.5, 0).is_err());
}

#[test]
fn sign_poly_matches_mandel_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 100 {
        let q = rng.gen_range(0.05..0.99);
        let m = rng.gen_range(1..=12);
        let lambda = rng.gen_range(0.0..0.95) * domain_max(q, m);
        let p = sign_poly(lambda, q, m).unwrap();
        let mq = mandel_q(&GenEulerParams::new(q, m, lambda).unwrap()).unwrap();
        if p.abs() > 1e-12 {
            assert_eq!(p.signum(), mq.signum(), "q={q} m={m} lambda={lambda}");
            checked += 1;
        }
    }
}

#[test]
fn discriminant_consistency() {
    for i in 2..=19 {
        let q = f64::from(i) * 0.05;
        for m in 1..=20 {
            let big = discriminant_delta(q, m).unwrap();
            let (a, b, c) = sign_poly_coeffs(q, m).unwrap();
            let scale = big.abs().max(1.0);
            assert!((big - (b * b - 4.0 * a * c)).abs() < 1e-10 * scale, "q={q} m={m}");
            let via_delta = (q.powi(m as i32) - 1.0) * delta_small(q, m).unwrap() / (1.0 - q).powi(2);
            assert!((big - via_delta).abs() < 1e-10 * scale, "q={q} m={m}");
        }
    }
    assert!(discriminant_delta(0.5, 1).unwrap() < 0.0);
}

#[test]
fn delta_small_examples() {
    for &q in &[0.3, 0.7, 0.9, 0.99] {
        let cubic = CubicCoeffs::new(q).unwrap();
        for m in 0..30 {
            let v = delta_small(q, m).unwrap();
            assert!((v - cubic.eval(q.powi(m as i32))).abs() < 1e-12);
        }
        let far = delta_small(q, 100_000).unwrap();
        assert!((far - (7.0 - q * (6.0 + q))).abs() < 1e-12 && far > 0.0);
    }
    // Delta and delta have opposite signs since q^m < 1
    let (d, big) = (delta_small(0.9, 2).unwrap(), discriminant_delta(0.9, 2).unwrap());
    assert!(d * big < 0.0);
}

#[test]
fn cardano_sign_flip() {
    let q0 = q0();
    assert!((q0 - 0.834_576_353_408_995_3).abs() < 1e-15);
    assert!(cardano_discriminant(q0 - 1e-3).unwrap() >= 0.0);
    assert!(cardano_discriminant(q0 + 1e-3).unwrap() < 0.0);
    assert!(cardano_discriminant(0.5).unwrap() > 0.0);
    assert!(cardano_discriminant(0.95).unwrap() < 0.0);
}

#[test]
fn zeta_reference_values() {
    // 30-digit trigonometric roots, confirmed by a polynomial root finder
    let expect = [0.7306652352903652, 0.5368311176032812, 0.35217371844090345, 0.14721847050528106];
    for (&q, &z) in HIGH_Q.iter().zip(&expect) {
        let got = zeta_q(q).unwrap();
        assert!((got - z).abs() < 1e-13, "q={q}: {got}");
        assert!(got > 0.0 && got < q);
        let cubic = CubicCoeffs::new(q).unwrap();
        assert!(cubic.eval(got).abs() < 1e-10);
        assert!((zeta_q_bisection(q).unwrap() - got).abs() < 1e-10);
    }
}

#[test]
fn zeta_domain() {
    assert!(matches!(zeta_q(0.5), Err(Error::Domain(_))));
    assert!(matches!(zeta_q(q0()), Err(Error::Domain(_))));
    // both positive roots still exceed q just above q0
    assert!(matches!(zeta_q(q0() + 1e-4), Err(Error::RootNotInInterval { .. })));
    let q = q0() + 5e-7;
    let z = zeta_root(q).unwrap();
    assert!(CubicCoeffs::new(q).unwrap().eval(z).abs() < 1e-10);
    assert!(z > q);
    // on either side of the 1e-6 switch the two methods meet
    let (a, b) = (zeta_root(q0() + 0.99e-6).unwrap(), zeta_root(q0() + 1.01e-6).unwrap());
    assert!((a - b).abs() < 1e-4);
}

#[test]
fn m_threshold_values() {
    assert_eq!(m_threshold(0.5).unwrap(), None);
    assert_eq!(m_threshold(q0()).unwrap(), None);
    let expect = [1, 5, 20, 190];
    for (&q, &m) in HIGH_Q.iter().zip(&expect) {
        assert_eq!(m_threshold(q).unwrap(), Some(m), "q={q}");
    }
    assert_eq!(m_threshold(q0() + 1e-7).unwrap(), Some(0));
}

#[test]
fn m_threshold_is_monotone() {
    let (lo, hi) = (q0(), 0.999);
    let steps = 4000;
    let mut prev = 0;
    for i in 1..=steps {
        let q = lo + (hi - lo) * f64::from(i) / f64::from(steps);
        let m = m_threshold(q).unwrap().unwrap();
        assert!(m >= prev, "q={q}: {m} < {prev}");
        prev = m;
    }
}

#[test]
fn lemma_dichotomy() {
    for i in 1..=16 {
        let q = f64::from(i) * 0.05;
        assert!(q <= q0());
        for m in 1..=30 {
            assert!(discriminant_delta(q, m).unwrap() < 0.0, "q={q} m={m}");
        }
    }
    for &q in &HIGH_Q {
        let mq = m_threshold(q).unwrap().unwrap();
        for m in 1..=40 {
            let d = discriminant_delta(q, m).unwrap();
            if d.abs() > 1e-12 {
                assert_eq!(d > 0.0, m <= mq, "q={q} m={m} Delta={d}");
            }
        }
    }
}

#[test]
fn lambda_root_properties() {
    assert_eq!(lambda_roots(0.5, 2).unwrap(), None);
    for &q in &HIGH_Q {
        let mq = m_threshold(q).unwrap().unwrap().min(40);
        for m in 1..=mq {
            let (lp, lm) = lambda_roots(q, m).unwrap().unwrap();
            assert!(lp < lm);
            assert!(sign_poly(lp, q, m).unwrap().abs() < 1e-9);
            assert!(sign_poly(lm, q, m).unwrap().abs() < 1e-9);
            assert!(sign_poly(0.5 * (lp + lm), q, m).unwrap() > 0.0);
        }
    }
    // q = 0.95, m = 1: both roots inside the domain (0, 19)
    let (lp, lm) = lambda_roots(0.95, 1).unwrap().unwrap();
    assert!(lp > 0.0 && lm < domain_max(0.95, 1));
    assert!((lp - 0.582).abs() < 1e-3 && (lm - 11.64).abs() < 1e-2);
}

#[test]
fn classify_examples() {
    for &q in &[0.3, 0.9] {
        for &l in &[0.01, 1.0] {
            assert_eq!(classify(l, q, 0).unwrap(), Regime::SubPoissonian);
        }
    }
    assert_eq!(classify(0.3, 0.5, 2).unwrap(), Regime::SubPoissonian);
    let (lp, lm) = lambda_roots(0.95, 1).unwrap().unwrap();
    assert_eq!(classify(0.5 * (lp + lm), 0.95, 1).unwrap(), Regime::SuperPoissonian);
    assert_eq!(classify(0.5 * lp, 0.95, 1).unwrap(), Regime::SubPoissonian);
    assert_eq!(classify(lp, 0.95, 1).unwrap(), Regime::Poissonian);
    assert!(classify(19.0, 0.95, 1).is_err());
    assert!(classify(-0.1, 0.95, 1).is_err());
    assert!(matches!(classify(0.0, 0.5, 0), Err(Error::DivisionByZero(_))));
}

#[test]
fn classify_oracle_examples() {
    for m in 1..4 {
        assert_eq!(classify_oracle(0.0, 0.6, m).unwrap(), Regime::SubPoissonian);
    }
    for &(q, l) in &[(0.3, 0.5), (0.8, 2.0)] {
        let p = GenEulerParams::new(q, 0, l).unwrap();
        let t = pmf_table(&p, 1e-14).unwrap();
        let mean: f64 = t.probs().iter().enumerate().map(|(j, &p)| q_int(j as u32, q) * p).sum();
        let var: f64 = t.probs().iter().enumerate().map(|(j, &p)| (q_int(j as u32, q) - mean).powi(2) * p).sum();
        assert!(((var - mean) / mean - (q - 1.0) * l).abs() < 1e-9);
    }
}

#[test]
fn classifier_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut seen = std::collections::HashSet::new();
    while checked < 200 {
        // half the draws where super-Poissonian states exist
        let (q, m) = if checked % 2 == 0 {
            let q = rng.gen_range(0.86..0.99);
            (q, rng.gen_range(1..=m_threshold(q).unwrap().unwrap().clamp(1, 12)))
        } else {
            (rng.gen_range(0.05..0.99), rng.gen_range(0..=10))
        };
        let lambda = rng.gen_range(0.0..0.95) * domain_max(q, m);
        if m == 0 && lambda == 0.0 {
            continue;
        }
        if m > 0 && sign_poly(lambda, q, m).unwrap().abs() < 1e-8 * lambda.powi(2).max(1.0) {
            continue;
        }
        let a = classify(lambda, q, m).unwrap();
        assert_eq!(a, classify_oracle(lambda, q, m).unwrap(), "q={q} m={m} lambda={lambda}");
        seen.insert(a);
        checked += 1;
    }
    assert!(seen.contains(&Regime::SuperPoissonian) && seen.contains(&Regime::SubPoissonian));
}

fn assert_partition(r: &RegimeReport) {
    assert_eq!(r.intervals.first().unwrap().lo, 0.0);
    assert!((r.intervals.last().unwrap().hi - r.domain_max).abs() <= 1e-12 * r.domain_max);
    for w in r.intervals.windows(2) {
        assert!((w[0].hi - w[1].lo).abs() <= 1e-12 * r.domain_max.max(1.0));
        assert!(w[0].lo < w[0].hi);
    }
}

#[test]
fn report_examples() {
    let r = report(0.5, 3).unwrap();
    assert_eq!(r.intervals.len(), 1);
    assert_eq!(r.intervals[0].regime, Regime::SubPoissonian);
    assert_eq!(r.m_q, None);
    assert!(r.delta < 0.0 && r.lambda_plus.is_none());

    let r = report(0.95, 25).unwrap();
    assert_eq!(r.m_q, Some(20));
    assert_eq!(r.intervals.len(), 1);
    assert_eq!(r.intervals[0].regime, Regime::SubPoissonian);

    for m in 1..=20 {
        let r = report(0.95, m).unwrap();
        assert_partition(&r);
        let kinds: Vec<_> = r.intervals.iter().map(|i| i.regime).collect();
        assert_eq!(kinds, [Regime::SubPoissonian, Regime::SuperPoissonian, Regime::SubPoissonian], "m={m}");
        assert_eq!(r.poissonian_points.len(), 2);
        for &p in &r.poissonian_points {
            assert!(sign_poly(p, 0.95, m).unwrap().abs() < 1e-9);
        }
        let (lp, zp) = (r.lambda_plus.unwrap(), r.z_plus.unwrap());
        assert!((zp * zp - lp).abs() < 1e-12 * lp.max(1.0));
    }

    let r = report(0.7, 0).unwrap();
    assert_eq!(r.intervals.len(), 1);
    assert_eq!(r.intervals[0].regime, Regime::SubPoissonian);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn report_partitions_domain(q in 0.05f64..0.999, m in 0u32..40) {
        let r = report(q, m).unwrap();
        assert_partition(&r);
        if r.delta < 0.0 {
            prop_assert_eq!(r.intervals.len(), 1);
            prop_assert_eq!(r.intervals[0].regime, Regime::SubPoissonian);
        }
    }

    #[test]
    fn classify_agrees_with_report(q in 0.05f64..0.999, m in 1u32..30, frac in 0.0f64..1.0) {
        let r = report(q, m).unwrap();
        let lambda = frac * r.domain_max;
        let p = sign_poly(lambda, q, m).unwrap();
        prop_assume!(p.abs() > 1e-8 * lambda.powi(2).max(1.0));
        let piece = r.intervals.iter().find(|i| lambda >= i.lo && lambda < i.hi).unwrap();
        prop_assert_eq!(piece.regime, classify(lambda, q, m).unwrap());
    }
}
