mod common;

use common::{proptest_config, towers};
use ltower::padic::Prime;
use ltower::seed::{Seed, SeedSpec};
use ltower::tower::{
    cross_check_differences, run_tower, verify_report, TowerConfig, TowerReport, Verdict,
};
use proptest::prelude::*;

fn report(t: (u64, &[&str]), levels: u32) -> TowerReport {
    let spec = towers::spec(t);
    let mut config = TowerConfig::for_prime(spec.prime());
    config.levels = levels;
    run_tower(&spec, &config).unwrap()
}

fn seed() -> impl Strategy<Value = Seed> {
    prop_oneof![
        (-30i64..30).prop_map(Seed::integer),
        (-30i64..30, 1i64..30).prop_map(|(n, d)| Seed::rational(n, d)),
    ]
}

/// Towers small enough that every level up to the cap is cheap.
fn tower() -> impl Strategy<Value = (SeedSpec, u32)> {
    (
        prop::sample::select(vec![(2u64, 6u32), (3, 4), (5, 2), (7, 2)]),
        prop::collection::vec(seed(), 1..=3),
    )
        .prop_filter_map(
            "needs a unit seed and units in denominators",
            |((p, n), seeds)| {
                SeedSpec::new(Prime::new(p).unwrap(), seeds)
                    .ok()
                    .map(|s| (s, n))
            },
        )
}

#[test]
fn mu_one_towers() {
    let r = report(towers::DOUBLED, 5);
    assert_eq!((r.mu, r.lambda, r.nu, r.onset), (1, 1, Some(-1), Some(0)));
    let ords: Vec<u64> = r.levels.iter().map(|l| l.ord).collect();
    assert_eq!(ords, vec![0, 2, 5, 10, 19, 36]);
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.provisional);

    let r = report((3, &["1", "1", "1"]), 3);
    assert_eq!((r.mu, r.lambda, r.nu), (1, 1, Some(-1)));
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn fast_path_tower() {
    let r = report((5, &["1", "1"]), 2);
    assert!(r.fast_path);
    assert_eq!((r.mu, r.lambda, r.nu), (0, 1, Some(0)));
    let kappas: Vec<&str> = r.levels.iter().map(|l| l.kappa.as_str()).collect();
    assert_eq!(kappas, vec!["1", "80", "419430400"]);
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn json_round_trip() {
    for (t, n) in [
        (towers::DYADIC, 5),
        (towers::TRIADIC, 3),
        (towers::DOUBLED, 4),
    ] {
        let r = report(t, n);
        let back = TowerReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(verify_report(&back), Verdict::Pass);
    }
    let mut bad = report(towers::DYADIC, 3);
    bad.prime = 4;
    assert!(TowerReport::from_json(&bad.to_json()).is_err());
}

#[test]
fn too_few_levels_is_inconclusive() {
    let r = report(towers::DYADIC, 3);
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.diagnostics.iter().any(|d| d.contains("--levels 5")));
    assert_eq!(verify_report(&r), Verdict::Inconclusive);
}

proptest! {
    #![proptest_config(proptest_config(24))]

    #[test]
    fn only_provisional_invariants_can_fail((spec, levels) in tower()) {
        let mut config = TowerConfig::for_prime(spec.prime());
        config.levels = levels;
        config.terms = 16;
        let r = run_tower(&spec, &config).unwrap();
        // Only invariants witnessed within K can be refuted by the data, and
        // then the report must say how to retry.
        if r.verdict == Verdict::Fail {
            prop_assert!(r.provisional, "{}", r.to_table());
            prop_assert!(r.diagnostics.iter().any(|d| d.contains("--terms")));
        }
        prop_assert_eq!(verify_report(&r), r.verdict);
        if r.verdict == Verdict::Pass {
            prop_assert!(cross_check_differences(&r));
            prop_assert_eq!(r.differences_ok, Some(true));
        }
    }
}

proptest! {
    #![proptest_config(proptest_config(64))]

    #[test]
    fn mutated_lambda_fails(
        which in 0usize..4,
        delta in prop_oneof![-4i64..0, 1i64..5],
    ) {
        let (t, n) = [(towers::DYADIC, 5), (towers::TRIADIC, 3), (towers::DOUBLED, 5), ((5, &["1", "1"][..]), 2)][which];
        let mut r = report(t, n);
        let lambda = i64::from(r.lambda) + 2 * delta;
        prop_assume!(lambda >= 1);
        r.lambda = lambda as u32;
        r.k0 = r.lambda.div_ceil(2);
        prop_assert_eq!(verify_report(&r), Verdict::Fail);

        // an even λ is malformed on its own
        let mut even = report(t, n);
        even.lambda += delta.unsigned_abs() as u32 * 2 - 1;
        prop_assert_eq!(verify_report(&even), Verdict::Fail);
    }

    #[test]
    fn mutated_nu_fails(which in 0usize..4, delta in prop_oneof![-6i64..0, 1i64..7]) {
        let (t, n) = [(towers::DYADIC, 5), (towers::TRIADIC, 3), (towers::DOUBLED, 5), ((5, &["1", "1"][..]), 2)][which];
        let mut r = report(t, n);
        r.nu = r.nu.map(|nu| nu + delta);
        prop_assert_eq!(verify_report(&r), Verdict::Fail);
    }

    #[test]
    fn mutated_mu_fails(which in 0usize..3, delta in 1u32..3) {
        let (t, n) = [(towers::DYADIC, 5), (towers::TRIADIC, 3), (towers::DOUBLED, 5)][which];
        let mut r = report(t, n);
        r.mu += delta;
        prop_assert_eq!(verify_report(&r), Verdict::Fail);
    }
}

#[test]
fn forced_lambda_fails_the_run() {
    let spec = towers::spec(towers::DYADIC);
    let mut config = TowerConfig::for_prime(spec.prime());
    for forced in [1, 3, 7] {
        config.lambda_override = Some(forced);
        let r = run_tower(&spec, &config).unwrap();
        assert_eq!(r.verdict, Verdict::Fail, "λ = {forced}\n{}", r.to_table());
        assert_eq!(verify_report(&r), Verdict::Fail);
    }
    // λ = 9 pushes n₀ to 5, so level 6 is needed before the data can refute it
    config.lambda_override = Some(9);
    assert_eq!(
        run_tower(&spec, &config).unwrap().verdict,
        Verdict::Inconclusive
    );
    config.levels = 6;
    assert_eq!(run_tower(&spec, &config).unwrap().verdict, Verdict::Fail);
}

#[test]
fn truncation_can_hide_a_unit_coefficient() {
    // 21/23 ≡ −19 (mod 2⁵): every c_j with j ≤ 16 is even, c₁₇ is a unit
    let spec = towers::spec((2, &["21/23", "-19"]));
    let mut config = TowerConfig::for_prime(spec.prime());
    config.levels = 6;
    config.terms = 16;
    let short = run_tower(&spec, &config).unwrap();
    assert!(short.provisional);
    assert_eq!((short.mu, short.lambda), (1, 1));
    assert_eq!(short.verdict, Verdict::Fail);

    config.terms = 40;
    config.precision = 40;
    config.levels = 8;
    let long = run_tower(&spec, &config).unwrap();
    assert!(!long.provisional);
    assert_eq!((long.mu, long.lambda, long.nu), (0, 33, Some(-99)));
    assert_eq!(long.verdict, Verdict::Pass, "{}", long.to_table());
}
