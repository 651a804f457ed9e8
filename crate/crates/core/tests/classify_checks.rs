//! Classifier behaviour beyond the branch suite run by the acceptance checks.

use frontal_lab::classify::*;
use frontal_lab::frontal::Frontal;
use frontal_lab::registry;
use frontal_lab::verify::{normal_form, suite_curve, DEVELOPABLE_SUITE, NONDEVELOPABLE_SUITE};
use proptest::prelude::*;

fn rank(s: State) -> u8 {
    match s {
        State::Zero => 0,
        State::Band => 1,
        State::NonZero => 2,
    }
}

proptest! {
    #[test]
    fn threshold_states_are_monotone(x in -1.0..1.0f64, y in -1.0..1.0f64, e in -8.0..0.0f64) {
        let th = Thresholds::default();
        let (x, y) = (x * 10f64.powf(e), y * 10f64.powf(e));
        let (small, large) = if x.abs() <= y.abs() { (x, y) } else { (y, x) };
        prop_assert!(rank(th.state(small)) <= rank(th.state(large)));
        // Raising both thresholds can only move a value towards Zero.
        prop_assert!(rank(th.scaled(10.0).state(x)) <= rank(th.state(x)));
    }
}

#[test]
fn widening_thresholds_only_yields_unclassified() {
    for factor in [0.5, 1.0, 2.0, 10.0, 100.0] {
        let th = Thresholds::default().scaled(factor);
        for (expected, [ks, kn]) in DEVELOPABLE_SUITE {
            let v = classify_nr_developable(&suite_curve(ks, kn, "0").unwrap(), 0.0, th).unwrap().verdict;
            assert!(v == expected || v == Verdict::Unclassified, "x{factor}: {v:?} vs {expected:?}");
        }
        for (expected, [ks, kn, kt]) in NONDEVELOPABLE_SUITE {
            let c = suite_curve(ks, kn, kt).unwrap();
            let w0 = 1.0 / c.kappa_nu.eval_f64(0.0, 0.0).unwrap();
            let v = classify_nr_nondevelopable(&c, 0.0, w0, th).unwrap().verdict;
            assert!(v == expected || v == Verdict::Unclassified, "x{factor}: {v:?} vs {expected:?}");
        }
    }
}

#[test]
fn deciding_value_in_the_band_is_unclassified() {
    let th = Thresholds::default();
    let c = suite_curve("1", "1", "1e-5*u").unwrap();
    let r = classify_nr_nondevelopable(&c, 0.0, 1.0, th).unwrap();
    assert_eq!(r.verdict, Verdict::Unclassified);
    assert_eq!(r.margin, 0.0);
}

#[test]
fn verdicts_are_deterministic() {
    let c = suite_curve("u^2", "1 + u", "0").unwrap();
    let a = classify_nr_developable(&c, 0.0, Thresholds::default()).unwrap();
    let b = classify_nr_developable(&c, 0.0, Thresholds::default()).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn ab_from_definitions() {
    let c = suite_curve("u^2", "1 + u", "0").unwrap();
    let (a, b) = ab_oracle(&c, 0.0).unwrap();
    assert!((a + 24.0).abs() < 1e-9 && (b + 2.0).abs() < 1e-9, "A = {a}, B = {b}");
    let r = classify_nr_developable(&c, 0.0, Thresholds::default()).unwrap();
    assert_eq!(r.verdict, Verdict::CuspidalS1Plus);
    assert!((r.value("AB").unwrap() - a * b).abs() < 1e-6);
}

#[test]
fn phi_w_is_the_torsion_slope() {
    for (kt, slope) in [("u", 1.0), ("-u", -1.0), ("3*u + u^2", 3.0)] {
        let c = suite_curve("2", "1 + u", kt).unwrap();
        let series = c.series(0.0, 6).unwrap();
        let exact = phi_from_series(&series, 1.0, [2.0, 1.0, 0.0]);
        let closed = phi_oracle(&c, 0.0, 1.0, Thresholds::default()).unwrap();
        assert!((exact.phi_w - slope).abs() < 1e-12, "{kt}: {}", exact.phi_w);
        assert!((closed.phi_w - slope).abs() < 1e-8, "{kt}: {}", closed.phi_w);
        assert!(exact.phi.abs() < 1e-12);
    }
}

#[test]
fn focal_point_verdicts() {
    let th = Thresholds::default();
    let fr = Frontal::new(registry::find("paper-52").unwrap().surface());
    assert_eq!(classify_focal_point(&fr, 1, 0.0, th).unwrap().verdict, Verdict::Regular);
    let fr = Frontal::new(registry::find("ridge-fold").unwrap().surface());
    assert_eq!(classify_focal_point(&fr, 1, 0.0, th).unwrap().verdict, Verdict::NotCuspidalCrossCap);
    let fr = Frontal::new(normal_form("nf", "0", "1", "u", "1/24", "u").unwrap());
    assert_eq!(classify_focal_point(&fr, 1, 0.0, th).unwrap().verdict, Verdict::SecondKind);
}

#[test]
fn umbilic_points_are_refused() {
    let fr = Frontal::new(registry::find("52-germ").unwrap().surface());
    assert!(classify_focal_point(&fr, 1, 0.0, Thresholds::default()).is_err());
}
