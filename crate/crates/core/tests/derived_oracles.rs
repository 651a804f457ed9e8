//! Normal congruence, normal ruled surface and focal surfaces.

use frontal_lab::derived::*;
use frontal_lab::frame::FrameCurve;
use frontal_lab::frontal::{Frontal, SingularCurve};
use frontal_lab::registry;
use frontal_lab::verify::{normal_form, suite_curve, CCR_SUITE, PURE_EXAMPLES};

fn example(name: &str) -> Frontal {
    Frontal::new(registry::find(name).unwrap().surface())
}

#[test]
fn congruence_trivial_cases() {
    let fr = example("paper-52");
    let pts = congruence_check(&fr, &[(0.1, 0.2, 0.0), (-0.3, -0.1, 0.0)]).unwrap();
    for p in pts {
        assert_eq!(p.factor1, 1.0);
        assert!((p.jacobian - p.lambda).abs() < 1e-14);
    }
    let pts = congruence_check(&fr, &[(0.0, 0.0, -1.0), (0.0, 0.0, 0.3), (0.0, 0.0, 2.0)]).unwrap();
    for p in pts {
        assert_eq!(p.lambda, 0.0);
        assert!(p.jacobian.abs() < 1e-14);
    }
}

#[test]
fn ruled_surface_on_the_52_example() {
    let fr = example("paper-52");
    for w in [-1.0, 0.0, 0.5, 3.0] {
        let p = nr_eval(&fr, 0.0, w).unwrap();
        assert!(!p.singular && p.nr_u.norm() > 0.5);
    }
    let p = nr_eval(&fr, 0.2, 0.0).unwrap();
    assert_eq!(p.point, fr.def.eval(0.2, 0.0).unwrap());
    let opts = TraceOptions::default();
    let trace = nr_singular_points(&fr, opts).unwrap();
    assert!(trace.params.iter().all(|p| p.0.abs() > 0.4), "{:?}", trace.params);
    assert!(!nr_developable_test(&fr, 41, 1e-6).unwrap().developable);
}

#[test]
fn ruled_surface_singular_points_of_frame_curves() {
    let opts = TraceOptions::default();
    let curve = suite_curve("1", "1", "u").unwrap();
    let trace = nr_singular_points(&curve, opts).unwrap();
    assert_eq!(trace.len(), 1);
    assert!(trace.distance_to((0.0, 1.0)) < 1e-10);

    let curve = suite_curve("1", "1", "u^2 - 0.01").unwrap();
    let trace = nr_singular_points(&curve, opts).unwrap();
    let mut us: Vec<f64> = trace.params.iter().map(|p| p.0).collect();
    us.sort_by(f64::total_cmp);
    assert_eq!(us.len(), 2);
    assert!((us[0] + 0.1).abs() < 1e-10 && (us[1] - 0.1).abs() < 1e-10, "{us:?}");

    // Developable: the whole curve w = 1/κ_ν is singular.
    let curve = suite_curve("1", "1 + u", "0").unwrap();
    let trace = nr_singular_points(&curve, opts).unwrap();
    assert!(trace.len() > 10);
    for (u, w) in &trace.params {
        assert!((w - 1.0 / (1.0 + u)).abs() < 1e-10);
    }
}

#[test]
fn developability_and_front_tests() {
    let fold = example("fold");
    assert!(nr_developable_test(&fold, 41, 1e-6).unwrap().developable);
    let curve = suite_curve("1", "1 + u", "0").unwrap();
    assert!(nr_developable_test(&curve, 41, 1e-6).unwrap().developable);
    assert!(nr_front_test(&curve, 0.0, 1e-6).unwrap());
    let cuspidal = suite_curve("u", "1 + u", "0").unwrap();
    assert!(!nr_front_test(&cuspidal, 0.0, 1e-6).unwrap());

    // κ_s ≡ 0: the ruled surface lies in a plane.
    let flat = suite_curve("0", "1 + u", "0").unwrap();
    assert!(!nr_front_test(&flat, 0.1, 1e-6).unwrap());
    let pts: Vec<_> = (0..21)
        .flat_map(|i| {
            let u = -0.4 + 0.04 * i as f64;
            [-1.0, 0.0, 0.7].map(|w| nr_eval(&flat, u, w).unwrap().point)
        })
        .collect();
    let (_, dist) = plane_fit(&pts);
    assert!(dist < 1e-8, "{dist:e}");
}

#[test]
fn developability_matches_the_determinant() {
    let mut curves: Vec<Box<dyn SingularCurve>> = PURE_EXAMPLES.iter().map(|n| Box::new(example(n)) as _).collect();
    for (ks, kn, kt) in [("1", "1 + u", "0"), ("1", "1", "u"), ("u", "2", "u^2 - 0.01")] {
        curves.push(Box::new(suite_curve(ks, kn, kt).unwrap()));
    }
    for c in &curves {
        let ev = nr_developable_test(c.as_ref(), 41, 1e-6).unwrap();
        assert_eq!(ev.developable, ev.max_abs_kappa_t < 1e-6);
        assert_eq!(ev.max_abs_kappa_t < 1e-6, ev.max_abs_det < 1e-6);
        assert!(ev.max_det_mismatch < 1e-6);
    }
}

#[test]
fn focal_surfaces_of_the_52_example() {
    let fr = example("paper-52");
    for u in [-0.3, -0.1, 0.2, 0.35] {
        let d = fr.invariant_derivatives(u).unwrap();
        for j in 1..=2 {
            let direct = focal_eval(&fr, j, u, 0.0).unwrap();
            let pred = focal_curvature_prediction(&d, j, 1e-8).unwrap();
            // Closed forms predict strictly negative Gaussian curvature.
            assert!(pred.gauss < 0.0);
            assert!((direct.gauss.unwrap() - pred.gauss).abs() < 1e-7, "u = {u}, j = {j}");
            assert!((direct.mean.unwrap() - pred.mean).abs() < 1e-7, "u = {u}, j = {j}");
        }
    }
}

#[test]
fn gaussian_curvature_is_negative_at_52_points_of_normal_forms() {
    for (k, c5) in ["1/5", "1", "-2/3"].iter().enumerate() {
        let def = normal_form("nf", "1", "1/2", &format!("{} + u", k as f64 * 0.3), "1/4", c5).unwrap();
        let fr = Frontal::new(def);
        assert!(fr.invariants_at(0.0).unwrap().r_c.abs() > 1.0);
        for j in 1..=2 {
            let k = focal_eval(&fr, j, 0.0, 0.0).unwrap().gauss.unwrap();
            assert!(k < 0.0, "{c5}, j = {j}: K = {k}");
        }
    }
}

#[test]
fn focal_singular_sets() {
    let opts = TraceOptions::default();
    let helicoid = example("helicoid");
    let trace = focal_singular_trace(&helicoid, 1, opts).unwrap();
    assert!(trace.params.iter().all(|p| p.1.abs() < 1e-8));
    assert!(trace.kinds.iter().all(|k| *k == PointKind::FirstKind));
    let psi = focal_psi_profile(&helicoid, 1, &trace).unwrap();
    assert!(psi.iter().all(|s| s.psi.abs() < 1e-8));
}

#[test]
fn pure_propagation_on_a_vanishing_r_c_surface() {
    // c₅ ≡ 0 gives r_c ≡ 0 along the axis.
    let fr = Frontal::new(normal_form("nf", "1", "0", "1 + u", "1/4", "0").unwrap());
    let rep = frontal_lab::classify::pure_propagation_check(&fr, 1, 1e-8, TraceOptions::default()).unwrap();
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn psi_slope_in_the_cross_cap_regime() {
    let [a2, a3, c2, c4, c5] = CCR_SUITE[0];
    let fr = Frontal::new(normal_form("nf", a2, a3, c2, c4, c5).unwrap());
    let slope = focal_psi_slope(&fr, 1, 0.0, 0.0, 1e-3, 0.05).unwrap();
    assert!(slope.psi.abs() < 1e-8, "{slope:?}");
    assert!(slope.psi_slope.abs() > 1e-3, "{slope:?}");
}

#[test]
fn frame_curves_reproduce_their_invariants() {
    let curve = FrameCurve::new("1", "1.3", "0", (-0.5, 0.5), 1e-3).unwrap();
    for u in [-0.3, 0.0, 0.25] {
        let r = curve.recovered_invariants(u, 1e-3).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-9 && (r[1] - 1.3).abs() < 1e-9 && r[2].abs() < 1e-9, "{r:?}");
        assert!(curve.state(u).unwrap().orthonormality_defect() < 1e-12);
    }
}
