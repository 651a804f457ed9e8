//! Pointwise geometry and axis invariants against independent oracles.

use frontal_lab::frontal::{Frontal, FrontalPoint, LocalJets, Settings};
use frontal_lab::geom::{det3, Vec3};
use frontal_lab::registry;
use frontal_lab::surface::{Param, SurfaceDef};
use frontal_lab::verify::normal_form;
use proptest::prelude::*;

fn example(name: &str) -> Frontal {
    Frontal::new(registry::find(name).unwrap().surface())
}

/// Fourth-order central differences of the surface map, one Richardson level.
fn fd(f: &dyn Fn(f64, f64) -> Vec3, u: f64, v: f64, i: usize, j: usize) -> Vec3 {
    let d1 = |g: &dyn Fn(f64) -> Vec3, x: f64, h: f64| {
        (g(x - 2.0 * h) - g(x + 2.0 * h) + (g(x + h) - g(x - h)) * 8.0) * (1.0 / (12.0 * h))
    };
    let d2 = |g: &dyn Fn(f64) -> Vec3, x: f64, h: f64| {
        ((g(x + h) + g(x - h)) * 16.0 - (g(x + 2.0 * h) + g(x - 2.0 * h)) - g(x) * 30.0) * (1.0 / (12.0 * h * h))
    };
    let at = |h: f64| match (i, j) {
        (1, 0) => d1(&|x| f(x, v), u, h),
        (0, 1) => d1(&|y| f(u, y), v, h),
        (2, 0) => d2(&|x| f(x, v), u, h),
        (0, 2) => d2(&|y| f(u, y), v, h),
        (1, 1) => d1(&|y| d1(&|x| f(x, y), u, h), v, h),
        _ => unreachable!(),
    };
    (at(5e-3) * 16.0 - at(1e-2)) * (1.0 / 15.0)
}

#[test]
fn curvatures_match_finite_difference_fundamentals() {
    let fr = example("paper-52");
    let f = |u: f64, v: f64| fr.def.eval(u, v).unwrap();
    for (u, v) in [(0.1, 0.2), (-0.3, 0.15), (0.25, -0.35)] {
        let (fu, fv) = (fd(&f, u, v, 1, 0), fd(&f, u, v, 0, 1));
        let nu = fu.cross(fv).normalized();
        let (e, ff, g) = (fu.dot(fu), fu.dot(fv), fv.dot(fv));
        let (l, m, n) = (fd(&f, u, v, 2, 0).dot(nu), fd(&f, u, v, 1, 1).dot(nu), fd(&f, u, v, 0, 2).dot(nu));
        let d = e * g - ff * ff;
        let gauss = (l * n - m * m) / d;
        let mean = (e * n - 2.0 * ff * m + g * l) / (2.0 * d);
        let p = fr.evaluate_point(u, v).unwrap();
        // ν = f_u × h / |f_u × h| flips with the sign of v.
        let s = nu.dot(p.nu).signum();
        assert!((p.gauss - gauss).abs() < 1e-6, "K at ({u}, {v}): {} vs {gauss}", p.gauss);
        assert!((p.mean - s * mean).abs() < 1e-6, "H at ({u}, {v}): {} vs {mean}", p.mean);
    }
}

#[test]
fn fold_germ_is_flat() {
    let fr = example("fold");
    for u in [-0.3, 0.0, 0.3] {
        let p = fr.evaluate_point(u, 0.0).unwrap();
        assert!((p.nu.dot(Vec3::new(0.0, 0.0, 1.0)).abs() - 1.0).abs() < 1e-15);
        assert_eq!([p.l, p.m, p.n, p.gauss, p.mean], [0.0; 5]);
        assert!(fr.invariants_at(u).unwrap().values().iter().all(|x| x.abs() < 1e-14));
        let d = fr.invariant_derivatives(u).unwrap();
        assert!(d.d.iter().flatten().all(|e| e.value.abs() < 1e-9));
    }
}

#[test]
fn cuspidal_edge_psi_by_hand() {
    // f = (u, v², v³): ν = (0, -3v, 2)/√(4 + 9v²), so ψ(0) = det(e₁, ν(0), ν'(0)).
    let nu = |v: f64| Vec3::new(0.0, -3.0 * v, 2.0) * (1.0 / (4.0 + 9.0 * v * v).sqrt());
    let h = 1e-4;
    let dnu = (nu(h) - nu(-h)) * (1.0 / (2.0 * h));
    let by_hand = det3(Vec3::new(1.0, 0.0, 0.0), nu(0.0), dnu);
    assert!((by_hand - 1.5).abs() < 1e-7);
    let psi = example("cuspidal-edge").psi(0.0).unwrap();
    assert!((psi - by_hand).abs() < 1e-7);
    assert!((psi - 1.5).abs() < 1e-12);
}

#[test]
fn psi_vanishes_on_the_52_example() {
    let fr = example("paper-52");
    let samples: Vec<f64> = (0..=40).map(|k| -0.4 + 0.02 * k as f64).collect();
    let worst = fr.psi_profile(&samples).unwrap().iter().fold(0.0_f64, |m, p| m.max(p.1.abs()));
    assert!(worst < 1e-10, "{worst:e}");
    let fold = example("fold");
    assert!(fold.psi_profile(&samples).unwrap().iter().all(|p| p.1 == 0.0));
}

#[test]
fn adapted_charts() {
    let a = example("paper-52").adapt_at_point(0.0).unwrap();
    assert!((a.alpha - 1.0).abs() < 1e-12 && (a.beta - 1.0).abs() < 1e-12 && a.c.abs() < 1e-12);
    assert!(a.residual < 1e-12);
    let a = example("helicoid").adapt_at_point(0.4).unwrap();
    assert!((a.alpha - 1.0 / 2f64.sqrt()).abs() < 1e-12, "alpha = {}", a.alpha);
    assert!(a.residual < 1e-12);
}

#[test]
fn invariants_of_germs() {
    let inv = example("52-germ").invariants_at(0.0).unwrap();
    assert!(inv.kappa_nu.abs() < 1e-12 && inv.kappa_t.abs() < 1e-12);
    assert!(inv.r_c.abs() > 1.0);
}

#[test]
fn r_c_slope_matches_a_line_fit() {
    let fr = example("paper-52");
    let d = fr.invariant_derivatives(0.0).unwrap();
    let h = 1e-2;
    let pts: Vec<(f64, f64)> = (-10..=10)
        .map(|k| {
            let u = h * k as f64 / 10.0;
            (u, fr.invariants_at(u).unwrap().r_c)
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((d.r_c(1) - slope).abs() < 1e-3 * (1.0 + slope.abs()), "{} vs {slope}", d.r_c(1));
}

#[test]
fn ridge_orders() {
    let fr = example("paper-52");
    for j in 1..=2 {
        assert_eq!(fr.ridge_report(0.0, j, 1e-6).unwrap().ridge_order, 0);
    }
    let fr = example("ridge-fold");
    assert!(fr.invariants_at(0.0).unwrap().r_c.abs() < 1e-10);
    assert!(fr.ridge_report(0.0, 1, 1e-6).unwrap().ridge_order >= 1);
}

#[test]
fn ridge_equivalence_on_normal_forms() {
    // V_jκ_j = 0 exactly when r_c = 0.
    for k in 0..20 {
        let x = |b: usize| frontal_lab::verify::halton(k + 1, b);
        let c5 = if k % 2 == 0 { 0.0 } else { 0.2 + x(7) };
        let def = normal_form(
            "nf",
            &format!("{}", 0.5 + x(2)),
            &format!("{}", x(3) - 0.5),
            &format!("{} + {}*u", x(5) - 0.5, 0.5 + x(13)),
            &format!("{}", x(11) - 0.5),
            &format!("{c5}"),
        )
        .unwrap();
        let fr = Frontal::new(def);
        let r_c = fr.invariants_at(0.0).unwrap().r_c;
        for j in 1..=2 {
            let vj = fr.ridge_report(0.0, j, 1e-6).unwrap().vj_kappa_j;
            assert_eq!(vj.abs() < 1e-6, r_c.abs() < 1e-6, "case {k}, j = {j}: V_j k_j = {vj:e}, r_c = {r_c:e}");
        }
    }
}

#[test]
fn unit_normal_on_grids() {
    for name in ["paper-52", "helicoid", "ridge-fold"] {
        let fr = example(name);
        let (sr, tr) = (fr.def.s_range(), fr.def.t_range());
        for i in 0..41 {
            for j in 0..41 {
                let s = sr.0 + (sr.1 - sr.0) * i as f64 / 40.0;
                let t = tr.0 + (tr.1 - tr.0) * j as f64 / 40.0;
                let p = fr.evaluate_point(s, t).unwrap();
                assert!((p.nu.norm() - 1.0).abs() < 1e-9);
                assert!(p.f_u.dot(p.nu).abs() < 1e-9 && p.f_v.dot(p.nu).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn near_axis_branches_agree() {
    // Plain division by v and axis jets recentred to v, around the switch.
    let settings = Settings::default();
    for (name, u) in [("paper-52", -0.2), ("paper-52", 0.1), ("helicoid", 0.4)] {
        let fr = example(name);
        let band = settings.near_axis * (fr.def.t_range().1 - fr.def.t_range().0);
        for v in [0.5 * band, band, 2.0 * band] {
            let direct = LocalJets::from_f(fr.def.jet(u, v, 7).unwrap(), settings.deflate_tol, true).unwrap();
            let axis = LocalJets::from_f(fr.def.jet(u, 0.0, 10).unwrap(), settings.deflate_tol, true)
                .unwrap()
                .recenter(0.0, v, 7);
            let a = FrontalPoint::from_jets(&direct, &settings).unwrap();
            let b = FrontalPoint::from_jets(&axis, &settings).unwrap();
            for (x, y) in [(a.gauss, b.gauss), (a.mean, b.mean), (a.kappa1, b.kappa1), (a.kappa2, b.kappa2)] {
                assert!((x - y).abs() < 1e-9, "v = {v}: {x} vs {y}");
            }
            assert!((a.nu - b.nu).norm() < 1e-9);
        }
    }
}

fn substitute(src: &str, u: &str, v: &str) -> String {
    src.chars()
        .map(|c| match c {
            'u' => u.to_string(),
            'v' => v.to_string(),
            c => c.to_string(),
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_do_not_depend_on_the_chart(
        u0 in -0.2..0.2f64,
        a in 0.5..2.0f64,
        b in -1.0..1.0f64,
        c in 0.5..2.0f64,
    ) {
        let base = registry::find("paper-52").unwrap();
        let u = format!("({u0} + {a}*u + {b}*v^2/2)");
        let v = format!("({c}*v)");
        let comps: Vec<String> = base.components.iter().map(|s| substitute(s, &u, &v)).collect();
        let def = SurfaceDef::new(
            "perturbed",
            [&comps[0], &comps[1], &comps[2]],
            Param::V,
            0.0,
            (-0.05, 0.05),
            (-0.05, 0.05),
        )
        .unwrap();
        let moved = Frontal::new(def);
        let adapted = moved.adapt_at_point(0.0).unwrap();
        prop_assert!(adapted.residual < 1e-10);
        let want = Frontal::new(base.surface()).invariants_at(u0).unwrap().values();
        let got = moved.invariants_at(0.0).unwrap().values();
        for (x, y) in got.iter().zip(want) {
            prop_assert!((x - y).abs() < 1e-7, "{got:?} vs {want:?}");
        }
    }
}
