//! Printing and parsing of randomly generated expressions.

use frontal_lab::expr::{parse_expression, Expr, NamedConst, Var};
use frontal_lab::jet::Analytic;
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::Var(Var::U)),
        Just(Expr::Var(Var::V)),
        Just(Expr::Const(NamedConst::Pi)),
        (0u32..20).prop_map(|n| Expr::Num(n as f64)),
        (1u32..100).prop_map(|n| Expr::Num(n as f64 / 8.0)),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (0..Analytic::ALL.len(), inner.clone()).prop_map(move |(k, a)| Expr::Func(Analytic::ALL[k], b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Add(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Sub(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Mul(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Div(b(l), b(r))),
            (inner, 0i32..5).prop_map(move |(a, n)| Expr::IntPow(b(a), n)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_print_is_a_fixed_point(e in expr()) {
        let printed = e.to_string();
        let reparsed = parse_expression(&printed).unwrap();
        let again = reparsed.to_string();
        prop_assert_eq!(&printed, &again);
        prop_assert_eq!(parse_expression(&again).unwrap(), reparsed);
    }

    #[test]
    fn printing_preserves_values(e in expr(), u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let reparsed = parse_expression(&e.to_string()).unwrap();
        match (e.eval_f64(u, v), reparsed.eval_f64(u, v)) {
            (Ok(a), Ok(b)) => prop_assert!(a == b || (a.is_nan() && b.is_nan()), "{a} vs {b}"),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }
}

#[test]
fn desk_values() {
    let e = parse_expression("u*v^2 + v^5/5").unwrap();
    assert!((e.eval_f64(0.3, 0.2).unwrap() - 0.012064).abs() < 1e-15);
    assert_eq!(parse_expression("u^2 + v^2/2").unwrap().eval_f64(1.0, 2.0).unwrap(), 3.0);
    assert!(parse_expression("sqrt(u)").unwrap().eval_f64(-1.0, 0.0).is_err());
}
