//! Jet arithmetic against brute-force polynomial oracles and finite
//! differences.

use frontal_lab::expr::parse_expression;
use frontal_lab::jet::{Coord, Jet2};
use frontal_lab::verify::{fd_partial, EXPR_CORPUS};
use proptest::prelude::*;

/// Dense triangular polynomial `c[i][j] u^i v^j`, truncated at `order`.
#[derive(Debug, Clone)]
struct Poly {
    order: usize,
    c: Vec<Vec<f64>>,
}

impl Poly {
    fn zero(order: usize) -> Self {
        Self {
            order,
            c: vec![vec![0.0; order + 1]; order + 1],
        }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[i][j]
        }
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero(self.order);
        for i1 in 0..=self.order {
            for j1 in 0..=self.order - i1 {
                for i2 in 0..=self.order - i1 - j1 {
                    for j2 in 0..=self.order - i1 - j1 - i2 {
                        r.c[i1 + i2][j1 + j2] += self.c[i1][j1] * o.get(i2, j2);
                    }
                }
            }
        }
        r
    }

    fn add_scaled(&mut self, o: &Poly, s: f64) {
        for i in 0..=self.order {
            for j in 0..=self.order - i {
                self.c[i][j] += s * o.c[i][j];
            }
        }
    }

    fn one(order: usize) -> Poly {
        let mut p = Poly::zero(order);
        p.c[0][0] = 1.0;
        p
    }

    fn jet(&self) -> Jet2 {
        Jet2::from_fn((0.0, 0.0), self.order, |i, j| self.get(i, j))
    }
}

fn poly(order: usize, zero_constant: bool) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-2.0..2.0f64, (order + 1) * (order + 1)).prop_map(move |xs| {
        let mut p = Poly::zero(order);
        for i in 0..=order {
            for j in 0..=order - i {
                p.c[i][j] = xs[i * (order + 1) + j];
            }
        }
        if zero_constant {
            p.c[0][0] = 0.0;
        }
        p
    })
}

fn assert_close(a: &Jet2, b: &Poly, tol: f64) {
    for d in 0..=b.order {
        for j in 0..=d {
            let (x, y) = (a.coeff(d - j, j), b.get(d - j, j));
            assert!((x - y).abs() <= tol * (1.0 + y.abs()), "c[{}][{j}]: {x} vs {y}", d - j);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mul_matches_convolution(a in poly(3, false), b in poly(3, false)) {
        let prod = &a.jet() * &b.jet();
        assert_close(&prod, &a.mul(&b), 1e-12);
    }

    #[test]
    fn compose_matches_expansion(a in poly(4, false), p in poly(4, true), q in poly(4, true)) {
        let composed = a.jet().compose(&p.jet(), &q.jet()).unwrap();
        let mut want = Poly::zero(4);
        let mut pi = Poly::one(4);
        for i in 0..=4 {
            let mut qj = pi.clone();
            for j in 0..=4 - i {
                want.add_scaled(&qj, a.c[i][j]);
                qj = qj.mul(&q);
            }
            pi = pi.mul(&p);
        }
        assert_close(&composed, &want, 1e-10);
    }

    #[test]
    fn reciprocal_inverts(a in poly(5, false), c0 in prop_oneof![-3.0..-0.5f64, 0.5..3.0f64]) {
        let mut a = a;
        a.c[0][0] = c0;
        let j = a.jet();
        let one = &j * &j.recip().unwrap();
        assert_close(&one, &Poly::one(5), 1e-9);
    }

    #[test]
    fn deflation_undoes_multiplication(a in poly(6, false), k in 1usize..4) {
        let v = Jet2::lift(Coord::V, (0.0, 0.0), 6);
        let mut q = a.jet();
        for _ in 0..k {
            q = &q * &v;
        }
        let back = q.deflate_v(k, 1e-12).unwrap();
        prop_assert_eq!(back.order(), 6 - k);
        for d in 0..=6 - k {
            for j in 0..=d {
                prop_assert_eq!(back.coeff(d - j, j), a.get(d - j, j));
            }
        }
    }

    #[test]
    fn partials_match_finite_differences(k in 0..EXPR_CORPUS.len(), u in -0.4..0.4f64, v in -0.4..0.4f64) {
        let e = parse_expression(EXPR_CORPUS[k]).unwrap();
        let jet = e.eval_jet((u, v), 3).unwrap();
        let g = |x: f64, y: f64| e.eval_f64(x, y).unwrap();
        for d in 0..=3 {
            for i in 0..=d {
                let fd = fd_partial(&g, u, v, i, d - i, 2e-2);
                let err = (jet.partial(i, d - i).unwrap() - fd).abs() / fd.abs().max(1.0);
                prop_assert!(err < 1e-5, "{} d^{i}_u d^{}_v: {err:e}", EXPR_CORPUS[k], d - i);
            }
        }
    }
}

#[test]
fn high_order_partial_matches_closed_form() {
    // d^5/dv^5 of u v^2 + v^5/5 is 24 everywhere.
    let e = parse_expression("u*v^2 + v^5/5").unwrap();
    let jet = e.eval_jet((0.0, 0.0), 7).unwrap();
    assert_eq!(jet.partial(0, 5).unwrap(), 24.0);
}

#[test]
fn deflating_a_non_multiple_fails() {
    let e = parse_expression("u + v").unwrap();
    assert!(e.eval_jet((0.0, 0.0), 3).unwrap().deflate_v(1, 1e-12).is_err());
}
