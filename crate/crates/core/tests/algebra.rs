mod common;

use num_traits::ToPrimitive;
use proptest::prelude::*;

use common::{poly, vars};
use nambu_core::poly::{rat, Rational};
use nambu_core::Poly;

fn xyz_poly() -> impl Strategy<Value = Poly> {
    poly(vars(3), 3, 5)
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-5i64..=5, 1i64..=3).prop_map(|(a, b)| rat(a, b)), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(a in xyz_poly(), b in xyz_poly(), c in xyz_poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(a.vars()), a.clone());
        prop_assert!((&a * &Poly::zero(a.vars())).is_zero());
    }

    #[test]
    fn degree_is_additive(a in xyz_poly(), b in xyz_poly()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!((&a * &b).degree().unwrap(), a.degree().unwrap() + b.degree().unwrap());
    }

    #[test]
    fn pow_is_repeated_product(a in poly(vars(2), 2, 3), k in 0u32..4) {
        let mut expected = Poly::one(a.vars());
        for _ in 0..k {
            expected = &expected * &a;
        }
        prop_assert_eq!(a.pow(k), expected);
    }

    #[test]
    fn derivative_rules(a in xyz_poly(), b in xyz_poly(), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!((&a * &b).d(i), &(&a.d(i) * &b) + &(&a * &b.d(i)));
        prop_assert_eq!((&a + &b).d(i), &a.d(i) + &b.d(i));
        prop_assert_eq!(a.d(i).d(j), a.d(j).d(i));
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in xyz_poly(), b in xyz_poly(), x in point()) {
        let (va, vb) = (a.eval(&x).unwrap(), b.eval(&x).unwrap());
        prop_assert_eq!((&a * &b).eval(&x).unwrap(), &va * &vb);
        prop_assert_eq!((&a + &b).eval(&x).unwrap(), &va + &vb);
    }

    #[test]
    fn display_parses_back(a in xyz_poly()) {
        let text = a.to_string();
        prop_assert_eq!(Poly::parse(&text, a.vars()).unwrap(), a);
    }

    #[test]
    fn float_evaluation_tracks_exact(a in xyz_poly(), x in point()) {
        let exact = a.eval(&x).unwrap().to_f64().unwrap();
        let xf: Vec<f64> = x.iter().map(|r| r.to_f64().unwrap()).collect();
        let approx = a.eval_f64(&xf).unwrap();
        prop_assert!((exact - approx).abs() <= 1e-9 * (1.0 + exact.abs()), "{exact} vs {approx}");
    }
}

#[test]
fn parser_examples() {
    let v = vars(3);
    let p = |s: &str| Poly::parse(s, &v).unwrap();
    assert_eq!(p("3/2*(x0^2+x1^2+x2^2)/3").to_string(), "1/2*x0^2 + 1/2*x1^2 + 1/2*x2^2");
    assert_eq!(p("(x0 - x1)^2"), p("x0^2 - 2*x0*x1 + x1^2"));
    assert_eq!(p("-x0^2"), &p("0") - &p("x0*x0"));
    assert!(Poly::parse("x0 +", &v).is_err());
    assert!(Poly::parse("x3", &v).is_err());
    assert!(Poly::parse("x0^(1/2)", &v).is_err());
}
