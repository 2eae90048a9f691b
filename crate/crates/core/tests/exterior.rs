mod common;

use proptest::prelude::*;

use common::{form, vars, vector_field};
use nambu_core::exterior::{contract, lie_derivative, DiffForm, PolyVector};
use nambu_core::Poly;

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn signed(f: &DiffForm, s: i64) -> DiffForm {
    if s > 0 {
        f.clone()
    } else {
        f.neg()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_vanishes(w3 in form(vars(3), 1), w4 in form(vars(4), 2), f in common::poly(vars(4), 3, 4)) {
        prop_assert!(w3.d().d().is_zero());
        prop_assert!(w4.d().d().is_zero());
        prop_assert!(DiffForm::differential(&f).d().is_zero());
    }

    #[test]
    fn graded_leibniz(a in form(vars(4), 1), b in form(vars(4), 2)) {
        let lhs = a.wedge(&b).unwrap().d();
        let rhs = a.d().wedge(&b).unwrap().add(&signed(&a.wedge(&b.d()).unwrap(), sign(1))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_associative_and_graded_commutative(
        a in form(vars(4), 1), b in form(vars(4), 1), c in form(vars(4), 2)
    ) {
        prop_assert_eq!(a.wedge(&b).unwrap().wedge(&c).unwrap(), a.wedge(&b.wedge(&c).unwrap()).unwrap());
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().neg());
        prop_assert_eq!(a.wedge(&c).unwrap(), c.wedge(&a).unwrap());
        prop_assert!(a.wedge(&a).unwrap().is_zero());
    }

    #[test]
    fn homotopy_is_a_chain_homotopy(w in form(vars(3), 1), v in form(vars(3), 2)) {
        // dK + Kd = id on forms of positive degree.
        for f in [&w, &v] {
            let lhs = f.homotopy(false).unwrap().d().add(&f.d().homotopy(false).unwrap()).unwrap();
            prop_assert_eq!(&lhs, f);
        }
    }

    #[test]
    fn homotopy_inverts_d_on_exact_forms(w in form(vars(4), 1), f in common::poly(vars(4), 3, 4)) {
        let dw = w.d();
        prop_assert_eq!(dw.homotopy(true).unwrap().d(), dw);
        let df = DiffForm::differential(&f);
        let g = df.homotopy(true).unwrap().as_function().unwrap();
        let c = f.constant_term();
        prop_assert_eq!(&g + &Poly::from_rational(f.vars(), c), f);
    }

    #[test]
    fn contraction_is_an_antiderivation(x in vector_field(vars(3)), a in form(vars(3), 1), b in form(vars(3), 1)) {
        let lhs = contract(&x, &a.wedge(&b).unwrap()).unwrap();
        let rhs = contract(&x, &a).unwrap().wedge(&b).unwrap()
            .sub(&a.wedge(&contract(&x, &b).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_derivative_rules(x in vector_field(vars(3)), f in common::poly(vars(3), 2, 4), w in form(vars(3), 1)) {
        let comps = x.components().unwrap();
        let directional = (0..3).fold(Poly::zero(f.vars()), |acc, i| &acc + &(&comps[i] * &f.d(i)));
        let lf = lie_derivative(&x, &DiffForm::function(f.clone())).unwrap();
        prop_assert_eq!(lf.as_function().unwrap(), directional);
        prop_assert_eq!(lie_derivative(&x, &w.d()).unwrap(), lie_derivative(&x, &w).unwrap().d());
        let omega = DiffForm::volume(f.vars());
        prop_assert_eq!(lie_derivative(&x, &omega).unwrap(), omega.scale(&x.divergence().unwrap()));
    }
}

#[test]
fn contraction_order_convention() {
    let v = vars(3);
    let omega = DiffForm::volume(&v);
    let e = |i| PolyVector::e(i, &v);
    let e12 = e(1).wedge(&e(2)).unwrap();
    assert_eq!(contract(&e12, &omega).unwrap(), DiffForm::dx(0, &v));
    let nested = contract(&e(2), &contract(&e(1), &omega).unwrap()).unwrap();
    assert_eq!(contract(&e12, &omega).unwrap(), nested);
}
