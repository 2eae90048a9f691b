#![allow(dead_code)]

use proptest::prelude::*;

use nambu_core::exterior::{DiffForm, IndexTuple, PolyVector};
use nambu_core::poly::{rat, Monomial};
use nambu_core::{Poly, Vars};

/// Polynomials with at most `max_terms` terms, each exponent at most
/// `max_exp`, and coefficients `a/b` with `|a| ≤ 9`, `1 ≤ b ≤ 4`.
pub fn poly(vars: Vars, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    let n = vars.len();
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), -9i64..=9, 1i64..=4), 0..=max_terms).prop_map(
        move |terms| {
            Poly::from_terms(
                &vars,
                terms
                    .into_iter()
                    .map(|(e, a, b)| (Monomial::from_exponents(e), rat(a, b)))
                    .collect::<Vec<_>>(),
            )
        },
    )
}

/// A `degree`-form with up to three random basis terms.
pub fn form(vars: Vars, degree: usize) -> impl Strategy<Value = DiffForm> {
    let n = vars.len();
    let tuples = IndexTuple::all_of_len(n, degree);
    let pick = prop::sample::select(tuples);
    prop::collection::vec((pick, poly(vars.clone(), 2, 3)), 0..=3).prop_map(move |terms| {
        terms.into_iter().fold(DiffForm::zero(degree, &vars), |acc, (t, c)| {
            let idx: Vec<usize> = t.indices().collect();
            acc.add(&DiffForm::from_terms(degree, &vars, [(idx.as_slice(), c)]).unwrap()).unwrap()
        })
    })
}

pub fn vector_field(vars: Vars) -> impl Strategy<Value = PolyVector> {
    let n = vars.len();
    prop::collection::vec(poly(vars, 2, 3), n).prop_map(|c| PolyVector::vector_field(&c).unwrap())
}

pub fn vars(n: usize) -> Vars {
    Vars::indexed("x", n)
}
