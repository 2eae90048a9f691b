use num_bigint::BigInt;
use rand::Rng;

use super::{Monomial, Poly, Rational, Vars};

/// A random polynomial with up to `max_terms` terms of total degree at most
/// `max_degree` and small rational coefficients.
pub fn random_poly<R: Rng + ?Sized>(rng: &mut R, vars: &Vars, max_degree: u32, max_terms: usize) -> Poly {
    let n = vars.len();
    let count = rng.gen_range(0..=max_terms);
    let terms = (0..count).map(|_| {
        let degree = rng.gen_range(0..=max_degree);
        let mut exps = vec![0u32; n];
        for _ in 0..degree {
            if n > 0 {
                exps[rng.gen_range(0..n)] += 1;
            }
        }
        let num = rng.gen_range(-9i64..=9);
        let den = rng.gen_range(1i64..=4);
        (Monomial::from_exponents(exps), Rational::new(BigInt::from(num), BigInt::from(den)))
    });
    Poly::from_terms(vars, terms.collect::<Vec<_>>())
}
