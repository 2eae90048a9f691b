mod common;

use proptest::prelude::*;

use common::{poly, vars};
use nambu_core::lax::PolyMatrix;
use nambu_core::ring;

fn matrix(size: usize) -> impl Strategy<Value = PolyMatrix> {
    prop::collection::vec(prop::collection::vec(poly(vars(2), 2, 2), size), size)
        .prop_map(|rows| PolyMatrix::new(rows).unwrap())
}

fn square_triple() -> impl Strategy<Value = (PolyMatrix, PolyMatrix, PolyMatrix)> {
    (1usize..=3).prop_flat_map(|s| (matrix(s), matrix(s), matrix(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_is_cyclic((a, b, c) in square_triple()) {
        prop_assert_eq!(a.mul(&b).unwrap().trace(), b.mul(&a).unwrap().trace());
        prop_assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap().trace(),
            c.mul(&a).unwrap().mul(&b).unwrap().trace()
        );
        prop_assert!(a.commutator(&b).unwrap().trace().is_zero());
    }

    #[test]
    fn commutator_satisfies_jacobi((a, b, c) in square_triple()) {
        let t1 = a.commutator(&b.commutator(&c).unwrap()).unwrap();
        let t2 = b.commutator(&c.commutator(&a).unwrap()).unwrap();
        let t3 = c.commutator(&a.commutator(&b).unwrap()).unwrap();
        prop_assert!(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero());
    }

    #[test]
    fn power_matches_products((a, _, _) in square_triple()) {
        prop_assert_eq!(a.pow(3), a.mul(&a).unwrap().mul(&a).unwrap());
    }

    #[test]
    fn sampled_ring_lax_pairs(n in 3usize..=8, seed in any::<u64>()) {
        let pair = ring::ring_lax_pair_sampled(n).unwrap();
        let states = ring::sample_states(n, 4, seed);
        prop_assert!(pair.max_residual(&states).unwrap() < 1e-9);
    }
}
