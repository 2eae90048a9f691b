use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use nambu_core::flows::integrate;
use nambu_core::ring;

/// `c_j(t) = (1/n) Σ_k σ^{-jk} exp(σ^k t)`, the discrete-Fourier form.
fn c_by_roots(n: usize, j: usize, t: f64) -> f64 {
    let sigma = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
    let sum: Complex64 = (0..n)
        .map(|k| sigma.powi(-((j * k) as i32)) * (sigma.powi(k as i32) * t).exp())
        .sum();
    sum.re / n as f64
}

#[test]
fn pauli_identities_up_to_sixteen() {
    for n in 2..=16 {
        let e = ring::gen_pauli(n).unwrap().identity_errors();
        assert!(e.max() < 1e-12, "n = {n}: {e:?}");
    }
}

#[test]
fn invariants_match_determinant_form() {
    // For n = 3, c0^3 + c1^3 + c2^3 - 3 c0 c1 c2 is the circulant determinant.
    let inv = ring::ring_invariant(3).unwrap();
    for &(a, b, c) in &[(1.0, 2.0, -0.5), (0.3, -1.1, 2.2)] {
        let m = DMatrix::from_row_slice(3, 3, &[a, b, c, c, a, b, b, c, a]);
        assert!((inv.eval_f64(&[a, b, c]).unwrap() - m.determinant()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_matches_root_of_unity_filter(n in 2usize..=8, t in -3.0f64..3.0) {
        for j in 0..n {
            let a = ring::c_series(n, j, t, 1e-18).unwrap();
            let b = c_by_roots(n, j, t);
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "n={n} j={j} t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn sections_sum_to_exponentials(n in 2usize..=10, t in -4.0f64..4.0) {
        let c = ring::c_vector(n, t, 1e-18).unwrap();
        let s: f64 = c.iter().sum();
        prop_assert!((s - t.exp()).abs() < 1e-12 * t.exp().max(1.0));
        if n % 2 == 0 {
            let alt: f64 = c.iter().enumerate().map(|(j, v)| if j % 2 == 0 { *v } else { -v }).sum();
            prop_assert!((alt - (-t).exp()).abs() < 1e-12 * (-t).exp().max(1.0));
        }
    }

    #[test]
    fn exp_reconstruction(n in 2usize..=8, t in -2.0f64..2.0) {
        prop_assert!(ring::exp_reconstruction_check(n, t).unwrap() < 1e-10);
    }

    #[test]
    fn lowering_solution_matches_matrix_exponential(n in 2usize..=6, t in 0.0f64..2.0) {
        let raise = ring::gen_pauli(n).unwrap().shift_power(n - 1).map(|z| z.re);
        let x = (raise * t).exp().column(0).clone_owned();
        let series = ring::lowering_flow_solution(n, t, 1e-18).unwrap();
        for j in 0..n {
            prop_assert!((x[j] - series[j]).abs() < 1e-12 * (1.0 + x[j].abs()));
        }
    }
}

#[test]
fn ring_flow_rk4_follows_series() {
    for n in 2..=6 {
        let flow = ring::ring_flow(n).unwrap();
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0;
        let traj = integrate(&flow, &e0, 1.0, 1e-3).unwrap();
        let series = ring::lowering_flow_solution(n, 1.0, 1e-18).unwrap();
        for (a, b) in traj.last_state().iter().zip(&series) {
            assert!((a - b).abs() < 1e-12, "n = {n}");
        }
    }
}
