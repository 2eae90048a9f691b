//! Cyclic `n`-level systems: generalized Pauli matrices, the functions
//! `c_j(t) = Σ_k t^{nk+j}/(nk+j)!`, the flow `ċ = Σ1⁺ c`, its invariants,
//! Lax pairs and vector Hamiltonians.
//!
//! `Σ1` raises levels cyclically, `Σ1 e_i = e_{i+1 mod n}`, and
//! `Σ1⁺ = Σ1^{n-1}` lowers them, so `(Σ1⁺ c)_j = c_{j+1 mod n}`.
//! The vector `(c_0, …, c_{n-1})(t)` solves `ẋ = Σ1 x` from `e_0`. The
//! solution of `ẋ = Σ1⁺ x` from `e_0` is the index reversal
//! `x_j = c_{-j mod n}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exterior::DiffForm;
use crate::flows::{FlowError, FlowSystem};
use crate::lax::{LaxError, LaxPair, PolyMatrix, SampledLaxPair};
use crate::nambu::{
    flow_to_vector_hamiltonian, flux_form, gauge_difference, FormIdentity, NambuError, VectorHamiltonian,
};
use crate::poly::{rat, GaussianRational, Poly, Polynomial, Vars};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RingError {
    #[error("ring size must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("level index {j} out of range for n = {n}")]
    LevelOutOfRange { j: usize, n: usize },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("time must be finite with |t| <= 700, got {0}")]
    BadTime(f64),
    #[error("no closed-form data for n = {0}")]
    Unsupported(usize),
    #[error("invariant {invariant} is not conserved; dI/dt = {residual}")]
    NotConserved { invariant: String, residual: String },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Nambu(#[from] NambuError),
    #[error(transparent)]
    Lax(#[from] LaxError),
}

/// Variables `c0, …, c_{n-1}`.
pub fn ring_vars(n: usize) -> Vars {
    Vars::indexed("c", n)
}

/// `σ = e^{2πi/n}`.
pub fn primitive_root(n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / n as f64)
}

/// `Σ0`, `Σ1`, `Σ3` and `Σ1⁺` for one ring size.
#[derive(Clone, Debug)]
pub struct GenPauliSet {
    pub n: usize,
    pub sigma: Complex64,
    pub identity: DMatrix<Complex64>,
    pub shift: DMatrix<Complex64>,
    pub phase: DMatrix<Complex64>,
    pub raise_adjoint: DMatrix<Complex64>,
}

/// Largest deviations from the defining identities.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliIdentityErrors {
    /// `max |Σ1^n - Σ0|`.
    pub shift_order: f64,
    /// `|σ^n - 1|`.
    pub root_order: f64,
    /// `|Σ_k σ^k|`.
    pub root_sum: f64,
    /// `max |Σ1 Σ3 - σ Σ3 Σ1|`.
    pub commutation: f64,
}

impl PauliIdentityErrors {
    pub fn max(&self) -> f64 {
        self.shift_order.max(self.root_order).max(self.root_sum).max(self.commutation)
    }
}

pub fn gen_pauli(n: usize) -> Result<GenPauliSet, RingError> {
    if n < 2 {
        return Err(RingError::TooSmall(n));
    }
    let one = Complex64::new(1.0, 0.0);
    let sigma = primitive_root(n);
    let shift = DMatrix::from_fn(n, n, |r, c| if r == (c + 1) % n { one } else { Complex64::default() });
    let phase = DMatrix::from_fn(n, n, |r, c| if r == c { sigma.powu(r as u32) } else { Complex64::default() });
    let raise_adjoint = DMatrix::from_fn(n, n, |r, c| if c == (r + 1) % n { one } else { Complex64::default() });
    Ok(GenPauliSet {
        n,
        sigma,
        identity: DMatrix::identity(n, n),
        shift,
        phase,
        raise_adjoint,
    })
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl GenPauliSet {
    pub fn identity_errors(&self) -> PauliIdentityErrors {
        let n = self.n;
        let mut power = self.identity.clone();
        for _ in 0..n {
            power = &power * &self.shift;
        }
        let root_sum: Complex64 = (0..n).map(|k| self.sigma.powu(k as u32)).sum();
        // Σ3 Σ1 e_i = σ^{i+1} e_{i+1} and Σ1 Σ3 e_i = σ^i e_{i+1}.
        let lhs = &self.phase * &self.shift;
        let rhs = (&self.shift * &self.phase) * self.sigma;
        PauliIdentityErrors {
            shift_order: max_abs(&(power - &self.identity)),
            root_order: (self.sigma.powu(n as u32) - 1.0).norm(),
            root_sum: root_sum.norm(),
            commutation: max_abs(&(lhs - rhs)),
        }
    }

    /// `Σ1^k`.
    pub fn shift_power(&self, k: usize) -> DMatrix<Complex64> {
        let mut out = self.identity.clone();
        for _ in 0..k {
            out = &out * &self.shift;
        }
        out
    }
}

/// `c_j(t)`, summed until the tail bound `|t|^{m+1}/(m+1)! · e^{|t|}`
/// falls below `tol`.
pub fn c_series(n: usize, j: usize, t: f64, tol: f64) -> Result<f64, RingError> {
    if n < 2 {
        return Err(RingError::TooSmall(n));
    }
    if j >= n {
        return Err(RingError::LevelOutOfRange { j, n });
    }
    if tol.is_nan() || tol <= 0.0 || !tol.is_finite() {
        return Err(RingError::BadTolerance(tol));
    }
    if !t.is_finite() || t.abs() > 700.0 {
        return Err(RingError::BadTime(t));
    }
    let growth = t.abs().exp();
    let mut term = 1.0; // t^m / m!
    let mut sum = 0.0;
    let mut m = 0usize;
    loop {
        if m % n == j {
            sum += term;
        }
        let next = term * t / (m + 1) as f64;
        if m >= j && next.abs() * growth < tol {
            return Ok(sum);
        }
        term = next;
        m += 1;
    }
}

/// `(c_0(t), …, c_{n-1}(t))`.
pub fn c_vector(n: usize, t: f64, tol: f64) -> Result<Vec<f64>, RingError> {
    (0..n).map(|j| c_series(n, j, t, tol)).collect()
}

/// Solution of `ẋ = Σ1⁺ x`, `x(0) = e_0`, from the series: `x_j = c_{-j}`.
pub fn lowering_flow_solution(n: usize, t: f64, tol: f64) -> Result<Vec<f64>, RingError> {
    let c = c_vector(n, t, tol)?;
    Ok((0..n).map(|j| c[(n - j) % n]).collect())
}

/// `max |exp(tΣ1) - Σ_j c_j(t) Σ1^j|`, with the exponential computed by
/// scaling and squaring.
pub fn exp_reconstruction_check(n: usize, t: f64) -> Result<f64, RingError> {
    let pauli = gen_pauli(n)?;
    let c = c_vector(n, t, 1e-18)?;
    let direct = (&pauli.shift * Complex64::new(t, 0.0)).exp();
    let mut series = DMatrix::zeros(n, n);
    for (j, cj) in c.iter().enumerate() {
        series += pauli.shift_power(j) * Complex64::new(*cj, 0.0);
    }
    Ok(max_abs(&(direct - series)))
}

/// Closed-form conserved quantity for `n ∈ {2, 3, 4}`.
pub fn ring_invariant(n: usize) -> Option<Poly> {
    let vars = ring_vars(n);
    let text = match n {
        2 => "c1^2 - c0^2",
        3 => "c0^3 + c1^3 + c2^3 - 3*c0*c1*c2",
        4 => "2*(2*c0*c2 - c1^2 - c3^2)",
        _ => return None,
    };
    Some(Poly::parse(text, &vars).expect("fixed expression"))
}

/// The lowering flow `ċ_j = c_{j+1 mod n}`.
pub fn ring_flow(n: usize) -> Result<FlowSystem, RingError> {
    if n < 2 {
        return Err(RingError::TooSmall(n));
    }
    let vars = ring_vars(n);
    let rhs = (0..n).map(|j| Poly::var(&vars, (j + 1) % n)).collect();
    Ok(FlowSystem::new(rhs, format!("ring-{n}"))?)
}

#[derive(Clone, Debug)]
pub struct RingSystem {
    pub n: usize,
    pub flow: FlowSystem,
    /// Present for `n ∈ {2, 3, 4}`, after its conservation is verified.
    pub invariant: Option<Poly>,
    pub vector_hamiltonian: Option<VectorHamiltonian>,
}

pub fn ring_system(n: usize) -> Result<RingSystem, RingError> {
    let flow = ring_flow(n)?;
    let invariant = match ring_invariant(n) {
        Some(inv) => {
            let residual = flow.time_derivative(&inv)?;
            if !residual.is_zero() {
                return Err(RingError::NotConserved {
                    invariant: inv.to_string(),
                    residual: residual.to_string(),
                });
            }
            Some(inv)
        }
        None => None,
    };
    let vector_hamiltonian = match n {
        3 | 4 => Some(printed_vector_hamiltonian(n)?),
        _ => None,
    };
    Ok(RingSystem {
        n,
        flow,
        invariant,
        vector_hamiltonian,
    })
}

fn printed_vector_hamiltonian(n: usize) -> Result<VectorHamiltonian, RingError> {
    let vars = ring_vars(n);
    let p = |s: &str| Poly::parse(s, &vars).expect("fixed expression");
    let h = match n {
        3 => VectorHamiltonian::from_components(&[
            p("(c2^2 - 2*c0*c1)/4"),
            p("(c0^2 - 2*c1*c2)/4"),
            p("(c1^2 - 2*c0*c2)/4"),
        ])?,
        4 => {
            let sixth = rat(1, 6);
            let terms: [(&[usize], &str); 6] = [
                (&[0, 1], "c3^2 - 2*c0*c2"),
                (&[2, 3], "c1^2 - 2*c2*c0"),
                (&[0, 3], "c2^2 - 2*c3*c1"),
                (&[2, 1], "c0^2 - 2*c3*c1"),
                (&[1, 3], "2*(c3*c0 - c1*c2)"),
                (&[0, 2], "2*(c0*c1 - c2*c3)"),
            ];
            let form = DiffForm::from_terms(2, &vars, terms.iter().map(|(idx, c)| (*idx, p(c))))
                .map_err(NambuError::from)?;
            VectorHamiltonian::new(form.scale_rational(&sixth))?
        }
        _ => return Err(RingError::Unsupported(n)),
    };
    Ok(h)
}

/// A closed-form vector Hamiltonian with its certification.
#[derive(Clone, Debug)]
pub struct RingVectorHamiltonian {
    pub h: VectorHamiltonian,
    /// `dh - X ⌟ Ω` for the ring flow `X`.
    pub certification: FormIdentity,
    /// Output of the homotopy operator on `X ⌟ Ω`.
    pub homotopy: VectorHamiltonian,
    /// `φ` with `h - homotopy = dφ`, when the two are gauge equivalent.
    pub gauge: Option<DiffForm>,
}

pub fn ring_vector_hamiltonian(n: usize) -> Result<RingVectorHamiltonian, RingError> {
    if !(3..=4).contains(&n) {
        return Err(RingError::Unsupported(n));
    }
    let h = printed_vector_hamiltonian(n)?;
    let field = ring_flow(n)?.vector_field()?;
    let flux = flux_form(&field)?;
    let certification = FormIdentity {
        residual: h.form().d().sub(&flux).map_err(NambuError::from)?,
    };
    let homotopy = flow_to_vector_hamiltonian(&field)?;
    let gauge = gauge_difference(&h, &homotopy)?;
    Ok(RingVectorHamiltonian {
        h,
        certification,
        homotopy,
        gauge,
    })
}

/// Lax pair for `n = 2`: `L = [[c1, c0], [-c0, -c1]]`, `M = -Σ1/2`, which
/// is the general display at `σ = -1` with the unit `σ^0` in the corner.
pub fn ring_lax_pair_2() -> Result<LaxPair, RingError> {
    let vars = ring_vars(2);
    let l = PolyMatrix::parse(&[vec!["c1", "c0"], vec!["-c0", "-c1"]], &vars)?;
    let m = PolyMatrix::parse(&[vec!["0", "-1/2"], vec!["-1/2", "0"]], &vars)?;
    Ok(LaxPair::new(l, m, ring_flow(2)?)?)
}

fn lax_exponent(n: usize, a: usize, b: usize) -> (usize, usize) {
    // Entry (a, b) is c_{b-a} σ^{n-1-a-b}, indices mod n.
    ((b + n - a) % n, (2 * n - 1 - (a + b) % n) % n)
}

/// Lax pair for `n = 4` over the Gaussian rationals: `σ = i`, so
/// `M = Σ1/(σ - σ^3) = -(i/2) Σ1` and everything is exact.
pub fn ring_lax_pair_4() -> Result<LaxPair<GaussianRational>, RingError> {
    let n = 4;
    let vars = ring_vars(n);
    let i_pow = |k: usize| -> GaussianRational {
        let mut z = GaussianRational::new(rat(1, 1), rat(0, 1));
        for _ in 0..k {
            z = z * GaussianRational::i();
        }
        z
    };
    let l = PolyMatrix::from_fn(n, |a, b| {
        let (j, k) = lax_exponent(n, a, b);
        Polynomial::var(&vars, j).scale(&i_pow(k))
    })?;
    let half_minus_i = GaussianRational::new(rat(0, 1), rat(-1, 2));
    let m = PolyMatrix::from_fn(n, |r, c| {
        if r == (c + 1) % n {
            Polynomial::constant(&vars, half_minus_i.clone())
        } else {
            Polynomial::zero(&vars)
        }
    })?;
    Ok(LaxPair::new(l, m, ring_flow(n)?)?)
}

/// Lax pair for any `n ≥ 3` with `σ` as a trailing parameter variable and
/// `M = Σ1/(σ - σ^{n-1})` in floating point.
pub fn ring_lax_pair_sampled(n: usize) -> Result<SampledLaxPair, RingError> {
    if n < 3 {
        return Err(RingError::Unsupported(n));
    }
    let vars = ring_vars(n).extended("sigma");
    let l = PolyMatrix::from_fn(n, |a, b| {
        let (j, k) = lax_exponent(n, a, b);
        &Poly::var(&vars, j) * &Poly::var(&vars, n).pow(k as u32)
    })?;
    let pauli = gen_pauli(n)?;
    let sigma = pauli.sigma;
    let m = &pauli.shift / (sigma - sigma.powu(n as u32 - 1));
    Ok(SampledLaxPair {
        l,
        m,
        flow: ring_flow(n)?,
        parameters: vec![sigma],
    })
}

/// Deterministic sample states in `[-2, 2]^n`.
pub fn sample_states(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::integrate;
    use crate::lax::{lax_residual, trace_invariant};
    use crate::nambu::involution_check;

    #[test]
    fn pauli_matrices_for_two_levels() {
        let p = gen_pauli(2).unwrap();
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, 1.0, 0.0].map(|v| Complex64::new(v, 0.0)),
        );
        assert_eq!(p.shift, expected);
        assert_eq!(p.raise_adjoint, expected);
        assert!(matches!(gen_pauli(1), Err(RingError::TooSmall(1))));
    }

    #[test]
    fn shift_raises_levels() {
        let p = gen_pauli(5).unwrap();
        for i in 0..5 {
            let e = DMatrix::from_fn(5, 1, |r, _| Complex64::new(if r == i { 1.0 } else { 0.0 }, 0.0));
            let out = &p.shift * e;
            for r in 0..5 {
                assert_eq!(out[(r, 0)].re, if r == (i + 1) % 5 { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(p.shift_power(4), p.raise_adjoint);
    }

    #[test]
    fn pauli_identities() {
        assert_eq!(gen_pauli(3).unwrap().identity_errors().shift_order, 0.0);
        for n in 2..=16 {
            let errs = gen_pauli(n).unwrap().identity_errors();
            assert!(errs.max() < 1e-12, "n = {n}: {errs:?}");
        }
    }

    #[test]
    fn series_for_two_levels_are_hyperbolic() {
        let e = std::f64::consts::E;
        assert!((c_series(2, 0, 1.0, 1e-17).unwrap() - (e + 1.0 / e) / 2.0).abs() < 1e-14);
        assert!((c_series(2, 1, 1.0, 1e-17).unwrap() - (e - 1.0 / e) / 2.0).abs() < 1e-14);
        assert!((c_series(2, 0, -0.7, 1e-17).unwrap() - 0.7f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn series_at_zero() {
        for n in 2..7 {
            let c = c_vector(n, 0.0, 1e-12).unwrap();
            assert_eq!(c[0], 1.0);
            assert!(c[1..].iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn series_errors() {
        assert_eq!(c_series(3, 0, 1.0, 0.0), Err(RingError::BadTolerance(0.0)));
        assert_eq!(c_series(3, 0, 1.0, -1.0), Err(RingError::BadTolerance(-1.0)));
        assert_eq!(c_series(3, 3, 1.0, 1e-9), Err(RingError::LevelOutOfRange { j: 3, n: 3 }));
        assert!(matches!(c_series(3, 0, f64::NAN, 1e-9), Err(RingError::BadTime(_))));
    }

    #[test]
    fn series_match_lowering_flow() {
        let flow = ring_flow(3).unwrap();
        let traj = integrate(&flow, &[1.0, 0.0, 0.0], 1.0, 1e-3).unwrap();
        let series = lowering_flow_solution(3, 1.0, 1e-16).unwrap();
        for (a, b) in traj.last_state().iter().zip(&series) {
            assert!((a - b).abs() < 1e-8);
        }
        // Without the reversal the components disagree.
        let direct = c_vector(3, 1.0, 1e-16).unwrap();
        assert!((traj.last_state()[1] - direct[1]).abs() > 0.1);
    }

    #[test]
    fn exp_reconstruction() {
        assert_eq!(exp_reconstruction_check(3, 0.0).unwrap(), 0.0);
        assert!(exp_reconstruction_check(3, 1.0).unwrap() < 1e-12);
        assert!(exp_reconstruction_check(4, 2.0).unwrap() < 1e-10);
    }

    #[test]
    fn invariants_are_conserved() {
        for n in 2..=4 {
            let sys = ring_system(n).unwrap();
            let inv = sys.invariant.unwrap();
            assert!(sys.flow.time_derivative(&inv).unwrap().is_zero());
        }
        assert!(ring_system(5).unwrap().invariant.is_none());
        // The printed c4 read literally as a fifth variable is not an option;
        // dropping the c3 term breaks conservation.
        let flow = ring_flow(4).unwrap();
        let wrong = Poly::parse("2*(2*c0*c2 - c1^2)", &ring_vars(4)).unwrap();
        assert!(!flow.time_derivative(&wrong).unwrap().is_zero());
    }

    #[test]
    fn two_level_invariant_value_is_minus_one() {
        let inv = ring_invariant(2).unwrap();
        let c = c_vector(2, 1.3, 1e-17).unwrap();
        assert!((inv.eval_f64(&c).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_level_vector_hamiltonian() {
        let rv = ring_vector_hamiltonian(3).unwrap();
        assert!(rv.certification.holds());
        let field = rv.h.field().unwrap().components().unwrap();
        let v = ring_vars(3);
        assert_eq!(field, vec![Poly::var(&v, 1), Poly::var(&v, 2), Poly::var(&v, 0)]);
        assert!(involution_check(&rv.h, &ring_invariant(3).unwrap()).unwrap().is_zero());
        assert!(rv.gauge.is_some());
    }

    #[test]
    fn four_level_vector_hamiltonian() {
        let rv = ring_vector_hamiltonian(4).unwrap();
        assert!(rv.certification.holds(), "{}", rv.certification.residual);
        assert!(rv.gauge.is_some());
        assert!(involution_check(&rv.h, &ring_invariant(4).unwrap()).unwrap().is_zero());
        assert!(matches!(ring_vector_hamiltonian(5), Err(RingError::Unsupported(5))));
    }

    #[test]
    fn two_level_lax_pair() {
        let pair = ring_lax_pair_2().unwrap();
        assert!(lax_residual(&pair).unwrap().is_zero());
        assert_eq!(trace_invariant(&pair.l, 2).unwrap(), ring_invariant(2).unwrap());
    }

    #[test]
    fn four_level_lax_pair_is_exact() {
        let pair = ring_lax_pair_4().unwrap();
        assert!(lax_residual(&pair).unwrap().is_zero());
        let half_trace = trace_invariant(&pair.l, 2).unwrap();
        assert_eq!(half_trace.to_string(), "-2*c0^2 + 4*c1*c3 - 2*c2^2");
    }

    #[test]
    fn sampled_lax_pairs() {
        for n in 3..=6 {
            let pair = ring_lax_pair_sampled(n).unwrap();
            let samples = sample_states(n, 10, 7);
            assert!(pair.max_residual(&samples).unwrap() < 1e-10, "n = {n}");
        }
        let pair = ring_lax_pair_sampled(3).unwrap();
        let inv = ring_invariant(3).unwrap();
        for s in sample_states(3, 5, 11) {
            let tr = pair.trace_invariant_at(3, &s).unwrap();
            assert!((tr.re - inv.eval_f64(&s).unwrap()).abs() < 1e-10 && tr.im.abs() < 1e-10);
        }
    }
}
