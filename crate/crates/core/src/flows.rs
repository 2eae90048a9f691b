//! Polynomial flows `ẋ = f(x)` and fixed-step RK4 integration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{ExteriorError, PolyVector};
use crate::nambu::{nambu_bracket, HamiltonianSystem, NambuError, VectorHamiltonian};
use crate::poly::{Coeff, Poly, PolyError, Polynomial, Rational, Vars};

/// States with any coordinate beyond this magnitude abort integration.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("flow needs at least one equation")]
    Empty,
    #[error("right-hand side {index} lives in {got} variables, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("initial state has {got} entries, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("invalid integration parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("initial state is not finite")]
    NonFiniteInitial,
    #[error("state left |x| <= {BLOWUP_THRESHOLD:e} at t = {time}")]
    BlowUp { time: f64, partial: Box<Trajectory> },
    #[error(transparent)]
    Nambu(#[from] NambuError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An autonomous polynomial vector field.
#[derive(Clone, Debug)]
pub struct FlowSystem {
    vars: Vars,
    rhs: Vec<Poly>,
    provenance: String,
}

impl FlowSystem {
    pub fn new(rhs: Vec<Poly>, provenance: impl Into<String>) -> Result<Self, FlowError> {
        let vars = rhs.first().ok_or(FlowError::Empty)?.vars().clone();
        let n = vars.len();
        if rhs.len() != n {
            return Err(FlowError::DimensionMismatch {
                index: rhs.len(),
                expected: n,
                got: rhs.len(),
            });
        }
        for (index, f) in rhs.iter().enumerate() {
            if f.vars() != &vars {
                return Err(FlowError::DimensionMismatch {
                    index,
                    expected: n,
                    got: f.nvars(),
                });
            }
        }
        Ok(Self {
            vars,
            rhs,
            provenance: provenance.into(),
        })
    }

    /// Parses one expression per variable.
    pub fn parse(exprs: &[&str], vars: &Vars, provenance: impl Into<String>) -> Result<Self, FlowError> {
        let rhs = exprs.iter().map(|e| Poly::parse(e, vars)).collect::<Result<Vec<_>, _>>()?;
        if rhs.len() != vars.len() {
            return Err(FlowError::DimensionMismatch {
                index: rhs.len(),
                expected: vars.len(),
                got: rhs.len(),
            });
        }
        Self::new(rhs, provenance)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn rhs(&self) -> &[Poly] {
        &self.rhs
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn vector_field(&self) -> Result<PolyVector, FlowError> {
        Ok(PolyVector::vector_field(&self.rhs)?)
    }

    /// `Σ ∂f_i/∂x_i`.
    pub fn divergence(&self) -> Poly {
        self.rhs
            .iter()
            .enumerate()
            .fold(Poly::zero(&self.vars), |acc, (i, f)| &acc + &f.d(i))
    }

    /// `dI/dt = Σ ∂I/∂x_i · f_i`; zero iff `I` is conserved.
    pub fn time_derivative(&self, invariant: &Poly) -> Result<Poly, FlowError> {
        derivative_along(self, invariant)
    }
}

/// `Σ ∂p/∂x_i · f_i` for a polynomial in the flow variables followed by any
/// number of parameters, which are held constant. Works in either scalar
/// mode.
pub fn derivative_along<C: Coeff>(flow: &FlowSystem, p: &Polynomial<C>) -> Result<Polynomial<C>, FlowError> {
    let k = flow.dim();
    let vars = p.vars();
    if vars.len() < k || flow.vars().names() != &vars.names()[..k] {
        return Err(FlowError::DimensionMismatch {
            index: 0,
            expected: k,
            got: p.nvars(),
        });
    }
    let mut acc = Polynomial::zero(vars);
    for (i, f) in flow.rhs().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let di = p.d(i);
        if di.is_zero() {
            continue;
        }
        let f = f.embed(vars).map_coeffs(|c| C::from_rational(c.clone()));
        acc = &acc + &(&di * &f);
    }
    Ok(acc)
}

/// `ẋ_i = {H1, …, Hk, x_i}`.
pub fn rhs_from_bracket(system: &HamiltonianSystem) -> Result<FlowSystem, FlowError> {
    let vars = system.vars();
    let rhs = (0..vars.len())
        .map(|i| nambu_bracket(system, &Poly::var(vars, i)))
        .collect::<Result<Vec<_>, _>>()?;
    FlowSystem::new(rhs, format!("bracket:{}", system.label()))
}

/// `ẋ_i = X_h ⌟ dx_i`.
pub fn rhs_from_vector_hamiltonian(h: &VectorHamiltonian) -> Result<FlowSystem, FlowError> {
    let rhs = h.field()?.components()?;
    FlowSystem::new(rhs, "vector-hamiltonian")
}

/// A polynomial lowered to `f64` coefficients for fast evaluation.
#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn new(p: &Poly) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let powers = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as i32))
                    .collect();
                (c.to_f64().unwrap_or(f64::NAN), powers)
            })
            .collect();
        Self { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, powers)| powers.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }
}

/// Sampled solution of a flow.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub method: String,
    pub step: f64,
    pub variables: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Header `t,<vars>`, then one row per sample with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for v in &self.variables {
            out.push(',');
            out.push_str(v);
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t:.16e}"));
            for v in x {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trajectory serializes")
    }
}

/// Classical RK4 with fixed step `dt` from `t = 0` to `t_end`; the last step
/// is shortened to land on `t_end`. State updates use compensated summation
/// so that long runs are not dominated by rounding in `x + Δx`.
pub fn integrate(flow: &FlowSystem, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory, FlowError> {
    let n = flow.dim();
    if x0.len() != n {
        return Err(FlowError::StateLength { expected: n, got: x0.len() });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::InvalidParameters("dt must be positive and finite"));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(FlowError::InvalidParameters("t_end must be positive and finite"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(FlowError::NonFiniteInitial);
    }
    let full_steps = (t_end / dt).floor() as usize;
    let full_steps = if (full_steps as f64) * dt > t_end { full_steps - 1 } else { full_steps };
    let remainder = t_end - full_steps as f64 * dt;
    let partial = remainder > dt * 1e-9;

    let compiled: Vec<CompiledPoly> = flow.rhs().iter().map(CompiledPoly::new).collect();
    let field = |x: &[f64], out: &mut [f64]| {
        for (o, f) in out.iter_mut().zip(&compiled) {
            *o = f.eval(x);
        }
    };

    let capacity = full_steps + 1 + usize::from(partial);
    let mut traj = Trajectory {
        method: "rk4".into(),
        step: dt,
        variables: flow.vars().names().to_vec(),
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
    };
    traj.times.push(0.0);
    traj.states.push(x0.to_vec());

    let mut x = x0.to_vec();
    let mut carry = vec![0.0; n];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];

    let steps = (0..full_steps).map(|s| ((s + 1) as f64 * dt, dt)).chain(partial.then_some((t_end, remainder)));
    for (t_next, h) in steps {
        field(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        field(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        field(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        field(&tmp, &mut k4);
        for i in 0..n {
            let incr = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            let y = incr - carry[i];
            let sum = x[i] + y;
            carry[i] = (sum - x[i]) - y;
            x[i] = sum;
        }
        if x.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP_THRESHOLD) {
            return Err(FlowError::BlowUp {
                time: t_next,
                partial: Box::new(traj),
            });
        }
        traj.times.push(t_next);
        traj.states.push(x.clone());
    }
    Ok(traj)
}

/// Conservation of one function along a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub invariant: String,
    pub initial: f64,
    pub max_drift: f64,
    pub drift: Vec<f64>,
}

/// Evaluates `I` along the samples exactly. Every `f64` is a dyadic
/// rational `m·2^e`, so after scaling all coordinates by a common power of
/// two the polynomial is evaluated in integer arithmetic and
/// `I(x(t)) - I(x(0))` carries no evaluation rounding. The reported drift is
/// the integrator's alone.
pub fn invariant_drift(traj: &Trajectory, invariant: &Poly) -> Result<InvariantReport, FlowError> {
    let n = invariant.nvars();
    for x in &traj.states {
        if x.len() != n {
            return Err(FlowError::StateLength { expected: n, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::NonFiniteInitial);
        }
    }
    let Some(first) = traj.states.first() else {
        return Ok(InvariantReport {
            invariant: invariant.to_string(),
            initial: 0.0,
            max_drift: 0.0,
            drift: Vec::new(),
        });
    };
    let scaled = DyadicPoly::new(invariant);
    let shift = traj
        .states
        .iter()
        .flatten()
        .filter(|v| **v != 0.0)
        .map(|v| v.integer_decode().1)
        .min()
        .unwrap_or(0)
        .min(0);
    let i0 = scaled.numerator(first, shift);
    let denom = scaled.denominator(shift);
    let mut drift = Vec::with_capacity(traj.len());
    for x in &traj.states {
        let d = scaled.numerator(x, shift) - &i0;
        drift.push(if d.is_zero() {
            0.0
        } else {
            Rational::new_raw(d, denom.clone()).to_f64().unwrap_or(f64::INFINITY).abs()
        });
    }
    let max_drift = drift.iter().copied().fold(0.0, f64::max);
    Ok(InvariantReport {
        invariant: invariant.to_string(),
        initial: Rational::new(i0, denom).to_f64().unwrap_or(f64::NAN),
        max_drift,
        drift,
    })
}

/// Integer-coefficient form `P/D` of a rational polynomial.
struct DyadicPoly {
    terms: Vec<(BigInt, Vec<u32>, u32)>,
    common: BigInt,
    max_degree: u32,
}

impl DyadicPoly {
    fn new(p: &Poly) -> Self {
        let common = p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let max_degree = p.degree().unwrap_or(0);
        let terms = p
            .terms()
            .map(|(m, c)| {
                let scaled = c.numer() * (&common / c.denom());
                (scaled, m.exponents().to_vec(), m.degree())
            })
            .collect();
        Self { terms, common, max_degree }
    }

    /// With `x_i = X_i·2^shift`, returns `Σ c_a X^a 2^{-shift·(dmax - |a|)}`.
    fn numerator(&self, x: &[f64], shift: i16) -> BigInt {
        let ints: Vec<BigInt> = x
            .iter()
            .map(|v| {
                if *v == 0.0 {
                    return BigInt::zero();
                }
                let (mantissa, exp, sign) = v.integer_decode();
                let m = BigInt::from(mantissa) << (exp - shift) as usize;
                if sign < 0 {
                    -m
                } else {
                    m
                }
            })
            .collect();
        let lift = (-shift) as usize;
        self.terms.iter().fold(BigInt::zero(), |acc, (c, exps, deg)| {
            let mut t = c.clone();
            for (xi, &e) in ints.iter().zip(exps) {
                if e > 0 {
                    t *= xi.pow(e);
                }
            }
            acc + (t << (lift * (self.max_degree - deg) as usize))
        })
    }

    fn denominator(&self, shift: i16) -> BigInt {
        &self.common << ((-shift) as usize * self.max_degree as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nambu::flow_to_vector_hamiltonian;

    fn xyz() -> Vars {
        Vars::new(&["x", "y", "z"])
    }

    fn p(s: &str) -> Poly {
        Poly::parse(s, &xyz()).unwrap()
    }

    fn solid_body() -> FlowSystem {
        FlowSystem::parse(&["y - z", "z - x", "x - y"], &xyz(), "solid-body").unwrap()
    }

    #[test]
    fn bracket_flows() {
        let sys = HamiltonianSystem::new("solid", vec![p("(x^2+y^2+z^2)/2"), p("x+y+z")]).unwrap();
        let flow = rhs_from_bracket(&sys).unwrap();
        assert_eq!(flow.rhs(), solid_body().rhs());
        let sys = HamiltonianSystem::new("ishii", vec![p("x*z - y^2/2 - x^3/3"), p("x^2/2 - z")]).unwrap();
        assert_eq!(rhs_from_bracket(&sys).unwrap().rhs(), &[p("y"), p("z"), p("x*y")]);
        let sys = HamiltonianSystem::new("const", vec![p("2"), p("-1/3")]).unwrap();
        assert!(rhs_from_bracket(&sys).unwrap().rhs().iter().all(Poly::is_zero));
    }

    #[test]
    fn bracket_and_vector_hamiltonian_routes_agree() {
        let sys = HamiltonianSystem::new("ishii", vec![p("x*z - y^2/2 - x^3/3"), p("x^2/2 - z")]).unwrap();
        let flow = rhs_from_bracket(&sys).unwrap();
        let h = flow_to_vector_hamiltonian(&flow.vector_field().unwrap()).unwrap();
        assert_eq!(rhs_from_vector_hamiltonian(&h).unwrap().rhs(), flow.rhs());
    }

    #[test]
    fn divergence_examples() {
        assert!(solid_body().divergence().is_zero());
        let ishii = FlowSystem::parse(&["y", "z", "x*y"], &xyz(), "ishii").unwrap();
        assert!(ishii.divergence().is_zero());
        let stretch = FlowSystem::parse(&["x", "y", "z"], &xyz(), "stretch").unwrap();
        assert_eq!(stretch.divergence(), p("3"));
    }

    #[test]
    fn time_derivative_detects_invariants() {
        let flow = solid_body();
        assert!(flow.time_derivative(&p("x + y + z")).unwrap().is_zero());
        assert!(flow.time_derivative(&p("x^2 + y^2 + z^2")).unwrap().is_zero());
        assert_eq!(flow.time_derivative(&p("x")).unwrap(), p("y - z"));
    }

    #[test]
    fn zero_flow_is_constant() {
        let flow = FlowSystem::parse(&["0", "0", "0"], &xyz(), "zero").unwrap();
        let traj = integrate(&flow, &[1.0, 2.0, 3.0], 1.0, 0.3).unwrap();
        assert_eq!(traj.times.len(), 5);
        assert!((traj.times[4] - 1.0).abs() < 1e-15);
        assert!(traj.states.iter().all(|s| s == &[1.0, 2.0, 3.0]));
        let report = invariant_drift(&traj, &p("x*y + z^3")).unwrap();
        assert_eq!(report.max_drift, 0.0);
    }

    #[test]
    fn solid_body_linear_invariant_holds() {
        let traj = integrate(&solid_body(), &[1.0, 0.0, 0.0], 10.0, 1e-3).unwrap();
        assert_eq!(traj.len(), 10_001);
        assert_eq!(*traj.times.last().unwrap(), 10.0);
        assert!(traj.states.iter().all(|s| (s.iter().sum::<f64>() - 1.0).abs() < 1e-10));
        let quad = invariant_drift(&traj, &p("3/2*(x^2 + y^2 + z^2)")).unwrap();
        assert!(quad.max_drift < 1e-8, "{}", quad.max_drift);
        let control = invariant_drift(&traj, &p("x")).unwrap();
        assert!(control.max_drift > 0.5);
    }

    #[test]
    fn ishii_invariant_holds() {
        let ishii = FlowSystem::parse(&["y", "z", "x*y"], &xyz(), "ishii").unwrap();
        let traj = integrate(&ishii, &[1.0, 1.0, 1.0], 2.0, 1e-4).unwrap();
        let report = invariant_drift(&traj, &p("x^2/2 - z")).unwrap();
        assert_eq!(report.initial, -0.5);
        assert!(report.max_drift < 1e-8);
    }

    #[test]
    fn blow_up_is_reported_with_partial_trajectory() {
        let v = Vars::new(&["x"]);
        let flow = FlowSystem::parse(&["x^2"], &v, "riccati").unwrap();
        match integrate(&flow, &[1.0], 2.0, 1e-3) {
            Err(FlowError::BlowUp { time, partial }) => {
                assert!(time > 0.99 && time < 1.01, "{time}");
                assert!(!partial.is_empty());
                assert!(partial.times.windows(2).all(|w| w[0] < w[1]));
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn parameter_errors() {
        let flow = solid_body();
        assert!(matches!(integrate(&flow, &[1.0], 1.0, 0.1), Err(FlowError::StateLength { .. })));
        assert!(matches!(integrate(&flow, &[0.0; 3], 1.0, 0.0), Err(FlowError::InvalidParameters(_))));
        assert!(matches!(integrate(&flow, &[0.0; 3], -1.0, 0.1), Err(FlowError::InvalidParameters(_))));
        assert!(matches!(integrate(&flow, &[f64::NAN, 0.0, 0.0], 1.0, 0.1), Err(FlowError::NonFiniteInitial)));
    }

    #[test]
    fn csv_layout() {
        let v = Vars::new(&["x"]);
        let flow = FlowSystem::parse(&["0"], &v, "zero").unwrap();
        let traj = integrate(&flow, &[0.5], 1.0, 1.0).unwrap();
        assert_eq!(
            traj.to_csv(),
            "t,x\n0.0000000000000000e0,5.0000000000000000e-1\n1.0000000000000000e0,5.0000000000000000e-1\n"
        );
    }
}
