//! Lax pairs `dL/dt = [M, L]` with polynomial matrix entries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::flows::{derivative_along, FlowSystem};
use crate::poly::{Coeff, PolyError, Polynomial, Rational, Vars};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaxError {
    #[error("matrix rows have unequal lengths or the matrix is not square")]
    NotSquare,
    #[error("matrix is empty")]
    Empty,
    #[error("matrix sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("entries live in different variable sets")]
    VariableMismatch,
    #[error("flow variables must be the leading variables of the matrix entries")]
    FlowVariables,
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("sample has {got} coordinates, expected {expected}")]
    SampleLength { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Square matrix of polynomials sharing one variable table, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<C: Coeff = Rational> {
    size: usize,
    vars: Vars,
    entries: Vec<Polynomial<C>>,
}

impl<C: Coeff> PolyMatrix<C> {
    pub fn new(rows: Vec<Vec<Polynomial<C>>>) -> Result<Self, LaxError> {
        let size = rows.len();
        if size == 0 {
            return Err(LaxError::Empty);
        }
        if rows.iter().any(|r| r.len() != size) {
            return Err(LaxError::NotSquare);
        }
        let vars = rows[0][0].vars().clone();
        let entries: Vec<_> = rows.into_iter().flatten().collect();
        if entries.iter().any(|e| e.vars() != &vars) {
            return Err(LaxError::VariableMismatch);
        }
        Ok(Self { size, vars, entries })
    }

    /// Row-major grid of expression strings.
    pub fn parse<S: AsRef<str>>(rows: &[Vec<S>], vars: &Vars) -> Result<Self, LaxError> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|e| Polynomial::parse(e.as_ref(), vars)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(parsed)
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> Polynomial<C>) -> Result<Self, LaxError> {
        Self::new((0..size).map(|r| (0..size).map(|c| f(r, c)).collect()).collect())
    }

    pub fn zero(size: usize, vars: &Vars) -> Self {
        Self {
            size,
            vars: vars.clone(),
            entries: vec![Polynomial::zero(vars); size * size],
        }
    }

    pub fn identity(size: usize, vars: &Vars) -> Self {
        let mut m = Self::zero(size, vars);
        for i in 0..size {
            m.entries[i * size + i] = Polynomial::one(vars);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn get(&self, row: usize, col: usize) -> &Polynomial<C> {
        &self.entries[row * self.size + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Polynomial<C>]> {
        self.entries.chunks(self.size)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), LaxError> {
        if self.size != other.size {
            return Err(LaxError::SizeMismatch {
                left: self.size,
                right: other.size,
            });
        }
        if self.vars != other.vars {
            return Err(LaxError::VariableMismatch);
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(&Polynomial<C>) -> Polynomial<C>) -> Self {
        Self {
            size: self.size,
            vars: self.vars.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaxError> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = &*a + b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaxError> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = &*a - b;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaxError> {
        self.check(other)?;
        let n = self.size;
        let mut out = Self::zero(n, &self.vars);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Polynomial::zero(&self.vars);
                for k in 0..n {
                    let (a, b) = (self.get(r, k), other.get(k, c));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.entries[r * n + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|e| e.scale(c))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self, LaxError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn trace(&self) -> Polynomial<C> {
        (0..self.size).fold(Polynomial::zero(&self.vars), |acc, i| &acc + self.get(i, i))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.size, &self.vars);
        for _ in 0..k {
            out = out.mul(self).expect("same shape");
        }
        out
    }

    /// Entries rewritten over a table that extends the current one.
    pub fn embed(&self, vars: &Vars) -> Self {
        Self {
            size: self.size,
            vars: vars.clone(),
            entries: self.entries.iter().map(|e| e.embed(vars)).collect(),
        }
    }

    /// Entrywise derivative along a flow whose variables are the leading
    /// variables of this matrix; any further variables are held constant.
    pub fn flow_derivative(&self, flow: &FlowSystem) -> Result<Self, LaxError> {
        let entries = self
            .entries
            .iter()
            .map(|e| derivative_along(flow, e).map_err(|_| LaxError::FlowVariables))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            size: self.size,
            vars: self.vars.clone(),
            entries,
        })
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Result<DMatrix<Complex64>, LaxError> {
        if point.len() != self.vars.len() {
            return Err(LaxError::SampleLength {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let vals = self.entries.iter().map(|e| e.eval_c64(point)).collect::<Result<Vec<_>, _>>()?;
        Ok(DMatrix::from_row_slice(self.size, self.size, &vals))
    }
}

impl<C: Coeff> std::fmt::Display for PolyMatrix<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("[")?;
        for (r, row) in self.rows().enumerate() {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (c, e) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// `L`, `M` and the flow along which `dL/dt = [M, L]` should hold.
#[derive(Clone, Debug)]
pub struct LaxPair<C: Coeff = Rational> {
    pub l: PolyMatrix<C>,
    pub m: PolyMatrix<C>,
    pub flow: FlowSystem,
}

impl<C: Coeff> LaxPair<C> {
    pub fn new(l: PolyMatrix<C>, m: PolyMatrix<C>, flow: FlowSystem) -> Result<Self, LaxError> {
        l.check(&m)?;
        if l.vars().len() != flow.dim() {
            return Err(LaxError::FlowVariables);
        }
        Ok(Self { l, m, flow })
    }
}

/// `dL/dt - [M, L]`, exactly. The zero matrix certifies the pair.
pub fn lax_residual<C: Coeff>(pair: &LaxPair<C>) -> Result<PolyMatrix<C>, LaxError> {
    pair.l.flow_derivative(&pair.flow)?.sub(&pair.m.commutator(&pair.l)?)
}

/// `(1/k) tr L^k`.
pub fn trace_invariant<C: Coeff>(l: &PolyMatrix<C>, k: u32) -> Result<Polynomial<C>, LaxError> {
    if k == 0 {
        return Err(LaxError::ZeroPower);
    }
    let tr = l.pow(k).trace();
    Ok(tr.scale(&C::from_rational(Rational::new(1.into(), k.into()))))
}

/// A Lax pair whose entries involve constants available only in floating
/// point. `L` is polynomial in the flow variables followed by parameters;
/// `M` is a constant complex matrix.
#[derive(Clone, Debug)]
pub struct SampledLaxPair {
    pub l: PolyMatrix,
    pub m: DMatrix<Complex64>,
    pub flow: FlowSystem,
    /// Values of the trailing parameter variables of `L`.
    pub parameters: Vec<Complex64>,
}

impl SampledLaxPair {
    /// Largest entry of `|dL/dt - [M, L]|` over the sample states.
    pub fn max_residual(&self, samples: &[Vec<f64>]) -> Result<f64, LaxError> {
        let dl = self.l.flow_derivative(&self.flow)?;
        let n = self.flow.dim();
        let mut worst = 0.0f64;
        for s in samples {
            if s.len() != n {
                return Err(LaxError::SampleLength { expected: n, got: s.len() });
            }
            let point: Vec<Complex64> = s
                .iter()
                .map(|v| Complex64::new(*v, 0.0))
                .chain(self.parameters.iter().copied())
                .collect();
            let l = self.l.eval_c64(&point)?;
            let lhs = dl.eval_c64(&point)?;
            let rhs = &self.m * &l - &l * &self.m;
            let err = (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(err);
        }
        Ok(worst)
    }

    /// `(1/k) tr L^k` evaluated at a state.
    pub fn trace_invariant_at(&self, k: u32, state: &[f64]) -> Result<Complex64, LaxError> {
        if k == 0 {
            return Err(LaxError::ZeroPower);
        }
        let point: Vec<Complex64> = state
            .iter()
            .map(|v| Complex64::new(*v, 0.0))
            .chain(self.parameters.iter().copied())
            .collect();
        let l = self.l.eval_c64(&point)?;
        let mut acc = l.clone();
        for _ in 1..k {
            acc = &acc * &l;
        }
        Ok(acc.trace() / k as f64)
    }
}

/// The constant matrix `J` of a linear flow `ẋ = Jx`, if the flow is linear.
pub fn linear_flow_matrix(flow: &FlowSystem) -> Option<PolyMatrix> {
    let vars = flow.vars();
    let n = vars.len();
    let mut rows = Vec::with_capacity(n);
    for f in flow.rhs() {
        if f.terms().any(|(m, _)| m.degree() != 1) {
            return None;
        }
        rows.push(
            (0..n)
                .map(|j| Polynomial::constant(vars, f.d(j).constant_term()))
                .collect::<Vec<_>>(),
        );
    }
    PolyMatrix::new(rows).ok()
}
