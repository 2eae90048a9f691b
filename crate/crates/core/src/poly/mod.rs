//! Exact multivariate polynomials over the rationals (or Gaussian rationals).
//!
//! Terms live in a `BTreeMap` keyed by graded-lex [`Monomial`]s with no
//! stored zeros, so structural equality is mathematical equality. That is
//! what every "residual is the zero polynomial" check in this crate relies on.

mod monomial;
mod parse;
mod random;
mod scalar;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

pub use monomial::Monomial;
pub use random::random_poly;
pub use scalar::{rat, Coeff, GaussianRational, Rational};

pub(crate) use scalar::rational_to_f64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("exponent at {pos} must be a nonnegative integer literal")]
    BadExponent { pos: usize },
    #[error("division at {pos} by a non-constant or zero expression")]
    BadDivision { pos: usize },
}

/// Ordered table of variable names, shared between polynomials.
#[derive(Clone, Debug)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Vars(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    /// `x0, x1, …, x{n-1}`.
    pub fn indexed(prefix: &str, n: usize) -> Self {
        Vars((0..n).map(|i| format!("{prefix}{i}")).collect())
    }

    /// `x, y, z` for three variables, `x0…` otherwise.
    /// `x`, `(x, y)` or `(x, y, z)` up to three variables, `x0, x1, …` beyond.
    pub fn default_for(n: usize) -> Self {
        if n <= 3 {
            Vars::new(&["x", "y", "z"][..n])
        } else {
            Vars::indexed("x", n)
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }

    /// The same table with one extra variable appended.
    pub fn extended(&self, name: &str) -> Vars {
        let mut names = self.0.to_vec();
        names.push(name.to_string());
        Vars(names.into())
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Vars {}

/// Exact multivariate polynomial.
#[derive(Clone, Debug)]
pub struct Polynomial<C: Coeff = Rational> {
    vars: Vars,
    terms: BTreeMap<Monomial, C>,
}

/// Polynomial with rational coefficients, the default mode.
pub type Poly = Polynomial<Rational>;

impl<C: Coeff> PartialEq for Polynomial<C> {
    fn eq(&self, other: &Self) -> bool {
        self.vars.len() == other.vars.len() && self.terms == other.terms
    }
}

impl<C: Coeff> Eq for Polynomial<C> {}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(vars: &Vars) -> Self {
        Self {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: C) -> Self {
        Self::monomial(vars, Monomial::one(vars.len()), c)
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, C::one())
    }

    pub fn from_i64(vars: &Vars, v: i64) -> Self {
        Self::constant(vars, C::from_i64(v))
    }

    /// The coordinate function `x_index`.
    pub fn var(vars: &Vars, index: usize) -> Self {
        assert!(index < vars.len(), "variable index out of range");
        Self::monomial(vars, Monomial::var(vars.len(), index), C::one())
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: C) -> Self {
        assert_eq!(m.nvars(), vars.len(), "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), vars.len(), "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&Monomial::one(self.nvars()))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars() != other.nvars() {
            return Err(PolyError::DimensionMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to `x_index`.
    pub fn derivative(&self, index: usize) -> Result<Self, PolyError> {
        if index >= self.nvars() {
            return Err(PolyError::IndexOutOfRange {
                index,
                nvars: self.nvars(),
            });
        }
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            if e > 0 {
                out.add_term(m.lowered(index), c.clone() * C::from_i64(i64::from(e)));
            }
        }
        Ok(out)
    }

    /// Partial derivative for an index already known to be in range.
    pub fn d(&self, index: usize) -> Self {
        self.derivative(index).expect("derivative index in range")
    }

    /// Exact evaluation at a point.
    pub fn eval(&self, point: &[C]) -> Result<C, PolyError> {
        self.eval_with(point, C::zero(), |c| c.clone())
    }

    /// Evaluation in double-precision complex arithmetic.
    pub fn eval_c64(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        self.eval_with(point, Complex64::zero(), C::to_c64)
    }

    /// Nested (Horner) evaluation, one variable at a time.
    fn eval_with<T>(&self, point: &[T], zero: T, lift: impl Fn(&C) -> T) -> Result<T, PolyError>
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
    {
        if point.len() != self.nvars() {
            return Err(PolyError::LengthMismatch {
                expected: self.nvars(),
                got: point.len(),
            });
        }
        let terms: Vec<(&[u32], T)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.exponents(), lift(c)))
            .collect();
        Ok(horner(&terms, 0, point, &zero))
    }

    /// Re-expresses the polynomial over a larger variable table whose first
    /// `self.nvars()` names are the current variables.
    pub fn embed(&self, vars: &Vars) -> Self {
        assert!(vars.len() >= self.nvars(), "cannot embed into a smaller space");
        Self {
            vars: vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.padded(vars.len()), c.clone()))
                .collect(),
        }
    }

    /// Same terms, different names for the same number of variables.
    pub fn with_vars(&self, vars: &Vars) -> Self {
        assert_eq!(vars.len(), self.nvars(), "renaming must keep the arity");
        Self {
            vars: vars.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Maps every coefficient into another scalar mode.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(&self.vars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub(crate) fn times_var(&self, index: usize) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.raised(index), c.clone())).collect(),
        }
    }
}

impl Poly {
    pub fn from_rational(vars: &Vars, r: Rational) -> Self {
        Self::constant(vars, r)
    }

    /// Evaluation in double precision.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, PolyError> {
        self.eval_with(point, 0.0, rational_to_f64)
    }
}

fn horner<T>(terms: &[(&[u32], T)], var: usize, point: &[T], zero: &T) -> T
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
{
    if terms.is_empty() {
        return zero.clone();
    }
    if var == point.len() {
        return terms.iter().fold(zero.clone(), |acc, (_, c)| acc + c.clone());
    }
    // Group by the exponent of `var`, then evaluate the univariate
    // polynomial in x_var whose coefficients are the groups.
    let max = terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0);
    let mut acc = zero.clone();
    for power in (0..=max).rev() {
        let group: Vec<(&[u32], T)> = terms
            .iter()
            .filter(|(e, _)| e[var] == power)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        let inner = horner(&group, var + 1, point, zero);
        acc = acc * point[var].clone() + inner;
    }
    acc
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<C: Coeff> $tr<&Polynomial<C>> for &Polynomial<C> {
            type Output = Polynomial<C>;
            /// Panics on a dimension mismatch; use the `checked_*` form to recover.
            fn $method(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<C: Coeff> $tr<Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: Coeff> $tr<&Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                (&self).$method(rhs)
            }
        }
        impl<C: Coeff> $tr<Polynomial<C>> for &Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: Polynomial<C>) -> Polynomial<C> {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<C: Coeff> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial, vars: &Vars) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(&vars.names()[i])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text: explicit `*` and `^`, terms in descending graded-lex order.
impl<C: Coeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = if negative { -c.clone() } else { c.clone() };
            match (k == 0, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            let (text, paren) = mag.render();
            if m.is_one() {
                if paren {
                    write!(f, "({text})")?;
                } else {
                    f.write_str(&text)?;
                }
            } else {
                if !mag.is_one() {
                    if paren {
                        write!(f, "({text})*")?;
                    } else {
                        write!(f, "{text}*")?;
                    }
                }
                write_monomial(f, m, &self.vars)?;
            }
        }
        Ok(())
    }
}

/// Builds an exact rational from an integer.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}
