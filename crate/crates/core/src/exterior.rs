//! Differential forms and polyvector fields with polynomial coefficients.
//!
//! Both are sparse maps from strictly increasing index tuples to
//! polynomials. A form over `n` variables of degree `k` is written
//! `Σ ω_I dx_I`, a polyvector `Σ X_I e_I` with `e_i = ∂/∂x_i`.
//!
//! Contraction inserts the factors of a decomposable polyvector left to
//! right, each into the result of the previous insertion:
//! `(v1 ∧ v2) ⌟ ω = v2 ⌟ (v1 ⌟ ω)`. With this convention
//! `(e1 ∧ e2) ⌟ (dx0 ∧ dx1 ∧ dx2) = +dx0`.
//!
//! Extended phase space (with time) is just one more variable; `dt` is the
//! last `dx`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_traits::One;
use thiserror::Error;

use crate::poly::{Poly, Rational, Vars};

/// Largest ambient dimension representable by an [`IndexTuple`].
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExteriorError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree overflow: {degree} exceeds dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("cannot contract a degree-{vector} polyvector into a degree-{form} form")]
    DegreeUnderflow { vector: usize, form: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("form is not closed; d(form) = {residual}")]
    NotClosed { residual: DiffForm },
    #[error("homotopy operator needs a form of degree at least 1")]
    ZeroDegree,
    #[error("expected a vector field (degree 1), got degree {0}")]
    NotAVectorField(usize),
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
}

/// Strictly increasing list of variable indices, stored as a bit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexTuple(u64);

impl IndexTuple {
    pub const EMPTY: IndexTuple = IndexTuple(0);

    /// From strictly increasing indices.
    pub fn new(indices: &[usize]) -> Option<Self> {
        let mut bits = 0u64;
        let mut last: Option<usize> = None;
        for &i in indices {
            if i >= MAX_DIM || last.is_some_and(|l| l >= i) {
                return None;
            }
            bits |= 1 << i;
            last = Some(i);
        }
        Some(IndexTuple(bits))
    }

    pub fn single(i: usize) -> Self {
        IndexTuple(1 << i)
    }

    /// All indices `0..n`.
    pub fn full(n: usize) -> Self {
        if n == 64 {
            IndexTuple(u64::MAX)
        } else {
            IndexTuple((1u64 << n) - 1)
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn insert(self, i: usize) -> Self {
        IndexTuple(self.0 | 1 << i)
    }

    pub fn remove(self, i: usize) -> Self {
        IndexTuple(self.0 & !(1 << i))
    }

    /// Indices of `0..n` not in the tuple.
    pub fn complement(self, n: usize) -> Self {
        IndexTuple(IndexTuple::full(n).0 & !self.0)
    }

    /// Number of members strictly below `i`.
    pub fn count_below(self, i: usize) -> usize {
        (self.0 & ((1u64 << i) - 1)).count_ones() as usize
    }

    /// Sign of `dx_self ∧ dx_other` relative to the sorted union, or `None`
    /// if the tuples overlap.
    pub fn wedge_sign(self, other: IndexTuple) -> Option<i32> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0usize;
        for j in other.indices() {
            swaps += self.len() - self.count_below(j);
        }
        Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
    }

    pub fn union(self, other: IndexTuple) -> Self {
        IndexTuple(self.0 | other.0)
    }

    /// All tuples of length `k` drawn from `0..n`, in ascending order.
    pub fn all_of_len(n: usize, k: usize) -> Vec<IndexTuple> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<IndexTuple>) {
            if cur.len() == k {
                out.push(IndexTuple::new(cur).expect("increasing"));
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        if k <= n {
            rec(0, n, k, &mut current, &mut out);
        }
        out
    }
}

impl Ord for IndexTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        // Same length: lexicographic on the ascending index lists, which is
        // decided by the lowest bit where the two sets differ.
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & diff & diff.wrapping_neg() != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for IndexTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub trait Variance: Clone + fmt::Debug + Send + Sync + 'static {
    /// Basis symbol used in the text rendering (`dx` or `e`).
    const SYMBOL: &'static str;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covariant;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contravariant;

impl Variance for Covariant {
    const SYMBOL: &'static str = "d";
}

impl Variance for Contravariant {
    const SYMBOL: &'static str = "∂";
}

/// Homogeneous antisymmetric tensor field with polynomial coefficients.
#[derive(Clone, Debug)]
pub struct Graded<V: Variance> {
    degree: usize,
    vars: Vars,
    terms: BTreeMap<IndexTuple, Poly>,
    _variance: PhantomData<V>,
}

/// A differential `k`-form.
pub type DiffForm = Graded<Covariant>;

/// A `k`-vector field.
pub type PolyVector = Graded<Contravariant>;

impl<V: Variance> PartialEq for Graded<V> {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.dim() == other.dim() && self.terms == other.terms
    }
}

impl<V: Variance> Graded<V> {
    pub fn zero(degree: usize, vars: &Vars) -> Self {
        Self {
            degree,
            vars: vars.clone(),
            terms: BTreeMap::new(),
            _variance: PhantomData,
        }
    }

    /// Builds from `(indices, coefficient)` pairs. Indices may be in any
    /// order; they are sorted with the matching sign, and repeated indices
    /// make the term vanish.
    pub fn from_terms<'a>(
        degree: usize,
        vars: &Vars,
        terms: impl IntoIterator<Item = (&'a [usize], Poly)>,
    ) -> Result<Self, ExteriorError> {
        let n = vars.len();
        if degree > n {
            return Err(ExteriorError::DegreeOverflow { degree, dim: n });
        }
        let mut out = Self::zero(degree, vars);
        for (indices, coeff) in terms {
            if indices.len() != degree {
                return Err(ExteriorError::WrongDegree {
                    expected: degree,
                    got: indices.len(),
                });
            }
            if coeff.nvars() != n {
                return Err(ExteriorError::DimensionMismatch { left: n, right: coeff.nvars() });
            }
            let mut acc = IndexTuple::EMPTY;
            let mut sign = 1;
            for &i in indices {
                if i >= n {
                    return Err(ExteriorError::IndexOutOfRange { index: i, dim: n });
                }
                match acc.wedge_sign(IndexTuple::single(i)) {
                    Some(s) => sign *= s,
                    None => {
                        sign = 0;
                        break;
                    }
                }
                acc = acc.insert(i);
            }
            if sign != 0 {
                out.add_term(acc, if sign > 0 { coeff } else { -coeff });
            }
        }
        Ok(out)
    }

    /// The basis element with coefficient one.
    pub fn basis(indices: &[usize], vars: &Vars) -> Result<Self, ExteriorError> {
        Self::from_terms(indices.len(), vars, [(indices, Poly::one(vars))])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexTuple, &Poly)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, tuple: IndexTuple) -> Poly {
        self.terms.get(&tuple).cloned().unwrap_or_else(|| Poly::zero(&self.vars))
    }

    /// Coefficient of the (possibly unsorted) basis element `indices`,
    /// including the permutation sign.
    pub fn component(&self, indices: &[usize]) -> Poly {
        match Self::basis(indices, &self.vars) {
            Ok(b) => match b.terms.iter().next() {
                Some((t, s)) => &self.coefficient(*t) * s,
                None => Poly::zero(&self.vars),
            },
            Err(_) => Poly::zero(&self.vars),
        }
    }

    pub(crate) fn add_term(&mut self, tuple: IndexTuple, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&tuple) {
            Some(old) => {
                let sum = &old + &coeff;
                if !sum.is_zero() {
                    self.terms.insert(tuple, sum);
                }
            }
            None => {
                self.terms.insert(tuple, coeff);
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), ExteriorError> {
        if self.dim() != other.dim() {
            return Err(ExteriorError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if self.degree != other.degree {
            return Err(ExteriorError::WrongDegree {
                expected: self.degree,
                got: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(*t, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(*t, -c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    /// Multiplies every coefficient by a function.
    pub fn scale(&self, f: &Poly) -> Self {
        self.map(|c| c * f)
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }

    fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        let mut out = Self::zero(self.degree, &self.vars);
        for (t, c) in &self.terms {
            out.add_term(*t, f(c));
        }
        out
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self, ExteriorError> {
        if self.dim() != other.dim() {
            return Err(ExteriorError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim() {
            return Err(ExteriorError::DegreeOverflow { degree, dim: self.dim() });
        }
        let mut out = Self::zero(degree, &self.vars);
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                if let Some(sign) = ta.wedge_sign(*tb) {
                    let prod = ca * cb;
                    out.add_term(ta.union(*tb), if sign > 0 { prod } else { -prod });
                }
            }
        }
        Ok(out)
    }

    /// Re-expresses the tensor over a larger variable table whose leading
    /// variables are the current ones.
    pub fn embed(&self, vars: &Vars) -> Self {
        let mut out = Self::zero(self.degree, vars);
        for (t, c) in &self.terms {
            out.add_term(*t, c.embed(vars));
        }
        out
    }

    /// The coefficient of a degree-0 tensor.
    pub fn as_function(&self) -> Option<Poly> {
        (self.degree == 0).then(|| self.coefficient(IndexTuple::EMPTY))
    }

    pub fn function(f: Poly) -> Self {
        let vars = f.vars().clone();
        let mut out = Self::zero(0, &vars);
        out.add_term(IndexTuple::EMPTY, f);
        out
    }
}

impl DiffForm {
    /// `dx_i`.
    pub fn dx(i: usize, vars: &Vars) -> Self {
        Self::basis(&[i], vars).expect("index in range")
    }

    /// The volume form `dx0 ∧ … ∧ dx_{n-1}`.
    pub fn volume(vars: &Vars) -> Self {
        let all: Vec<usize> = (0..vars.len()).collect();
        Self::basis(&all, vars).expect("volume form")
    }

    /// `df` as a 1-form.
    pub fn differential(f: &Poly) -> Self {
        let vars = f.vars().clone();
        let mut out = Self::zero(1, &vars);
        for i in 0..vars.len() {
            out.add_term(IndexTuple::single(i), f.d(i));
        }
        out
    }

    /// 1-form `Σ c_i dx_i` from its components.
    pub fn one_form(components: &[Poly]) -> Result<Self, ExteriorError> {
        let vars = components.first().map(|c| c.vars().clone()).ok_or(ExteriorError::WrongDegree {
            expected: 1,
            got: 0,
        })?;
        if components.len() != vars.len() {
            return Err(ExteriorError::DimensionMismatch {
                left: vars.len(),
                right: components.len(),
            });
        }
        let mut out = Self::zero(1, &vars);
        for (i, c) in components.iter().enumerate() {
            out.add_term(IndexTuple::single(i), c.clone());
        }
        Ok(out)
    }

    /// Exterior derivative. The derivative of a top-degree form is the empty
    /// form of degree `n + 1`.
    pub fn d(&self) -> DiffForm {
        let n = self.dim();
        let mut out = DiffForm {
            degree: self.degree + 1,
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
            _variance: PhantomData,
        };
        for (t, c) in &self.terms {
            for i in 0..n {
                if t.contains(i) {
                    continue;
                }
                let dc = c.d(i);
                if dc.is_zero() {
                    continue;
                }
                // dx_i ∧ dx_t: move dx_i past the members of t below i.
                let sign_negative = t.count_below(i) % 2 == 1;
                out.add_term(t.insert(i), if sign_negative { -dc } else { dc });
            }
        }
        out
    }

    /// Radial homotopy operator: a primitive of a closed form on `R^n`.
    ///
    /// Each term `c x^α dx_J` with `|α| = d`, `|J| = k` maps to
    /// `c x^α (E ⌟ dx_J) / (d + k)` where `E = Σ x_i ∂_i`. When
    /// `require_closed` is set the input is first checked to satisfy `dω = 0`.
    pub fn homotopy(&self, require_closed: bool) -> Result<DiffForm, ExteriorError> {
        if self.degree == 0 {
            return Err(ExteriorError::ZeroDegree);
        }
        if require_closed {
            let residual = self.d();
            if !residual.is_zero() {
                return Err(ExteriorError::NotClosed { residual });
            }
        }
        let mut out = DiffForm::zero(self.degree - 1, &self.vars);
        for (t, c) in &self.terms {
            let k = t.len();
            for (m, a) in c.terms() {
                let weight = homotopy_weight(m.degree(), k);
                let term = Poly::monomial(&self.vars, m.clone(), a * &weight);
                for (p, i) in t.indices().enumerate() {
                    let contracted = term.times_var(i);
                    out.add_term(t.remove(i), if p % 2 == 0 { contracted } else { -contracted });
                }
            }
        }
        Ok(out)
    }
}

impl PolyVector {
    /// `∂/∂x_i`.
    pub fn e(i: usize, vars: &Vars) -> Self {
        Self::basis(&[i], vars).expect("index in range")
    }

    /// Vector field `Σ f_i ∂_i` from its components.
    pub fn vector_field(components: &[Poly]) -> Result<Self, ExteriorError> {
        let vars = components.first().map(|c| c.vars().clone()).ok_or(ExteriorError::WrongDegree {
            expected: 1,
            got: 0,
        })?;
        if components.len() != vars.len() {
            return Err(ExteriorError::DimensionMismatch {
                left: vars.len(),
                right: components.len(),
            });
        }
        let mut out = Self::zero(1, &vars);
        for (i, c) in components.iter().enumerate() {
            out.add_term(IndexTuple::single(i), c.clone());
        }
        Ok(out)
    }

    /// Components of a degree-1 field, one per variable.
    pub fn components(&self) -> Result<Vec<Poly>, ExteriorError> {
        if self.degree != 1 {
            return Err(ExteriorError::NotAVectorField(self.degree));
        }
        Ok((0..self.dim()).map(|i| self.coefficient(IndexTuple::single(i))).collect())
    }

    /// Divergence `Σ ∂_i X_i` of a vector field.
    pub fn divergence(&self) -> Result<Poly, ExteriorError> {
        let comps = self.components()?;
        Ok(comps
            .iter()
            .enumerate()
            .fold(Poly::zero(&self.vars), |acc, (i, c)| &acc + &c.d(i)))
    }
}

/// Sign and remainder of inserting the ascending indices of `vector` into
/// `dx_form`, innermost first. `None` when the contraction vanishes.
pub fn contract_basis(vector: IndexTuple, form: IndexTuple) -> Option<(i32, IndexTuple)> {
    let mut rest = form;
    let mut sign = 1;
    for c in vector.indices() {
        if !rest.contains(c) {
            return None;
        }
        if rest.count_below(c) % 2 == 1 {
            sign = -sign;
        }
        rest = rest.remove(c);
    }
    Some((sign, rest))
}

/// Interior product `X ⌟ ω`.
pub fn contract(x: &PolyVector, form: &DiffForm) -> Result<DiffForm, ExteriorError> {
    if x.dim() != form.dim() {
        return Err(ExteriorError::DimensionMismatch {
            left: x.dim(),
            right: form.dim(),
        });
    }
    if x.degree() > form.degree() {
        return Err(ExteriorError::DegreeUnderflow {
            vector: x.degree(),
            form: form.degree(),
        });
    }
    let mut out = DiffForm::zero(form.degree() - x.degree(), form.vars());
    for (tv, cv) in x.terms() {
        for (tf, cf) in form.terms() {
            if let Some((sign, rest)) = contract_basis(tv, tf) {
                let prod = cv * cf;
                out.add_term(rest, if sign > 0 { prod } else { -prod });
            }
        }
    }
    Ok(out)
}

/// Lie derivative along a vector field, by Cartan's formula
/// `L_X ω = X ⌟ dω + d(X ⌟ ω)`.
pub fn lie_derivative(x: &PolyVector, form: &DiffForm) -> Result<DiffForm, ExteriorError> {
    if x.degree() != 1 {
        return Err(ExteriorError::NotAVectorField(x.degree()));
    }
    let dw = form.d();
    let first = if dw.degree() > dw.dim() {
        DiffForm::zero(form.degree(), form.vars())
    } else {
        contract(x, &dw)?
    };
    if form.degree() == 0 {
        return Ok(first);
    }
    let second = contract(x, form)?.d();
    first.add(&second)
}

impl<V: Variance> fmt::Display for Graded<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let one = Poly::one(&self.vars);
        let names = self.vars.names();
        for (k, (t, c)) in self.terms.iter().enumerate() {
            let negative_unit = *c == -&one;
            match (k, negative_unit) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if t.is_empty() {
                write!(f, "{c}")?;
                continue;
            }
            let basis = t
                .indices()
                .map(|i| format!("{}{}", V::SYMBOL, names[i]))
                .collect::<Vec<_>>()
                .join("^");
            if *c == one || negative_unit {
                f.write_str(&basis)?;
            } else {
                write!(f, "({c})*{basis}")?;
            }
        }
        Ok(())
    }
}

/// Weight `1/(d+k)` the homotopy operator gives a degree-`d` monomial on a
/// `k`-form basis element.
pub fn homotopy_weight(poly_degree: u32, form_degree: usize) -> Rational {
    Rational::one() / Rational::from_integer((poly_degree as i64 + form_degree as i64).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn xyz() -> Vars {
        Vars::new(&["x", "y", "z"])
    }

    fn p(s: &str) -> Poly {
        Poly::parse(s, &xyz()).unwrap()
    }

    fn form2(vars: &Vars, terms: &[(&[usize], &str)]) -> DiffForm {
        DiffForm::from_terms(2, vars, terms.iter().map(|(i, c)| (*i, Poly::parse(c, vars).unwrap()))).unwrap()
    }

    #[test]
    fn index_tuple_order_is_lexicographic() {
        let t = |v: &[usize]| IndexTuple::new(v).unwrap();
        let mut all = vec![t(&[1, 2]), t(&[0, 2]), t(&[0, 1]), t(&[0, 3]), t(&[2, 3])];
        all.sort();
        assert_eq!(all, vec![t(&[0, 1]), t(&[0, 2]), t(&[0, 3]), t(&[1, 2]), t(&[2, 3])]);
        assert!(IndexTuple::new(&[2, 1]).is_none());
        assert_eq!(IndexTuple::all_of_len(4, 2).len(), 6);
    }

    #[test]
    fn wedge_of_coordinate_differentials() {
        let v = xyz();
        let d01 = DiffForm::dx(0, &v).wedge(&DiffForm::dx(1, &v)).unwrap();
        assert_eq!(d01, DiffForm::basis(&[0, 1], &v).unwrap());
        let d10 = DiffForm::dx(1, &v).wedge(&DiffForm::dx(0, &v)).unwrap();
        assert_eq!(d10, d01.neg());
    }

    #[test]
    fn wedge_of_solid_body_differentials() {
        let v = xyz();
        let a = DiffForm::one_form(&[p("x"), p("y"), p("z")]).unwrap();
        let b = DiffForm::one_form(&[p("1"), p("1"), p("1")]).unwrap();
        let expected = form2(&v, &[(&[0, 1], "x - y"), (&[1, 2], "y - z"), (&[2, 0], "z - x")]);
        assert_eq!(a.wedge(&b).unwrap(), expected);
    }

    #[test]
    fn wedge_errors() {
        let v = xyz();
        let two = DiffForm::basis(&[0, 1], &v).unwrap();
        assert!(matches!(two.wedge(&two), Err(ExteriorError::DegreeOverflow { degree: 4, dim: 3 })));
        let other = DiffForm::dx(0, &Vars::indexed("x", 2));
        assert!(matches!(two.wedge(&other), Err(ExteriorError::DimensionMismatch { .. })));
    }

    #[test]
    fn kirillov_form_is_a_primitive_of_the_volume() {
        let v = xyz();
        let kirillov = form2(&v, &[(&[1, 2], "x"), (&[0, 2], "y"), (&[0, 1], "z")]);
        assert_eq!(kirillov.d(), DiffForm::volume(&v));
        assert!(DiffForm::dx(0, &v).d().is_zero());
    }

    #[test]
    fn d_of_ishii_potential() {
        let v = xyz();
        let h = DiffForm::one_form(&[p("(z^2 - x*y^2)/4"), p("(x^2*y - 2*y*z)/4"), p("(y^2 - 2*x*z)/4")]).unwrap();
        let expected = form2(&v, &[(&[1, 2], "y"), (&[2, 0], "z"), (&[0, 1], "x*y")]);
        assert_eq!(h.d(), expected);
        // equals dI1 ∧ dI2, expanded independently
        let i1 = DiffForm::differential(&p("x*z - y^2/2 - x^3/3"));
        let i2 = DiffForm::differential(&p("x^2/2 - z"));
        assert_eq!(i1.wedge(&i2).unwrap(), expected);
    }

    #[test]
    fn d_of_top_form_is_empty() {
        let v = xyz();
        let top = DiffForm::volume(&v).scale(&p("x*y"));
        let d = top.d();
        assert!(d.is_zero());
        assert_eq!(d.degree(), 4);
    }

    #[test]
    fn contraction_sign_convention() {
        let v = xyz();
        let e12 = PolyVector::basis(&[1, 2], &v).unwrap();
        assert_eq!(contract(&e12, &DiffForm::volume(&v)).unwrap(), DiffForm::dx(0, &v));
        let e0 = PolyVector::e(0, &v);
        let one = contract(&e0, &DiffForm::dx(0, &v)).unwrap();
        assert_eq!(one.as_function().unwrap(), p("1"));
    }

    #[test]
    fn solid_body_flux_form() {
        let v = xyz();
        let x = PolyVector::vector_field(&[p("y - z"), p("z - x"), p("x - y")]).unwrap();
        let flux = contract(&x, &DiffForm::volume(&v)).unwrap();
        let expected = form2(&v, &[(&[1, 2], "y - z"), (&[2, 0], "z - x"), (&[0, 1], "x - y")]);
        assert_eq!(flux, expected);
        // The misprinted first coefficient (y - x) does not give a closed
        // form whose primitive reproduces the flow.
        let misprint = form2(&v, &[(&[1, 2], "y - x"), (&[2, 0], "z - x"), (&[0, 1], "x - y")]);
        assert_ne!(misprint, flux);
        assert!(!misprint.d().is_zero());
    }

    #[test]
    fn contraction_errors() {
        let v = xyz();
        let e12 = PolyVector::basis(&[1, 2], &v).unwrap();
        assert!(matches!(
            contract(&e12, &DiffForm::dx(0, &v)),
            Err(ExteriorError::DegreeUnderflow { vector: 2, form: 1 })
        ));
    }

    #[test]
    fn lie_derivative_examples() {
        let v = xyz();
        let omega = DiffForm::volume(&v);
        let solid = PolyVector::vector_field(&[p("y - z"), p("z - x"), p("x - y")]).unwrap();
        assert!(lie_derivative(&solid, &omega).unwrap().is_zero());
        let stretch = PolyVector::vector_field(&[p("x"), p("0"), p("0")]).unwrap();
        assert_eq!(lie_derivative(&stretch, &omega).unwrap(), omega);
        let bivector = PolyVector::basis(&[0, 1], &v).unwrap();
        assert!(matches!(lie_derivative(&bivector, &omega), Err(ExteriorError::NotAVectorField(2))));
    }

    #[test]
    fn homotopy_recovers_solid_body_potential() {
        let v = xyz();
        let flux = form2(&v, &[(&[1, 2], "y - z"), (&[2, 0], "z - x"), (&[0, 1], "x - y")]);
        let h = flux.homotopy(true).unwrap();
        let expected = DiffForm::one_form(&[
            p("(y^2 + z^2 - x*(y + z))/3"),
            p("(z^2 + x^2 - y*(z + x))/3"),
            p("(x^2 + y^2 - z*(x + y))/3"),
        ])
        .unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn homotopy_of_area_form() {
        let v = Vars::indexed("x", 2);
        let area = DiffForm::volume(&v);
        let eta = area.homotopy(true).unwrap();
        let x0 = Poly::var(&v, 0);
        let x1 = Poly::var(&v, 1);
        let expected = DiffForm::one_form(&[x1.scale(&rat(-1, 2)), x0.scale(&rat(1, 2))]).unwrap();
        assert_eq!(eta, expected);
        assert_eq!(eta.d(), area);
    }

    #[test]
    fn homotopy_edge_cases() {
        let v = xyz();
        assert!(DiffForm::zero(2, &v).homotopy(true).unwrap().is_zero());
        assert!(matches!(DiffForm::function(p("x")).homotopy(false), Err(ExteriorError::ZeroDegree)));
        let open = DiffForm::one_form(&[p("y"), p("0"), p("0")]).unwrap();
        match open.homotopy(true) {
            Err(ExteriorError::NotClosed { residual }) => {
                assert_eq!(residual, form2(&v, &[(&[0, 1], "-1")]));
            }
            other => panic!("expected NotClosed, got {other:?}"),
        }
    }

    #[test]
    fn rendering() {
        let v = xyz();
        let f = form2(&v, &[(&[1, 2], "y - z"), (&[0, 1], "1"), (&[0, 2], "-1")]);
        assert_eq!(f.to_string(), "dx^dy - dx^dz + (y - z)*dy^dz");
        let e = PolyVector::basis(&[0, 2], &v).unwrap().scale(&p("x"));
        assert_eq!(e.to_string(), "(x)*∂x^∂z");
        assert_eq!(DiffForm::zero(1, &v).to_string(), "0");
    }
}
