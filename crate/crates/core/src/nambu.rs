//! Hamiltonian polyvector fields and the brackets they induce.
//!
//! For a function `H` on `R^n` and `1 ≤ k ≤ n-1`, the canonical `k`-vector
//! field `X_H^k` is the unique polyvector with
//!
//! ```text
//! X_H^k ⌟ Ω = Θ^{n-k},    Θ^m = Σ_{|I| = m-1} dH ∧ dx_I,
//! ```
//!
//! where `Ω = dx0 ∧ … ∧ dx_{n-1}`. So `X_H^{n-1} ⌟ Ω = dH` and
//! `X_H^{n-2} ⌟ Ω = Σ_i dH ∧ dx_i`. No factorial prefactors are applied.
//!
//! The bracket puts the field's Hamiltonian in the last slot:
//! `{F1, …, Fk, G} = X_G^k ⌟ (dF1 ∧ … ∧ dFk)`. At top degree this is the
//! Jacobian determinant `det ∂(F1, …, F_{n-1}, G)/∂(x0, …, x_{n-1})`, in
//! every dimension. In three dimensions it also equals
//! `X_{F1} ⌟ (dF2 ∧ dG)`, the same value with the first slot as the field.

use thiserror::Error;

use crate::exterior::{contract, DiffForm, ExteriorError, IndexTuple, PolyVector};
use crate::flows::FlowSystem;
use crate::poly::{Poly, PolyError, Vars};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NambuError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("expected {expected} functions, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("polyvector degree {k} out of range 1..={max} for dimension {n}", max = n.saturating_sub(1))]
    DegreeOutOfRange { k: usize, n: usize },
    #[error("all functions must live in the same {expected}-dimensional space, found {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector field is not divergence free; divergence = {0}")]
    NonzeroDivergence(Poly),
    #[error("vector Hamiltonian in dimension {dim} must be a {expected}-form, got degree {got}")]
    VectorHamiltonianDegree { dim: usize, expected: usize, got: usize },
    #[error("cannot separate the time component of the Cartan volume form")]
    CartanExpansion,
}

/// An ordered list of Hamiltonians on `R^n`.
#[derive(Clone, Debug)]
pub struct HamiltonianSystem {
    label: String,
    vars: Vars,
    hamiltonians: Vec<Poly>,
}

impl HamiltonianSystem {
    pub fn new(label: impl Into<String>, hamiltonians: Vec<Poly>) -> Result<Self, NambuError> {
        let first = hamiltonians.first().ok_or(NambuError::Arity { expected: 1, got: 0 })?;
        let vars = first.vars().clone();
        let n = vars.len();
        if hamiltonians.len() > n.saturating_sub(1) {
            return Err(NambuError::Arity {
                expected: n.saturating_sub(1),
                got: hamiltonians.len(),
            });
        }
        for h in &hamiltonians {
            if h.nvars() != n {
                return Err(NambuError::DimensionMismatch { expected: n, got: h.nvars() });
            }
        }
        Ok(Self {
            label: label.into(),
            vars,
            hamiltonians,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn hamiltonians(&self) -> &[Poly] {
        &self.hamiltonians
    }
}

/// The `(n-2)`-form `h` whose differential is the flux form `X ⌟ Ω` of a
/// divergence-free flow. For `n = 3` it is a 1-form and `X = rot h`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorHamiltonian(DiffForm);

impl VectorHamiltonian {
    pub fn new(form: DiffForm) -> Result<Self, NambuError> {
        let dim = form.dim();
        let expected = dim.saturating_sub(2);
        if dim < 2 || form.degree() != expected {
            return Err(NambuError::VectorHamiltonianDegree {
                dim,
                expected,
                got: form.degree(),
            });
        }
        Ok(Self(form))
    }

    /// For `n = 3`, from the components of the 1-form `h_i dx_i`.
    pub fn from_components(components: &[Poly]) -> Result<Self, NambuError> {
        Self::new(DiffForm::one_form(components)?)
    }

    pub fn form(&self) -> &DiffForm {
        &self.0
    }

    pub fn into_form(self) -> DiffForm {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// The vector field `X_h` with `X_h ⌟ Ω = dh`.
    pub fn field(&self) -> Result<PolyVector, NambuError> {
        flux_to_vector(&self.0.d())
    }
}

/// `Θ^m = Σ_{|I| = m-1} dH ∧ dx_I`, built by explicit wedge products.
pub fn theta(h: &Poly, m: usize) -> Result<DiffForm, NambuError> {
    let vars = h.vars();
    let n = vars.len();
    if m == 0 || m >= n {
        return Err(NambuError::DegreeOutOfRange { k: n.saturating_sub(m), n });
    }
    let dh = DiffForm::differential(h);
    let mut out = DiffForm::zero(m, vars);
    for tuple in IndexTuple::all_of_len(n, m - 1) {
        let idx: Vec<usize> = tuple.indices().collect();
        let basis = DiffForm::basis(&idx, vars)?;
        out = out.add(&dh.wedge(&basis)?)?;
    }
    Ok(out)
}

/// Sign `s` with `e_C ⌟ Ω = s · dx_J`, where `C` is the complement of `J`.
///
/// Inserting the members of `C` in ascending order, each `c` sits behind
/// the members of `J` below it, so `s = (-1)^{Σ_c #{j ∈ J : j < c}}`.
pub fn complement_sign(j: IndexTuple, n: usize) -> i32 {
    let parity: usize = j.complement(n).indices().map(|c| j.count_below(c)).sum();
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The canonical Hamiltonian `k`-vector field of `h` (see module docs).
pub fn canonical_polyvector(h: &Poly, k: usize) -> Result<PolyVector, NambuError> {
    let vars = h.vars();
    let n = vars.len();
    if k == 0 || k >= n {
        return Err(NambuError::DegreeOutOfRange { k, n });
    }
    let m = n - k;
    let grads: Vec<Poly> = (0..n).map(|i| h.d(i)).collect();
    let mut out = PolyVector::zero(k, vars);
    for j in IndexTuple::all_of_len(n, m) {
        // Alternating sum ∂_{j0}H - ∂_{j1}H + ∂_{j2}H - …
        let coeff = j.indices().enumerate().fold(Poly::zero(vars), |acc, (p, i)| {
            if p % 2 == 0 {
                &acc + &grads[i]
            } else {
                &acc - &grads[i]
            }
        });
        if coeff.is_zero() {
            continue;
        }
        let c = j.complement(n);
        out.add_term(c, if complement_sign(j, n) > 0 { coeff } else { -coeff });
    }
    Ok(out)
}

/// `{F1, …, Fk, G} = X_G^k ⌟ (dF1 ∧ … ∧ dFk)` for the system's `k`
/// Hamiltonians.
pub fn nambu_bracket(system: &HamiltonianSystem, g: &Poly) -> Result<Poly, NambuError> {
    if g.nvars() != system.dim() {
        return Err(NambuError::DimensionMismatch {
            expected: system.dim(),
            got: g.nvars(),
        });
    }
    let k = system.hamiltonians().len();
    let field = canonical_polyvector(g, k)?;
    let mut wedge = DiffForm::function(Poly::one(system.vars()));
    for f in system.hamiltonians() {
        wedge = wedge.wedge(&DiffForm::differential(f))?;
    }
    let value = contract(&field, &wedge)?;
    Ok(value.as_function().expect("full contraction is a function"))
}

/// Determinant of the Jacobian matrix `∂(F1, …, Fn)/∂(x0, …, x_{n-1})`,
/// by cofactor expansion along the first row.
pub fn jacobian_bracket(fns: &[Poly]) -> Result<Poly, NambuError> {
    let n = fns.first().map(Poly::nvars).unwrap_or(0);
    if fns.len() != n || n == 0 {
        return Err(NambuError::Arity { expected: n, got: fns.len() });
    }
    for f in fns {
        if f.nvars() != n {
            return Err(NambuError::DimensionMismatch { expected: n, got: f.nvars() });
        }
    }
    let rows: Vec<Vec<Poly>> = fns.iter().map(|f| (0..n).map(|i| f.d(i)).collect()).collect();
    let cols: Vec<usize> = (0..n).collect();
    Ok(cofactor_det(&rows, 0, &cols, fns[0].vars()))
}

fn cofactor_det(rows: &[Vec<Poly>], row: usize, cols: &[usize], vars: &Vars) -> Poly {
    if cols.is_empty() {
        return Poly::one(vars);
    }
    let mut acc = Poly::zero(vars);
    for (pos, &c) in cols.iter().enumerate() {
        let entry = &rows[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor_det(rows, row + 1, &rest, vars);
        let term = entry * &minor;
        acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// The vector field `X` with `X ⌟ Ω = flux` for an `(n-1)`-form.
pub fn flux_to_vector(flux: &DiffForm) -> Result<PolyVector, NambuError> {
    let n = flux.dim();
    if flux.degree() + 1 != n {
        return Err(ExteriorError::WrongDegree {
            expected: n.saturating_sub(1),
            got: flux.degree(),
        }
        .into());
    }
    let comps: Vec<Poly> = (0..n)
        .map(|i| {
            let c = flux.coefficient(IndexTuple::single(i).complement(n));
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    Ok(PolyVector::vector_field(&comps)?)
}

/// The flux form `X ⌟ Ω` of a vector field.
pub fn flux_form(x: &PolyVector) -> Result<DiffForm, NambuError> {
    Ok(contract(x, &DiffForm::volume(x.vars()))?)
}

/// Recovers the vector Hamiltonian of a divergence-free field with the
/// homotopy operator: `h = K(X ⌟ Ω)`, so that `dh = X ⌟ Ω`.
pub fn flow_to_vector_hamiltonian(x: &PolyVector) -> Result<VectorHamiltonian, NambuError> {
    let div = x.divergence()?;
    if !div.is_zero() {
        return Err(NambuError::NonzeroDivergence(div));
    }
    let flux = flux_form(x)?;
    let h = flux.homotopy(true)?;
    VectorHamiltonian::new(h)
}

/// Outcome of comparing two exterior expressions that should agree.
#[derive(Clone, Debug, PartialEq)]
pub struct FormIdentity {
    /// `lhs - rhs`; the identity holds iff this is zero.
    pub residual: DiffForm,
}

impl FormIdentity {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Checks `dh = ε dH1 ∧ … ∧ dH_{n-1}` with `ε = (-1)^{n-1}`.
///
/// The flow of the bracket is `ẋ_i = det ∂(H1, …, H_{n-1}, x_i)`, and
/// expanding that determinant along its last row gives
/// `X ⌟ Ω = ε dH1 ∧ … ∧ dH_{n-1}`. In three dimensions `ε = 1`.
/// The residual is `ε dH1 ∧ … ∧ dH_{n-1} - dh`.
pub fn verify_factorization(h: &VectorHamiltonian, hamiltonians: &[Poly]) -> Result<FormIdentity, NambuError> {
    let dh = h.form().d();
    if hamiltonians.len() != dh.degree() {
        return Err(NambuError::Arity {
            expected: dh.degree(),
            got: hamiltonians.len(),
        });
    }
    let mut wedge = DiffForm::function(Poly::one(h.form().vars()));
    for f in hamiltonians {
        if f.nvars() != h.dim() {
            return Err(NambuError::DimensionMismatch { expected: h.dim(), got: f.nvars() });
        }
        wedge = wedge.wedge(&DiffForm::differential(f))?;
    }
    if h.dim().is_multiple_of(2) {
        wedge = wedge.neg();
    }
    Ok(FormIdentity {
        residual: wedge.sub(&dh)?,
    })
}

/// Liouville condition for a polyvector: `d(X ⌟ Ω) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleReport {
    /// `X ⌟ Ω`.
    pub theta: DiffForm,
    /// `d(X ⌟ Ω)`.
    pub residual: DiffForm,
}

impl LiouvilleReport {
    pub fn is_hamiltonian(&self) -> bool {
        self.residual.is_zero()
    }
}

pub fn liouville_check(x: &PolyVector) -> Result<LiouvilleReport, NambuError> {
    let n = x.dim();
    if x.degree() == 0 || x.degree() >= n {
        return Err(NambuError::DegreeOutOfRange { k: x.degree(), n });
    }
    let theta = contract(x, &DiffForm::volume(x.vars()))?;
    let residual = theta.d();
    Ok(LiouvilleReport { theta, residual })
}

/// `{h, I} = X_h ⌟ dI`.
pub fn involution_check(h: &VectorHamiltonian, invariant: &Poly) -> Result<Poly, NambuError> {
    if invariant.nvars() != h.dim() {
        return Err(NambuError::DimensionMismatch {
            expected: h.dim(),
            got: invariant.nvars(),
        });
    }
    let field = h.field()?;
    let value = contract(&field, &DiffForm::differential(invariant))?;
    Ok(value.as_function().expect("vector into 1-form is a function"))
}

/// If `a - b` is exact, returns `φ` with `a - b = dφ` (from the homotopy
/// operator); `None` when the difference is not closed.
pub fn gauge_difference(a: &VectorHamiltonian, b: &VectorHamiltonian) -> Result<Option<DiffForm>, NambuError> {
    let diff = a.form().sub(b.form())?;
    if diff.is_zero() {
        return Ok(Some(DiffForm::zero(diff.degree().saturating_sub(1), diff.vars())));
    }
    if diff.degree() == 0 {
        return Ok(None);
    }
    match diff.homotopy(true) {
        Ok(phi) => Ok(Some(phi)),
        Err(ExteriorError::NotClosed { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Absolute integral invariant of a flow in extended phase space.
#[derive(Clone, Debug)]
pub struct CartanVolume {
    /// `(x0, …, x_{n-1}, t)`.
    pub extended_vars: Vars,
    /// `I = θ0 ∧ … ∧ θ_{n-1}` with `θ_i = dx_i - f_i dt`.
    pub volume: DiffForm,
    /// Primitive `i = K(Ω) + sign · h ∧ dt`.
    pub primitive: DiffForm,
    /// The vector Hamiltonian used in the primitive.
    pub vector_hamiltonian: VectorHamiltonian,
    /// Sign in `I = Ω + sign · (X ⌟ Ω) ∧ dt`, read off the expansion;
    /// `None` when the flux vanishes and the sign is not determined.
    pub flux_sign: Option<i32>,
    /// `d(i) - I`.
    pub residual: DiffForm,
}

impl CartanVolume {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }

    /// The sign `(-1)^n` that the expansion must produce.
    pub fn predicted_sign(n: usize) -> i32 {
        if n.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Builds the Cartan volume `I` and its primitive for a divergence-free
/// polynomial flow, and checks `d(i) = I`.
pub fn cartan_volume(flow: &FlowSystem) -> Result<CartanVolume, NambuError> {
    let vars = flow.vars();
    let n = vars.len();
    let time_name = if vars.position("t").is_some() { "t_" } else { "t" };
    let ext = vars.extended(time_name);
    let dt = DiffForm::dx(n, &ext);

    let mut volume = DiffForm::function(Poly::one(&ext));
    for (i, f) in flow.rhs().iter().enumerate() {
        let theta_i = DiffForm::dx(i, &ext).sub(&dt.scale(&f.embed(&ext)))?;
        volume = volume.wedge(&theta_i)?;
    }

    let field = PolyVector::vector_field(flow.rhs())?;
    let h = flow_to_vector_hamiltonian(&field)?;
    let omega = DiffForm::volume(vars);
    let flux_dt = flux_form(&field)?.embed(&ext).wedge(&dt)?;
    let time_part = volume.sub(&omega.embed(&ext))?;
    let flux_sign = if flux_dt.is_zero() {
        if !time_part.is_zero() {
            return Err(NambuError::CartanExpansion);
        }
        None
    } else if time_part == flux_dt {
        Some(1)
    } else if time_part == flux_dt.neg() {
        Some(-1)
    } else {
        return Err(NambuError::CartanExpansion);
    };

    let base = omega.homotopy(false)?.embed(&ext);
    let h_dt = h.form().embed(&ext).wedge(&dt)?;
    let primitive = if flux_sign == Some(-1) { base.sub(&h_dt)? } else { base.add(&h_dt)? };
    let residual = primitive.d().sub(&volume)?;
    Ok(CartanVolume {
        extended_vars: ext,
        volume,
        primitive,
        vector_hamiltonian: h,
        flux_sign,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::contract;

    fn xyz() -> Vars {
        Vars::new(&["x", "y", "z"])
    }

    fn p(s: &str) -> Poly {
        Poly::parse(s, &xyz()).unwrap()
    }

    fn bivector(terms: &[(&[usize], &str)]) -> PolyVector {
        let v = xyz();
        PolyVector::from_terms(2, &v, terms.iter().map(|(i, c)| (*i, Poly::parse(c, &v).unwrap()))).unwrap()
    }

    #[test]
    fn solid_body_bivector_fields() {
        let xh = canonical_polyvector(&p("(x^2 + y^2 + z^2)/2"), 2).unwrap();
        assert_eq!(xh, bivector(&[(&[0, 1], "z"), (&[1, 2], "x"), (&[2, 0], "y")]));
        let xf = canonical_polyvector(&p("x + y + z"), 2).unwrap();
        assert_eq!(xf, bivector(&[(&[0, 1], "1"), (&[1, 2], "1"), (&[2, 0], "1")]));
    }

    #[test]
    fn constant_hamiltonian_gives_zero_field() {
        for k in 1..3 {
            assert!(canonical_polyvector(&p("7/3"), k).unwrap().is_zero());
        }
        assert!(matches!(canonical_polyvector(&p("x"), 3), Err(NambuError::DegreeOutOfRange { k: 3, n: 3 })));
        assert!(matches!(canonical_polyvector(&p("x"), 0), Err(NambuError::DegreeOutOfRange { .. })));
    }

    #[test]
    fn ishii_bivector_fields() {
        // X_{I1} = x e0^e1 + (z - x^2) e1^e2 - y e2^e0
        let x1 = canonical_polyvector(&p("x*z - y^2/2 - x^3/3"), 2).unwrap();
        assert_eq!(x1, bivector(&[(&[0, 1], "x"), (&[1, 2], "z - x^2"), (&[2, 0], "-y")]));
        // X_{I2} = x e1^e2 - e0^e1
        let x2 = canonical_polyvector(&p("x^2/2 - z"), 2).unwrap();
        assert_eq!(x2, bivector(&[(&[1, 2], "x"), (&[0, 1], "-1")]));
    }

    #[test]
    fn solid_body_bracket_reproduces_flow() {
        let sys = HamiltonianSystem::new("solid", vec![p("(x^2+y^2+z^2)/2"), p("x+y+z")]).unwrap();
        let got: Vec<Poly> = (0..3).map(|i| nambu_bracket(&sys, &Poly::var(&xyz(), i)).unwrap()).collect();
        assert_eq!(got, vec![p("y - z"), p("z - x"), p("x - y")]);
    }

    #[test]
    fn ishii_bracket_reproduces_flow() {
        let sys = HamiltonianSystem::new("ishii", vec![p("x*z - y^2/2 - x^3/3"), p("x^2/2 - z")]).unwrap();
        let got: Vec<Poly> = (0..3).map(|i| nambu_bracket(&sys, &Poly::var(&xyz(), i)).unwrap()).collect();
        assert_eq!(got, vec![p("y"), p("z"), p("x*y")]);
    }

    #[test]
    fn coordinate_bracket_is_one() {
        let sys = HamiltonianSystem::new("coords", vec![p("x"), p("y")]).unwrap();
        assert_eq!(nambu_bracket(&sys, &p("z")).unwrap(), p("1"));
        assert_eq!(jacobian_bracket(&[p("x"), p("y"), p("z")]).unwrap(), p("1"));
    }

    #[test]
    fn jacobian_examples() {
        let h = p("(x^2+y^2+z^2)/2");
        let f = p("x+y+z");
        // det [[x, y, z], [1, 1, 1], [1, 0, 0]] by hand: y - z
        assert_eq!(jacobian_bracket(&[h.clone(), f.clone(), p("x")]).unwrap(), p("y - z"));
        assert!(jacobian_bracket(&[h.clone(), h, f]).unwrap().is_zero());
        assert!(matches!(jacobian_bracket(&[p("x")]), Err(NambuError::Arity { expected: 3, got: 1 })));
    }

    #[test]
    fn first_slot_field_form_matches_in_three_dimensions() {
        // Eq. (7)-style evaluation X_H ⌟ (dF ∧ dG) agrees with the bracket for n = 3.
        let h = p("x*y - z^2");
        let f = p("x + y^2");
        let g = p("z*x");
        let xh = canonical_polyvector(&h, 2).unwrap();
        let dfdg = DiffForm::differential(&f).wedge(&DiffForm::differential(&g)).unwrap();
        let first_slot = contract(&xh, &dfdg).unwrap().as_function().unwrap();
        let sys = HamiltonianSystem::new("s", vec![h.clone(), f.clone()]).unwrap();
        assert_eq!(first_slot, nambu_bracket(&sys, &g).unwrap());
        assert_eq!(first_slot, jacobian_bracket(&[h, f, g]).unwrap());
    }

    #[test]
    fn first_slot_field_form_flips_sign_in_four_dimensions() {
        let v = Vars::indexed("x", 4);
        let q = |s: &str| Poly::parse(s, &v).unwrap();
        let fs = [q("x0*x1"), q("x2 + x3^2"), q("x0 - x2*x3"), q("x1*x3")];
        let xf = canonical_polyvector(&fs[0], 3).unwrap();
        let mut wedge = DiffForm::differential(&fs[1]);
        for f in &fs[2..] {
            wedge = wedge.wedge(&DiffForm::differential(f)).unwrap();
        }
        let first_slot = contract(&xf, &wedge).unwrap().as_function().unwrap();
        let det = jacobian_bracket(&fs).unwrap();
        assert!(!det.is_zero());
        assert_eq!(first_slot, -det.clone());
        let sys = HamiltonianSystem::new("s", fs[..3].to_vec()).unwrap();
        assert_eq!(nambu_bracket(&sys, &fs[3]).unwrap(), det);
    }

    #[test]
    fn solid_body_vector_hamiltonian() {
        let x = PolyVector::vector_field(&[p("y - z"), p("z - x"), p("x - y")]).unwrap();
        let h = flow_to_vector_hamiltonian(&x).unwrap();
        let expected = VectorHamiltonian::from_components(&[
            p("(y^2 + z^2 - x*(y + z))/3"),
            p("(z^2 + x^2 - y*(z + x))/3"),
            p("(x^2 + y^2 - z*(x + y))/3"),
        ])
        .unwrap();
        assert_eq!(h, expected);
        assert_eq!(h.field().unwrap(), x);
    }

    #[test]
    fn ishii_vector_hamiltonian_is_gauge_equivalent_to_printed_one() {
        let x = PolyVector::vector_field(&[p("y"), p("z"), p("x*y")]).unwrap();
        let h = flow_to_vector_hamiltonian(&x).unwrap();
        let printed = VectorHamiltonian::from_components(&[
            p("(z^2 - x*y^2)/4"),
            p("(x^2*y - 2*y*z)/4"),
            p("(y^2 - 2*x*z)/4"),
        ])
        .unwrap();
        assert_eq!(printed.form().d(), flux_form(&x).unwrap());
        assert_eq!(h.form().d(), flux_form(&x).unwrap());
        assert_ne!(h, printed);
        let phi = gauge_difference(&printed, &h).unwrap().expect("difference is exact");
        assert_eq!(DiffForm::function(phi.as_function().unwrap()).degree(), 0);
        assert_eq!(DiffForm::differential(&phi.as_function().unwrap()), printed.form().sub(h.form()).unwrap());
    }

    #[test]
    fn zero_and_divergent_fields() {
        let zero = PolyVector::zero(1, &xyz());
        assert!(flow_to_vector_hamiltonian(&zero).unwrap().form().is_zero());
        let stretch = PolyVector::vector_field(&[p("x"), p("y"), p("z")]).unwrap();
        assert_eq!(
            flow_to_vector_hamiltonian(&stretch),
            Err(NambuError::NonzeroDivergence(p("3")))
        );
    }

    #[test]
    fn factorization_examples() {
        let h = VectorHamiltonian::from_components(&[
            p("(y^2 + z^2 - x*(y + z))/3"),
            p("(z^2 + x^2 - y*(z + x))/3"),
            p("(x^2 + y^2 - z*(x + y))/3"),
        ])
        .unwrap();
        let hh = p("(x^2 + y^2 + z^2)/2");
        let f = p("x + y + z");
        assert!(verify_factorization(&h, &[hh.clone(), f.clone()]).unwrap().holds());
        let unscaled = verify_factorization(&h, &[hh.scale(&crate::poly::int(3)), f.clone()]).unwrap();
        let scaled_wedge = DiffForm::differential(&hh).wedge(&DiffForm::differential(&f)).unwrap();
        assert_eq!(unscaled.residual, scaled_wedge.scale_rational(&crate::poly::int(2)));
        assert!(matches!(verify_factorization(&h, &[f]), Err(NambuError::Arity { expected: 2, got: 1 })));
    }

    #[test]
    fn liouville_examples() {
        let xh = canonical_polyvector(&p("(x^2+y^2+z^2)/2"), 2).unwrap();
        let report = liouville_check(&xh).unwrap();
        assert!(report.is_hamiltonian());
        assert_eq!(report.theta, DiffForm::differential(&p("(x^2+y^2+z^2)/2")));
        let stretch = PolyVector::e(0, &xyz()).scale(&p("x"));
        let report = liouville_check(&stretch).unwrap();
        assert!(!report.is_hamiltonian());
        assert_eq!(report.residual, DiffForm::volume(&xyz()));
    }

    #[test]
    fn involution_examples() {
        let x = PolyVector::vector_field(&[p("y - z"), p("z - x"), p("x - y")]).unwrap();
        let h = flow_to_vector_hamiltonian(&x).unwrap();
        assert!(involution_check(&h, &p("x + y + z")).unwrap().is_zero());
        assert!(involution_check(&h, &p("3/2*(x^2 + y^2 + z^2)")).unwrap().is_zero());
        assert_eq!(involution_check(&h, &p("x")).unwrap(), p("y - z"));
    }

    #[test]
    fn factorization_sign_in_the_plane() {
        let v = Vars::new(&["q", "p"]);
        let hh = Poly::parse("(q^2 + p^2)/2", &v).unwrap();
        let sys = HamiltonianSystem::new("osc", vec![hh.clone()]).unwrap();
        let rhs: Vec<Poly> = (0..2).map(|i| nambu_bracket(&sys, &Poly::var(&v, i)).unwrap()).collect();
        assert_eq!(rhs, vec![Poly::parse("-p", &v).unwrap(), Poly::parse("q", &v).unwrap()]);
        let h = flow_to_vector_hamiltonian(&PolyVector::vector_field(&rhs).unwrap()).unwrap();
        assert_eq!(h.form().as_function().unwrap(), -hh.clone());
        assert!(verify_factorization(&h, &[hh]).unwrap().holds());
    }

    #[test]
    fn complement_sign_matches_contraction() {
        for n in 1..6 {
            let vars = Vars::indexed("x", n);
            let omega = DiffForm::volume(&vars);
            for k in 0..=n {
                for j in IndexTuple::all_of_len(n, k) {
                    let c: Vec<usize> = j.complement(n).indices().collect();
                    let e = PolyVector::basis(&c, &vars).unwrap();
                    let got = contract(&e, &omega).unwrap();
                    let coeff = got.coefficient(j);
                    assert_eq!(coeff, Poly::from_i64(&vars, complement_sign(j, n) as i64));
                }
            }
        }
    }
}
