//! Scenario files and the `verify` driver.
//!
//! A scenario is a TOML document with a versioned header:
//!
//! ```toml
//! format = "nambu-scenario/1"
//! name = "solid-body"
//! variables = ["x", "y", "z"]
//! hamiltonians = ["(x^2 + y^2 + z^2)/2", "x + y + z"]
//! flow = ["y - z", "z - x", "x - y"]
//!
//! [[invariants]]
//! expr = "x + y + z"
//!
//! [integration]
//! x0 = [1.0, 0.0, 0.0]
//! t_end = 10.0
//! dt = 1e-3
//! tolerance = 1e-8
//! ```
//!
//! Optional sections: `[vector_hamiltonian]` (`components` for a 1-form in
//! three variables, `terms` for a general form, or `function` in the plane;
//! `gauge = "radial" | "exact"`), `[lax]` (`scalar = "rational" |
//! "gaussian"`, `l`, `m`, `traces`, `flow_matrix_factor`) and `[ring]`
//! (`n`), which adds the ring-system checks.

use std::time::Instant;

use num_traits::{FromPrimitive, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::exterior::{DiffForm, PolyVector};
use crate::flows::{derivative_along, integrate, invariant_drift, rhs_from_bracket, FlowSystem};
use crate::lax::{lax_residual, linear_flow_matrix, trace_invariant, LaxPair, PolyMatrix};
use crate::nambu::{
    canonical_polyvector, cartan_volume, flow_to_vector_hamiltonian, flux_form, gauge_difference,
    involution_check, jacobian_bracket, liouville_check, nambu_bracket, verify_factorization, CartanVolume,
    HamiltonianSystem, VectorHamiltonian,
};
use crate::poly::{random_poly, Coeff, GaussianRational, Poly, PolyError, Polynomial, Rational, Vars};
use crate::report::{Check, VerificationReport};
use crate::ring;

pub const FORMAT: &str = "nambu-scenario/1";

/// Names of the scenarios compiled into the library.
pub const SHIPPED: [&str; 6] = ["solid-body", "ishii", "oscillator", "ring-2", "ring-3", "ring-4"];

/// Source text of a shipped scenario.
pub fn shipped_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "solid-body" => include_str!("../scenarios/solid-body.toml"),
        "ishii" => include_str!("../scenarios/ishii.toml"),
        "oscillator" => include_str!("../scenarios/oscillator.toml"),
        "ring-2" => include_str!("../scenarios/ring-2.toml"),
        "ring-3" => include_str!("../scenarios/ring-3.toml"),
        "ring-4" => include_str!("../scenarios/ring-4.toml"),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    Unknown(String),
    #[error("invalid scenario file: {0}")]
    Toml(String),
    #[error("unsupported format `{0}`, expected `{FORMAT}`")]
    Format(String),
    #[error("in `{field}`: {source}")]
    Expression { field: String, source: PolyError },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub format: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Optional; must equal the number of variables when present.
    pub dimension: Option<usize>,
    pub variables: Vec<String>,
    #[serde(default)]
    pub hamiltonians: Vec<String>,
    pub flow: Option<Vec<String>>,
    #[serde(default)]
    pub invariants: Vec<InvariantConfig>,
    pub vector_hamiltonian: Option<VectorHamiltonianConfig>,
    pub lax: Option<LaxConfig>,
    pub ring: Option<RingConfig>,
    pub integration: Option<IntegrationConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantConfig {
    pub expr: String,
    /// Exact value at the initial state, as an expression.
    pub value: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    /// Must equal the homotopy-operator output exactly.
    Radial,
    /// Must differ from the homotopy-operator output by an exact form.
    Exact,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorHamiltonianConfig {
    pub components: Option<Vec<String>>,
    pub terms: Option<Vec<FormTermConfig>>,
    pub function: Option<String>,
    pub gauge: Gauge,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormTermConfig {
    pub indices: Vec<usize>,
    pub coeff: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Rational,
    Gaussian,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaxConfig {
    pub scalar: ScalarMode,
    pub l: Vec<Vec<String>>,
    pub m: Vec<Vec<String>>,
    #[serde(default)]
    pub traces: Vec<TraceConfig>,
    /// `J = factor · M` for a linear flow `ẋ = Jx`.
    pub flow_matrix_factor: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub power: u32,
    pub expect: String,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingConfig {
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    pub x0: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub tolerance: f64,
}

/// A validated scenario with every expression parsed.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub vars: Vars,
    pub hamiltonians: Vec<Poly>,
    /// Declared flow, or the bracket flow of the Hamiltonians.
    pub flow: FlowSystem,
    pub flow_declared: bool,
    pub invariants: Vec<(Poly, Option<Rational>)>,
    pub vector_hamiltonian: Option<(VectorHamiltonian, Gauge)>,
    pub lax: Option<ScenarioLax>,
    pub ring: Option<usize>,
    pub integration: Option<IntegrationConfig>,
}

#[derive(Clone, Debug)]
pub enum LaxMatrices {
    Rational(LaxPair),
    Gaussian(LaxPair<GaussianRational>),
}

#[derive(Clone, Debug)]
pub struct ScenarioLax {
    pub pair: LaxMatrices,
    pub traces: Vec<(u32, String)>,
    pub flow_matrix_factor: Option<Rational>,
}

fn parse_in<C: Coeff>(field: &str, text: &str, vars: &Vars) -> Result<Polynomial<C>, ScenarioError> {
    Polynomial::parse(text, vars).map_err(|source| ScenarioError::Expression {
        field: field.to_string(),
        source,
    })
}

fn parse_constant(field: &str, text: &str) -> Result<Rational, ScenarioError> {
    let p: Poly = parse_in(field, text, &Vars::new::<&str>(&[]))?;
    Ok(p.constant_term())
}

fn parse_matrix<C: Coeff>(field: &str, rows: &[Vec<String>], vars: &Vars) -> Result<PolyMatrix<C>, ScenarioError> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, e)| parse_in(&format!("{field}[{r}][{c}]"), e, vars))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    PolyMatrix::new(parsed).map_err(|e| ScenarioError::Invalid(format!("{field}: {e}")))
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ScenarioError::Toml(e.to_string()))?;
        Self::from_config(cfg)
    }

    pub fn shipped(name: &str) -> Result<Self, ScenarioError> {
        let src = shipped_source(name).ok_or_else(|| ScenarioError::Unknown(name.to_string()))?;
        Self::from_toml(src)
    }

    pub fn from_config(cfg: ScenarioConfig) -> Result<Self, ScenarioError> {
        if cfg.format != FORMAT {
            return Err(ScenarioError::Format(cfg.format));
        }
        let n = cfg.variables.len();
        if let Some(d) = cfg.dimension.filter(|&d| d != n) {
            return Err(ScenarioError::Invalid(format!("dimension {d} does not match {n} variables")));
        }
        if n < 2 {
            return Err(ScenarioError::Invalid("at least two variables are required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &cfg.variables {
            let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || !seen.insert(v.as_str()) {
                return Err(ScenarioError::Invalid(format!("bad or repeated variable name `{v}`")));
            }
        }
        let vars = Vars::new(&cfg.variables);

        let hamiltonians = cfg
            .hamiltonians
            .iter()
            .enumerate()
            .map(|(i, h)| parse_in(&format!("hamiltonians[{i}]"), h, &vars))
            .collect::<Result<Vec<Poly>, _>>()?;
        if hamiltonians.len() >= n {
            return Err(ScenarioError::Invalid(format!(
                "at most {} Hamiltonians fit in {n} dimensions",
                n - 1
            )));
        }

        let (flow, flow_declared) = match &cfg.flow {
            Some(exprs) => {
                if exprs.len() != n {
                    return Err(ScenarioError::Invalid(format!(
                        "flow has {} components for {n} variables",
                        exprs.len()
                    )));
                }
                let rhs = exprs
                    .iter()
                    .enumerate()
                    .map(|(i, e)| parse_in(&format!("flow[{i}]"), e, &vars))
                    .collect::<Result<Vec<Poly>, _>>()?;
                let flow = FlowSystem::new(rhs, format!("scenario:{}", cfg.name))
                    .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
                (flow, true)
            }
            None if !hamiltonians.is_empty() => {
                let sys = HamiltonianSystem::new(cfg.name.clone(), hamiltonians.clone())
                    .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
                (rhs_from_bracket(&sys).map_err(|e| ScenarioError::Invalid(e.to_string()))?, false)
            }
            None => return Err(ScenarioError::Invalid("either `flow` or `hamiltonians` is required".into())),
        };

        let invariants = cfg
            .invariants
            .iter()
            .enumerate()
            .map(|(i, inv)| {
                let p = parse_in(&format!("invariants[{i}].expr"), &inv.expr, &vars)?;
                let v = inv
                    .value
                    .as_deref()
                    .map(|t| parse_constant(&format!("invariants[{i}].value"), t))
                    .transpose()?;
                Ok((p, v))
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        let vector_hamiltonian = cfg
            .vector_hamiltonian
            .as_ref()
            .map(|vh| parse_vector_hamiltonian(vh, &vars).map(|h| (h, vh.gauge)))
            .transpose()?;

        let lax = cfg.lax.as_ref().map(|l| parse_lax(l, &vars, &flow)).transpose()?;

        if let Some(r) = cfg.ring {
            if r.n != n {
                return Err(ScenarioError::Invalid(format!("ring size {} does not match {n} variables", r.n)));
            }
        }
        if let Some(integ) = &cfg.integration {
            if integ.x0.len() != n {
                return Err(ScenarioError::Invalid(format!(
                    "integration.x0 has {} entries for {n} variables",
                    integ.x0.len()
                )));
            }
            if !(integ.dt > 0.0 && integ.t_end > 0.0 && integ.tolerance > 0.0) {
                return Err(ScenarioError::Invalid("dt, t_end and tolerance must be positive".into()));
            }
        }

        Ok(Self {
            name: cfg.name,
            description: cfg.description,
            vars,
            hamiltonians,
            flow,
            flow_declared,
            invariants,
            vector_hamiltonian,
            lax,
            ring: cfg.ring.map(|r| r.n),
            integration: cfg.integration,
        })
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }
}

fn parse_vector_hamiltonian(vh: &VectorHamiltonianConfig, vars: &Vars) -> Result<VectorHamiltonian, ScenarioError> {
    let n = vars.len();
    let invalid = |e: crate::nambu::NambuError| ScenarioError::Invalid(format!("vector_hamiltonian: {e}"));
    match (&vh.components, &vh.terms, &vh.function) {
        (Some(comps), None, None) => {
            if n != 3 || comps.len() != 3 {
                return Err(ScenarioError::Invalid(
                    "vector_hamiltonian.components needs exactly three components in three variables".into(),
                ));
            }
            let polys = comps
                .iter()
                .enumerate()
                .map(|(i, c)| parse_in(&format!("vector_hamiltonian.components[{i}]"), c, vars))
                .collect::<Result<Vec<Poly>, _>>()?;
            VectorHamiltonian::from_components(&polys).map_err(invalid)
        }
        (None, Some(terms), None) => {
            let parsed = terms
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    if t.indices.iter().any(|&j| j >= n) {
                        return Err(ScenarioError::Invalid(format!("vector_hamiltonian.terms[{i}]: index out of range")));
                    }
                    Ok((t.indices.as_slice(), parse_in(&format!("vector_hamiltonian.terms[{i}].coeff"), &t.coeff, vars)?))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let form = DiffForm::from_terms(n.saturating_sub(2), vars, parsed)
                .map_err(|e| ScenarioError::Invalid(format!("vector_hamiltonian: {e}")))?;
            VectorHamiltonian::new(form).map_err(invalid)
        }
        (None, None, Some(f)) => {
            let p = parse_in("vector_hamiltonian.function", f, vars)?;
            VectorHamiltonian::new(DiffForm::function(p)).map_err(invalid)
        }
        _ => Err(ScenarioError::Invalid(
            "vector_hamiltonian needs exactly one of `components`, `terms` or `function`".into(),
        )),
    }
}

fn parse_lax(cfg: &LaxConfig, vars: &Vars, flow: &FlowSystem) -> Result<ScenarioLax, ScenarioError> {
    let invalid = |e: crate::lax::LaxError| ScenarioError::Invalid(format!("lax: {e}"));
    let pair = match cfg.scalar {
        ScalarMode::Rational => {
            let l = parse_matrix("lax.l", &cfg.l, vars)?;
            let m = parse_matrix("lax.m", &cfg.m, vars)?;
            LaxMatrices::Rational(LaxPair::new(l, m, flow.clone()).map_err(invalid)?)
        }
        ScalarMode::Gaussian => {
            let l = parse_matrix("lax.l", &cfg.l, vars)?;
            let m = parse_matrix("lax.m", &cfg.m, vars)?;
            LaxMatrices::Gaussian(LaxPair::new(l, m, flow.clone()).map_err(invalid)?)
        }
    };
    for (i, t) in cfg.traces.iter().enumerate() {
        if t.power == 0 {
            return Err(ScenarioError::Invalid(format!("lax.traces[{i}].power must be at least 1")));
        }
    }
    let flow_matrix_factor = cfg
        .flow_matrix_factor
        .as_deref()
        .map(|t| parse_constant("lax.flow_matrix_factor", t))
        .transpose()?;
    Ok(ScenarioLax {
        pair,
        traces: cfg.traces.iter().map(|t| (t.power, t.expect.clone())).collect(),
        flow_matrix_factor,
    })
}

/// Knobs for [`verify`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Replaces every numeric tolerance when set.
    pub tolerance: Option<f64>,
    /// Seeds the randomized checks.
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance: None,
            seed: 1,
        }
    }
}

fn timed(check: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let mut c = check();
    c.elapsed = start.elapsed();
    c
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

/// Runs every check that the scenario's data supports. The report is sorted
/// by check id.
pub fn verify(s: &Scenario, opts: &VerifyOptions) -> VerificationReport {
    let mut report = VerificationReport::new(&s.name);
    let n = s.dim();
    let vars = &s.vars;
    let field = PolyVector::vector_field(s.flow.rhs()).expect("flow has n components");

    report.push(timed(|| {
        let div = s.flow.divergence();
        Check::new("flow.divergence", "divergence of the flow is zero", div.is_zero(), div.to_string())
    }));

    let system = (!s.hamiltonians.is_empty())
        .then(|| HamiltonianSystem::new(&s.name, s.hamiltonians.clone()).expect("validated"));

    if let (Some(sys), true) = (&system, s.flow_declared) {
        report.push(timed(|| match rhs_from_bracket(sys) {
            Ok(derived) => {
                let diffs: Vec<Poly> = derived.rhs().iter().zip(s.flow.rhs()).map(|(a, b)| a - b).collect();
                let ok = diffs.iter().all(Poly::is_zero);
                Check::new(
                    "flow.bracket",
                    "bracket {H1, ..., x_i} reproduces the declared flow",
                    ok,
                    format!("({})", diffs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")),
                )
            }
            Err(e) => Check::error("flow.bracket", "bracket flow", e.to_string()),
        }));
    }

    if let Some(sys) = system.as_ref().filter(|sys| sys.hamiltonians().len() + 1 == n) {
        report.push(timed(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut targets: Vec<Poly> = (0..n).map(|i| Poly::var(vars, i)).collect();
            targets.extend((0..5).map(|_| random_poly(&mut rng, vars, 3, 4)));
            let mut bad = Vec::new();
            for g in &targets {
                let mut fns = sys.hamiltonians().to_vec();
                fns.push(g.clone());
                match (nambu_bracket(sys, g), jacobian_bracket(&fns)) {
                    (Ok(a), Ok(b)) if a == b => {}
                    (Ok(a), Ok(b)) => bad.push(format!("G = {g}: {}", &a - &b)),
                    (Err(e), _) | (_, Err(e)) => bad.push(e.to_string()),
                }
            }
            Check::new(
                "nambu.jacobian",
                "top-degree bracket equals the Jacobian determinant",
                bad.is_empty(),
                if bad.is_empty() { "0".into() } else { join(bad) },
            )
        }));
    }

    report.push(timed(|| {
        let mut bad = Vec::new();
        let mut fields = vec![("flow".to_string(), field.clone())];
        for (i, h) in s.hamiltonians.iter().enumerate() {
            for k in 1..n {
                if let Ok(x) = canonical_polyvector(h, k) {
                    fields.push((format!("X^{k}(H{i})"), x));
                }
            }
        }
        for (label, x) in &fields {
            match liouville_check(x) {
                Ok(r) if r.is_hamiltonian() => {}
                Ok(r) => bad.push(format!("{label}: {}", r.residual)),
                Err(e) => bad.push(format!("{label}: {e}")),
            }
        }
        Check::new(
            "nambu.liouville",
            "d(X ⌟ Ω) = 0 for the flow and every canonical polyvector",
            bad.is_empty(),
            if bad.is_empty() { format!("0 ({} fields)", fields.len()) } else { join(bad) },
        )
    }));

    let homotopy = flow_to_vector_hamiltonian(&field);
    report.push(timed(|| match &homotopy {
        Ok(h) => {
            let flux = flux_form(&field).expect("vector field");
            let residual = h.form().d().sub(&flux).expect("same shape");
            let mut ok = residual.is_zero();
            let mut text = format!("h = {}", h.form());
            if let Some((printed, Gauge::Radial)) = &s.vector_hamiltonian {
                if printed != h {
                    ok = false;
                    text = format!("h = {}, expected {}", h.form(), printed.form());
                }
            }
            if !residual.is_zero() {
                text = format!("dh - X ⌟ Ω = {residual}");
            }
            Check::new("nambu.homotopy", "homotopy operator recovers h with dh = X ⌟ Ω", ok, text)
        }
        Err(e) => Check::error("nambu.homotopy", "homotopy recovery", e.to_string()),
    }));

    if let Some((printed, gauge)) = &s.vector_hamiltonian {
        report.push(timed(|| {
            let flux = flux_form(&field).expect("vector field");
            let residual = printed.form().d().sub(&flux).expect("same shape");
            let mut notes = vec![format!("dh - X ⌟ Ω = {residual}")];
            let mut ok = residual.is_zero();
            if let (Gauge::Exact, Ok(hk)) = (gauge, &homotopy) {
                match gauge_difference(printed, hk) {
                    Ok(Some(phi)) => notes.push(format!("h - K(X ⌟ Ω) = d({phi})")),
                    Ok(None) => {
                        ok = false;
                        notes.push("h - K(X ⌟ Ω) is not exact".into());
                    }
                    Err(e) => {
                        ok = false;
                        notes.push(e.to_string());
                    }
                }
            }
            Check::new(
                "nambu.vector-hamiltonian",
                "stated vector Hamiltonian satisfies dh = X ⌟ Ω",
                ok,
                join(notes),
            )
        }));
    }

    let h_for_identities = s
        .vector_hamiltonian
        .as_ref()
        .map(|(h, _)| h.clone())
        .or_else(|| homotopy.clone().ok());

    if let (Some(h), true) = (&h_for_identities, s.hamiltonians.len() + 1 == n) {
        report.push(timed(|| match verify_factorization(h, &s.hamiltonians) {
            Ok(r) => Check::new(
                "nambu.factorization",
                "dh = ±dH1 ∧ ... ∧ dH_{n-1} with sign (-1)^{n-1}",
                r.holds(),
                r.residual.to_string(),
            ),
            Err(e) => Check::error("nambu.factorization", "factorization", e.to_string()),
        }));
    }

    if let (Some(h), false) = (&h_for_identities, s.invariants.is_empty()) {
        report.push(timed(|| {
            let mut parts = Vec::new();
            let mut ok = true;
            for (inv, _) in &s.invariants {
                match involution_check(h, inv) {
                    Ok(v) => {
                        ok &= v.is_zero();
                        parts.push(format!("{{h, {inv}}} = {v}"));
                    }
                    Err(e) => {
                        ok = false;
                        parts.push(e.to_string());
                    }
                }
            }
            Check::new("nambu.involution", "{h, I} = 0 for every invariant", ok, join(parts))
        }));
    }

    if !s.invariants.is_empty() {
        report.push(timed(|| {
            let mut parts = Vec::new();
            let mut ok = true;
            let x0 = s.integration.as_ref().map(|i| exact_point(&i.x0));
            for (inv, value) in &s.invariants {
                let d = s.flow.time_derivative(inv).expect("same variables");
                ok &= d.is_zero();
                parts.push(format!("d/dt({inv}) = {d}"));
                if let (Some(v), Some(Some(x0))) = (value, &x0) {
                    let at = inv.eval(x0).expect("length checked");
                    if &at != v {
                        ok = false;
                        parts.push(format!("value at x0 is {at}, expected {v}"));
                    }
                }
            }
            Check::new("flow.conservation", "invariants have zero derivative along the flow", ok, join(parts))
        }));
    }

    if let (Some(integ), false) = (&s.integration, s.invariants.is_empty()) {
        report.push(timed(|| {
            let tol = opts.tolerance.unwrap_or(integ.tolerance);
            match integrate(&s.flow, &integ.x0, integ.t_end, integ.dt) {
                Ok(traj) => {
                    let mut ok = true;
                    let mut parts = Vec::new();
                    for (inv, _) in &s.invariants {
                        let r = invariant_drift(&traj, inv).expect("dimensions checked");
                        ok &= r.max_drift < tol;
                        parts.push(format!("{}: {}", inv, sci(r.max_drift)));
                    }
                    Check::new(
                        "flow.drift",
                        format!(
                            "RK4 drift below {} on [0, {}] with dt = {}",
                            sci(tol),
                            integ.t_end,
                            integ.dt
                        ),
                        ok,
                        join(parts),
                    )
                }
                Err(e) => Check::error("flow.drift", "RK4 integration", e.to_string()),
            }
        }));
    }

    report.push(timed(|| match cartan_volume(&s.flow) {
        Ok(cv) => {
            let predicted = CartanVolume::predicted_sign(n);
            let ok = cv.holds() && cv.flux_sign.is_none_or(|s| s == predicted);
            let sign = cv.flux_sign.map_or("undetermined".to_string(), |s| format!("{s:+}"));
            Check::new(
                "cartan.volume",
                "d(i) = I in extended phase space; sign of (X ⌟ Ω) ∧ dt is (-1)^n",
                ok,
                format!("sign {sign}, predicted {predicted:+}; d(i) - I = {}", cv.residual),
            )
        }
        Err(e) => Check::error("cartan.volume", "Cartan volume", e.to_string()),
    }));

    if let Some(lax) = &s.lax {
        push_lax_checks(&mut report, s, lax);
    }

    if let Some(rn) = s.ring {
        push_ring_checks(&mut report, s, rn, opts);
    }

    report.sort();
    report
}

fn exact_point(x: &[f64]) -> Option<Vec<Rational>> {
    x.iter().map(|v| Rational::from_f64(*v)).collect()
}

fn push_lax_checks(report: &mut VerificationReport, s: &Scenario, lax: &ScenarioLax) {
    match &lax.pair {
        LaxMatrices::Rational(pair) => lax_checks_in(report, s, pair, &lax.traces),
        LaxMatrices::Gaussian(pair) => lax_checks_in(report, s, pair, &lax.traces),
    }
    if let (Some(factor), LaxMatrices::Rational(pair)) = (&lax.flow_matrix_factor, &lax.pair) {
        report.push(timed(|| match linear_flow_matrix(&s.flow) {
            Some(j) => {
                let diff = j.sub(&pair.m.scale(factor)).expect("same shape");
                Check::new(
                    "lax.flow-matrix",
                    format!("linear flow matrix J equals {factor}·M"),
                    diff.is_zero(),
                    diff.to_string(),
                )
            }
            None => Check::new("lax.flow-matrix", "linear flow matrix", false, "flow is not linear"),
        }));
    }
}

fn lax_checks_in<C: Coeff>(report: &mut VerificationReport, s: &Scenario, pair: &LaxPair<C>, traces: &[(u32, String)]) {
    report.push(timed(|| match lax_residual(pair) {
        Ok(r) => Check::new("lax.residual", "dL/dt - [M, L] = 0 along the flow", r.is_zero(), r.to_string()),
        Err(e) => Check::error("lax.residual", "Lax residual", e.to_string()),
    }));
    if traces.is_empty() {
        return;
    }
    report.push(timed(|| {
        let mut ok = true;
        let mut parts = Vec::new();
        for (k, expect) in traces {
            let got = match trace_invariant(&pair.l, *k) {
                Ok(g) => g,
                Err(e) => {
                    ok = false;
                    parts.push(e.to_string());
                    continue;
                }
            };
            let want: Polynomial<C> = match Polynomial::parse(expect, &s.vars) {
                Ok(w) => w,
                Err(e) => {
                    ok = false;
                    parts.push(e.to_string());
                    continue;
                }
            };
            let conserved = derivative_along(&s.flow, &got).map(|d| d.is_zero()).unwrap_or(false);
            ok &= got == want && conserved;
            parts.push(format!(
                "tr L^{k}/{k} = {got}{}{}",
                if got == want { "" } else { " (mismatch)" },
                if conserved { "" } else { " (not conserved)" }
            ));
        }
        Check::new("lax.traces", "trace invariants match and are conserved", ok, join(parts))
    }));
}

fn push_ring_checks(report: &mut VerificationReport, s: &Scenario, n: usize, opts: &VerifyOptions) {
    let tol = |default: f64| opts.tolerance.unwrap_or(default);

    report.push(timed(|| match ring::gen_pauli(n) {
        Ok(p) => {
            let e = p.identity_errors();
            let t = tol(1e-12);
            Check::new(
                "ring.pauli",
                "Σ1^n = Σ0, σ^n = 1, Σ σ^k = 0, Σ3 Σ1 = σ Σ1 Σ3",
                e.max() < t,
                format!("max error {}", sci(e.max())),
            )
        }
        Err(e) => Check::error("ring.pauli", "generalized Pauli matrices", e.to_string()),
    }));

    report.push(timed(|| match ring::ring_system(n) {
        Ok(sys) => {
            let same_flow = sys.flow.rhs() == s.flow.rhs();
            let same_inv = match (&sys.invariant, s.invariants.first()) {
                (Some(a), Some((b, _))) => a == b,
                (None, None) => true,
                _ => false,
            };
            Check::new(
                "ring.system",
                "flow is c_j' = c_{j+1 mod n} with the closed-form invariant",
                same_flow && same_inv,
                format!(
                    "flow {}, invariant {}",
                    if same_flow { "matches" } else { "differs" },
                    if same_inv { "matches" } else { "differs" }
                ),
            )
        }
        Err(e) => Check::error("ring.system", "ring system", e.to_string()),
    }));

    report.push(timed(|| {
        let t_max = 2.0;
        let traj = match integrate(&s.flow, &{
            let mut e0 = vec![0.0; n];
            e0[0] = 1.0;
            e0
        }, t_max, 1e-3)
        {
            Ok(t) => t,
            Err(e) => return Check::error("ring.series", "series against RK4", e.to_string()),
        };
        let mut worst: f64 = 0.0;
        let mut inv_worst: f64 = 0.0;
        let inv = s.invariants.first();
        for (t, state) in traj.times.iter().zip(&traj.states).step_by(250) {
            let series = match ring::lowering_flow_solution(n, *t, 1e-17) {
                Ok(v) => v,
                Err(e) => return Check::error("ring.series", "series against RK4", e.to_string()),
            };
            for (a, b) in state.iter().zip(&series) {
                worst = worst.max((a - b).abs());
            }
            if let Some((p, Some(v))) = inv {
                let c = ring::c_vector(n, *t, 1e-17).expect("valid parameters");
                let val = p.eval_f64(&c).expect("length");
                inv_worst = inv_worst.max((val - v.to_f64().unwrap_or(f64::NAN)).abs());
            }
        }
        let t1 = tol(1e-8);
        let t2 = tol(1e-12);
        Check::new(
            "ring.series",
            "x_j = c_{-j}(t) solves the flow from e0; invariant on c(t) equals its value",
            worst < t1 && inv_worst < t2,
            format!("max |rk4 - series| {}; max |I(c(t)) - I0| {}", sci(worst), sci(inv_worst)),
        )
    }));

    report.push(timed(|| {
        let mut worst: f64 = 0.0;
        for t in [0.5, 1.0, 2.0] {
            match ring::exp_reconstruction_check(n, t) {
                Ok(e) => worst = worst.max(e),
                Err(e) => return Check::error("ring.exp", "exp reconstruction", e.to_string()),
            }
        }
        let t = tol(1e-10);
        Check::new(
            "ring.exp",
            "exp(tΣ1) = Σ_j c_j(t) Σ1^j for t in {0.5, 1, 2}",
            worst < t,
            format!("max entry error {}", sci(worst)),
        )
    }));

    if s.lax.is_none() && n >= 3 {
        report.push(timed(|| match ring::ring_lax_pair_sampled(n) {
            Ok(pair) => {
                let samples = ring::sample_states(n, 10, opts.seed);
                let res = match pair.max_residual(&samples) {
                    Ok(r) => r,
                    Err(e) => return Check::error("ring.lax", "sampled Lax pair", e.to_string()),
                };
                let mut trace_err: f64 = 0.0;
                if let Some((inv, _)) = s.invariants.first().filter(|_| n == 3) {
                    for x in &samples {
                        let tr = pair.trace_invariant_at(3, x).expect("valid sample");
                        let want = inv.eval_f64(x).expect("length");
                        trace_err = trace_err.max((tr - want).norm());
                    }
                }
                let t = tol(1e-10);
                Check::new(
                    "ring.lax",
                    "sampled |dL/dt - [M, L]| with σ = e^{2πi/n}; tr L^3 / 3 = I for n = 3",
                    res < t && trace_err < t,
                    format!("max residual {}; trace error {}", sci(res), sci(trace_err)),
                )
            }
            Err(e) => Check::error("ring.lax", "sampled Lax pair", e.to_string()),
        }));
    }
}
