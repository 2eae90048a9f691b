//! Browser bindings for three operations: the bracket of a list of
//! functions, the vector Hamiltonian of a divergence-free field, and the
//! generalized hyperbolic functions of the n-level ring.
//!
//! Each binding is a thin wrapper over a plain function returning
//! `Result<String, String>`, so the logic is testable without a browser.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use nambu_core::flows::FlowSystem;
use nambu_core::nambu::{flow_to_vector_hamiltonian, nambu_bracket, HamiltonianSystem};
use nambu_core::ring;
use nambu_core::{Poly, Vars};

const MAX_SAMPLES: usize = 2000;

fn parse_vars(text: &str) -> Result<Vars, String> {
    let names: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.len() < 2 {
        return Err("list at least two variables".into());
    }
    for (i, v) in names.iter().enumerate() {
        let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok || names[..i].contains(v) {
            return Err(format!("bad or repeated variable name `{v}`"));
        }
    }
    Ok(Vars::new(&names))
}

/// Expressions separated by newlines or semicolons.
fn parse_list(text: &str, vars: &Vars) -> Result<Vec<Poly>, String> {
    text.split(['\n', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, e)| Poly::parse(e, vars).map_err(|err| format!("line {}: {err}", i + 1)))
        .collect()
}

pub fn bracket_text(vars: &str, fns: &str, of: &str) -> Result<String, String> {
    let vars = parse_vars(vars)?;
    let fs = parse_list(fns, &vars)?;
    let g = Poly::parse(of, &vars).map_err(|e| format!("G: {e}"))?;
    let system = HamiltonianSystem::new("demo", fs).map_err(|e| e.to_string())?;
    nambu_bracket(&system, &g).map(|p| p.to_string()).map_err(|e| e.to_string())
}

pub fn potential_text(vars: &str, field: &str) -> Result<String, String> {
    let vars = parse_vars(vars)?;
    let rhs = parse_list(field, &vars)?;
    if rhs.len() != vars.len() {
        return Err(format!("{} components for {} variables", rhs.len(), vars.len()));
    }
    let flow = FlowSystem::new(rhs, "demo").map_err(|e| e.to_string())?;
    let x = flow.vector_field().map_err(|e| e.to_string())?;
    flow_to_vector_hamiltonian(&x)
        .map(|h| h.form().to_string())
        .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct RingCurves {
    n: usize,
    t: Vec<f64>,
    /// `c[j][i] = c_j(t_i)`.
    c: Vec<Vec<f64>>,
    invariant: Option<String>,
    /// Invariant along the curve, when one is known for this `n`.
    invariant_values: Vec<f64>,
}

pub fn ring_curves_json(n: usize, t_max: f64, samples: usize) -> Result<String, String> {
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples must be in 2..={MAX_SAMPLES}"));
    }
    if !(t_max > 0.0 && t_max <= 20.0) {
        return Err("t_max must be in (0, 20]".into());
    }
    let invariant = ring::ring_invariant(n);
    let mut out = RingCurves {
        n,
        t: Vec::with_capacity(samples),
        c: vec![Vec::with_capacity(samples); n],
        invariant: invariant.as_ref().map(|p| p.to_string()),
        invariant_values: Vec::new(),
    };
    for i in 0..samples {
        let t = t_max * i as f64 / (samples - 1) as f64;
        let c = ring::c_vector(n, t, 1e-16).map_err(|e| e.to_string())?;
        if let Some(p) = &invariant {
            out.invariant_values.push(p.eval_f64(&c).map_err(|e| e.to_string())?);
        }
        for (row, v) in out.c.iter_mut().zip(c) {
            row.push(v);
        }
        out.t.push(t);
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// `{F1, …, Fk, G}`; `fns` holds one expression per line.
#[wasm_bindgen]
pub fn bracket(vars: &str, fns: &str, of: &str) -> Result<String, JsError> {
    bracket_text(vars, fns, of).map_err(|e| JsError::new(&e))
}

/// Vector Hamiltonian `h` with `dh = X ⌟ Ω`; `field` holds one component per line.
#[wasm_bindgen]
pub fn potential(vars: &str, field: &str) -> Result<String, JsError> {
    potential_text(vars, field).map_err(|e| JsError::new(&e))
}

/// JSON with sampled `c_j(t)` on `[0, t_max]` and the ring invariant along it.
#[wasm_bindgen]
pub fn ring_curves(n: usize, t_max: f64, samples: usize) -> Result<String, JsError> {
    ring_curves_json(n, t_max, samples).map_err(|e| JsError::new(&e))
}
