//! `nambu`: verify shipped systems, compute brackets, vector Hamiltonians,
//! trajectories and ring-system values from the command line.

use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nambu_core::flows::{integrate, FlowError, FlowSystem, Trajectory};
use nambu_core::nambu::{flow_to_vector_hamiltonian, nambu_bracket, HamiltonianSystem, NambuError};
use nambu_core::report::{Status, VerificationReport};
use nambu_core::ring;
use nambu_core::scenario::{self, Scenario, ScenarioError, VerifyOptions};
use nambu_core::{Poly, Vars};

const EXIT_FAIL: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "nambu", version, about = "Exact Nambu mechanics: brackets, vector Hamiltonians, Lax pairs and flows")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Machine-readable output (default for reports).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Human-readable output.
    #[arg(long, global = true)]
    text: bool,
    /// Override every numeric tolerance.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Per-check timing on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check of a shipped scenario or a scenario file.
    Verify {
        /// Shipped scenario name or path to a TOML file.
        scenario: String,
    },
    /// List the shipped scenarios.
    List,
    /// The bracket {F1, ..., Fk, G}.
    Bracket {
        #[arg(long)]
        dim: usize,
        /// Comma-separated variable names (default x,y,z up to 3D, else x0,x1,...).
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        /// Functions F1..Fk; write a leading minus as `(-x)` or `" -x"`.
        #[arg(long, num_args = 1.., required = true)]
        fns: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        of: String,
    },
    /// Vector Hamiltonian h with dh = X ⌟ Ω for a divergence-free field.
    Potential {
        /// Field components, one per variable; write a leading minus as `(-x)` or `" -x"`.
        #[arg(long, num_args = 2.., required = true)]
        field: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// RK4 trajectory as CSV (default) or JSON.
    Flow(FlowArgs),
    /// Generalized hyperbolic functions and ring identities at time t.
    Ring {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Series truncation tolerance; `--tol` is an alias.
        #[arg(long = "series-tol")]
        series_tol: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct FlowArgs {
    /// Scenario providing the field and default integration parameters.
    scenario: Option<String>,
    /// Field components instead of a scenario.
    #[arg(long, num_args = 1.., conflicts_with = "scenario")]
    field: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

/// A failure, with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Unknown(_) => Failure::usage(e.to_string()),
            _ => Failure::runtime(e.to_string()),
        }
    }
}

/// What a command produced: stdout payload plus exit code.
struct Output {
    stdout: String,
    code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    let mut stdout = std::io::stdout().lock();
    let code = match result {
        Ok(out) => {
            let _ = stdout.write_all(out.stdout.as_bytes());
            out.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    let _ = stdout.flush();
    if cli.global.verbose {
        eprintln!("elapsed {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
    }
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    if let Some(t) = g.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::usage(format!("--tol must be positive and finite, got {t}")));
        }
    }
    match &cli.command {
        Command::Verify { scenario } => cmd_verify(scenario, g),
        Command::List => Ok(cmd_list(g)),
        Command::Bracket { dim, vars, fns, of } => cmd_bracket(*dim, vars.as_deref(), fns, of, g),
        Command::Potential { field, vars } => cmd_potential(field, vars.as_deref(), g),
        Command::Flow(args) => cmd_flow(args, g),
        Command::Ring { n, t, series_tol } => cmd_ring(*n, *t, series_tol.or(g.tol), g),
    }
}

fn load_scenario(arg: &str) -> Result<Scenario, Failure> {
    if scenario::shipped_source(arg).is_some() {
        return Ok(Scenario::shipped(arg)?);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(ScenarioError::Unknown(arg.to_string()).into());
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    Scenario::from_toml(&text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn cmd_verify(arg: &str, g: &Global) -> Result<Output, Failure> {
    let s = load_scenario(arg)?;
    let report = scenario::verify(
        &s,
        &VerifyOptions {
            tolerance: g.tol,
            seed: g.seed,
        },
    );
    if g.verbose {
        for c in &report.checks {
            eprintln!("{:28} {:>10.3} ms", c.id, c.elapsed.as_secs_f64() * 1e3);
        }
    }
    let code = report_code(&report);
    let stdout = if g.text {
        report.to_text()
    } else {
        report.to_json() + "\n"
    };
    Ok(Output { stdout, code })
}

fn report_code(report: &VerificationReport) -> u8 {
    if report.checks.iter().any(|c| c.status == Status::Error) {
        EXIT_RUNTIME
    } else if report.all_pass() {
        0
    } else {
        EXIT_FAIL
    }
}

fn cmd_list(g: &Global) -> Output {
    if g.json {
        Output::ok(serde_json::to_string(&scenario::SHIPPED).expect("names serialize") + "\n")
    } else {
        Output::ok(scenario::SHIPPED.iter().map(|s| format!("{s}\n")).collect())
    }
}

fn resolve_vars(dim: usize, names: Option<&[String]>) -> Result<Vars, Failure> {
    match names {
        None => Ok(Vars::default_for(dim)),
        Some(names) if names.len() != dim => Err(Failure::usage(format!(
            "--vars lists {} names for dimension {dim}",
            names.len()
        ))),
        Some(names) => {
            let mut seen = std::collections::BTreeSet::new();
            for v in names {
                let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if !ok || !seen.insert(v) {
                    return Err(Failure::usage(format!("bad or repeated variable name `{v}`")));
                }
            }
            Ok(Vars::new(names))
        }
    }
}

fn parse_expr(label: &str, text: &str, vars: &Vars) -> Result<Poly, Failure> {
    Poly::parse(text, vars).map_err(|e| Failure::usage(format!("{label} `{text}`: {e}")))
}

#[derive(Serialize)]
struct Expression<'a> {
    result: &'a str,
}

fn text_or_json(text: String, g: &Global) -> String {
    if g.json {
        serde_json::to_string(&Expression { result: &text }).expect("string serializes") + "\n"
    } else {
        text + "\n"
    }
}

fn cmd_bracket(dim: usize, vars: Option<&[String]>, fns: &[String], of: &str, g: &Global) -> Result<Output, Failure> {
    if dim < 2 {
        return Err(Failure::usage("--dim must be at least 2"));
    }
    let vars = resolve_vars(dim, vars)?;
    let fs = fns
        .iter()
        .enumerate()
        .map(|(i, f)| parse_expr(&format!("--fns[{i}]"), f, &vars))
        .collect::<Result<Vec<_>, _>>()?;
    let target = parse_expr("--of", of, &vars)?;
    let system = HamiltonianSystem::new("cli", fs).map_err(|e| Failure::usage(e.to_string()))?;
    let value = nambu_bracket(&system, &target).map_err(|e| Failure::runtime(e.to_string()))?;
    Ok(Output::ok(text_or_json(value.to_string(), g)))
}

fn cmd_potential(field: &[String], vars: Option<&[String]>, g: &Global) -> Result<Output, Failure> {
    let vars = resolve_vars(field.len(), vars)?;
    let rhs = field
        .iter()
        .enumerate()
        .map(|(i, f)| parse_expr(&format!("--field[{i}]"), f, &vars))
        .collect::<Result<Vec<_>, _>>()?;
    let flow = FlowSystem::new(rhs, "cli").map_err(|e| Failure::usage(e.to_string()))?;
    let x = flow.vector_field().map_err(|e| Failure::runtime(e.to_string()))?;
    match flow_to_vector_hamiltonian(&x) {
        Ok(h) => Ok(Output::ok(text_or_json(h.form().to_string(), g))),
        Err(NambuError::NonzeroDivergence(div)) => Err(Failure {
            code: EXIT_FAIL,
            message: format!("field is not divergence free; divergence = {div}"),
        }),
        Err(e) => Err(Failure::runtime(e.to_string())),
    }
}

fn cmd_flow(args: &FlowArgs, g: &Global) -> Result<Output, Failure> {
    let (flow, defaults) = match (&args.scenario, &args.field) {
        (Some(name), None) => {
            let s = load_scenario(name)?;
            let d = s.integration.clone().map(|i| (i.x0, i.t_end, i.dt));
            (s.flow, d)
        }
        (None, Some(field)) => {
            let vars = resolve_vars(field.len(), args.vars.as_deref())?;
            let rhs = field
                .iter()
                .enumerate()
                .map(|(i, f)| parse_expr(&format!("--field[{i}]"), f, &vars))
                .collect::<Result<Vec<_>, _>>()?;
            (FlowSystem::new(rhs, "cli").map_err(|e| Failure::usage(e.to_string()))?, None)
        }
        _ => return Err(Failure::usage("flow needs a scenario or --field")),
    };
    let x0 = args
        .x0
        .clone()
        .or_else(|| defaults.as_ref().map(|d| d.0.clone()))
        .ok_or_else(|| Failure::usage("--x0 is required"))?;
    let t_end = args
        .t_end
        .or(defaults.as_ref().map(|d| d.1))
        .ok_or_else(|| Failure::usage("--t-end is required"))?;
    let dt = args
        .dt
        .or(defaults.as_ref().map(|d| d.2))
        .ok_or_else(|| Failure::usage("--dt is required"))?;
    let render = |t: &Trajectory| if g.json { t.to_json() + "\n" } else { t.to_csv() };
    match integrate(&flow, &x0, t_end, dt) {
        Ok(traj) => Ok(Output::ok(render(&traj))),
        Err(FlowError::BlowUp { time, partial }) => {
            eprintln!("error: trajectory blew up at t = {time}; partial output follows");
            Ok(Output {
                stdout: render(&partial),
                code: EXIT_RUNTIME,
            })
        }
        Err(e @ (FlowError::StateLength { .. } | FlowError::InvalidParameters(_) | FlowError::NonFiniteInitial)) => {
            Err(Failure::usage(e.to_string()))
        }
        Err(e) => Err(Failure::runtime(e.to_string())),
    }
}

#[derive(Serialize)]
struct RingInvariant {
    expr: String,
    initial: f64,
    value: f64,
    drift: f64,
}

#[derive(Serialize)]
struct RingResiduals {
    shift_order: f64,
    root_order: f64,
    root_sum: f64,
    commutation: f64,
    exp_reconstruction: f64,
}

#[derive(Serialize)]
struct RingOutput {
    n: usize,
    t: f64,
    tol: f64,
    c: Vec<f64>,
    invariant: Option<RingInvariant>,
    residuals: RingResiduals,
}

fn cmd_ring(n: usize, t: f64, tol: Option<f64>, g: &Global) -> Result<Output, Failure> {
    let tol = tol.unwrap_or(1e-16);
    let bad = |e: ring::RingError| Failure::usage(e.to_string());
    let c = ring::c_vector(n, t, tol).map_err(bad)?;
    let pauli = ring::gen_pauli(n).map_err(bad)?;
    let errs = pauli.identity_errors();
    let exp_err = ring::exp_reconstruction_check(n, t).map_err(bad)?;
    let invariant = ring::ring_invariant(n).map(|p| {
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0;
        let initial = p.eval_f64(&e0).expect("n coordinates");
        let value = p.eval_f64(&c).expect("n coordinates");
        RingInvariant {
            expr: p.to_string(),
            initial,
            value,
            drift: (value - initial).abs(),
        }
    });
    let out = RingOutput {
        n,
        t,
        tol,
        c,
        invariant,
        residuals: RingResiduals {
            shift_order: errs.shift_order,
            root_order: errs.root_order,
            root_sum: errs.root_sum,
            commutation: errs.commutation,
            exp_reconstruction: exp_err,
        },
    };
    let stdout = if g.text {
        let mut s = format!("n = {n}, t = {t}\n");
        for (j, v) in out.c.iter().enumerate() {
            s += &format!("c{j} = {v:.16e}\n");
        }
        if let Some(inv) = &out.invariant {
            s += &format!("I = {}: {:.16e} (initial {}, drift {:.3e})\n", inv.expr, inv.value, inv.initial, inv.drift);
        }
        let r = &out.residuals;
        s += &format!(
            "residuals: shift order {:.3e}, root order {:.3e}, root sum {:.3e}, commutation {:.3e}, exp {:.3e}\n",
            r.shift_order, r.root_order, r.root_sum, r.commutation, r.exp_reconstruction
        );
        s
    } else {
        serde_json::to_string_pretty(&out).expect("ring output serializes") + "\n"
    };
    Ok(Output::ok(stdout))
}
