use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use symphonic_cli::report::{CommandEcho, Report};
use symphonic_cli::specfile::{builtin, parse_spec, Problem, BUILTINS};
use symphonic_cli::table::{format_number, parse_points, write_numbers, write_row};
use symphonic_core::cases::{self, CaseOptions, CASE_IDS, DEFAULT_SEED};
use symphonic_core::flow::{FlowState, FlowStatus, DEFAULT_STEP};
use symphonic_core::maps::{MapJet, PointData};
use symphonic_core::mesh::Mesh;
use symphonic_core::oracle::{check_first_variation, check_second_variation, Energy, FIRST_VARIATION_STEP, SECOND_VARIATION_STEP};
use symphonic_core::variational::{bi_tension_on, jacobi_operator};
use symphonic_core::Error;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "symphonic", version, about = "Symphonic and bi-symphonic maps between chart-defined Riemannian manifolds")]
#[command(after_help = "Exit codes: 0 pass, 1 checks failed, 2 usage error, 3 I/O error, 4 numerical-domain error.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the catalog of worked examples.
    Verify(VerifyArgs),
    /// Evaluate a pointwise operator on a grid or a list of points.
    Eval(EvalArgs),
    /// Compare a variation pairing with its finite-difference oracle.
    Variation(VariationArgs),
    /// Run the discrete gradient flow on a periodic source chart.
    Flow(FlowArgs),
}

fn parse_seed(text: &str) -> Result<u64, String> {
    let t = text.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    }
    .map_err(|e| format!("invalid seed `{text}`: {e}"))
}

#[derive(Args)]
struct VerifyArgs {
    /// Case name, or `all`.
    #[arg(long, default_value = "all")]
    case: String,
    /// Seed for sample points (decimal or 0x-prefixed hex); the default is 0x5EED.
    #[arg(long, env = "SYMPHONIC_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
    /// Factor applied to every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    /// Write a JSON report to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Pullback,
    EnergyDensity,
    Tension,
    SymphonicTension,
    BiTension,
    Jacobi,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("sampling").required(true).args(["points", "grid"])))]
struct EvalArgs {
    /// Spec file, or `builtin:NAME`.
    #[arg(long, help = format!("Spec file, or builtin:NAME with NAME one of {BUILTINS}"))]
    spec: String,
    #[arg(long, value_enum)]
    op: Op,
    /// Field for `--op jacobi`.
    #[arg(long)]
    field: Option<String>,
    /// File of source points, one per line.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Grid of N nodes per coordinate.
    #[arg(long)]
    grid: Option<usize>,
    /// CSV output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyArg {
    Sym,
    Bisym,
}

impl From<EnergyArg> for Energy {
    fn from(e: EnergyArg) -> Energy {
        match e {
            EnergyArg::Sym => Energy::Sym,
            EnergyArg::Bisym => Energy::Bisym,
        }
    }
}

#[derive(Args)]
struct VariationArgs {
    #[arg(long, help = format!("Spec file, or builtin:NAME with NAME one of {BUILTINS}"))]
    spec: String,
    /// Variation field; the first field of the spec when absent.
    #[arg(long)]
    field: Option<String>,
    /// Second field, for `--second`.
    #[arg(long)]
    field2: Option<String>,
    /// Mixed second variation of E_sym instead of the first variation.
    #[arg(long)]
    second: bool,
    /// Quadrature nodes per coordinate.
    #[arg(long, default_value_t = 32)]
    grid: usize,
    /// Finite-difference step; 1e-3 for first and 1e-2 for second variations.
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long, value_enum, default_value = "sym")]
    energy: EnergyArg,
    /// Relative tolerance; 1e-4 for first and 1e-3 for second variations.
    #[arg(long)]
    tol: Option<f64>,
    /// Write a JSON report to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long, help = format!("Spec file, or builtin:NAME with NAME one of {BUILTINS}"))]
    spec: String,
    #[arg(long, default_value_t = 32)]
    grid: usize,
    /// Largest number of accepted steps.
    #[arg(long, default_value_t = 5000)]
    steps: usize,
    /// Initial step size.
    #[arg(long, default_value_t = DEFAULT_STEP)]
    dt: f64,
    /// Stop when max ‖τ^s‖ falls to this value.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// Per-step CSV trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// `bisym` runs the experimental bi-symphonic flow.
    #[arg(long, value_enum, default_value = "sym")]
    energy: EnergyArg,
    /// Write a JSON report to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Eval(a) => eval(a),
        Command::Variation(a) => variation(a),
        Command::Flow(a) => flow(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(spec: &str) -> Result<Problem, Failure> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin(name).map_err(|e| usage(e.to_string()));
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    parse_spec(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn echo(name: &str, args: Value) -> CommandEcho {
    let Value::Object(args) = args else { unreachable!("echo arguments are objects") };
    CommandEcho { name: name.into(), args }
}

fn verify(a: VerifyArgs) -> Outcome {
    let start = Instant::now();
    let ids: Vec<&str> = if a.case == "all" {
        CASE_IDS.to_vec()
    } else if cases::is_case(&a.case) {
        vec![a.case.as_str()]
    } else {
        return Err(usage(format!("unknown case `{}`; known cases: all, {}", a.case, CASE_IDS.join(", "))));
    };
    if !(a.tol_scale.is_finite() && a.tol_scale > 0.0) {
        return Err(usage("--tol-scale must be positive"));
    }
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let options = CaseOptions { seed, tol_scale: a.tol_scale };
    let mut results = Vec::with_capacity(ids.len());
    for id in ids {
        let r = cases::run_case(id, options)?;
        println!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.id);
        for c in &r.checks {
            println!(
                "  {} {}: measured {} (tolerance {})",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                format_number(c.measured),
                format_number(c.tolerance)
            );
        }
        for m in &r.measurements {
            println!("  note {}: {}", m.name, format_number(m.value));
        }
        results.push(r);
    }
    let pass = results.iter().all(|r| r.pass);
    println!("{} of {} cases passed (seed {seed:#x})", results.iter().filter(|r| r.pass).count(), results.len());
    if let Some(path) = &a.json {
        let report =
            Report::new(echo("verify", json!({"case": a.case, "tol_scale": a.tol_scale})), Some(seed), json!({}), results, pass, start.elapsed());
        write_file(path, &report.to_json())?;
    }
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

/// Tensor grid over a chart: `n` trapezoid nodes on periodic coordinates
/// and `n` evenly spaced nodes including both ends on bounded ones.
fn grid_points(problem: &Problem, n: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let source = &problem.map.source;
    if n < 2 {
        return Err(usage("--grid needs at least 2 nodes"));
    }
    let mut axes = Vec::with_capacity(source.dim());
    for (i, &(lo, hi)) in source.domain.intervals.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(usage(format!("coordinate `{}` is unbounded; pass --points instead of --grid", source.coords[i])));
        }
        let axis: Vec<f64> = if source.domain.periodic[i] {
            (0..n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
        } else {
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        };
        axes.push(axis);
    }
    let mut points = vec![vec![]];
    for axis in &axes {
        points = points.into_iter().flat_map(|p: Vec<f64>| axis.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    Ok(points)
}

fn op_name(op: Op) -> &'static str {
    match op {
        Op::Pullback => "pullback",
        Op::EnergyDensity => "energy-density",
        Op::Tension => "tension",
        Op::SymphonicTension => "symphonic-tension",
        Op::BiTension => "bi-tension",
        Op::Jacobi => "jacobi",
    }
}

fn eval(a: EvalArgs) -> Outcome {
    let problem = load(&a.spec)?;
    let map = &problem.map;
    let field = match (a.op, &a.field) {
        (Op::Jacobi, None) => return Err(usage("--op jacobi requires --field")),
        (_, Some(name)) => Some(problem.field(name)?.clone()),
        _ => None,
    };
    let points = match (&a.points, a.grid) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            parse_points(&text, map.source.dim()).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        (None, Some(n)) => grid_points(&problem, n)?,
        (None, None) => unreachable!("clap requires --points or --grid"),
    };
    let m = map.source.dim();
    let name = op_name(a.op);
    let columns: Vec<String> = match a.op {
        Op::Pullback => (0..m).flat_map(|i| (0..m).map(move |j| format!("{name}[{}][{}]", i + 1, j + 1))).collect(),
        Op::EnergyDensity => vec![name.to_string()],
        _ => map.target.coords.iter().map(|c| format!("{name}[{c}]")).collect(),
    };
    let width = columns.len();
    let evaluate = |x: &[f64]| -> symphonic_core::Result<Vec<f64>> {
        match a.op {
            Op::Pullback => Ok(PointData::at(map, x)?.pullback_metric().concat()),
            Op::EnergyDensity => Ok(vec![PointData::at(map, x)?.energy_density()]),
            Op::Tension => Ok(PointData::at(map, x)?.tension()),
            Op::SymphonicTension => Ok(PointData::at(map, x)?.symphonic_tension()),
            Op::BiTension => Ok(bi_tension_on(&MapJet::new(map, x, 2)?)?.total()),
            Op::Jacobi => jacobi_operator(map, x, field.as_ref().expect("checked above")),
        }
    };
    let mut out: Vec<u8> = Vec::new();
    let header: Vec<String> = map.source.coords.iter().cloned().chain(columns).collect();
    write_row(&mut out, &header).expect("writing to memory");
    let mut failures = Vec::new();
    for x in &points {
        let values = match evaluate(x) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{x:?}: {e}"));
                vec![f64::NAN; width]
            }
        };
        write_numbers(&mut out, &[x.clone(), values].concat()).expect("writing to memory");
    }
    match &a.out {
        Some(path) => fs::write(path, &out).map_err(|e| io_failure(path, e))?,
        None => io::stdout().write_all(&out).map_err(|e| io_failure(Path::new("<stdout>"), e))?,
    }
    if failures.is_empty() {
        Ok(EXIT_PASS)
    } else {
        for f in &failures {
            eprintln!("error at {f}");
        }
        Ok(EXIT_NUMERICAL)
    }
}

fn variation(a: VariationArgs) -> Outcome {
    let start = Instant::now();
    let problem = load(&a.spec)?;
    let map = &problem.map;
    let field = match &a.field {
        Some(name) => problem.field(name)?.clone(),
        None => problem.fields.first().cloned().ok_or_else(|| usage("the spec has no fields; pass a spec with `fields`"))?,
    };
    if a.second && matches!(a.energy, EnergyArg::Bisym) {
        return Err(usage("--second is available for --energy sym only"));
    }
    if a.grid < 2 {
        return Err(usage("--grid needs at least 2 nodes"));
    }
    let mesh = Mesh::new(&map.source, a.grid)?;
    let (report, tol, label) = if a.second {
        let other = match &a.field2 {
            Some(name) => problem.field(name)?.clone(),
            None => problem.fields.get(1).cloned().ok_or_else(|| usage("--second needs --field2 or a spec with two fields"))?,
        };
        let h = a.fd_step.unwrap_or(SECOND_VARIATION_STEP);
        (check_second_variation(map, &field, &other, &mesh, h)?, a.tol.unwrap_or(1e-3), "-4 int h(J^s(v), w)")
    } else {
        let energy = Energy::from(a.energy);
        let h = a.fd_step.unwrap_or(FIRST_VARIATION_STEP);
        let label = match energy {
            Energy::Sym => "-4 int h(tau^s, v)",
            Energy::Bisym => "-int h(v, tau^s_2)",
        };
        (check_first_variation(map, &field, &mesh, h, energy)?, a.tol.unwrap_or(1e-4), label)
    };
    let pass = report.within(tol, 1e-8);
    println!("analytic {label}: {}", format_number(report.analytic));
    println!("finite-difference oracle: {}", format_number(report.oracle));
    println!("absolute discrepancy: {}", format_number(report.abs_discrepancy));
    println!("relative discrepancy: {} (tolerance {})", format_number(report.rel_discrepancy), format_number(tol));
    match report.order {
        Some(p) => println!("observed order: {}", format_number(p)),
        None => println!("observed order: undefined (differences at the rounding floor)"),
    }
    println!("analytic / oracle: {}", format_number(report.ratio()));
    println!("{}", if pass { "PASS" } else { "FAIL" });
    if let Some(path) = &a.json {
        let out = Report::new(
            echo(
                "variation",
                json!({
                    "spec": a.spec,
                    "field": field.name,
                    "field2": a.field2,
                    "second": a.second,
                    "grid": a.grid,
                    "fd_step": report.step,
                    "energy": Energy::from(a.energy),
                    "tol": tol,
                }),
            ),
            None,
            json!({ "variation": report, "ratio": report.ratio() }),
            vec![],
            pass,
            start.elapsed(),
        );
        write_file(path, &out.to_json())?;
    }
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn flow(a: FlowArgs) -> Outcome {
    let start = Instant::now();
    let problem = load(&a.spec)?;
    let energy = Energy::from(a.energy);
    let mut state = FlowState::new(&problem.map, a.grid, a.dt, energy)?;
    if energy == Energy::Bisym {
        eprintln!("note: the bi-symphonic flow is experimental");
    }
    let status = state.run(a.steps, a.tol)?;
    if let Some(path) = &a.trace {
        let mut out: Vec<u8> = Vec::new();
        let mut header = vec!["step", "epsilon", "E_sym", "max_tau_s_norm"];
        if energy == Energy::Bisym {
            header.push("E_2sym");
        }
        write_row(&mut out, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>()).expect("writing to memory");
        for row in &state.trace {
            let mut cells = vec![row.step.to_string(), format_number(row.epsilon), format_number(row.e_sym), format_number(row.max_tau_s_norm)];
            if let Some(e2) = row.e_2sym {
                cells.push(format_number(e2));
            }
            write_row(&mut out, &cells).expect("writing to memory");
        }
        fs::write(path, &out).map_err(|e| io_failure(path, e))?;
    }
    let status_name = match status {
        FlowStatus::Converged => "converged-symphonic",
        FlowStatus::Stalled => "stalled",
        FlowStatus::BudgetExhausted => "budget-exhausted",
        FlowStatus::LeftChart => "left-chart",
    };
    println!("status: {status_name}");
    println!("accepted steps: {}", state.iteration);
    println!("E_sym: {}", format_number(state.symphonic_energy()));
    if let Some(e2) = state.bi_energy() {
        println!("E_2sym: {}", format_number(e2));
    }
    println!("max |tau^s|: {}", format_number(state.max_tension_norm()));
    println!("final epsilon: {}", format_number(state.epsilon));
    let code = match status {
        FlowStatus::Converged => EXIT_PASS,
        FlowStatus::BudgetExhausted => EXIT_FAIL,
        FlowStatus::Stalled | FlowStatus::LeftChart => EXIT_NUMERICAL,
    };
    if let Some(path) = &a.json {
        let monotone = state.energy_history.windows(2).all(|w| w[1] <= w[0]);
        let out = Report::new(
            echo("flow", json!({"spec": a.spec, "grid": a.grid, "steps": a.steps, "dt": a.dt, "tol": a.tol, "energy": energy})),
            None,
            json!({
                "flow": {
                    "status": status_name,
                    "steps": state.iteration,
                    "e_sym": state.symphonic_energy(),
                    "e_2sym": state.bi_energy(),
                    "max_tau_s_norm": state.max_tension_norm(),
                    "epsilon": state.epsilon,
                    "monotone": monotone,
                }
            }),
            vec![],
            code == EXIT_PASS,
            start.elapsed(),
        );
        write_file(path, &out.to_json())?;
    }
    Ok(code)
}
