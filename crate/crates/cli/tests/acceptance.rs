//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always print; exits nonzero when any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use symphonic_core::cases::{self, bi_energy_constants, frame_rotation_gaps, operator_identity_gap, power_curve_polynomial, relative_spread};
use symphonic_core::flow::{grid_tension_error, FlowState, FlowStatus, DEFAULT_STEP};
use symphonic_core::geometry::laplacian;
use symphonic_core::maps::{scalar_symphonic_residual, ChartMap, MapJet};
use symphonic_core::mesh::Mesh;
use symphonic_core::models;
use symphonic_core::oracle::{check_first_variation, check_second_variation, fd_first_variation, richardson_order, Energy};
use symphonic_core::variational::{bi_tension_on, index_form};
use symphonic_core::{Error, Result};

const SEED: u64 = cases::DEFAULT_SEED;

/// Outcome of one criterion: overall verdict plus the measured quantities.
struct Verdict {
    pass: bool,
    detail: Vec<String>,
}

impl Verdict {
    fn new() -> Verdict {
        Verdict { pass: true, detail: vec![] }
    }

    fn require(&mut self, ok: bool, text: String) {
        self.pass &= ok;
        self.detail.push(format!("{} {text}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, text: String) {
        self.detail.push(format!("note {text}"));
    }

    fn runtime(&mut self, elapsed: Duration, limit: Duration) {
        let ok = elapsed < limit;
        self.require(ok, format!("runtime {:.3} s < {} s", elapsed.as_secs_f64(), limit.as_secs_f64()));
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn least(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.min(v) })
}

fn scalar_example() -> Result<Verdict> {
    let start = Instant::now();
    let map = models::radial_power_map(1.0 / 3.0)?;
    let f = &map.components[0];
    let polar = models::polar_annulus(0.2, 3.0)?;
    let points: Vec<Vec<f64>> = cases::sample_points(&polar, SEED, 50).into_iter().map(|p| vec![p[0] * p[1].cos(), p[0] * p[1].sin()]).collect();
    let mut residual = Vec::new();
    let mut lap = Vec::new();
    for x in &points {
        residual.push(scalar_symphonic_residual(&map.source, f, x)?.abs());
        lap.push(laplacian(&map.source, f, x)?.abs());
    }
    let mut v = Verdict::new();
    v.require(worst(residual.iter().copied()) <= 1e-9, format!("max |residual| = {:.3e} <= 1e-9 at 50 points", worst(residual)));
    v.require(least(lap.iter().copied()) > 1e-3, format!("min |Δf| = {:.3e} > 1e-3", least(lap)));
    v.runtime(start.elapsed(), Duration::from_secs(1));
    Ok(v)
}

fn power_curves() -> Result<Verdict> {
    let start = Instant::now();
    let mut v = Verdict::new();
    let fields = |a: f64| -> Result<Vec<(f64, f64)>> {
        let map = models::power_curve(a)?;
        cases::sample_points(&map.source, SEED, 50).iter().map(|t| Ok((t[0], bi_tension_on(&MapJet::new(&map, t, 2)?)?.total()[0]))).collect()
    };
    for a in [1.2, 2.0, 3.0] {
        let rows = fields(a)?;
        let gap = worst(rows.iter().map(|&(t, tau2)| (tau2 - power_curve_polynomial(a, t)).abs() / power_curve_polynomial(a, t).abs()));
        let ratio = rows[0].1 / power_curve_polynomial(a, rows[0].0);
        v.require(gap <= 1e-8, format!("a = {a}: max relative gap of bi-tension to a⁵(a−1)(33a²−89a+60)t^(5a−8) = {gap:.3e} <= 1e-8"));
        v.note(format!("a = {a}: bi-tension / polynomial = {ratio:.12}"));
    }
    for (label, a) in [("4/3", 4.0 / 3.0), ("15/11", 15.0 / 11.0)] {
        let m = worst(fields(a)?.iter().map(|r| r.1.abs()));
        v.require(m <= 1e-8, format!("a = {label}: max |bi-tension| = {m:.3e} <= 1e-8"));
    }
    v.runtime(start.elapsed(), Duration::from_secs(1));
    Ok(v)
}

fn sphere_inclusions() -> Result<Verdict> {
    let start = Instant::now();
    let mut v = Verdict::new();
    for m in 2..=4 {
        let map = models::sphere_inclusion(m)?;
        let mf = m as f64;
        let expected = [2.0 * mf * mf, 0.0, 0.0, mf * mf];
        let (mut tau, mut tau2, mut groups) = (0.0f64, 0.0f64, [0.0f64; 4]);
        for x in cases::sample_points(&map.source, SEED, 50) {
            let mj = MapJet::new(&map, &x, 2)?;
            let p = map.evaluate(&x)?;
            let t = mj.values().symphonic_tension();
            let g = bi_tension_on(&mj)?;
            let total = g.total();
            tau = worst([tau, norm(&t.iter().zip(&p).map(|(a, b)| a + mf * b).collect::<Vec<_>>())]);
            tau2 = worst([tau2, norm(&total.iter().zip(&p).map(|(a, b)| a - 3.0 * mf * mf * b).collect::<Vec<_>>())]);
            for k in 0..4 {
                let gap = norm(&g.0[k].iter().zip(&p).map(|(a, b)| a - expected[k] * b).collect::<Vec<_>>());
                groups[k] = worst([groups[k], gap]);
            }
        }
        v.require(tau <= 1e-6, format!("m = {m}: max ‖τ^s + mP‖ = {tau:.3e} <= 1e-6"));
        v.require(tau2 <= 1e-5, format!("m = {m}: max ‖τ^s_2 − 3m²P‖ = {tau2:.3e} <= 1e-5"));
        for k in 0..4 {
            v.require(groups[k] <= 1e-6, format!("m = {m}: term group {} = {}·P to {:.3e} <= 1e-6", k + 1, expected[k], groups[k]));
        }
    }
    v.runtime(start.elapsed(), Duration::from_secs(5));
    Ok(v)
}

fn first_variation() -> Result<Verdict> {
    let start = Instant::now();
    let mut v = Verdict::new();
    let map = models::torus_test()?;
    let (field, _) = models::torus_fields(&map.source)?;
    let mesh = Mesh::new(&map.source, 32)?;
    let report = check_first_variation(&map, &field, &mesh, 1e-3, Energy::Sym)?;
    v.require(
        report.rel_discrepancy <= 1e-4,
        format!("relative |FD − (−4∫h(τ^s, υ))| = {:.3e} <= 1e-4 (analytic {}, FD {})", report.rel_discrepancy, report.analytic, report.oracle),
    );
    match report.order {
        Some(p) => v.require(p >= 3.5, format!("observed order at h = 1e-3 is {p:.3} >= 3.5")),
        None => v.note("FD differences at h, h/2, h/4 sit at the rounding floor: E_sym is quartic along the deformation, so the stencil is exact and no order is observable there".into()),
    }
    // The stencil order where it is observable: E_2sym along the same deformation.
    let steps = [0.2, 0.1, 0.05];
    let fd: Vec<f64> = steps.iter().map(|&h| fd_first_variation(&map, &field, &mesh, h, Energy::Bisym)).collect::<Result<_>>()?;
    let order = richardson_order([fd[0], fd[1], fd[2]]);
    v.require(
        order.is_some_and(|p| p >= 3.5),
        format!("stencil order on E_2sym at h = 0.2, 0.1, 0.05 is {} >= 3.5", order.map_or("undefined".into(), |p| format!("{p:.4}"))),
    );
    v.runtime(start.elapsed(), Duration::from_secs(10));
    Ok(v)
}

fn second_variation() -> Result<Verdict> {
    let mut v = Verdict::new();
    let map = models::linear_torus(models::TORUS_TEST_MATRIX)?;
    let (a, b) = models::torus_fields(&map.source)?;
    let mesh = Mesh::new(&map.source, 32)?;
    let report = check_second_variation(&map, &a, &b, &mesh, 1e-2)?;
    v.require(
        report.rel_discrepancy <= 1e-3,
        format!(
            "relative |mixed FD − (−4∫h(J^s υ, w))| = {:.3e} <= 1e-3 (analytic {}, FD {}, ratio {:.6})",
            report.rel_discrepancy,
            report.analytic,
            report.oracle,
            report.ratio()
        ),
    );
    let (vw, wv) = (index_form(&map, &a, &b, &mesh)?, index_form(&map, &b, &a, &mesh)?);
    let sym = (vw - wv).abs() / vw.abs().max(wv.abs());
    v.require(sym <= 1e-6, format!("index-form symmetry gap {sym:.3e} <= 1e-6"));
    Ok(v)
}

fn operator_identity() -> Result<Verdict> {
    let mut v = Verdict::new();
    let maps = cases::random_maps(SEED, 6)?;
    for (k, map) in maps.iter().enumerate() {
        let points = cases::sample_points(map.source(), SEED + k as u64, 100);
        let gap = operator_identity_gap(map, &points)?;
        v.require(gap <= 1e-8, format!("map {} ({} → {}): max relative gap {gap:.3e} <= 1e-8", k + 1, map.source.name, map.target.name));
    }
    Ok(v)
}

fn bi_energy_pairing() -> Result<Verdict> {
    let mut v = Verdict::new();
    let constants = bi_energy_constants(SEED, 5, 16)?;
    let spread = relative_spread(&constants);
    v.require(spread <= 1e-2, format!("relative spread of FD(E_2sym) / ∫h(υ, τ^s_2) over 5 random (φ, υ) = {spread:.3e} <= 1e-2"));
    let listed: Vec<String> = constants.iter().map(|c| format!("{c:.6}")).collect();
    v.note(format!("measured constants: {}", listed.join(", ")));
    Ok(v)
}

fn flow() -> Result<Verdict> {
    let mut v = Verdict::new();
    let map = models::perturbed_linear_torus(models::TORUS_TEST_MATRIX)?;
    let mut state = FlowState::new(&map, 32, DEFAULT_STEP, Energy::Sym)?;
    let status = state.run(5000, 1e-5)?;
    let monotone = state.energy_history.windows(2).all(|w| w[1] <= w[0]);
    v.require(monotone, format!("E_sym non-increasing over {} accepted steps", state.iteration));
    v.require(
        status == FlowStatus::Converged,
        format!("status {status:?} after {} steps, max ‖τ^s‖ = {:.3e} <= 1e-5", state.iteration, state.max_tension_norm()),
    );
    let errors: Vec<f64> = [16, 32, 64].iter().map(|&n| grid_tension_error(&map, n)).collect::<Result<_>>()?;
    for (k, pair) in errors.windows(2).enumerate() {
        let order = (pair[0] / pair[1]).log2();
        let (n, n2) = (16 << k, 32 << k);
        v.require(order >= 3.5, format!("grid-vs-jet τ^s order {n}→{n2} = {order:.3} >= 3.5"));
    }
    Ok(v)
}

fn frame_independence() -> Result<Verdict> {
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut gaps = [0.0f64; 3];
    for (k, map) in cases::random_maps(SEED, 6)?.iter().enumerate() {
        let points = cases::sample_points(map.source(), SEED ^ (k as u64 + 1), 100);
        let g = frame_rotation_gaps(map, &points, &mut rng)?;
        for i in 0..3 {
            gaps[i] = worst([gaps[i], g[i]]);
        }
    }
    for (name, g) in ["τ^s", "τ^s_2", "‖φ*h‖²"].iter().zip(gaps) {
        v.require(g <= 1e-9, format!("{name}: max relative change under frame rotation {g:.3e} <= 1e-9 (6 maps × 100 points)"));
    }
    Ok(v)
}

fn io<T>(r: std::io::Result<T>) -> Result<T> {
    r.map_err(|e| Error::Invalid(e.to_string()))
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_symphonic")).args(args).env_remove("SYMPHONIC_SEED").output().expect("the binary runs")
}

fn cli_contract() -> Result<Verdict> {
    let mut v = Verdict::new();
    let dir = std::env::temp_dir().join(format!("symphonic-acceptance-{}", std::process::id()));
    io(std::fs::create_dir_all(&dir))?;
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    let out = run(&["verify", "--case", "all", "--json", a.to_str().unwrap()]);
    let code = out.status.code();
    let failing: Vec<String> = String::from_utf8_lossy(&out.stdout).lines().filter(|l| l.starts_with("FAIL")).map(String::from).collect();
    v.require(
        code == Some(0),
        format!(
            "`verify --case all` exit code {code:?} == 0{}",
            if failing.is_empty() { String::new() } else { format!(" (failing: {})", failing.join("; ")) }
        ),
    );
    run(&["verify", "--case", "all", "--json", b.to_str().unwrap()]);
    let report: Value = serde_json::from_str(&io(std::fs::read_to_string(&a))?).expect("report is JSON");
    let controls: Vec<&Value> =
        report["cases"].as_array().unwrap().iter().flat_map(|c| c["checks"].as_array().unwrap()).filter(|c| c["negative_control"] == true).collect();
    let detected = controls.iter().filter(|c| c["measured"].as_f64().is_some_and(|m| m > c["tolerance"].as_f64().unwrap())).count();
    v.require(
        !controls.is_empty() && detected == controls.len(),
        format!("{detected} of {} negative-control perturbations exceed their tolerance", controls.len()),
    );
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let schema: Value = serde_json::from_str(&io(std::fs::read_to_string(schema_path))?).expect("schema is JSON");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors = validator.iter_errors(&report).count();
    v.require(errors == 0, format!("report validates against docs/report.schema.json ({errors} errors)"));
    let strip = |p: &Path| -> Result<String> {
        let t = io(std::fs::read_to_string(p))?;
        Ok(t[..t.find("\"timing\"").unwrap_or(t.len())].to_string())
    };
    v.require(strip(&a)? == strip(&b)?, "two runs with the default seed give byte-identical reports outside `timing`".into());
    io(std::fs::remove_dir_all(&dir))?;
    Ok(v)
}

type Criterion = (&'static str, fn() -> Result<Verdict>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("scalar symphonic example", scalar_example),
        ("power-curve bi-symphonic roots", power_curves),
        ("sphere inclusion", sphere_inclusions),
        ("first variation of E_sym", first_variation),
        ("second variation of E_sym", second_variation),
        ("operator identity τ^s_2 = J^s(τ^s)", operator_identity),
        ("bi-energy pairing constant", bi_energy_pairing),
        ("symphonic flow", flow),
        ("frame independence", frame_independence),
        ("CLI contract", cli_contract),
    ];
    let mut passed = 0;
    for (k, (title, check)) in criteria.iter().enumerate() {
        let verdict = check().unwrap_or_else(|e| Verdict { pass: false, detail: vec![format!("FAIL error: {e}")] });
        println!("{} criterion {}: {title}", if verdict.pass { "PASS" } else { "FAIL" }, k + 1);
        for line in &verdict.detail {
            println!("    {line}");
        }
        passed += verdict.pass as usize;
    }
    println!("acceptance: {passed} of {} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
