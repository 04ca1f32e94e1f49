//! Ready-made charts, maps and fields used by the case catalog, the CLI
//! built-ins and the tests.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::Result;
use crate::expr::Expr;
use crate::geometry::{Domain, Exclusion, ManifoldModel, DEFAULT_EXCLUSION_MARGIN};
use crate::maps::{MapSpec, TangentField};

fn var(index: usize, name: &str) -> Expr {
    Expr::Var { index, name: name.to_string() }
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::Mul(Box::new(a), Box::new(b))
}

fn func(f: crate::expr::Func, a: Expr) -> Expr {
    Expr::Func(f, Box::new(a))
}

/// Spherical chart of the unit sphere `S^m`: polar angles `theta1 …
/// theta{m-1}` kept `margin` away from `0` and `π`, then a periodic
/// azimuth `phi`. Metric `diag(1, sin²θ₁, sin²θ₁ sin²θ₂, …)`.
pub fn sphere_chart(m: usize, margin: f64) -> Result<ManifoldModel> {
    assert!(m >= 1, "sphere dimension must be positive");
    let mut coords: Vec<String> = (1..m).map(|k| format!("theta{k}")).collect();
    if m == 2 {
        coords[0] = "theta".into();
    }
    coords.push("phi".into());
    let mut metric = vec![vec![Expr::Const(0.0); m]; m];
    for k in 0..m {
        let mut entry = Expr::Const(1.0);
        for j in 0..k {
            let s2 = Expr::Pow(Box::new(func(crate::expr::Func::Sin, var(j, &coords[j]))), 2.0);
            entry = if j == 0 { s2 } else { mul(entry, s2) };
        }
        metric[k][k] = entry;
    }
    let mut intervals = vec![(margin, PI - margin); m - 1];
    intervals.push((0.0, 2.0 * PI));
    let mut periodic = vec![false; m - 1];
    periodic.push(true);
    ManifoldModel::new(format!("S{m}"), coords, metric, Domain::new(intervals, periodic))
}

/// The inclusion `S^m ↪ ℝ^{m+1}` on [`sphere_chart`]; for `m = 2` the
/// components are `(sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn sphere_inclusion(m: usize) -> Result<MapSpec> {
    sphere_inclusion_with_margin(m, DEFAULT_EXCLUSION_MARGIN)
}

pub fn sphere_inclusion_with_margin(m: usize, margin: f64) -> Result<MapSpec> {
    use crate::expr::Func::{Cos, Sin};
    let source = sphere_chart(m, margin)?;
    let coords = source.coords.clone();
    // S^1 embedding in the azimuth, then wrap one polar angle at a time
    let phi = var(m - 1, &coords[m - 1]);
    let mut comps = vec![func(Cos, phi.clone()), func(Sin, phi)];
    for k in (0..m - 1).rev() {
        let theta = var(k, &coords[k]);
        comps = comps.into_iter().map(|c| mul(func(Sin, theta.clone()), c)).collect();
        comps.push(func(Cos, theta));
    }
    let names: Vec<String> = (1..=m + 1).map(|k| format!("y{k}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let target = ManifoldModel::euclidean(&format!("R{}", m + 1), &name_refs);
    MapSpec::new(source, target, comps)
}

/// The interval `[lo, hi]` with metric `dt²`.
pub fn interval(lo: f64, hi: f64) -> Result<ManifoldModel> {
    ManifoldModel::new("I", vec!["t".into()], vec![vec![Expr::Const(1.0)]], Domain::new(vec![(lo, hi)], vec![false]))
}

/// `γ(t) = t^a` into `(ℝ, dy²)` on `[lo, hi]`.
pub fn power_curve_on(a: f64, lo: f64, hi: f64) -> Result<MapSpec> {
    let target = ManifoldModel::euclidean("R", &["y"]);
    MapSpec::new(interval(lo, hi)?, target, vec![Expr::Pow(Box::new(var(0, "t")), a)])
}

/// `γ(t) = t^a` on `[0.5, 4]`.
pub fn power_curve(a: f64) -> Result<MapSpec> {
    power_curve_on(a, 0.5, 4.0)
}

/// Flat torus `[0, 2π)^m` with the Euclidean metric.
pub fn flat_torus(m: usize) -> ManifoldModel {
    let coords: Vec<String> = (1..=m).map(|k| format!("x{k}")).collect();
    let metric = (0..m).map(|i| (0..m).map(|j| Expr::Const(if i == j { 1.0 } else { 0.0 })).collect()).collect();
    ManifoldModel::new("T", coords, metric, Domain::new(vec![(0.0, 2.0 * PI); m], vec![true; m])).expect("flat torus is valid")
}

/// Matrix used by the torus test maps.
pub const TORUS_TEST_MATRIX: [[f64; 2]; 2] = [[1.0, 0.3], [0.2, 0.8]];

/// Amplitude of the periodic perturbation in [`torus_test`].
pub const TORUS_TEST_AMPLITUDE: f64 = 0.2;

/// `φ(x) = Ax` from the flat 2-torus into Euclidean `ℝ²`.
pub fn linear_torus(a: [[f64; 2]; 2]) -> Result<MapSpec> {
    torus_map(a, 0.0)
}

/// `φ(x) = Ax + ε(sin x₁, cos x₂)` from the flat 2-torus into Euclidean `ℝ²`.
pub fn torus_map(a: [[f64; 2]; 2], epsilon: f64) -> Result<MapSpec> {
    let comps = [
        format!("{:?}*x1 + {:?}*x2 + {:?}*sin(x1)", a[0][0], a[0][1], epsilon),
        format!("{:?}*x1 + {:?}*x2 + {:?}*cos(x2)", a[1][0], a[1][1], epsilon),
    ];
    let target = ManifoldModel::euclidean("R2", &["y1", "y2"]);
    MapSpec::from_strings(flat_torus(2), target, &[comps[0].as_str(), comps[1].as_str()])
}

/// The torus test map `Ax + 0.2(sin x₁, cos x₂)`.
pub fn torus_test() -> Result<MapSpec> {
    torus_map(TORUS_TEST_MATRIX, TORUS_TEST_AMPLITUDE)
}

/// Two smooth periodic variation fields on the 2-torus sharing Fourier
/// modes, so their mixed pairings do not vanish by orthogonality.
pub fn torus_fields(source: &ManifoldModel) -> Result<(TangentField, TangentField)> {
    let v = TangentField::from_strings("v", source, &["0.5*sin(x1 + 2*x2) + cos(x2)", "cos(2*x1) - 0.3*sin(x2)"], None)?;
    let w =
        TangentField::from_strings("w", source, &["0.7*sin(x1 + 2*x2) + 0.2*cos(x1) + sin(x2)", "0.5*cos(2*x1) + cos(x1 + x2) + 0.3*cos(x2)"], None)?;
    Ok((v, w))
}

/// `ℝ² ∖ {0}` in Cartesian coordinates, restricted to `[-3, 3]²` with a
/// `margin` ball removed at the origin.
pub fn punctured_plane(margin: f64) -> Result<ManifoldModel> {
    ManifoldModel::from_strings(
        "R2*",
        &["x1", "x2"],
        &[&["1", "0"], &["0", "1"]],
        Domain::new(vec![(-3.0, 3.0), (-3.0, 3.0)], vec![false, false]).with_exclusion(Exclusion::Ball { center: vec![0.0, 0.0], radius: margin }),
    )
}

/// `f = (x₁² + x₂²)^p` on the punctured plane, as an expression.
pub fn radial_power(p: f64) -> Expr {
    let r2 = Expr::Add(Box::new(Expr::Pow(Box::new(var(0, "x1")), 2.0)), Box::new(Expr::Pow(Box::new(var(1, "x2")), 2.0)));
    Expr::Pow(Box::new(r2), p)
}

/// `f = (x₁² + x₂²)^p` as a map into `(ℝ, dy²)`.
pub fn radial_power_map(p: f64) -> Result<MapSpec> {
    MapSpec::new(punctured_plane(DEFAULT_EXCLUSION_MARGIN)?, ManifoldModel::euclidean("R", &["y"]), vec![radial_power(p)])
}

/// Amplitude of the perturbation in [`perturbed_linear_torus`].
pub const FLOW_TEST_AMPLITUDE: f64 = 0.1;

/// `x ↦ Ax + 0.1 sin(x₁)(1, −1)`, the starting map for the flow checks.
pub fn perturbed_linear_torus(a: [[f64; 2]; 2]) -> Result<MapSpec> {
    let c = FLOW_TEST_AMPLITUDE;
    let comps = [format!("{:?}*x1 + {:?}*x2 + {c:?}*sin(x1)", a[0][0], a[0][1]), format!("{:?}*x1 + {:?}*x2 - {c:?}*sin(x1)", a[1][0], a[1][1])];
    MapSpec::from_strings(flat_torus(2), ManifoldModel::euclidean("R2", &["y1", "y2"]), &[comps[0].as_str(), comps[1].as_str()])
}

/// Polar coordinates of the annulus `1/2 ≤ r ≤ 2` mapped to the plane.
pub fn annulus_embedding() -> Result<MapSpec> {
    MapSpec::from_strings(polar_annulus(0.5, 2.0)?, ManifoldModel::euclidean("R2", &["y1", "y2"]), &["r*cos(theta)", "r*sin(theta)"])
}

/// Annulus `r0 ≤ r ≤ r1` in polar coordinates `(r, theta)`, metric
/// `dr² + r² dθ²`.
pub fn polar_annulus(r0: f64, r1: f64) -> Result<ManifoldModel> {
    ManifoldModel::from_strings(
        "annulus",
        &["r", "theta"],
        &[&["1", "0"], &["0", "r^2"]],
        Domain::new(vec![(r0, r1), (0.0, 2.0 * PI)], vec![false, true]),
    )
}

/// Upper half-plane `v ≥ 0.1` with the hyperbolic metric `(du² + dv²)/v²`.
pub fn hyperbolic_half_plane() -> Result<ManifoldModel> {
    ManifoldModel::from_strings(
        "H2",
        &["u", "v"],
        &[&["v^-2", "0"], &["0", "v^-2"]],
        Domain::new(vec![(f64::NEG_INFINITY, f64::INFINITY), (DEFAULT_EXCLUSION_MARGIN, f64::INFINITY)], vec![false, false]),
    )
}

/// Number of families produced by [`random_analytic_map`].
pub const RANDOM_MAP_FAMILIES: usize = 6;

fn coef(rng: &mut impl Rng, lo: f64, hi: f64) -> String {
    format!("{:?}", rng.random_range(lo..hi))
}

/// A random analytic map from one of several families, chosen by `family`
/// modulo [`RANDOM_MAP_FAMILIES`]: torus or annulus sources into Euclidean,
/// spherical and hyperbolic targets.
pub fn random_analytic_map(family: usize, rng: &mut impl Rng) -> Result<MapSpec> {
    let mut c = |lo: f64, hi: f64| coef(rng, lo, hi);
    let r2 = || ManifoldModel::euclidean("R2", &["y1", "y2"]);
    match family % RANDOM_MAP_FAMILIES {
        0 => {
            let comps = [
                format!("{}*x1 + {}*x2 + {}*sin(x1 + {}) + {}*cos(2*x2 - x1)", c(0.5, 1.5), c(-0.5, 0.5), c(0.05, 0.3), c(0.0, 6.0), c(-0.2, 0.2)),
                format!("{}*x1 + {}*x2 + {}*cos(x2 + {}) + {}*sin(x1 + x2)", c(-0.5, 0.5), c(0.5, 1.5), c(0.05, 0.3), c(0.0, 6.0), c(-0.2, 0.2)),
            ];
            MapSpec::from_strings(flat_torus(2), r2(), &[comps[0].as_str(), comps[1].as_str()])
        }
        1 => {
            let comps = [
                format!("1.4 + {}*sin(x1 + {}) + {}*cos(x2)", c(0.1, 0.35), c(0.0, 6.0), c(-0.2, 0.2)),
                format!("x1 + {}*x2 + {}*sin(x2 + {})", c(-1.0, 1.0), c(0.1, 0.4), c(0.0, 6.0)),
            ];
            MapSpec::from_strings(flat_torus(2), sphere_chart(2, DEFAULT_EXCLUSION_MARGIN)?, &[comps[0].as_str(), comps[1].as_str()])
        }
        2 => {
            let comps = [
                format!("r*cos(theta) + {}*r^2*sin(2*theta)", c(-0.2, 0.2)),
                format!("r*sin(theta) + {}*cos(theta + r) + {}*r^3", c(-0.3, 0.3), c(-0.05, 0.05)),
            ];
            MapSpec::from_strings(polar_annulus(0.5, 2.0)?, r2(), &[comps[0].as_str(), comps[1].as_str()])
        }
        3 => {
            let comps = [
                format!("1.2 + {}*r*cos(theta + {})", c(0.05, 0.2), c(0.0, 6.0)),
                format!("theta + {}*r + {}*sin(2*theta)", c(-0.5, 0.5), c(-0.2, 0.2)),
            ];
            MapSpec::from_strings(polar_annulus(0.5, 2.0)?, sphere_chart(2, DEFAULT_EXCLUSION_MARGIN)?, &[comps[0].as_str(), comps[1].as_str()])
        }
        4 => {
            let r3 = ManifoldModel::euclidean("R3", &["y1", "y2", "y3"]);
            let comps = [
                format!("{}*cos(x1) + {}*sin(x2)", c(0.5, 1.5), c(-0.5, 0.5)),
                format!("{}*sin(x1 + x2) + {}*x2", c(0.5, 1.5), c(0.5, 1.0)),
                format!("{}*cos(x1 - {}) * sin(x2)", c(0.2, 0.8), c(0.0, 6.0)),
            ];
            MapSpec::from_strings(flat_torus(2), r3, &[comps[0].as_str(), comps[1].as_str(), comps[2].as_str()])
        }
        _ => {
            let comps = [
                format!("{}*r*cos(theta) + {}*sin(r*theta)", c(0.2, 0.6), c(-0.1, 0.1)),
                format!("1.5 + {}*r*sin(theta + {})", c(0.1, 0.5), c(0.0, 6.0)),
            ];
            MapSpec::from_strings(polar_annulus(0.5, 2.0)?, hyperbolic_half_plane()?, &[comps[0].as_str(), comps[1].as_str()])
        }
    }
}

/// A random smooth periodic field on the 2-torus with `n` components.
pub fn random_torus_field(name: &str, n: usize, rng: &mut impl Rng) -> Result<TangentField> {
    let comps: Vec<String> = (0..n)
        .map(|_| {
            format!(
                "{}*sin(x1 + {}) + {}*cos(x2 + {}) + {}*sin(x1 - 2*x2)",
                coef(rng, -1.0, 1.0),
                coef(rng, 0.0, 6.0),
                coef(rng, -1.0, 1.0),
                coef(rng, 0.0, 6.0),
                coef(rng, -0.5, 0.5)
            )
        })
        .collect();
    let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
    TangentField::from_strings(name, &flat_torus(2), &refs, None)
}

/// Uniform sample of a chart's domain; unbounded coordinates are drawn
/// from `[-1, 1]` and excluded regions are rejected.
pub fn sample_point(manifold: &ManifoldModel, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let x: Vec<f64> = manifold
            .domain
            .intervals
            .iter()
            .map(|&(lo, hi)| {
                let (lo, hi) = (if lo.is_finite() { lo } else { -1.0 }, if hi.is_finite() { hi } else { lo.max(-1.0) + 2.0 });
                rng.random_range(lo..hi)
            })
            .collect();
        if manifold.domain.contains(&x) {
            return x;
        }
    }
}
