use std::f64::consts::PI;

use proptest::prelude::*;
use symphonic_core::geometry::{christoffel, metric_at, riemann, Domain, ManifoldModel};
use symphonic_core::models;

fn vector(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, m)
}

fn dot(g: &[Vec<f64>], x: &[f64], y: &[f64]) -> f64 {
    (0..x.len()).map(|i| (0..y.len()).map(|j| g[i][j] * x[i] * y[j]).sum::<f64>()).sum()
}

/// Constant SPD metric `L Lᵀ + I` on `ℝ^m`.
fn constant_metric(m: usize) -> impl Strategy<Value = ManifoldModel> {
    prop::collection::vec(-1.0f64..1.0, m * m).prop_map(move |l| {
        let g: Vec<Vec<String>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).map(|k| l[i * m + k] * l[j * m + k]).sum::<f64>() + if i == j { 1.0 } else { 0.0 })
                    .map(|v| format!("({v})"))
                    .collect()
            })
            .collect();
        let rows: Vec<Vec<&str>> = g.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let rows: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
        let names = ["x", "y", "z"];
        ManifoldModel::from_strings("flat", &names[..m], &rows, Domain::unbounded(m)).unwrap()
    })
}

/// A non-constant metric on `ℝ²` that stays positive definite.
fn curved_metric() -> impl Strategy<Value = ManifoldModel> {
    (0.0f64..1.0, -0.5f64..0.5, -0.9f64..0.9).prop_map(|(a, b, c)| {
        let g11 = format!("1 + {a}*x^2");
        let g12 = format!("({b})*sin(y)");
        let g22 = format!("2 + ({c})*cos(x*y)");
        ManifoldModel::from_strings("curved", &["x", "y"], &[&[&g11, &g12], &[&g12, &g22]], Domain::unbounded(2)).unwrap()
    })
}

fn sphere_point(m: usize) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(0.1f64..PI - 0.1, m - 1), 0.0f64..2.0 * PI).prop_map(|(mut t, p)| {
        t.push(p);
        t
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(100) })]

    #[test]
    fn constant_metrics_are_flat((manifold, x) in (1usize..4).prop_flat_map(|m| (constant_metric(m), vector(m)))) {
        let c = christoffel(&manifold, &x).unwrap();
        prop_assert!(c.gamma.iter().all(|v| *v == 0.0));
        prop_assert!(c.riemann_tensor().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn levi_civita_is_metric_compatible(manifold in curved_metric(), x in vector(2)) {
        let at = metric_at(&manifold, &x, 1).unwrap();
        let jets = at.jets.unwrap();
        let c = christoffel(&manifold, &x).unwrap();
        let g = &at.g;
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let lhs = jets[i][j].d1(k);
                    let rhs: f64 = (0..2).map(|l| c.get(l, k, i) * g[l][j] + c.get(l, k, j) * g[i][l]).sum();
                    prop_assert!((lhs - rhs).abs() <= 1e-8, "∂_{k} g_{i}{j}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn sphere_curvature_symmetries((p, v) in (2usize..5).prop_flat_map(|m| (sphere_point(m), prop::collection::vec(vector(m), 4)))) {
        let m = p.len();
        let manifold = models::sphere_chart(m, 0.1).unwrap();
        let (x, y, z, w) = (&v[0], &v[1], &v[2], &v[3]);
        let g = metric_at(&manifold, &p, 0).unwrap().g;
        let r = |a: &[f64], b: &[f64], c: &[f64]| riemann(&manifold, &p, a, b, c).unwrap();

        let (rxy, ryx) = (r(x, y, z), r(y, x, z));
        for k in 0..m {
            prop_assert!((rxy[k] + ryx[k]).abs() <= 1e-8);
        }
        let (a, b) = (dot(&g, &r(x, y, z), w), dot(&g, &r(x, y, w), z));
        prop_assert!((a + b).abs() <= 1e-8, "{a} vs {b}");
        let (b1, b2, b3) = (r(x, y, z), r(y, z, x), r(z, x, y));
        for k in 0..m {
            prop_assert!((b1[k] + b2[k] + b3[k]).abs() <= 1e-8);
        }
        // Unit sphere: R(X,Y)Z = g(Y,Z)X − g(X,Z)Y.
        for k in 0..m {
            let expected = dot(&g, y, z) * x[k] - dot(&g, x, z) * y[k];
            prop_assert!((rxy[k] - expected).abs() <= 1e-8);
        }
    }
}
