use proptest::prelude::*;
use symphonic_core::expr::{eval_jet, parse, Expr, MAX_ORDER};

fn coords() -> Vec<String> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

/// Source text of random expressions over `x, y, z`.
fn source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0.0f64..50.0).prop_map(|c| format!("{c}")),
        (0u32..20).prop_map(|c| c.to_string()),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(String::from),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"])).prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner.clone(), -3i32..5).prop_map(|(a, k)| format!("({a})^{k}")),
            (inner.clone(), 1u32..7, 1u32..7).prop_map(|(a, p, q)| format!("({a})^({p}/{q})")),
            (inner, prop::sample::select(vec!["sin", "cos", "exp", "log", "sqrt"])).prop_map(|(a, f)| format!("{f}({a})")),
        ]
    })
}

/// Expressions whose jets are finite everywhere: polynomials in `sin`,
/// `cos` and `exp` of their arguments.
fn smooth() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![(-3.0f64..3.0).prop_map(|c| format!("({c})")), prop::sample::select(vec!["x", "y", "z"]).prop_map(String::from)];
    leaf.prop_recursive(4, 20, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*"])).prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            (inner.clone(), 2i32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            (inner, prop::sample::select(vec!["sin", "cos", "exp"])).prop_map(|(a, f)| format!("{f}(0.5*({a}))")),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5f64..1.5, 3)
}

/// A monomial `c·x^a·y^b·z^c` of total degree at most four.
#[derive(Debug, Clone)]
struct Monomial {
    coef: f64,
    powers: [u8; 3],
}

fn monomial() -> impl Strategy<Value = Monomial> {
    (-5.0f64..5.0, 0u8..5, 0u8..5, 0u8..5)
        .prop_filter("total degree at most 4", |(_, a, b, c)| a + b + c <= 4)
        .prop_map(|(coef, a, b, c)| Monomial { coef, powers: [a, b, c] })
}

fn falling(n: u8, k: u8) -> f64 {
    (0..k).map(|i| f64::from(n - i)).product()
}

impl Monomial {
    fn text(&self) -> String {
        let mut s = format!("({})", self.coef);
        for (name, &p) in ["x", "y", "z"].iter().zip(&self.powers) {
            if p > 0 {
                s.push_str(&format!("*{name}^{p}"));
            }
        }
        s
    }

    /// `∂^α` of the monomial at `x`, by the power rule.
    fn partial(&self, alpha: &[u8], x: &[f64]) -> f64 {
        let mut v = self.coef;
        for i in 0..3 {
            if alpha[i] > self.powers[i] {
                return 0.0;
            }
            v *= falling(self.powers[i], alpha[i]) * x[i].powi(i32::from(self.powers[i] - alpha[i]));
        }
        v
    }
}

fn multi_indices(order: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=order - a {
            for c in 0..=order - a - b {
                out.push([a, b, c]);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn polynomial_jets_match_the_power_rule(terms in prop::collection::vec(monomial(), 1..6), x in point()) {
        let text = terms.iter().map(Monomial::text).collect::<Vec<_>>().join(" + ");
        let e = parse(&text, &coords()).unwrap();
        let jet = eval_jet(&e, &x, MAX_ORDER).unwrap();
        for alpha in multi_indices(MAX_ORDER as u8) {
            let exact: f64 = terms.iter().map(|t| t.partial(&alpha, &x)).sum();
            let scale: f64 = terms.iter().map(|t| t.partial(&alpha, &x).abs()).sum::<f64>().max(1e-300);
            let got = jet.partial(&alpha);
            prop_assert!((got - exact).abs() <= 1e-12 * scale.max(1.0), "{text} at {x:?}, ∂^{alpha:?}: {got} vs {exact}");
        }
    }

    #[test]
    fn lower_order_jets_are_truncations(text in smooth(), x in point(), k in 0usize..MAX_ORDER) {
        let e = parse(&text, &coords()).unwrap();
        let high = eval_jet(&e, &x, MAX_ORDER).unwrap();
        let low = eval_jet(&e, &x, k).unwrap();
        let cut = high.truncate(k);
        prop_assert_eq!(low.coefficients().len(), cut.coefficients().len());
        for (a, b) in low.coefficients().iter().zip(cut.coefficients()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0), "{text}: {a} vs {b}");
        }
    }

    #[test]
    fn parse_print_parse_is_identity(text in source()) {
        let tree = parse(&text, &coords()).unwrap();
        let printed = tree.to_string();
        let again: Expr = parse(&printed, &coords()).unwrap();
        prop_assert_eq!(&again, &tree, "{} printed as {}", text, printed);
    }

    #[test]
    fn jet_value_matches_plain_evaluation(text in source(), x in point()) {
        let e = parse(&text, &coords()).unwrap();
        if let (Ok(v), Ok(j)) = (e.eval(&x), eval_jet(&e, &x, 2)) {
            prop_assert!((v - j.value()).abs() <= 1e-12 * v.abs().max(1.0) || (v.is_nan() && j.value().is_nan()), "{text}: {v} vs {}", j.value());
        }
    }
}
