//! JSON spec files and the built-in specs.

use serde::{Deserialize, Serialize};
use symphonic_core::expr::parse;
use symphonic_core::geometry::{Domain, Exclusion, ManifoldModel};
use symphonic_core::maps::{Bump, MapSpec, TangentField};
use symphonic_core::{models, Error, Result};

/// A domain bound: a number, a constant expression that may use `pi`, or
/// `null` for an unbounded side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Number(f64),
    Expr(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub intervals: Vec<[Option<Bound>; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub periodic: Vec<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclusions: Vec<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub coords: Vec<String>,
    pub metric: Vec<Vec<String>>,
    /// Absent means all of `ℝ^dim`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapComponents {
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bump: Option<BumpSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub source: ChartSpec,
    pub target: ChartSpec,
    pub map: MapComponents,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldSpec>,
}

/// A validated spec: the map and its named fields.
#[derive(Debug, Clone)]
pub struct Problem {
    pub map: MapSpec,
    pub fields: Vec<TangentField>,
}

impl Problem {
    pub fn field(&self, name: &str) -> Result<&TangentField> {
        self.fields.iter().find(|f| f.name == name).ok_or_else(|| {
            let known: Vec<&str> = self.fields.iter().map(|f| f.name.as_str()).collect();
            Error::Spec { path: "/fields".into(), message: format!("no field named `{name}`; available: [{}]", known.join(", ")) }
        })
    }
}

fn spec_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Spec { path: path.into(), message: message.into() }
}

/// Parses and validates a spec document.
pub fn parse_spec(text: &str) -> Result<Problem> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: SpecFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().iter().map(|seg| format!("/{}", segment(&seg.to_string()))).collect::<String>();
        spec_error(path, e.into_inner().to_string())
    })?;
    spec.build()
}

fn segment(s: &str) -> String {
    // serde_path_to_error prints sequence indices as `[i]`
    s.trim_start_matches('[').trim_end_matches(']').replace('~', "~0").replace('/', "~1")
}

impl SpecFile {
    pub fn build(&self) -> Result<Problem> {
        let source = self.source.build("/source")?;
        let target = self.target.build("/target")?;
        if self.map.components.len() != target.dim() {
            return Err(spec_error(
                "/map/components",
                format!("{} components for a target of dimension {}", self.map.components.len(), target.dim()),
            ));
        }
        let components = self
            .map
            .components
            .iter()
            .enumerate()
            .map(|(a, c)| parse(c, &source.coords).map_err(|e| spec_error(format!("/map/components/{a}"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let mut fields = Vec::with_capacity(self.fields.len());
        for (k, f) in self.fields.iter().enumerate() {
            let path = format!("/fields/{k}");
            if f.components.len() != target.dim() {
                return Err(spec_error(
                    format!("{path}/components"),
                    format!("{} components for a target of dimension {}", f.components.len(), target.dim()),
                ));
            }
            if fields.iter().any(|g: &TangentField| g.name == f.name) {
                return Err(spec_error(format!("{path}/name"), format!("duplicate field name `{}`", f.name)));
            }
            let exprs = f
                .components
                .iter()
                .enumerate()
                .map(|(a, c)| parse(c, &source.coords).map_err(|e| spec_error(format!("{path}/components/{a}"), e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            let bump = match &f.bump {
                None => None,
                Some(b) => {
                    if b.center.len() != source.dim() {
                        return Err(spec_error(format!("{path}/bump/center"), format!("expected {} coordinates", source.dim())));
                    }
                    if !(b.radius.is_finite() && b.radius > 0.0) {
                        return Err(spec_error(format!("{path}/bump/radius"), "radius must be positive"));
                    }
                    Some(Bump { center: b.center.clone(), radius: b.radius })
                }
            };
            fields.push(TangentField::new(f.name.clone(), exprs, bump));
        }
        let map = MapSpec::new(source, target, components).map_err(|e| spec_error("/map", e.to_string()))?;
        Ok(Problem { map, fields })
    }

    /// The spec describing `map` and `fields`.
    pub fn from_problem(map: &MapSpec, fields: &[TangentField]) -> SpecFile {
        SpecFile {
            source: ChartSpec::from_model(&map.source),
            target: ChartSpec::from_model(&map.target),
            map: MapComponents { components: map.components.iter().map(ToString::to_string).collect() },
            fields: fields
                .iter()
                .map(|f| FieldSpec {
                    name: f.name.clone(),
                    components: f.components.iter().map(ToString::to_string).collect(),
                    bump: f.bump.as_ref().map(|b| BumpSpec { center: b.center.clone(), radius: b.radius }),
                })
                .collect(),
        }
    }
}

fn bound_value(bound: &Option<Bound>, infinite: f64, path: &str) -> Result<f64> {
    match bound {
        None => Ok(infinite),
        Some(Bound::Number(v)) => Ok(*v),
        Some(Bound::Expr(src)) => {
            let expr = parse(src, &["pi".to_string()]).map_err(|e| spec_error(path, e.to_string()))?;
            expr.eval(&[std::f64::consts::PI]).map_err(|e| spec_error(path, e.to_string()))
        }
    }
}

fn bound_spec(v: f64) -> Option<Bound> {
    v.is_finite().then_some(Bound::Number(v))
}

impl ChartSpec {
    fn build(&self, path: &str) -> Result<ManifoldModel> {
        let m = self.dim;
        if m == 0 {
            return Err(spec_error(format!("{path}/dim"), "dimension must be positive"));
        }
        if self.coords.len() != m {
            return Err(spec_error(format!("{path}/coords"), format!("{} coordinates for dimension {m}", self.coords.len())));
        }
        for (i, c) in self.coords.iter().enumerate() {
            let ok = c.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
                && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
            if !ok || self.coords[..i].contains(c) {
                return Err(spec_error(format!("{path}/coords/{i}"), format!("`{c}` is not a fresh identifier")));
            }
        }
        if self.metric.len() != m {
            return Err(spec_error(format!("{path}/metric"), format!("{} rows for dimension {m}", self.metric.len())));
        }
        let mut metric = Vec::with_capacity(m);
        for (i, row) in self.metric.iter().enumerate() {
            if row.len() != m {
                return Err(spec_error(format!("{path}/metric/{i}"), format!("{} entries for dimension {m}", row.len())));
            }
            metric.push(
                row.iter()
                    .enumerate()
                    .map(|(j, e)| parse(e, &self.coords).map_err(|err| spec_error(format!("{path}/metric/{i}/{j}"), err.to_string())))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let domain = match &self.domain {
            None => Domain::unbounded(m),
            Some(d) => {
                if d.intervals.len() != m {
                    return Err(spec_error(format!("{path}/domain/intervals"), format!("{} intervals for dimension {m}", d.intervals.len())));
                }
                let periodic = if d.periodic.is_empty() { vec![false; m] } else { d.periodic.clone() };
                if periodic.len() != m {
                    return Err(spec_error(format!("{path}/domain/periodic"), format!("{} flags for dimension {m}", periodic.len())));
                }
                let mut intervals = Vec::with_capacity(m);
                for (i, [lo, hi]) in d.intervals.iter().enumerate() {
                    let at = format!("{path}/domain/intervals/{i}");
                    let lo = bound_value(lo, f64::NEG_INFINITY, &format!("{at}/0"))?;
                    let hi = bound_value(hi, f64::INFINITY, &format!("{at}/1"))?;
                    if lo.is_nan() || hi.is_nan() || lo >= hi {
                        return Err(spec_error(at, format!("empty interval [{lo}, {hi}]")));
                    }
                    if periodic[i] && !(lo.is_finite() && hi.is_finite()) {
                        return Err(spec_error(at, "a periodic coordinate needs finite bounds"));
                    }
                    intervals.push((lo, hi));
                }
                for (k, e) in d.exclusions.iter().enumerate() {
                    let dims_ok = match e {
                        Exclusion::Ball { center, radius } => center.len() == m && *radius > 0.0,
                        Exclusion::HalfLine { origin, direction, margin } => {
                            origin.len() == m && direction.len() == m && direction.iter().any(|v| *v != 0.0) && *margin > 0.0
                        }
                    };
                    if !dims_ok {
                        return Err(spec_error(format!("{path}/domain/exclusions/{k}"), "exclusion does not fit the chart"));
                    }
                }
                Domain { intervals, periodic, exclusions: d.exclusions.clone() }
            }
        };
        let name = self.name.clone().unwrap_or_else(|| path.trim_start_matches('/').to_string());
        ManifoldModel::new(name, self.coords.clone(), metric, domain).map_err(|e| spec_error(format!("{path}/metric"), e.to_string()))
    }

    fn from_model(model: &ManifoldModel) -> ChartSpec {
        let d = &model.domain;
        let unbounded =
            d.intervals.iter().all(|(lo, hi)| lo.is_infinite() && hi.is_infinite()) && d.exclusions.is_empty() && !d.periodic.iter().any(|&p| p);
        ChartSpec {
            name: Some(model.name.clone()),
            dim: model.dim(),
            coords: model.coords.clone(),
            metric: model.metric.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect(),
            domain: (!unbounded).then(|| DomainSpec {
                intervals: d.intervals.iter().map(|&(lo, hi)| [bound_spec(lo), bound_spec(hi)]).collect(),
                periodic: d.periodic.clone(),
                exclusions: d.exclusions.clone(),
            }),
        }
    }
}

/// Names accepted after `builtin:`.
pub const BUILTINS: &str =
    "sphere-M (M = 1..5), power-curve:A (A a decimal or fraction such as 4/3), torus-test, torus-linear, torus-perturbed, scalar-symphonic, annulus";

fn parse_number(text: &str) -> Option<f64> {
    match text.split_once('/') {
        Some((n, d)) => Some(n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?),
        None => text.trim().parse().ok(),
    }
}

/// The built-in spec `name` (without the `builtin:` prefix).
pub fn builtin(name: &str) -> Result<Problem> {
    let unknown = || Error::Invalid(format!("unknown built-in spec `{name}`; known: {BUILTINS}"));
    let torus_fields = |map: MapSpec| -> Result<Problem> {
        let (v, w) = models::torus_fields(&map.source)?;
        Ok(Problem { map, fields: vec![v, w] })
    };
    if let Some(m) = name.strip_prefix("sphere-") {
        let m: usize = m.parse().map_err(|_| unknown())?;
        if !(1..=5).contains(&m) {
            return Err(unknown());
        }
        return Ok(Problem { map: models::sphere_inclusion(m)?, fields: vec![] });
    }
    if let Some(a) = name.strip_prefix("power-curve:") {
        let a = parse_number(a).filter(|a| a.is_finite()).ok_or_else(unknown)?;
        return Ok(Problem { map: models::power_curve(a)?, fields: vec![] });
    }
    match name {
        "torus-test" => torus_fields(models::torus_test()?),
        "torus-linear" => torus_fields(models::linear_torus(models::TORUS_TEST_MATRIX)?),
        "torus-perturbed" => torus_fields(models::perturbed_linear_torus(models::TORUS_TEST_MATRIX)?),
        "scalar-symphonic" => Ok(Problem { map: models::radial_power_map(1.0 / 3.0)?, fields: vec![] }),
        "annulus" => Ok(Problem { map: models::annulus_embedding()?, fields: vec![] }),
        _ => Err(unknown()),
    }
}
