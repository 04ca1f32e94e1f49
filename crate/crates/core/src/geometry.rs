//! Single-chart Riemannian geometry: metric evaluation, Levi-Civita
//! connection, curvature, orthonormal frames and scalar-field calculus.
//!
//! Curvature follows `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`, i.e.
//! `R^l_{kij} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`
//! with `R(∂_i,∂_j)∂_k = R^l_{kij} ∂_l`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{eval_jet, parse, Expr, Jet};
use crate::scalar::{self, gram_schmidt, invert, Matrix, Scalar};

/// Default distance kept from singular loci of a chart.
pub const DEFAULT_EXCLUSION_MARGIN: f64 = 0.1;

const SPD_FLOOR: f64 = 1e-10;

/// A region removed from a chart, typically around a coordinate singularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Points within `margin` of the ray `origin + s·direction`, `s ≥ 0`.
    HalfLine {
        origin: Vec<f64>,
        direction: Vec<f64>,
        margin: f64,
    },
}

impl Exclusion {
    fn excludes(&self, x: &[f64]) -> bool {
        match self {
            Exclusion::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
                d2 < radius * radius
            }
            Exclusion::HalfLine { origin, direction, margin } => {
                let norm2: f64 = direction.iter().map(|d| d * d).sum();
                let rel: Vec<f64> = x.iter().zip(origin).map(|(a, b)| a - b).collect();
                let s = (rel.iter().zip(direction).map(|(r, d)| r * d).sum::<f64>() / norm2).max(0.0);
                let d2: f64 = rel.iter().zip(direction).map(|(r, d)| (r - s * d).powi(2)).sum();
                d2 < margin * margin
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    /// Closed coordinate intervals; infinite bounds are allowed for
    /// non-periodic coordinates.
    pub intervals: Vec<(f64, f64)>,
    pub periodic: Vec<bool>,
    pub exclusions: Vec<Exclusion>,
}

impl Domain {
    pub fn new(intervals: Vec<(f64, f64)>, periodic: Vec<bool>) -> Self {
        Domain { intervals, periodic, exclusions: Vec::new() }
    }

    /// `ℝ^n` with no periodic coordinates.
    pub fn unbounded(n: usize) -> Self {
        Domain::new(vec![(f64::NEG_INFINITY, f64::INFINITY); n], vec![false; n])
    }

    pub fn with_exclusion(mut self, exclusion: Exclusion) -> Self {
        self.exclusions.push(exclusion);
        self
    }

    pub fn period(&self, i: usize) -> Option<f64> {
        self.periodic[i].then(|| self.intervals[i].1 - self.intervals[i].0)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.intervals.len()
            && x.iter().all(|v| v.is_finite())
            && x.iter().enumerate().all(|(i, &v)| {
                let (lo, hi) = self.intervals[i];
                self.periodic[i] || (lo <= v && v <= hi)
            })
            && !self.exclusions.iter().any(|e| e.excludes(x))
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }
}

/// A Riemannian manifold given by one chart.
#[derive(Debug, Clone)]
pub struct ManifoldModel {
    pub name: String,
    pub coords: Vec<String>,
    /// Metric coefficients `g_ij`, full symmetric table.
    pub metric: Matrix<Expr>,
    pub domain: Domain,
    constant_metric: Option<Matrix<f64>>,
}

impl ManifoldModel {
    pub fn new(name: impl Into<String>, coords: Vec<String>, metric: Matrix<Expr>, domain: Domain) -> Result<Self> {
        let name = name.into();
        let m = coords.len();
        if m == 0 {
            return Err(Error::spec(format!("/{name}/coords"), "at least one coordinate is required"));
        }
        if metric.len() != m || metric.iter().any(|row| row.len() != m) {
            return Err(Error::spec(format!("/{name}/metric"), format!("metric must be {m}×{m}")));
        }
        if domain.intervals.len() != m || domain.periodic.len() != m {
            return Err(Error::spec(format!("/{name}/domain"), format!("domain must describe {m} coordinates")));
        }
        for (i, &(lo, hi)) in domain.intervals.iter().enumerate() {
            if !(lo < hi) || (domain.periodic[i] && !(lo.is_finite() && hi.is_finite())) {
                return Err(Error::spec(format!("/{name}/domain/intervals/{i}"), "invalid interval"));
            }
        }
        let constant_metric =
            metric.iter().map(|row| row.iter().map(Expr::constant_value).collect::<Option<Vec<f64>>>()).collect::<Option<Matrix<f64>>>();
        let model = ManifoldModel { name, coords, metric, domain, constant_metric };
        model.check_symmetric()?;
        Ok(model)
    }

    /// Builds a model from metric expression strings.
    pub fn from_strings(name: &str, coords: &[&str], metric: &[&[&str]], domain: Domain) -> Result<Self> {
        let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        let table = metric
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, src)| parse(src, &coords).map_err(|e| Error::spec(format!("/{name}/metric/{i}/{j}"), e.to_string())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ManifoldModel::new(name, coords, table, domain)
    }

    /// Euclidean `ℝ^n` with coordinates named by `coords`.
    pub fn euclidean(name: &str, coords: &[&str]) -> Self {
        let n = coords.len();
        let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        let metric = (0..n).map(|i| (0..n).map(|j| Expr::Const(if i == j { 1.0 } else { 0.0 })).collect()).collect();
        ManifoldModel::new(name, names, metric, Domain::unbounded(n)).expect("euclidean model is valid")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn has_constant_metric(&self) -> bool {
        self.constant_metric.is_some()
    }

    fn check_symmetric(&self) -> Result<()> {
        let m = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        for i in 0..m {
            for j in i + 1..m {
                if self.metric[i][j] == self.metric[j][i] {
                    continue;
                }
                let mut tested = 0;
                for _ in 0..1000 {
                    if tested == 100 {
                        break;
                    }
                    let x: Vec<f64> = self.domain.intervals.iter().map(|&(lo, hi)| rng.random_range(lo.max(-10.0)..=hi.min(10.0))).collect();
                    if !self.domain.contains(&x) {
                        continue;
                    }
                    let (a, b) = match (self.metric[i][j].eval(&x), self.metric[j][i].eval(&x)) {
                        (Ok(a), Ok(b)) => (a, b),
                        _ => continue,
                    };
                    tested += 1;
                    if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                        return Err(Error::spec(
                            format!("/{}/metric/{i}/{j}", self.name),
                            format!("metric is not symmetric: g_{i}{j} = {a} but g_{j}{i} = {b} at {x:?}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { chart: self.name.clone(), point: x.to_vec() })
        }
    }

    /// Metric coefficients as jets in the chart coordinates around `x`.
    pub fn metric_jets(&self, x: &[f64], order: usize) -> Result<Matrix<Jet>> {
        let m = self.dim();
        let mut out: Matrix<Jet> = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                if j < i {
                    row.push(out[j][i].clone());
                } else if let Some(c) = &self.constant_metric {
                    row.push(Jet::constant(c[i][j], m, order));
                } else {
                    row.push(eval_jet(&self.metric[i][j], x, order)?);
                }
            }
            out.push(row);
        }
        Ok(out)
    }

    /// Metric values at `x` without derivatives.
    pub fn metric_values(&self, x: &[f64]) -> Result<Matrix<f64>> {
        if let Some(c) = &self.constant_metric {
            return Ok(c.clone());
        }
        let m = self.dim();
        let mut out = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let v = self.metric[i][j].eval(x)?;
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        Ok(out)
    }
}

/// Metric data at one point.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub g: Matrix<f64>,
    pub inverse: Matrix<f64>,
    /// Volume density `√det g`.
    pub sqrt_det: f64,
    /// Jets of `g_ij` when requested with order ≥ 1.
    pub jets: Option<Matrix<Jet>>,
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(g: &Matrix<f64>) -> f64 {
    let m = g.len();
    let mat = DMatrix::from_fn(m, m, |i, j| g[i][j]);
    SymmetricEigen::new(mat).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub(crate) fn check_spd(g: &Matrix<f64>, x: &[f64]) -> Result<()> {
    let min = min_eigenvalue(g);
    if !(min > SPD_FLOOR) {
        return Err(Error::NotPositiveDefinite { point: x.to_vec(), min_eigenvalue: min });
    }
    Ok(())
}

pub fn metric_at(manifold: &ManifoldModel, x: &[f64], order: usize) -> Result<MetricAtPoint> {
    manifold.check_point(x)?;
    let (g, jets) = if order >= 1 {
        let jets = manifold.metric_jets(x, order)?;
        (scalar::values(&jets), Some(jets))
    } else {
        (manifold.metric_values(x)?, None)
    };
    check_spd(&g, x)?;
    let inverse = invert(&g)?;
    let sqrt_det = scalar::determinant(&g)?.sqrt();
    Ok(MetricAtPoint { g, inverse, sqrt_det, jets })
}

/// Christoffel symbols `Γ^k_{ij}` from metric jets; the result has one
/// order less than the input.
pub fn christoffel_jets<S: Scalar>(g: &Matrix<S>, dg: &[Matrix<S>]) -> Result<Vec<S>> {
    // dg[l][i][j] = ∂_l g_ij
    let m = g.len();
    let ginv = invert(g)?;
    let zero = dg[0][0][0].zero_like();
    let mut out = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let mut acc = zero.clone();
                for l in 0..m {
                    let bracket = dg[i][j][l].clone() + dg[j][i][l].clone() - dg[l][i][j].clone();
                    acc = acc + ginv[k][l].clone() * bracket;
                }
                out.push(acc * 0.5);
            }
        }
    }
    Ok(out)
}

/// Christoffel symbols as jets of order `order` around `x`.
pub fn christoffel_field(manifold: &ManifoldModel, x: &[f64], order: usize) -> Result<Vec<Jet>> {
    let m = manifold.dim();
    let g = manifold.metric_jets(x, order + 1)?;
    let dg: Vec<Matrix<Jet>> = (0..m).map(|l| g.iter().map(|row| row.iter().map(|e| e.derivative(l)).collect()).collect()).collect();
    let g_trunc: Matrix<Jet> = g.iter().map(|row| row.iter().map(|e| e.truncate(order)).collect()).collect();
    christoffel_jets(&g_trunc, &dg)
}

/// Levi-Civita connection coefficients at a point.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub dim: usize,
    /// `Γ^k_{ij}` at index `k·m² + i·m + j`.
    pub gamma: Vec<f64>,
    /// `∂_l Γ^k_{ij}` at index `l·m³ + k·m² + i·m + j`.
    pub d_gamma: Option<Vec<f64>>,
}

impl Christoffel {
    pub fn from_jets(dim: usize, jets: &[Jet]) -> Self {
        let gamma = jets.iter().map(Jet::value).collect();
        let d_gamma = (jets.first().map(Jet::order).unwrap_or(0) >= 1).then(|| (0..dim).flat_map(|l| jets.iter().map(move |j| j.d1(l))).collect());
        Christoffel { dim, gamma, d_gamma }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        let m = self.dim;
        self.gamma[k * m * m + i * m + j]
    }

    pub fn d(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let m = self.dim;
        self.d_gamma.as_ref().expect("Christoffel derivatives were not computed")[l * m * m * m + k * m * m + i * m + j]
    }

    /// Riemann tensor `R^l_{kij}` at index `l·m³ + k·m² + i·m + j`.
    pub fn riemann_tensor(&self) -> Vec<f64> {
        let m = self.dim;
        let mut out = vec![0.0; m * m * m * m];
        for l in 0..m {
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        let mut r = self.d(i, l, j, k) - self.d(j, l, i, k);
                        for p in 0..m {
                            r += self.get(l, i, p) * self.get(p, j, k) - self.get(l, j, p) * self.get(p, i, k);
                        }
                        out[l * m * m * m + k * m * m + i * m + j] = r;
                    }
                }
            }
        }
        out
    }
}

pub fn christoffel(manifold: &ManifoldModel, x: &[f64]) -> Result<Christoffel> {
    metric_at(manifold, x, 0)?;
    let jets = christoffel_field(manifold, x, 1)?;
    Ok(Christoffel::from_jets(manifold.dim(), &jets))
}

/// Applies a Riemann tensor laid out as in [`Christoffel::riemann_tensor`]:
/// returns `R(X,Y)Z`.
pub fn apply_riemann(tensor: &[f64], dim: usize, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let m = dim;
    (0..m)
        .map(|l| {
            let mut acc = 0.0;
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        acc += tensor[l * m * m * m + k * m * m + i * m + j] * x[i] * y[j] * z[k];
                    }
                }
            }
            acc
        })
        .collect()
}

/// `R(X,Y)Z` in coordinate components at `x`.
pub fn riemann(manifold: &ManifoldModel, point: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    let c = christoffel(manifold, point)?;
    Ok(apply_riemann(&c.riemann_tensor(), manifold.dim(), x, y, z))
}

/// Orthonormal frame at a point, vectors in coordinate components.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub vectors: Vec<Vec<f64>>,
}

impl Frame {
    /// Replaces `e_i` by `Σ_j q_{ji} e_j` for an orthogonal matrix `q`.
    pub fn rotated(&self, q: &Matrix<f64>) -> Frame {
        let m = self.vectors.len();
        let vectors = (0..m).map(|i| (0..m).map(|c| (0..m).map(|j| q[j][i] * self.vectors[j][c]).sum()).collect()).collect();
        Frame { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Random orthogonal `m × m` matrix from the QR factorisation of a matrix
/// with uniform entries, sign-fixed so that `R` has a positive diagonal.
pub fn random_orthogonal(m: usize, rng: &mut impl rand::Rng) -> Matrix<f64> {
    let a = nalgebra::DMatrix::<f64>::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    let qr = a.qr();
    let (q, r) = (qr.q(), qr.r());
    (0..m).map(|i| (0..m).map(|j| q[(i, j)] * r[(j, j)].signum()).collect()).collect()
}

pub fn frame_at(manifold: &ManifoldModel, x: &[f64]) -> Result<Frame> {
    let metric = metric_at(manifold, x, 0)?;
    Ok(Frame { vectors: gram_schmidt(&metric.g)? })
}

/// Gradient, covariant Hessian and Laplacian of a scalar function.
#[derive(Debug, Clone)]
pub struct ScalarCalculus {
    pub value: f64,
    pub grad: Vec<f64>,
    /// `Hess_ij = ∂_i∂_j f − Γ^k_{ij} ∂_k f`.
    pub hessian: Matrix<f64>,
    pub laplacian: f64,
    pub metric: Matrix<f64>,
}

impl ScalarCalculus {
    pub fn hessian_form(&self, x: &[f64], y: &[f64]) -> f64 {
        scalar::inner(&self.hessian, x, y)
    }

    /// `‖grad f‖²`.
    pub fn grad_norm2(&self) -> f64 {
        scalar::inner(&self.metric, &self.grad, &self.grad)
    }
}

pub fn scalar_calculus(manifold: &ManifoldModel, f: &Expr, x: &[f64]) -> Result<ScalarCalculus> {
    let metric = metric_at(manifold, x, 0)?;
    let m = manifold.dim();
    let jet = eval_jet(f, x, 2)?;
    let gamma = christoffel(manifold, x)?;
    let df: Vec<f64> = (0..m).map(|i| jet.d1(i)).collect();
    let grad: Vec<f64> = (0..m).map(|i| (0..m).map(|j| metric.inverse[i][j] * df[j]).sum()).collect();
    let hessian: Matrix<f64> =
        (0..m).map(|i| (0..m).map(|j| jet.d2(i, j) - (0..m).map(|k| gamma.get(k, i, j) * df[k]).sum::<f64>()).collect()).collect();
    let laplacian = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| metric.inverse[i][j] * hessian[i][j]).sum();
    Ok(ScalarCalculus { value: jet.value(), grad, hessian, laplacian, metric: metric.g })
}

pub fn grad(manifold: &ManifoldModel, f: &Expr, x: &[f64]) -> Result<Vec<f64>> {
    Ok(scalar_calculus(manifold, f, x)?.grad)
}

pub fn hessian(manifold: &ManifoldModel, f: &Expr, x: &[f64]) -> Result<Matrix<f64>> {
    Ok(scalar_calculus(manifold, f, x)?.hessian)
}

pub fn laplacian(manifold: &ManifoldModel, f: &Expr, x: &[f64]) -> Result<f64> {
    Ok(scalar_calculus(manifold, f, x)?.laplacian)
}
