//! Tensor-product quadrature over a source chart: the trapezoid rule on
//! periodic coordinates and Gauss–Legendre on bounded intervals. Weights
//! already include the volume density `√det g`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{metric_at, ManifoldModel};

#[derive(Debug, Clone)]
pub struct Mesh {
    pub points: Vec<Vec<f64>>,
    /// Quadrature weight times `√det g` at each point.
    pub weights: Vec<f64>,
    /// Nodes per coordinate.
    pub resolution: Vec<usize>,
}

impl Mesh {
    /// `n` nodes per coordinate.
    pub fn new(manifold: &ManifoldModel, n: usize) -> Result<Mesh> {
        Mesh::with_resolution(manifold, &vec![n; manifold.dim()])
    }

    pub fn with_resolution(manifold: &ManifoldModel, resolution: &[usize]) -> Result<Mesh> {
        let domain = &manifold.domain;
        if resolution.len() != manifold.dim() || resolution.contains(&0) {
            return Err(Error::Invalid(format!("mesh resolution {resolution:?} does not fit chart `{}`", manifold.name)));
        }
        let mut axes = Vec::with_capacity(resolution.len());
        for (i, &n) in resolution.iter().enumerate() {
            let (lo, hi) = domain.intervals[i];
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Invalid(format!(
                    "coordinate `{}` of chart `{}` is unbounded; quadrature needs a bounded interval",
                    manifold.coords[i], manifold.name
                )));
            }
            axes.push(if domain.periodic[i] { trapezoid(lo, hi, n) } else { gauss_legendre_on(lo, hi, n) });
        }
        let total: usize = resolution.iter().product();
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut index = vec![0usize; axes.len()];
        for _ in 0..total {
            let x: Vec<f64> = index.iter().enumerate().map(|(d, &k)| axes[d].0[k]).collect();
            let w: f64 = index.iter().enumerate().map(|(d, &k)| axes[d].1[k]).product();
            let metric = metric_at(manifold, &x, 0)?;
            weights.push(w * metric.sqrt_det);
            points.push(x);
            for d in (0..index.len()).rev() {
                index[d] += 1;
                if index[d] < resolution[d] {
                    break;
                }
                index[d] = 0;
            }
        }
        Ok(Mesh { points, weights, resolution: resolution.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn volume(&self) -> f64 {
        crate::reduce::pairwise_sum(&self.weights)
    }

    pub fn describe(&self) -> String {
        self.resolution.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
    }
}

fn trapezoid(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (hi - lo) / n as f64;
    ((0..n).map(|k| lo + k as f64 * h).collect(), vec![h; n])
}

fn gauss_legendre_on(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (nodes, weights) = gauss_legendre(n);
    let (mid, half) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
    (nodes.iter().map(|t| mid + half * t).collect(), weights.iter().map(|w| half * w).collect())
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`, by Newton
/// iteration on `P_n` from the Chebyshev initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
