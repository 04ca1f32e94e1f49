//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α f / α!` of a function of
//! `nvars` variables for every multi-index with `|α| ≤ order`. Arithmetic on
//! jets is exact truncated power-series arithmetic, so derivatives of
//! polynomial inputs come out exact up to rounding.
//!
//! Coefficients are laid out degree by degree, which makes the coefficient
//! vector of an order-`k` jet a prefix of the order-`k'` layout for any
//! `k' ≥ k`. Truncation is therefore a plain `Vec::truncate`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Highest truncation order supported by the coefficient tables.
pub const MAX_ORDER: usize = 4;
/// Highest number of variables supported by the coefficient tables.
pub const MAX_VARS: usize = 6;

/// Divisors smaller than this are reported as a domain error.
pub const DIVISION_FLOOR: f64 = 1e-300;

#[derive(Debug)]
struct Layout {
    nvars: usize,
    indices: Vec<Vec<u8>>,
    /// `degree_end[d]` is the number of multi-indices with degree `≤ d`.
    degree_end: Vec<usize>,
    /// `(lhs, rhs, out)` triples sorted by the degree of `out`.
    mul_table: Vec<(u32, u32, u32)>,
    /// `mul_end[d]` is the number of triples whose output degree is `≤ d`.
    mul_end: Vec<usize>,
    /// `deriv[v]` lists `(src, dst, factor)` for `∂/∂x_v`.
    deriv: Vec<Vec<(u32, u32, f64)>>,
}

impl Layout {
    fn build(nvars: usize) -> Self {
        let mut indices: Vec<Vec<u8>> = Vec::new();
        let mut degree_end = Vec::with_capacity(MAX_ORDER + 1);
        for degree in 0..=MAX_ORDER {
            let mut current = vec![0u8; nvars];
            push_compositions(degree, 0, &mut current, &mut indices);
            degree_end.push(indices.len());
        }
        let position = |alpha: &[u8]| -> Option<usize> { indices.iter().position(|b| b == alpha) };

        let mut mul_table = Vec::new();
        let mut mul_end = Vec::with_capacity(MAX_ORDER + 1);
        for degree in 0..=MAX_ORDER {
            for (k, gamma) in indices.iter().enumerate() {
                if degree_of(gamma) != degree {
                    continue;
                }
                for (i, alpha) in indices.iter().enumerate() {
                    if alpha.iter().zip(gamma).any(|(a, g)| a > g) {
                        continue;
                    }
                    let beta: Vec<u8> = gamma.iter().zip(alpha).map(|(g, a)| g - a).collect();
                    let j = position(&beta).expect("complement multi-index");
                    mul_table.push((i as u32, j as u32, k as u32));
                }
            }
            mul_end.push(mul_table.len());
        }

        let mut deriv = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut table = Vec::new();
            for (dst, alpha) in indices.iter().enumerate() {
                if degree_of(alpha) >= MAX_ORDER {
                    continue;
                }
                let mut raised = alpha.clone();
                raised[v] += 1;
                let src = position(&raised).expect("raised multi-index");
                table.push((src as u32, dst as u32, f64::from(raised[v])));
            }
            deriv.push(table);
        }

        Layout { nvars, indices, degree_end, mul_table, mul_end, deriv }
    }

    fn len(&self, order: usize) -> usize {
        self.degree_end[order]
    }

    fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        let degree = degree_of(alpha);
        if degree > MAX_ORDER {
            return None;
        }
        let start = if degree == 0 { 0 } else { self.degree_end[degree - 1] };
        (start..self.degree_end[degree]).find(|&i| self.indices[i] == alpha)
    }
}

fn degree_of(alpha: &[u8]) -> usize {
    alpha.iter().map(|&a| a as usize).sum()
}

fn push_compositions(remaining: usize, slot: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if slot + 1 == current.len() {
        current[slot] = remaining as u8;
        out.push(current.clone());
        return;
    }
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for take in (0..=remaining).rev() {
        current[slot] = take as u8;
        push_compositions(remaining - take, slot + 1, current, out);
    }
    current[slot] = 0;
}

fn layout(nvars: usize) -> Arc<Layout> {
    static LAYOUTS: [OnceLock<Arc<Layout>>; MAX_VARS + 1] = [const { OnceLock::new() }; MAX_VARS + 1];
    assert!(nvars <= MAX_VARS, "jets support at most {MAX_VARS} variables, got {nvars}");
    LAYOUTS[nvars].get_or_init(|| Arc::new(Layout::build(nvars))).clone()
}

/// Truncated Taylor expansion of a scalar function around a base point.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet").field("nvars", &self.layout.nvars).field("order", &self.order).field("coeffs", &self.coeffs).finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.layout.nvars == other.layout.nvars && self.order == other.order && self.coeffs == other.coeffs
    }
}

impl Jet {
    /// A jet with every coefficient zero except the constant term.
    pub fn constant(value: f64, nvars: usize, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let layout = layout(nvars);
        let mut coeffs = vec![0.0; layout.len(order)];
        coeffs[0] = value;
        Jet { layout, order, coeffs }
    }

    /// The coordinate function `x_var` expanded around `value`.
    pub fn variable(value: f64, var: usize, nvars: usize, order: usize) -> Self {
        assert!(var < nvars);
        let mut jet = Self::constant(value, nvars, order);
        if order >= 1 {
            jet.coeffs[1 + var] = 1.0;
        }
        jet
    }

    /// Seeds one variable jet per coordinate of `base`.
    pub fn seed(base: &[f64], order: usize) -> Vec<Jet> {
        let n = base.len();
        base.iter().enumerate().map(|(i, &v)| Jet::variable(v, i, n, order)).collect()
    }

    /// Builds a jet from raw Taylor coefficients in layout order.
    pub fn from_coefficients(nvars: usize, order: usize, coeffs: Vec<f64>) -> Result<Self> {
        let layout = layout(nvars);
        if order > MAX_ORDER || coeffs.len() != layout.len(order) {
            return Err(Error::Invalid(format!(
                "expected {} coefficients for order {order} in {nvars} variables, got {}",
                layout.len(order.min(MAX_ORDER)),
                coeffs.len()
            )));
        }
        Ok(Jet { layout, order, coeffs })
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The constant term.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Multi-indices in coefficient order.
    pub fn multi_indices(&self) -> impl Iterator<Item = &[u8]> {
        self.layout.indices[..self.coeffs.len()].iter().map(Vec::as_slice)
    }

    /// Taylor coefficient for `alpha`, zero beyond the truncation order.
    pub fn coefficient(&self, alpha: &[u8]) -> f64 {
        assert_eq!(alpha.len(), self.nvars());
        match self.layout.index_of(alpha) {
            Some(i) if i < self.coeffs.len() => self.coeffs[i],
            _ => 0.0,
        }
    }

    /// The partial derivative `∂^α f` at the base point.
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        let factorial: f64 = alpha.iter().map(|&a| (1..=a as u32).map(f64::from).product::<f64>()).product();
        self.coefficient(alpha) * factorial
    }

    /// First partial `∂f/∂x_i`.
    pub fn d1(&self, i: usize) -> f64 {
        let mut alpha = vec![0u8; self.nvars()];
        alpha[i] = 1;
        self.partial(&alpha)
    }

    /// Second partial `∂²f/∂x_i∂x_j`.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut alpha = vec![0u8; self.nvars()];
        alpha[i] += 1;
        alpha[j] += 1;
        self.partial(&alpha)
    }

    /// Drops all coefficients of degree above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(self.layout.len(order));
        Jet { layout: self.layout.clone(), order, coeffs }
    }

    /// The jet of `∂f/∂x_var`; its order is one less than `self`.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(var < self.nvars());
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut coeffs = vec![0.0; self.layout.len(order)];
        for &(src, dst, factor) in &self.layout.deriv[var] {
            let (src, dst) = (src as usize, dst as usize);
            if dst < coeffs.len() {
                coeffs[dst] = self.coeffs[src] * factor;
            }
        }
        Jet { layout: self.layout.clone(), order, coeffs }
    }

    /// A constant with the same variable count and order.
    pub fn constant_like(&self, value: f64) -> Jet {
        Jet::constant(value, self.nvars(), self.order)
    }

    fn check_compatible(&self, other: &Jet) {
        assert_eq!(self.nvars(), other.nvars(), "jets over different variable counts");
    }

    fn mul_ref(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let order = self.order.min(other.order);
        let mut coeffs = vec![0.0; self.layout.len(order)];
        let (a, b) = (&self.coeffs, &other.coeffs);
        for &(i, j, k) in &self.layout.mul_table[..self.layout.mul_end[order]] {
            coeffs[k as usize] += a[i as usize] * b[j as usize];
        }
        Jet { layout: self.layout.clone(), order, coeffs }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        self.check_compatible(other);
        let order = self.order.min(other.order);
        let len = self.layout.len(order);
        let coeffs = self.coeffs[..len].iter().zip(&other.coeffs[..len]).map(|(&a, &b)| f(a, b)).collect();
        Jet { layout: self.layout.clone(), order, coeffs }
    }

    fn scale(&self, factor: f64) -> Jet {
        Jet { layout: self.layout.clone(), order: self.order, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Composes a univariate function with this jet, given the Taylor
    /// coefficients `f^(k)(a0) / k!` of the function at the base value.
    pub fn compose_series(&self, series: &[f64]) -> Jet {
        debug_assert!(series.len() > self.order);
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut acc = self.constant_like(series[self.order]);
        for k in (0..self.order).rev() {
            acc = acc.mul_ref(&delta);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    /// Substitutes `inner[b] - inner[b].value()` for `x_b - base_b`: the
    /// result is `self ∘ inner` expanded in the variables of `inner`.
    pub fn compose(&self, inner: &[Jet]) -> Jet {
        assert_eq!(inner.len(), self.nvars(), "one inner jet per outer variable");
        let m = inner.first().map(Jet::nvars).unwrap_or(0);
        let order = inner.iter().map(Jet::order).fold(self.order, usize::min);
        let deltas: Vec<Jet> = inner
            .iter()
            .map(|j| {
                let mut d = j.truncate(order);
                d.coeffs[0] = 0.0;
                d
            })
            .collect();
        // powers[b][p] = delta_b^p
        let powers: Vec<Vec<Jet>> = deltas
            .iter()
            .map(|d| {
                let mut row = vec![Jet::constant(1.0, m, order)];
                for p in 1..=order {
                    let next = row[p - 1].mul_ref(d);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut out = Jet::constant(0.0, m, order);
        for (idx, alpha) in self.layout.indices[..self.layout.len(order)].iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0.0 {
                continue;
            }
            let mut term = Jet::constant(c, m, order);
            for (b, &p) in alpha.iter().enumerate() {
                if p > 0 {
                    term = term.mul_ref(&powers[b][p as usize]);
                }
            }
            out += term;
        }
        out
    }

    /// Multiplicative inverse; fails when the constant term is below
    /// [`DIVISION_FLOOR`] in magnitude.
    pub fn recip(&self) -> Result<Jet> {
        let a0 = self.value();
        if !(a0.abs() >= DIVISION_FLOOR) {
            return Err(Error::Domain { node: "division".into(), detail: format!("divisor {a0:e} is too close to zero") });
        }
        let series: Vec<f64> = (0..=self.order).map(|k| (-1f64).powi(k as i32) / a0.powi(k as i32 + 1)).collect();
        Ok(self.compose_series(&series))
    }

    /// `self^exponent` for a real constant exponent. Integer exponents allow
    /// any base; fractional exponents need a positive base.
    pub fn powf(&self, exponent: f64) -> Result<Jet> {
        if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
            let n = exponent.abs() as u32;
            let mut acc = self.constant_like(1.0);
            let mut base = self.clone();
            let mut e = n;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.mul_ref(&base);
                }
                e >>= 1;
                if e > 0 {
                    base = base.mul_ref(&base);
                }
            }
            return if exponent < 0.0 { acc.recip() } else { Ok(acc) };
        }
        let a0 = self.value();
        if a0 < 0.0 || (a0 == 0.0 && (self.order > 0 || exponent < 0.0)) || a0.is_nan() {
            return Err(Error::Domain { node: format!("pow(_, {exponent})"), detail: format!("fractional power of non-positive base {a0}") });
        }
        let mut series = Vec::with_capacity(self.order + 1);
        let mut falling = 1.0;
        let mut factorial = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                falling *= exponent - (k as f64 - 1.0);
                factorial *= k as f64;
            }
            series.push(falling / factorial * a0.powf(exponent - k as f64));
        }
        Ok(self.compose_series(&series))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.value();
        if a0 < 0.0 || (a0 == 0.0 && self.order > 0) || a0.is_nan() {
            return Err(Error::Domain { node: "sqrt".into(), detail: format!("square root of {a0}") });
        }
        self.powf(0.5)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let series: Vec<f64> = factorials(self.order).iter().map(|f| e / f).collect();
        self.compose_series(&series)
    }

    pub fn ln(&self) -> Result<Jet> {
        let a0 = self.value();
        if !(a0 > 0.0) {
            return Err(Error::Domain { node: "log".into(), detail: format!("logarithm of non-positive value {a0}") });
        }
        let mut series = vec![a0.ln()];
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(sign / (k as f64 * a0.powi(k as i32)));
        }
        Ok(self.compose_series(&series))
    }

    pub fn sin(&self) -> Jet {
        self.trig(0)
    }

    pub fn cos(&self) -> Jet {
        self.trig(1)
    }

    fn trig(&self, shift: usize) -> Jet {
        let (s, c) = self.value().sin_cos();
        // derivatives of sin cycle through sin, cos, -sin, -cos
        let cycle = [s, c, -s, -c];
        let series: Vec<f64> = factorials(self.order).iter().enumerate().map(|(k, f)| cycle[(k + shift) % 4] / f).collect();
        self.compose_series(&series)
    }
}

fn factorials(order: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for k in 1..=order {
        out.push(out[k - 1] * k as f64);
    }
    out
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = self.zip_with(&rhs, |a, b| a + b);
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs)
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_ref(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
