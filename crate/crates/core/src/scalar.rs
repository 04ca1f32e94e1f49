//! Numeric abstraction shared by `f64` and [`Jet`], plus the handful of
//! small dense linear-algebra routines the geometry code needs in both.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::expr::Jet;

pub trait Scalar:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self> + Neg<Output = Self>
{
    fn constant_like(&self, value: f64) -> Self;
    fn value(&self) -> f64;
    fn recip(&self) -> Result<Self>;
    fn sqrt(&self) -> Result<Self>;

    fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }
}

impl Scalar for f64 {
    fn constant_like(&self, value: f64) -> Self {
        value
    }

    fn value(&self) -> f64 {
        *self
    }

    fn recip(&self) -> Result<Self> {
        if !(self.abs() >= crate::expr::DIVISION_FLOOR) {
            return Err(Error::Domain { node: "division".into(), detail: format!("divisor {self:e}") });
        }
        Ok(1.0 / self)
    }

    fn sqrt(&self) -> Result<Self> {
        if !(*self >= 0.0) {
            return Err(Error::Domain { node: "sqrt".into(), detail: format!("square root of {self}") });
        }
        Ok(f64::sqrt(*self))
    }
}

impl Scalar for Jet {
    fn constant_like(&self, value: f64) -> Self {
        Jet::constant_like(self, value)
    }

    fn value(&self) -> f64 {
        Jet::value(self)
    }

    fn recip(&self) -> Result<Self> {
        Jet::recip(self)
    }

    fn sqrt(&self) -> Result<Self> {
        Jet::sqrt(self)
    }
}

pub type Matrix<S> = Vec<Vec<S>>;

/// Sum of `terms`, or `zero` when empty.
pub fn sum<S: Scalar>(zero: &S, terms: impl IntoIterator<Item = S>) -> S {
    terms.into_iter().fold(zero.zero_like(), |acc, t| acc + t)
}

/// Inverse by Gauss–Jordan elimination with partial pivoting on the
/// constant terms.
pub fn invert<S: Scalar>(matrix: &Matrix<S>) -> Result<Matrix<S>> {
    let n = matrix.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let zero = matrix[0][0].zero_like();
    let mut a: Matrix<S> = matrix.clone();
    let mut inv: Matrix<S> = (0..n).map(|i| (0..n).map(|j| zero.constant_like(if i == j { 1.0 } else { 0.0 })).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].value().abs().total_cmp(&a[j][col].value().abs())).expect("non-empty pivot range");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = a[col][j].clone() * p.clone();
            inv[col][j] = inv[col][j].clone() * p.clone();
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            for j in 0..n {
                a[row][j] = a[row][j].clone() - factor.clone() * a[col][j].clone();
                inv[row][j] = inv[row][j].clone() - factor.clone() * inv[col][j].clone();
            }
        }
    }
    Ok(inv)
}

/// Determinant by the same elimination; used for the volume density.
pub fn determinant<S: Scalar>(matrix: &Matrix<S>) -> Result<S> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::Invalid("determinant of an empty matrix".into()));
    }
    let mut a = matrix.clone();
    let mut det = a[0][0].constant_like(1.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].value().abs().total_cmp(&a[j][col].value().abs())).expect("non-empty pivot range");
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det = det * a[col][col].clone();
        let p = a[col][col].recip()?;
        for row in col + 1..n {
            let factor = a[row][col].clone() * p.clone();
            for j in col..n {
                a[row][j] = a[row][j].clone() - factor.clone() * a[col][j].clone();
            }
        }
    }
    Ok(det)
}

/// Bilinear form `g(u, v) = g_ij u^i v^j`.
pub fn inner<S: Scalar>(g: &Matrix<S>, u: &[S], v: &[S]) -> S {
    let zero = g[0][0].zero_like();
    sum(&zero, (0..u.len()).flat_map(|i| (0..v.len()).map(move |j| (i, j))).map(|(i, j)| g[i][j].clone() * u[i].clone() * v[j].clone()))
}

/// Gram–Schmidt on the coordinate basis, ascending order, with respect to
/// the metric `g`. Returns frame vectors in coordinate components.
pub fn gram_schmidt<S: Scalar>(g: &Matrix<S>) -> Result<Vec<Vec<S>>> {
    let m = g.len();
    let zero = g[0][0].zero_like();
    let mut frame: Vec<Vec<S>> = Vec::with_capacity(m);
    for k in 0..m {
        let mut v: Vec<S> = (0..m).map(|i| zero.constant_like(if i == k { 1.0 } else { 0.0 })).collect();
        for e in &frame {
            let c = inner(g, &v, e);
            for i in 0..m {
                v[i] = v[i].clone() - c.clone() * e[i].clone();
            }
        }
        let norm = inner(g, &v, &v).sqrt()?;
        let r = norm.recip()?;
        frame.push(v.into_iter().map(|c| c * r.clone()).collect());
    }
    Ok(frame)
}

pub(crate) fn values(m: &Matrix<Jet>) -> Matrix<f64> {
    m.iter().map(|row| row.iter().map(Jet::value).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_small_matrix() {
        let a = vec![vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 2.0]];
        let inv = invert(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let p: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((p - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!((determinant(&a).unwrap() - 21.29).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_is_orthonormal() {
        let g = vec![vec![2.0, 0.3], vec![0.3, 0.5]];
        let e = gram_schmidt(&g).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let d = inner(&g, &e[i], &e[j]);
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn jet_inverse_tracks_derivatives() {
        let x = Jet::seed(&[0.3], 3);
        let a = vec![vec![x[0].clone() + 2.0, x[0].clone()], vec![x[0].clone(), x[0].clone() * x[0].clone() + 1.0]];
        let inv = invert(&a).unwrap();
        let det = determinant(&a).unwrap();
        // (1,1) entry of the inverse is a11 / det
        let expected = (x[0].clone() + 2.0) * Jet::recip(&det).unwrap();
        for (p, q) in inv[1][1].coefficients().iter().zip(expected.coefficients()) {
            assert!((p - q).abs() < 1e-13);
        }
    }
}
