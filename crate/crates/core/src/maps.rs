//! First- and second-order data of a smooth map between charts: the
//! differential, second fundamental form, pullback metric, symphonic stress
//! and the symphonic tension field.
//!
//! Everything is evaluated in coordinates with both Levi-Civita connections
//! present, so results hold at every chart point rather than only at the
//! centre of normal coordinates.

use crate::error::{Error, Result};
use crate::expr::{eval_jet, parse, Expr, Jet};
use crate::geometry::{check_spd, christoffel_jets, scalar_calculus, Christoffel, Frame, ManifoldModel};
use crate::scalar::{self, gram_schmidt, inner, invert, Matrix, Scalar};

/// A smooth map between two charts, given by target-coordinate expressions
/// in the source coordinates.
#[derive(Debug, Clone)]
pub struct MapSpec {
    pub source: ManifoldModel,
    pub target: ManifoldModel,
    pub components: Vec<Expr>,
}

impl MapSpec {
    pub fn new(source: ManifoldModel, target: ManifoldModel, components: Vec<Expr>) -> Result<Self> {
        if components.len() != target.dim() {
            return Err(Error::spec(
                "/map/components",
                format!("expected {} components for target `{}`, found {}", target.dim(), target.name, components.len()),
            ));
        }
        if let Some(k) = components.iter().filter_map(Expr::max_variable).max() {
            if k >= source.dim() {
                return Err(Error::spec("/map/components", "component references a coordinate outside the source chart"));
            }
        }
        Ok(MapSpec { source, target, components })
    }

    pub fn from_strings(source: ManifoldModel, target: ManifoldModel, components: &[&str]) -> Result<Self> {
        let exprs = components
            .iter()
            .enumerate()
            .map(|(a, src)| parse(src, &source.coords).map_err(|e| Error::spec(format!("/map/components/{a}"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        MapSpec::new(source, target, exprs)
    }
}

/// Anything that provides component jets of a map between two charts.
pub trait ChartMap: Sync {
    fn source(&self) -> &ManifoldModel;
    fn target(&self) -> &ManifoldModel;
    /// Jets of the target coordinates `φ^a` in the source variables at `x`.
    fn component_jets(&self, x: &[f64], order: usize) -> Result<Vec<Jet>>;

    /// Target coordinates `φ(x)`.
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.component_jets(x, 0)?.iter().map(Jet::value).collect())
    }
}

impl ChartMap for MapSpec {
    fn source(&self) -> &ManifoldModel {
        &self.source
    }

    fn target(&self) -> &ManifoldModel {
        &self.target
    }

    fn component_jets(&self, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.components.iter().map(|e| eval_jet(e, x, order)).collect()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|e| e.eval(x)).collect()
    }
}

/// Compact-support window `(1 − (r/R)²)⁵` for `r < R`, zero outside; `C⁴`
/// across the rim. Distances use the minimum image on periodic coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Bump {
    pub fn window(&self, source: &ManifoldModel, x: &[f64], order: usize) -> Jet {
        let m = x.len();
        let vars = Jet::seed(x, order);
        let mut r2 = Jet::constant(0.0, m, order);
        for k in 0..m {
            let mut offset = self.center[k];
            if let Some(p) = source.domain.period(k) {
                let d = x[k] - offset;
                offset += p * (d / p).round();
            }
            let d = vars[k].clone() + (-offset);
            r2 += d.clone() * d;
        }
        let w = Jet::constant(1.0, m, order) - r2 * (1.0 / (self.radius * self.radius));
        if w.value() <= 0.0 {
            return Jet::constant(0.0, m, order);
        }
        let w2 = w.clone() * w.clone();
        w2.clone() * w2 * w
    }
}

/// A vector field along a map: target-coordinate components given as
/// expressions in the source coordinates, optionally windowed.
#[derive(Debug, Clone)]
pub struct TangentField {
    pub name: String,
    pub components: Vec<Expr>,
    pub bump: Option<Bump>,
}

impl TangentField {
    pub fn new(name: impl Into<String>, components: Vec<Expr>, bump: Option<Bump>) -> Self {
        TangentField { name: name.into(), components, bump }
    }

    pub fn from_strings(name: &str, source: &ManifoldModel, components: &[&str], bump: Option<Bump>) -> Result<Self> {
        let exprs = components
            .iter()
            .enumerate()
            .map(|(a, src)| parse(src, &source.coords).map_err(|e| Error::spec(format!("/fields/{name}/components/{a}"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(TangentField::new(name, exprs, bump))
    }

    /// The zero field with `n` components.
    pub fn zero(n: usize) -> Self {
        TangentField::new("zero", vec![Expr::Const(0.0); n], None)
    }

    pub fn jets(&self, source: &ManifoldModel, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        let raw = self.components.iter().map(|e| eval_jet(e, x, order)).collect::<Result<Vec<_>>>()?;
        Ok(match &self.bump {
            Some(b) => {
                let w = b.window(source, x, order);
                raw.into_iter().map(|c| c * w.clone()).collect()
            }
            None => raw,
        })
    }

    pub fn values(&self, source: &ManifoldModel, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jets(source, x, 0)?.iter().map(Jet::value).collect())
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.components.len() != n {
            return Err(Error::Invalid(format!("field `{}` has {} components but the target has dimension {n}", self.name, self.components.len())));
        }
        Ok(())
    }
}

/// Jets of every quantity the operators consume at one source point.
///
/// With outer order `q`: `φ` to order `q+2`, `dφ` to `q+1`, second
/// fundamental form, both connections composed into source variables,
/// target metric and frame to order `q`.
#[derive(Debug, Clone)]
pub struct MapJet {
    pub point: Vec<f64>,
    pub image: Vec<f64>,
    pub order: usize,
    pub phi: Vec<Jet>,
    /// `df[a][i] = ∂_i φ^a`.
    pub df: Matrix<Jet>,
    /// `sff[a][i][j] = ∇dφ(∂_i, ∂_j)^a`.
    pub sff: Vec<Matrix<Jet>>,
    pub g: Matrix<Jet>,
    pub g_inv: Matrix<Jet>,
    /// Target metric at `φ(x)` as a function of `x`.
    pub h: Matrix<Jet>,
    /// Source connection `Γ^M` at index `k·m² + i·m + j`.
    pub gamma_m: Vec<Jet>,
    /// Target connection at `φ(x)` as a function of `x`, index `a·n² + b·n + c`.
    pub gamma_n: Vec<Jet>,
    /// Target connection at `φ(x)` with derivatives in target variables.
    pub target_christoffel: Christoffel,
    /// Orthonormal frame, `frame[i][k]` = `k`-th component of `e_i`.
    pub frame: Vec<Vec<Jet>>,
}

impl MapJet {
    pub fn new<M: ChartMap + ?Sized>(map: &M, x: &[f64], order: usize) -> Result<MapJet> {
        let source = map.source();
        let target = map.target();
        let (m, n) = (source.dim(), target.dim());
        if order + 2 > crate::expr::MAX_ORDER {
            return Err(Error::Invalid(format!("map jets of order {order} exceed the supported jet order")));
        }
        source.check_point(x)?;
        let phi = map.component_jets(x, order + 2)?;
        if phi.len() != n {
            return Err(Error::Invalid(format!("map has {} components, target dimension is {n}", phi.len())));
        }
        let image: Vec<f64> = phi.iter().map(Jet::value).collect();
        target.check_point(&image)?;

        let df: Matrix<Jet> = phi.iter().map(|p| (0..m).map(|i| p.derivative(i)).collect()).collect();

        let g_full = source.metric_jets(x, order + 1)?;
        check_spd(&scalar::values(&g_full), x)?;
        let dg: Vec<Matrix<Jet>> = (0..m).map(|l| g_full.iter().map(|row| row.iter().map(|e| e.derivative(l)).collect()).collect()).collect();
        let g: Matrix<Jet> = g_full.iter().map(|row| row.iter().map(|e| e.truncate(order)).collect()).collect();
        let gamma_m = christoffel_jets(&g, &dg)?;
        let g_inv = invert(&g)?;
        let frame = gram_schmidt(&g)?;

        let target_order = order.max(1);
        let ht = target.metric_jets(&image, target_order + 1)?;
        check_spd(&scalar::values(&ht), &image)?;
        let dht: Vec<Matrix<Jet>> = (0..n).map(|l| ht.iter().map(|row| row.iter().map(|e| e.derivative(l)).collect()).collect()).collect();
        let ht_trunc: Matrix<Jet> = ht.iter().map(|row| row.iter().map(|e| e.truncate(target_order)).collect()).collect();
        let gamma_t = christoffel_jets(&ht_trunc, &dht)?;
        let target_christoffel = Christoffel::from_jets(n, &gamma_t);

        let (h, gamma_n) = if target.has_constant_metric() {
            let h = ht.iter().map(|row| row.iter().map(|e| Jet::constant(e.value(), m, order)).collect()).collect();
            (h, vec![Jet::constant(0.0, m, order); n * n * n])
        } else {
            let inner: Vec<Jet> = phi.iter().map(|p| p.truncate(order)).collect();
            let h = ht.iter().map(|row| row.iter().map(|e| e.truncate(order).compose(&inner)).collect()).collect();
            let gamma_n = gamma_t.iter().map(|e| e.truncate(order).compose(&inner)).collect();
            (h, gamma_n)
        };

        let df_q: Matrix<Jet> = df.iter().map(|row| row.iter().map(|e| e.truncate(order)).collect()).collect();
        let mut sff = Vec::with_capacity(n);
        for a in 0..n {
            let mut rows = Vec::with_capacity(m);
            for i in 0..m {
                let mut row = Vec::with_capacity(m);
                for j in 0..m {
                    let mut s = df[a][i].derivative(j);
                    for k in 0..m {
                        s = s - gamma_m[k * m * m + i * m + j].clone() * df_q[a][k].clone();
                    }
                    if !target.has_constant_metric() {
                        for b in 0..n {
                            for c in 0..n {
                                s += gamma_n[a * n * n + b * n + c].clone() * df_q[b][i].clone() * df_q[c][j].clone();
                            }
                        }
                    }
                    row.push(s);
                }
                rows.push(row);
            }
            sff.push(rows);
        }

        Ok(MapJet { point: x.to_vec(), image, order, phi, df, sff, g, g_inv, h, gamma_m, gamma_n, target_christoffel, frame })
    }

    pub fn source_dim(&self) -> usize {
        self.point.len()
    }

    pub fn target_dim(&self) -> usize {
        self.image.len()
    }

    /// Replaces the frame by `e'_i = Σ_j q_{ji} e_j` for a constant
    /// orthogonal matrix `q`.
    pub fn rotate_frame(&mut self, q: &Matrix<f64>) {
        let m = self.source_dim();
        let rotated: Vec<Vec<Jet>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|c| {
                        let zero = self.frame[0][0].zero_like();
                        scalar::sum(&zero, (0..m).map(|j| self.frame[j][c].clone() * q[j][i]))
                    })
                    .collect()
            })
            .collect();
        self.frame = rotated;
    }

    /// Point values of everything, for the `f64` evaluation paths.
    pub fn values(&self) -> PointData {
        let v = |m: &Matrix<Jet>| scalar::values(m);
        PointData {
            point: self.point.clone(),
            image: self.image.clone(),
            df: v(&self.df),
            sff: self.sff.iter().map(v).collect(),
            g: v(&self.g),
            g_inv: v(&self.g_inv),
            h: v(&self.h),
            gamma_m: self.gamma_m.iter().map(Jet::value).collect(),
            gamma_n: self.gamma_n.iter().map(Jet::value).collect(),
            frame: Frame { vectors: self.frame.iter().map(|e| e.iter().map(Jet::value).collect()).collect() },
        }
    }

    /// `τ^s` as jets of order `self.order`, via the orthonormal frame.
    pub fn symphonic_tension_jets(&self) -> Vec<Jet> {
        tension_frame(&self.df_trunc(), &self.sff, &self.h, &self.frame)
    }

    /// `τ^s` as jets via contractions with `g^{ij}`; no frame involved.
    pub fn symphonic_tension_jets_coordinates(&self) -> Vec<Jet> {
        tension_coordinates(&self.df_trunc(), &self.sff, &self.h, &self.g_inv)
    }

    fn df_trunc(&self) -> Matrix<Jet> {
        self.df.iter().map(|row| row.iter().map(|e| e.truncate(self.order)).collect()).collect()
    }

    /// First and second covariant derivatives of a field along the map, in
    /// coordinate directions: `(∇_k υ)^a` and `(∇²υ)(∂_p, ∂_q)^a`. The field
    /// jets must have order at least 2 and the map jet order at least 1.
    pub fn covariant_derivatives(&self, field: &[Jet]) -> Result<FieldDerivatives> {
        let (m, n) = (self.source_dim(), self.target_dim());
        if self.order < 1 || field.iter().any(|f| f.order() < 2) {
            return Err(Error::Invalid("second covariant derivatives need map jets of order ≥ 1 and field jets of order ≥ 2".into()));
        }
        // ∇_k υ^a = ∂_k υ^a + Γ^a_bc ∂_k φ^b υ^c, as order-1 jets
        let mut first: Vec<Vec<Jet>> = Vec::with_capacity(m);
        for k in 0..m {
            let mut row = Vec::with_capacity(n);
            for a in 0..n {
                let mut acc = field[a].derivative(k).truncate(1);
                for b in 0..n {
                    for c in 0..n {
                        let gamma = &self.gamma_n[a * n * n + b * n + c];
                        if gamma.coefficients().iter().all(|&v| v == 0.0) {
                            continue;
                        }
                        acc += gamma.truncate(1) * self.df[b][k].truncate(1) * field[c].truncate(1);
                    }
                }
                row.push(acc);
            }
            first.push(row);
        }
        let first_values: Matrix<f64> = first.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
        let mut second = vec![vec![vec![0.0; n]; m]; m];
        for p in 0..m {
            for q in 0..m {
                for a in 0..n {
                    let mut v = first[q][a].d1(p);
                    for b in 0..n {
                        for c in 0..n {
                            v += self.gamma_n[a * n * n + b * n + c].value() * self.df[b][p].value() * first_values[q][c];
                        }
                    }
                    for k in 0..m {
                        v -= self.gamma_m[k * m * m + p * m + q].value() * first_values[k][a];
                    }
                    second[p][q][a] = v;
                }
            }
        }
        Ok(FieldDerivatives { value: field.iter().map(Jet::value).collect(), first: first_values, second })
    }
}

/// A field along the map and its covariant derivatives at one point.
#[derive(Debug, Clone)]
pub struct FieldDerivatives {
    pub value: Vec<f64>,
    /// `first[k][a] = (∇_k υ)^a`.
    pub first: Matrix<f64>,
    /// `second[p][q][a] = (∇_{∂p}∇_{∂q}υ − ∇_{∇_{∂p}∂q}υ)^a`.
    pub second: Vec<Matrix<f64>>,
}

/// Plain values of a [`MapJet`] at its base point.
#[derive(Debug, Clone)]
pub struct PointData {
    pub point: Vec<f64>,
    pub image: Vec<f64>,
    pub df: Matrix<f64>,
    pub sff: Vec<Matrix<f64>>,
    pub g: Matrix<f64>,
    pub g_inv: Matrix<f64>,
    pub h: Matrix<f64>,
    pub gamma_m: Vec<f64>,
    pub gamma_n: Vec<f64>,
    pub frame: Frame,
}

impl PointData {
    pub fn at<M: ChartMap + ?Sized>(map: &M, x: &[f64]) -> Result<PointData> {
        Ok(MapJet::new(map, x, 0)?.values())
    }

    pub fn rotate_frame(&mut self, q: &Matrix<f64>) {
        self.frame = self.frame.rotated(q);
    }

    /// `dφ(X)`.
    pub fn push_forward(&self, x: &[f64]) -> Vec<f64> {
        self.df.iter().map(|row| row.iter().zip(x).map(|(d, v)| d * v).sum()).collect()
    }

    /// `dφ(e_i)` for each frame vector.
    pub fn frame_images(&self) -> Vec<Vec<f64>> {
        self.frame.vectors.iter().map(|e| self.push_forward(e)).collect()
    }

    /// `∇dφ(X, Y)`.
    pub fn second_fundamental_form(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        sff_apply(&self.sff, x, y)
    }

    /// Coordinate components `(φ*h)_ij`.
    pub fn pullback_metric(&self) -> Matrix<f64> {
        let m = self.point.len();
        let cols: Vec<Vec<f64>> = (0..m).map(|i| self.df.iter().map(|row| row[i]).collect()).collect();
        (0..m).map(|i| (0..m).map(|j| inner(&self.h, &cols[i], &cols[j])).collect()).collect()
    }

    /// `‖φ*h‖² = Σ_ij h(dφ e_i, dφ e_j)²`.
    pub fn energy_density(&self) -> f64 {
        let f = self.frame_images();
        let mut acc = 0.0;
        for fi in &f {
            for fj in &f {
                acc += inner(&self.h, fi, fj).powi(2);
            }
        }
        acc
    }

    /// Harmonic tension `τ(φ) = Σ_i ∇dφ(e_i, e_i)`.
    pub fn tension(&self) -> Vec<f64> {
        let n = self.image.len();
        let mut out = vec![0.0; n];
        for e in &self.frame.vectors {
            for (o, v) in out.iter_mut().zip(sff_apply(&self.sff, e, e)) {
                *o += v;
            }
        }
        out
    }

    /// `σ_φ(X) = Σ_j h(dφ X, dφ e_j) dφ e_j`.
    pub fn stress(&self, x: &[f64]) -> Vec<f64> {
        let fx = self.push_forward(x);
        let n = self.image.len();
        let mut out = vec![0.0; n];
        for fj in self.frame_images() {
            let c = inner(&self.h, &fx, &fj);
            for a in 0..n {
                out[a] += c * fj[a];
            }
        }
        out
    }

    /// `τ^s(φ)` via the orthonormal frame.
    pub fn symphonic_tension(&self) -> Vec<f64> {
        tension_frame(&self.df, &self.sff, &self.h, &self.frame.vectors)
    }

    /// `τ^s(φ)` via inverse-metric contractions.
    pub fn symphonic_tension_coordinates(&self) -> Vec<f64> {
        tension_coordinates(&self.df, &self.sff, &self.h, &self.g_inv)
    }

    pub fn norm2(&self, v: &[f64]) -> f64 {
        inner(&self.h, v, v)
    }
}

fn sff_apply<S: Scalar>(sff: &[Matrix<S>], x: &[S], y: &[S]) -> Vec<S> {
    let zero = sff[0][0][0].zero_like();
    sff.iter()
        .map(|s| {
            scalar::sum(
                &zero,
                (0..x.len()).flat_map(|i| (0..y.len()).map(move |j| (i, j))).map(|(i, j)| s[i][j].clone() * x[i].clone() * y[j].clone()),
            )
        })
        .collect()
}

fn push<S: Scalar>(df: &Matrix<S>, x: &[S]) -> Vec<S> {
    let zero = df[0][0].zero_like();
    df.iter().map(|row| scalar::sum(&zero, row.iter().zip(x).map(|(d, v)| d.clone() * v.clone()))).collect()
}

fn axpy<S: Scalar>(acc: &mut [S], c: &S, v: &[S]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = a.clone() + c.clone() * x.clone();
    }
}

/// The three-term covariant divergence of `σ_φ` in an orthonormal frame.
fn tension_frame<S: Scalar>(df: &Matrix<S>, sff: &[Matrix<S>], h: &Matrix<S>, frame: &[Vec<S>]) -> Vec<S> {
    let m = frame.len();
    let f: Vec<Vec<S>> = frame.iter().map(|e| push(df, e)).collect();
    let s: Vec<Vec<Vec<S>>> = (0..m).map(|i| (0..m).map(|j| sff_apply(sff, &frame[i], &frame[j])).collect()).collect();
    let zero = h[0][0].zero_like();
    let mut out = vec![zero; df.len()];
    for i in 0..m {
        for j in 0..m {
            let c1 = inner(h, &s[i][i], &f[j]);
            let c2 = inner(h, &f[i], &s[i][j]);
            axpy(&mut out, &(c1 + c2), &f[j]);
            let c3 = inner(h, &f[i], &f[j]);
            axpy(&mut out, &c3, &s[i][j]);
        }
    }
    out
}

/// The same divergence with frame sums replaced by `g^{kl}` contractions.
fn tension_coordinates<S: Scalar>(df: &Matrix<S>, sff: &[Matrix<S>], h: &Matrix<S>, g_inv: &Matrix<S>) -> Vec<S> {
    let m = g_inv.len();
    let n = df.len();
    let zero = h[0][0].zero_like();
    let col = |k: usize| -> Vec<S> { (0..n).map(|a| df[a][k].clone()).collect() };
    let cols: Vec<Vec<S>> = (0..m).map(col).collect();
    let s = |k: usize, l: usize| -> Vec<S> { (0..n).map(|a| sff[a][k][l].clone()).collect() };
    // trace of the second fundamental form, τ = g^{kl} S_kl
    let mut tau = vec![zero.clone(); n];
    for k in 0..m {
        for l in 0..m {
            axpy(&mut tau, &g_inv[k][l], &s(k, l));
        }
    }
    let mut out = vec![zero.clone(); n];
    for p in 0..m {
        for q in 0..m {
            let gpq = &g_inv[p][q];
            // h(τ, F_p) F_q
            axpy(&mut out, &(gpq.clone() * inner(h, &tau, &cols[p])), &cols[q]);
            for k in 0..m {
                for l in 0..m {
                    let w = g_inv[k][l].clone() * gpq.clone();
                    // h(F_k, S_lp) F_q
                    axpy(&mut out, &(w.clone() * inner(h, &cols[k], &s(l, p))), &cols[q]);
                    // h(F_k, F_p) S_lq
                    axpy(&mut out, &(w * inner(h, &cols[k], &cols[p])), &s(l, q));
                }
            }
        }
    }
    out
}

pub fn differential<M: ChartMap + ?Sized>(map: &M, x: &[f64]) -> Result<Matrix<f64>> {
    map.source().check_point(x)?;
    let m = map.source().dim();
    let jets = map.component_jets(x, 1)?;
    Ok(jets.iter().map(|j| (0..m).map(|i| j.d1(i)).collect()).collect())
}

pub fn pullback_metric<M: ChartMap + ?Sized>(map: &M, x: &[f64]) -> Result<Matrix<f64>> {
    Ok(PointData::at(map, x)?.pullback_metric())
}

/// `‖φ*h‖²` at `x`; needs first derivatives only.
pub fn symphonic_energy_density<M: ChartMap + ?Sized>(map: &M, x: &[f64]) -> Result<f64> {
    let (source, target) = (map.source(), map.target());
    source.check_point(x)?;
    let jets = map.component_jets(x, 1)?;
    let y: Vec<f64> = jets.iter().map(Jet::value).collect();
    target.check_point(&y)?;
    let g = source.metric_values(x)?;
    check_spd(&g, x)?;
    let h = target.metric_values(&y)?;
    check_spd(&h, &y)?;
    let frame = gram_schmidt(&g)?;
    let f: Vec<Vec<f64>> = frame.iter().map(|e| jets.iter().map(|j| (0..e.len()).map(|k| j.d1(k) * e[k]).sum()).collect()).collect();
    let mut acc = 0.0;
    for fi in &f {
        for fj in &f {
            acc += inner(&h, fi, fj).powi(2);
        }
    }
    Ok(acc)
}

pub fn second_fundamental_form<M: ChartMap + ?Sized>(map: &M, x: &[f64], u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    Ok(PointData::at(map, x)?.second_fundamental_form(u, v))
}

pub fn tension_field<M: ChartMap + ?Sized>(map: &M, x: &[f64]) -> Result<Vec<f64>> {
    Ok(PointData::at(map, x)?.tension())
}

pub fn symphonic_stress<M: ChartMap + ?Sized>(map: &M, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    Ok(PointData::at(map, x)?.stress(u))
}

pub fn symphonic_tension<M: ChartMap + ?Sized>(map: &M, x: &[f64]) -> Result<Vec<f64>> {
    Ok(PointData::at(map, x)?.symphonic_tension())
}

/// `Δf‖grad f‖² + 2 Hess_f(grad f, grad f)` for a scalar function.
pub fn scalar_symphonic_residual(manifold: &ManifoldModel, f: &Expr, x: &[f64]) -> Result<f64> {
    manifold.check_point(x)?;
    let c = scalar_calculus(manifold, f, x)?;
    Ok(c.laplacian * c.grad_norm2() + 2.0 * c.hessian_form(&c.grad, &c.grad))
}
