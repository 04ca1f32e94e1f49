//! Energies, variation pairings, the symphonic-Jacobi operator and the
//! bi-tension field.
//!
//! `J^s_φ(υ)` is the sum of four groups, with `F_i = dφ(e_i)`,
//! `S_ij = ∇dφ(e_i, e_j)`, `V_i = ∇^φ_{e_i} υ` and
//! `V_ij = ∇^φ_{e_i}∇^φ_{e_j} υ − ∇^φ_{∇_{e_i} e_j} υ`:
//!
//! 1. `Σ_ij 2 h(V_i, F_j) S_ij`
//! 2. `Σ_ij [h(V_ii, F_j) + h(V_j, S_ii)] F_j`
//! 3. `Σ_ij [h(S_ij, F_j) + h(F_i, S_jj)] V_i`
//! 4. `Σ_ij h(F_i, F_j) [V_ji + R^N(υ, F_j) F_i]`
//!
//! and `τ^s_2(φ) = J^s_φ(τ^s(φ))`.

use serde::Serialize;

use crate::error::Result;
use crate::expr::Jet;
use crate::geometry::apply_riemann;
use crate::maps::{symphonic_energy_density, ChartMap, FieldDerivatives, MapJet, PointData, TangentField};
use crate::mesh::Mesh;
use crate::reduce::par_sum;
use crate::scalar::inner;

/// The four term groups of `J^s_φ(υ)`, in the order listed in the module
/// documentation.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiGroups(pub [Vec<f64>; 4]);

impl JacobiGroups {
    pub fn total(&self) -> Vec<f64> {
        let n = self.0[0].len();
        (0..n).map(|a| self.0.iter().map(|g| g[a]).sum()).collect()
    }
}

/// Symphonic energy `∫ ‖φ*h‖² dv_g`.
pub fn symphonic_energy<M: ChartMap + ?Sized>(map: &M, mesh: &Mesh) -> Result<f64> {
    par_sum(mesh.len(), |k| Ok(mesh.weights[k] * symphonic_energy_density(map, &mesh.points[k])?))
}

/// Bi-energy `∫ ‖τ^s(φ)‖² dv_g`.
pub fn bi_energy<M: ChartMap + ?Sized>(map: &M, mesh: &Mesh) -> Result<f64> {
    par_sum(mesh.len(), |k| {
        let p = PointData::at(map, &mesh.points[k])?;
        let tau = p.symphonic_tension();
        Ok(mesh.weights[k] * p.norm2(&tau))
    })
}

/// `−4 ∫ h(τ^s(φ), υ) dv_g`.
pub fn first_variation_pairing<M: ChartMap + ?Sized>(map: &M, field: &TangentField, mesh: &Mesh) -> Result<f64> {
    field.check_len(map.target().dim())?;
    let integral = par_sum(mesh.len(), |k| {
        let x = &mesh.points[k];
        let p = PointData::at(map, x)?;
        let v = field.values(map.source(), x)?;
        Ok(mesh.weights[k] * inner(&p.h, &p.symphonic_tension(), &v))
    })?;
    Ok(-4.0 * integral)
}

/// `−∫ h(υ, τ^s_2(φ)) dv_g`, with the factor as printed for the bi-energy.
pub fn bi_energy_pairing<M: ChartMap + ?Sized>(map: &M, field: &TangentField, mesh: &Mesh) -> Result<f64> {
    field.check_len(map.target().dim())?;
    let integral = par_sum(mesh.len(), |k| {
        let x = &mesh.points[k];
        let mj = MapJet::new(map, x, 2)?;
        let tau2 = bi_tension_on(&mj)?.total();
        let v = field.values(map.source(), x)?;
        Ok(mesh.weights[k] * inner(&mj.values().h, &v, &tau2))
    })?;
    Ok(-integral)
}

/// Groups of `J^s_φ(υ)` from precomputed data: point values, target
/// curvature tensor `R^l_{kij}` (or `None` for a flat target) and the
/// covariant derivatives of `υ`.
pub fn jacobi_groups_from_parts(p: &PointData, riemann: Option<&[f64]>, d: &FieldDerivatives) -> JacobiGroups {
    let (m, n) = (p.point.len(), p.image.len());
    let e = &p.frame.vectors;
    let h = &p.h;
    let f = p.frame_images();
    let s: Vec<Vec<Vec<f64>>> = (0..m).map(|i| (0..m).map(|j| p.second_fundamental_form(&e[i], &e[j])).collect()).collect();
    let v: Vec<Vec<f64>> = (0..m).map(|i| (0..n).map(|a| (0..m).map(|k| e[i][k] * d.first[k][a]).sum()).collect()).collect();
    let v2 = |i: usize, j: usize| -> Vec<f64> {
        (0..n)
            .map(|a| {
                let mut acc = 0.0;
                for pp in 0..m {
                    for q in 0..m {
                        acc += e[i][pp] * e[j][q] * d.second[pp][q][a];
                    }
                }
                acc
            })
            .collect()
    };
    let add = |acc: &mut Vec<f64>, c: f64, x: &[f64]| {
        for (a, xv) in acc.iter_mut().zip(x) {
            *a += c * xv;
        }
    };
    let mut g = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let v2_diag: Vec<Vec<f64>> = (0..m).map(|i| v2(i, i)).collect();
    for i in 0..m {
        for j in 0..m {
            add(&mut g[0], 2.0 * inner(h, &v[i], &f[j]), &s[i][j]);
            add(&mut g[1], inner(h, &v2_diag[i], &f[j]) + inner(h, &v[j], &s[i][i]), &f[j]);
            add(&mut g[2], inner(h, &s[i][j], &f[j]) + inner(h, &f[i], &s[j][j]), &v[i]);
            let hij = inner(h, &f[i], &f[j]);
            add(&mut g[3], hij, &v2(j, i));
            if let Some(r) = riemann {
                add(&mut g[3], hij, &apply_riemann(r, n, &d.value, &f[j], &f[i]));
            }
        }
    }
    JacobiGroups(g)
}

fn curvature(mj: &MapJet, flat: bool) -> Option<Vec<f64>> {
    (!flat).then(|| mj.target_christoffel.riemann_tensor())
}

/// `J^s_φ` applied to a field given as jets of order ≥ 2 at the base point
/// of `mj` (which must have order ≥ 1).
pub fn jacobi_on_jets(mj: &MapJet, field: &[Jet], flat_target: bool) -> Result<JacobiGroups> {
    let d = mj.covariant_derivatives(field)?;
    let r = curvature(mj, flat_target);
    Ok(jacobi_groups_from_parts(&mj.values(), r.as_deref(), &d))
}

pub fn jacobi_groups<M: ChartMap + ?Sized>(map: &M, x: &[f64], field: &TangentField) -> Result<JacobiGroups> {
    field.check_len(map.target().dim())?;
    let mj = MapJet::new(map, x, 1)?;
    let v = field.jets(map.source(), x, 2)?;
    jacobi_on_jets(&mj, &v, map.target().has_constant_metric())
}

/// `J^s_φ(υ)` at `x`.
pub fn jacobi_operator<M: ChartMap + ?Sized>(map: &M, x: &[f64], field: &TangentField) -> Result<Vec<f64>> {
    Ok(jacobi_groups(map, x, field)?.total())
}

/// Groups of `τ^s_2` at the base point of `mj` (order ≥ 2), with `τ^s`
/// taken through the frame of `mj`.
pub fn bi_tension_on(mj: &MapJet) -> Result<JacobiGroups> {
    jacobi_on_jets(mj, &mj.symphonic_tension_jets(), target_is_flat(mj))
}

/// `J^s_φ` applied to the coordinate-route `τ^s` jets, independent of the
/// frame used for `τ^s` itself.
pub fn bi_tension_coordinates_on(mj: &MapJet) -> Result<JacobiGroups> {
    jacobi_on_jets(mj, &mj.symphonic_tension_jets_coordinates(), target_is_flat(mj))
}

fn target_is_flat(mj: &MapJet) -> bool {
    mj.gamma_n.iter().all(|g| g.coefficients().iter().all(|&c| c == 0.0))
        && mj.target_christoffel.d_gamma.as_ref().is_none_or(|d| d.iter().all(|&c| c == 0.0))
}

/// The four groups of `τ^s_2(φ)` at `x`.
pub fn bi_tension_groups<M: ChartMap + ?Sized>(map: &M, x: &[f64]) -> Result<JacobiGroups> {
    bi_tension_on(&MapJet::new(map, x, 2)?)
}

/// Bi-tension field `τ^s_2(φ)` at `x`.
pub fn bi_tension<M: ChartMap + ?Sized>(map: &M, x: &[f64]) -> Result<Vec<f64>> {
    Ok(bi_tension_groups(map, x)?.total())
}

/// Coefficients along the position vector `P` of the four groups of
/// `τ^s_2` for the inclusion `S^m ↪ ℝ^{m+1}` at chart point `x`.
pub fn sphere_term_breakdown_at(m: usize, x: &[f64]) -> Result<[f64; 4]> {
    let map = crate::models::sphere_inclusion(m)?;
    let groups = bi_tension_groups(&map, x)?;
    let p = map.evaluate(x)?;
    Ok(groups.0.map(|g| g.iter().zip(&p).map(|(a, b)| a * b).sum()))
}

/// [`sphere_term_breakdown_at`] at the chart point with every coordinate
/// equal to 1.
pub fn sphere_term_breakdown(m: usize) -> Result<[f64; 4]> {
    sphere_term_breakdown_at(m, &vec![1.0; m])
}

/// `∫ h(J^s_φ(υ), w) dv_g`.
pub fn index_form<M: ChartMap + ?Sized>(map: &M, v: &TangentField, w: &TangentField, mesh: &Mesh) -> Result<f64> {
    v.check_len(map.target().dim())?;
    w.check_len(map.target().dim())?;
    par_sum(mesh.len(), |k| {
        let x = &mesh.points[k];
        let mj = MapJet::new(map, x, 1)?;
        let vj = v.jets(map.source(), x, 2)?;
        let jv = jacobi_on_jets(&mj, &vj, map.target().has_constant_metric())?.total();
        let wv = w.values(map.source(), x)?;
        Ok(mesh.weights[k] * inner(&mj.values().h, &jv, &wv))
    })
}

/// `−4 ∫ h(J^s_φ(υ), w) dv_g`.
pub fn second_variation_pairing<M: ChartMap + ?Sized>(map: &M, v: &TangentField, w: &TangentField, mesh: &Mesh) -> Result<f64> {
    Ok(-4.0 * index_form(map, v, w, mesh)?)
}

/// Closed-form pairing against its finite-difference oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationReport {
    pub analytic: f64,
    pub oracle: f64,
    pub abs_discrepancy: f64,
    /// `|analytic − oracle| / max(|analytic|, |oracle|)`, zero when both vanish.
    pub rel_discrepancy: f64,
    pub mesh: String,
    pub step: f64,
    /// Observed convergence order of the oracle under step halving, when defined.
    pub order: Option<f64>,
}

impl VariationReport {
    pub fn new(analytic: f64, oracle: f64, mesh: &Mesh, step: f64, order: Option<f64>) -> Self {
        let abs_discrepancy = (analytic - oracle).abs();
        let scale = analytic.abs().max(oracle.abs());
        let rel_discrepancy = if scale > 0.0 { abs_discrepancy / scale } else { 0.0 };
        VariationReport { analytic, oracle, abs_discrepancy, rel_discrepancy, mesh: mesh.describe(), step, order }
    }

    /// Relative agreement within `rel`, or both values below `abs_floor`.
    pub fn within(&self, rel: f64, abs_floor: f64) -> bool {
        self.rel_discrepancy <= rel || (self.analytic.abs() <= abs_floor && self.oracle.abs() <= abs_floor)
    }

    /// `analytic / oracle`, the factor relating the two.
    pub fn ratio(&self) -> f64 {
        self.analytic / self.oracle
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use std::f64::consts::PI;

    #[test]
    fn energies_of_simple_maps() {
        let id = models::linear_torus([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let mesh = Mesh::new(&id.source, 8).unwrap();
        let area = 4.0 * PI * PI;
        assert!((symphonic_energy(&id, &mesh).unwrap() - 2.0 * area).abs() < 1e-10);
        assert!(bi_energy(&id, &mesh).unwrap().abs() < 1e-20);
        let constant = models::linear_torus([[0.0, 0.0], [0.0, 0.0]]).unwrap();
        assert_eq!(symphonic_energy(&constant, &mesh).unwrap(), 0.0);
    }

    #[test]
    fn sphere_energies() {
        let s = models::sphere_inclusion(2).unwrap();
        let mesh = Mesh::new(&s.source, 24).unwrap();
        let d = crate::geometry::DEFAULT_EXCLUSION_MARGIN;
        let area = 2.0 * PI * (d.cos() - (PI - d).cos());
        assert!((symphonic_energy(&s, &mesh).unwrap() - 2.0 * area).abs() < 1e-10);
        assert!((bi_energy(&s, &mesh).unwrap() - 4.0 * area).abs() < 1e-10);
    }

    #[test]
    fn power_curve_bi_energy_against_closed_form() {
        // γ = t^{4/3}: 3γ'²γ'' = 64/27, so the bi-energy on [1, 2] is (64/27)²
        let c = models::power_curve_on(4.0 / 3.0, 1.0, 2.0).unwrap();
        let mesh = Mesh::new(&c.source, 12).unwrap();
        let expected = (64.0f64 / 27.0).powi(2);
        assert!((bi_energy(&c, &mesh).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn sphere_breakdown_matches_displayed_groups() {
        for m in 2..=3 {
            let mf = m as f64;
            let c = sphere_term_breakdown(m).unwrap();
            let expected = [2.0 * mf * mf, 0.0, 0.0, mf * mf];
            for (got, want) in c.iter().zip(expected) {
                assert!((got - want).abs() < 1e-9, "m = {m}: {c:?}");
            }
        }
    }

    #[test]
    fn bi_tension_of_power_curve() {
        // t^2 at t = 1: three times the printed polynomial a⁵(a−1)(33a²−89a+60) t^{5a−8}
        let c = models::power_curve(2.0).unwrap();
        let t2 = bi_tension(&c, &[1.0]).unwrap()[0];
        assert!((t2 - 3.0 * 448.0).abs() < 1e-9, "{t2}");
        let bi = models::power_curve(4.0 / 3.0).unwrap();
        for t in [0.5, 1.0, 2.7, 4.0] {
            assert!(bi_tension(&bi, &[t]).unwrap()[0].abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_vanishes_for_constant_maps_and_is_linear() {
        let src = models::flat_torus(2);
        let (v, w) = models::torus_fields(&src).unwrap();
        let constant = models::linear_torus([[0.0, 0.0], [0.0, 0.0]]).unwrap();
        assert_eq!(jacobi_operator(&constant, &[0.4, 1.0], &v).unwrap(), vec![0.0, 0.0]);

        let phi = models::torus_test().unwrap();
        let x = [0.7, 2.1];
        let (a, b) = (1.7, -0.6);
        let combo = TangentField::new(
            "combo",
            v.components
                .iter()
                .zip(&w.components)
                .map(|(p, q)| {
                    crate::expr::Expr::Add(
                        Box::new(crate::expr::Expr::Mul(Box::new(crate::expr::Expr::Const(a)), Box::new(p.clone()))),
                        Box::new(crate::expr::Expr::Mul(Box::new(crate::expr::Expr::Const(b)), Box::new(q.clone()))),
                    )
                })
                .collect(),
            None,
        );
        let lhs = jacobi_operator(&phi, &x, &combo).unwrap();
        let jv = jacobi_operator(&phi, &x, &v).unwrap();
        let jw = jacobi_operator(&phi, &x, &w).unwrap();
        for k in 0..2 {
            let rhs = a * jv[k] + b * jw[k];
            assert!((lhs[k] - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn report_relative_discrepancy() {
        let src = models::flat_torus(2);
        let mesh = Mesh::new(&src, 8).unwrap();
        let r = VariationReport::new(2.0, 1.0, &mesh, 1e-3, None);
        assert_eq!(r.rel_discrepancy, 0.5);
        assert_eq!(r.mesh, "8x8");
        assert_eq!(VariationReport::new(0.0, 0.0, &mesh, 1e-3, None).rel_discrepancy, 0.0);
    }
}
