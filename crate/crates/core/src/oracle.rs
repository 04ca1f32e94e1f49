//! Finite-difference ground truth for the variation formulas, built on the
//! coordinate-additive deformation `φ_{s,t} = φ + tυ + sw`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Jet;
use crate::geometry::ManifoldModel;
use crate::maps::{ChartMap, TangentField};
use crate::mesh::Mesh;
use crate::variational::{bi_energy, bi_energy_pairing, first_variation_pairing, second_variation_pairing, symphonic_energy, VariationReport};

/// Default step for first variations.
pub const FIRST_VARIATION_STEP: f64 = 1e-3;
/// Default step for mixed second variations.
pub const SECOND_VARIATION_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Energy {
    /// `E_sym`
    Sym,
    /// `E_{2,sym}`
    Bisym,
}

impl Energy {
    pub fn evaluate<M: ChartMap + ?Sized>(self, map: &M, mesh: &Mesh) -> Result<f64> {
        match self {
            Energy::Sym => symphonic_energy(map, mesh),
            Energy::Bisym => bi_energy(map, mesh),
        }
    }
}

/// `φ + tυ + sw` in target coordinates.
pub struct Deformation<'a, M: ChartMap + ?Sized> {
    pub base: &'a M,
    pub v: Option<&'a TangentField>,
    pub w: Option<&'a TangentField>,
    pub t: f64,
    pub s: f64,
}

impl<'a, M: ChartMap + ?Sized> Deformation<'a, M> {
    pub fn new(base: &'a M, v: Option<&'a TangentField>, w: Option<&'a TangentField>, t: f64, s: f64) -> Self {
        Deformation { base, v, w, t, s }
    }
}

impl<M: ChartMap + ?Sized> ChartMap for Deformation<'_, M> {
    fn source(&self) -> &ManifoldModel {
        self.base.source()
    }

    fn target(&self) -> &ManifoldModel {
        self.base.target()
    }

    fn component_jets(&self, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        let mut phi = self.base.component_jets(x, order)?;
        for (field, c) in [(self.v, self.t), (self.w, self.s)] {
            if let Some(f) = field {
                if c != 0.0 {
                    for (p, d) in phi.iter_mut().zip(f.jets(self.source(), x, order)?) {
                        *p += d * c;
                    }
                }
            }
        }
        let moved = self.t != 0.0 || self.s != 0.0;
        if moved {
            let y: Vec<f64> = phi.iter().map(Jet::value).collect();
            if !self.target().domain.contains(&y) {
                return Err(Error::StepTooLarge { step: self.t.abs().max(self.s.abs()) });
            }
        }
        Ok(phi)
    }
}

/// Four-point central difference `(−f(2h) + 8f(h) − 8f(−h) + f(−2h)) / 12h`.
pub fn central_difference(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let (p2, p1, m1, m2) = (f(2.0 * h)?, f(h)?, f(-h)?, f(-2.0 * h)?);
    Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
}

/// Mixed central difference `[f(h,h) − f(h,−h) − f(−h,h) + f(−h,−h)] / 4h²`
/// of `f(s, t)`.
pub fn mixed_difference(f: impl Fn(f64, f64) -> Result<f64>, h: f64) -> Result<f64> {
    let (pp, pm, mp, mm) = (f(h, h)?, f(h, -h)?, f(-h, h)?, f(-h, -h)?);
    Ok((pp - pm - mp + mm) / (4.0 * h * h))
}

/// `d/dt E(φ + tυ)` at `t = 0` by the four-point stencil.
pub fn fd_first_variation<M: ChartMap + ?Sized>(map: &M, v: &TangentField, mesh: &Mesh, h: f64, energy: Energy) -> Result<f64> {
    central_difference(|t| energy.evaluate(&Deformation::new(map, Some(v), None, t, 0.0), mesh), h)
}

/// `∂²/∂s∂t E(φ + tυ + sw)` at `s = t = 0` by the mixed stencil.
pub fn fd_second_variation<M: ChartMap + ?Sized>(map: &M, v: &TangentField, w: &TangentField, mesh: &Mesh, h: f64, energy: Energy) -> Result<f64> {
    mixed_difference(|s, t| energy.evaluate(&Deformation::new(map, Some(v), Some(w), t, s), mesh), h)
}

/// Observed order from values at steps `h, h/2, h/4`: `log₂` of the ratio
/// of successive differences. `None` when a difference is at the rounding
/// floor of the values, where no order can be read off.
pub fn richardson_order(values: [f64; 3]) -> Option<f64> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    richardson_order_above(values, 64.0 * f64::EPSILON * scale)
}

/// [`richardson_order`] with an explicit noise floor for the differences.
pub fn richardson_order_above(values: [f64; 3], floor: f64) -> Option<f64> {
    let d1 = (values[0] - values[1]).abs();
    let d2 = (values[1] - values[2]).abs();
    let floor = floor.max(f64::MIN_POSITIVE);
    if d1 <= floor || d2 <= floor {
        return None;
    }
    Some((d1 / d2).log2())
}

/// Rounding floor of a difference quotient with `1/h^k` amplification of
/// energies of size `energy`, at the smallest step `h`.
pub fn difference_noise(energy: f64, h: f64, k: i32) -> f64 {
    64.0 * f64::EPSILON * energy.abs() / h.powi(k)
}

/// First-variation check: closed-form pairing (`−4∫h(τ^s,υ)` for `E_sym`,
/// `−∫h(υ,τ^s_2)` for `E_{2,sym}`) against the FD oracle at `h`, with the
/// observed order from `h, h/2, h/4`.
pub fn check_first_variation<M: ChartMap + ?Sized>(map: &M, v: &TangentField, mesh: &Mesh, h: f64, energy: Energy) -> Result<VariationReport> {
    let analytic = match energy {
        Energy::Sym => first_variation_pairing(map, v, mesh)?,
        Energy::Bisym => bi_energy_pairing(map, v, mesh)?,
    };
    let fd: Vec<f64> = [h, h / 2.0, h / 4.0].iter().map(|&step| fd_first_variation(map, v, mesh, step, energy)).collect::<Result<_>>()?;
    let floor = difference_noise(energy.evaluate(map, mesh)?, h / 4.0, 1);
    Ok(VariationReport::new(analytic, fd[0], mesh, h, richardson_order_above([fd[0], fd[1], fd[2]], floor)))
}

/// Second-variation check of `E_sym`: `−4∫h(J^s υ, w)` against the mixed
/// FD oracle at `h`, with the observed order from `h, h/2, h/4`.
pub fn check_second_variation<M: ChartMap + ?Sized>(map: &M, v: &TangentField, w: &TangentField, mesh: &Mesh, h: f64) -> Result<VariationReport> {
    let analytic = second_variation_pairing(map, v, w, mesh)?;
    let fd: Vec<f64> = [h, h / 2.0, h / 4.0].iter().map(|&step| fd_second_variation(map, v, w, mesh, step, Energy::Sym)).collect::<Result<_>>()?;
    let floor = difference_noise(symphonic_energy(map, mesh)?, h / 4.0, 2);
    Ok(VariationReport::new(analytic, fd[0], mesh, h, richardson_order_above([fd[0], fd[1], fd[2]], floor)))
}
