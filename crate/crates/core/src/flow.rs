//! Discrete gradient flow `∂φ/∂t = τ^s(φ)` on a periodic grid.
//!
//! The map is stored as a linear winding plus a periodic part,
//! `φ(x) = W x + u(x)`, with `u` sampled on the grid. Derivatives of `u`
//! use fourth-order central differences. A step `u + ετ^s` is accepted when
//! the grid energy does not increase; otherwise `ε` is halved.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{christoffel, frame_at, metric_at, Frame, ManifoldModel};
use crate::maps::{ChartMap, FieldDerivatives, PointData};
use crate::oracle::Energy;
use crate::reduce::{pairwise_sum, par_map};
use crate::scalar::{inner, Matrix};
use crate::variational::jacobi_groups_from_parts;

/// Smallest number of grid nodes per coordinate.
pub const MIN_RESOLUTION: usize = 8;
/// Rejections in a row before a step is declared stalled.
pub const MAX_HALVINGS: u32 = 20;
/// Default initial step `ε`; halvings bring it down to the stable range
/// of the explicit scheme.
pub const DEFAULT_STEP: f64 = 0.05;
/// Tolerance factor applied to the experimental bi-symphonic flow.
pub const BISYM_TOLERANCE_FACTOR: f64 = 10.0;

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowStatus {
    /// The descent field fell below the tolerance.
    Converged,
    /// [`MAX_HALVINGS`] halvings of the step did not lower the energy.
    Stalled,
    BudgetExhausted,
    /// A candidate step moved the image out of the target chart.
    LeftChart,
}

/// One row of the per-step trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub epsilon: f64,
    pub e_sym: f64,
    pub max_tau_s_norm: f64,
    /// Present for the bi-symphonic flow.
    pub e_2sym: Option<f64>,
}

/// Source geometry at one grid node, fixed for the whole run.
#[derive(Debug, Clone)]
struct Node {
    x: Vec<f64>,
    weight: f64,
    g: Matrix<f64>,
    g_inv: Matrix<f64>,
    gamma_m: Vec<f64>,
    frame: Frame,
}

/// Derived quantities of the current grid map.
#[derive(Debug, Clone)]
struct Evaluation {
    e_sym: f64,
    /// Descent field at each node: `τ^s`, or the bi-tension direction.
    direction: Vec<Vec<f64>>,
    /// `max ‖direction‖_h`.
    max_norm: f64,
    max_tau_s_norm: f64,
    e_2sym: Option<f64>,
    /// Energy that step control keeps non-increasing.
    objective: f64,
}

/// `field[k][p][a]`: partial along coordinate `k` at node `p`.
type Partials = Vec<Vec<Vec<f64>>>;

#[derive(Debug, Clone)]
pub struct FlowState {
    source: ManifoldModel,
    target: ManifoldModel,
    energy: Energy,
    resolution: Vec<usize>,
    spacing: Vec<f64>,
    /// `winding[a][k]`: `∂_k` of the linear part.
    winding: Matrix<f64>,
    nodes: Vec<Node>,
    /// `neighbors[k][o][p]`: node `p` shifted by `o − 2` along coordinate `k`.
    neighbors: Vec<[Vec<usize>; 5]>,
    /// Periodic part `u` at each node.
    periodic: Vec<Vec<f64>>,
    pub epsilon: f64,
    /// Accepted steps.
    pub iteration: usize,
    /// Objective energy after each accepted step, starting with the initial value.
    pub energy_history: Vec<f64>,
    pub trace: Vec<TraceRow>,
    current: Evaluation,
}

impl FlowState {
    /// Samples `map` on a grid with `resolution` nodes per coordinate.
    pub fn new<M: ChartMap + ?Sized>(map: &M, resolution: usize, epsilon: f64, energy: Energy) -> Result<FlowState> {
        let source = map.source().clone();
        let target = map.target().clone();
        let m = source.dim();
        let n = target.dim();
        if !source.domain.is_fully_periodic() {
            return Err(Error::NonPeriodic(format!(
                "chart `{}` has non-periodic coordinates; the flow needs boundary conditions it does not have",
                source.name
            )));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::TooCoarse { got: resolution, min: MIN_RESOLUTION });
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Invalid(format!("flow step must be positive, got {epsilon}")));
        }
        let periods: Vec<f64> = source.domain.intervals.iter().map(|(lo, hi)| hi - lo).collect();
        let spacing: Vec<f64> = periods.iter().map(|p| p / resolution as f64).collect();
        let origin: Vec<f64> = source.domain.intervals.iter().map(|iv| iv.0).collect();

        let winding = estimate_winding(map, &origin, &periods)?;
        let total = resolution.pow(m as u32);
        let multi = |p: usize| -> Vec<usize> {
            let mut idx = vec![0; m];
            let mut rest = p;
            for k in (0..m).rev() {
                idx[k] = rest % resolution;
                rest /= resolution;
            }
            idx
        };
        let flat = |idx: &[usize]| idx.iter().fold(0, |acc, &i| acc * resolution + i);
        let neighbors: Vec<[Vec<usize>; 5]> = (0..m)
            .map(|k| {
                std::array::from_fn(|o| {
                    (0..total)
                        .map(|p| {
                            let mut idx = multi(p);
                            idx[k] = (idx[k] + resolution + o - 2) % resolution;
                            flat(&idx)
                        })
                        .collect()
                })
            })
            .collect();

        let cell: f64 = spacing.iter().product();
        let nodes: Vec<Node> = par_map(total, |p| {
            let x: Vec<f64> = multi(p).iter().zip(&origin).zip(&spacing).map(|((&i, o), h)| o + i as f64 * h).collect();
            let metric = metric_at(&source, &x, 0)?;
            let gamma = christoffel(&source, &x)?;
            Ok(Node {
                weight: cell * metric.sqrt_det,
                g_inv: metric.inverse.clone(),
                g: metric.g,
                gamma_m: gamma.gamma,
                frame: frame_at(&source, &x)?,
                x,
            })
        })?;
        let periodic: Vec<Vec<f64>> = par_map(total, |p| {
            let y = map.evaluate(&nodes[p].x)?;
            Ok((0..n).map(|a| y[a] - linear(&winding[a], &nodes[p].x, &origin)).collect())
        })?;

        let mut state = FlowState {
            source,
            target,
            energy,
            resolution: vec![resolution; m],
            spacing,
            winding,
            nodes,
            neighbors,
            periodic,
            epsilon,
            iteration: 0,
            energy_history: Vec::new(),
            trace: Vec::new(),
            current: Evaluation { e_sym: 0.0, direction: vec![], max_norm: 0.0, max_tau_s_norm: 0.0, e_2sym: None, objective: 0.0 },
        };
        state.current = state.evaluate(&state.periodic)?;
        state.energy_history.push(state.current.objective);
        state.push_trace();
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn energy(&self) -> Energy {
        self.energy
    }

    /// Grid symphonic energy of the current map.
    pub fn symphonic_energy(&self) -> f64 {
        self.current.e_sym
    }

    /// Grid bi-energy, for the bi-symphonic flow.
    pub fn bi_energy(&self) -> Option<f64> {
        self.current.e_2sym
    }

    /// `max ‖τ^s‖_h` over the grid.
    pub fn max_tension_norm(&self) -> f64 {
        self.current.max_tau_s_norm
    }

    /// `max ‖·‖_h` of the field the flow follows.
    pub fn max_direction_norm(&self) -> f64 {
        self.current.max_norm
    }

    /// Grid nodes in source coordinates.
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.nodes.iter().map(|n| n.x.clone()).collect()
    }

    /// Current map values `φ(x)` at the grid nodes.
    pub fn values(&self) -> Vec<Vec<f64>> {
        self.nodes.iter().zip(&self.periodic).map(|(node, u)| self.image(node, u)).collect()
    }

    /// Grid `τ^s` of the current map.
    pub fn tension(&self) -> Result<Vec<Vec<f64>>> {
        let data = self.point_data(&self.periodic)?;
        Ok(data.iter().map(PointData::symphonic_tension).collect())
    }

    fn origin(&self) -> Vec<f64> {
        self.source.domain.intervals.iter().map(|iv| iv.0).collect()
    }

    fn image(&self, node: &Node, u: &[f64]) -> Vec<f64> {
        let origin = self.origin();
        u.iter().enumerate().map(|(a, ua)| ua + linear(&self.winding[a], &node.x, &origin)).collect()
    }

    /// Fourth-order `∂_k f` of a grid field.
    fn d1(&self, field: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
        let nb = &self.neighbors[k];
        let h = self.spacing[k];
        (0..field.len())
            .map(|p| {
                let (m2, m1, p1, p2) = (&field[nb[0][p]], &field[nb[1][p]], &field[nb[3][p]], &field[nb[4][p]]);
                (0..field[p].len()).map(|a| (m2[a] - 8.0 * m1[a] + 8.0 * p1[a] - p2[a]) / (12.0 * h)).collect()
            })
            .collect()
    }

    /// Fourth-order `∂_k² f` of a grid field.
    fn d2(&self, field: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
        let nb = &self.neighbors[k];
        let h = self.spacing[k];
        (0..field.len())
            .map(|p| {
                let (m2, m1, c, p1, p2) = (&field[nb[0][p]], &field[nb[1][p]], &field[p], &field[nb[3][p]], &field[nb[4][p]]);
                (0..c.len()).map(|a| (-m2[a] + 16.0 * m1[a] - 30.0 * c[a] + 16.0 * p1[a] - p2[a]) / (12.0 * h * h)).collect()
            })
            .collect()
    }

    /// All second partials `second[k][l][p][a]` of a grid field, with its
    /// first partials `first[k][p][a]`.
    fn partials(&self, field: &[Vec<f64>]) -> (Partials, Vec<Partials>) {
        let m = self.source.dim();
        let first: Vec<Vec<Vec<f64>>> = (0..m).map(|k| self.d1(field, k)).collect();
        let second = (0..m).map(|k| (0..m).map(|l| if k == l { self.d2(field, k) } else { self.d1(&first[l], k) }).collect()).collect();
        (first, second)
    }

    /// Point data of the grid map `W x + u` from finite differences.
    fn point_data(&self, u: &[Vec<f64>]) -> Result<Vec<PointData>> {
        let (m, n) = (self.source.dim(), self.target.dim());
        let (first, second) = self.partials(u);
        par_map(self.nodes.len(), |p| {
            let node = &self.nodes[p];
            let image = self.image(node, &u[p]);
            if !self.target.domain.contains(&image) {
                return Err(Error::OutsideDomain { chart: self.target.name.clone(), point: image });
            }
            let h = self.target.metric_values(&image)?;
            let gamma_n = if self.target.has_constant_metric() { vec![0.0; n * n * n] } else { christoffel(&self.target, &image)?.gamma };
            let df: Matrix<f64> = (0..n).map(|a| (0..m).map(|k| self.winding[a][k] + first[k][p][a]).collect()).collect();
            let sff: Vec<Matrix<f64>> = (0..n)
                .map(|a| {
                    (0..m)
                        .map(|i| {
                            (0..m)
                                .map(|j| {
                                    let mut s = second[i][j][p][a];
                                    for k in 0..m {
                                        s -= node.gamma_m[k * m * m + i * m + j] * df[a][k];
                                    }
                                    for b in 0..n {
                                        for c in 0..n {
                                            s += gamma_n[a * n * n + b * n + c] * df[b][i] * df[c][j];
                                        }
                                    }
                                    s
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            Ok(PointData {
                point: node.x.clone(),
                image,
                df,
                sff,
                g: node.g.clone(),
                g_inv: node.g_inv.clone(),
                h,
                gamma_m: node.gamma_m.clone(),
                gamma_n,
                frame: node.frame.clone(),
            })
        })
    }

    /// Bi-tension on the grid: `J^s` applied to the grid `τ^s`, with the
    /// field derivatives also taken by finite differences.
    fn bi_tension(&self, data: &[PointData], tau: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let (m, n) = (self.source.dim(), self.target.dim());
        let flat = self.target.has_constant_metric();
        let (dtau, _) = self.partials(tau);
        // ∇_k τ as a grid field per k, then differentiated once more
        let cov1: Vec<Vec<Vec<f64>>> = (0..m)
            .map(|k| {
                (0..data.len())
                    .map(|p| {
                        let d = &data[p];
                        (0..n)
                            .map(|a| {
                                let mut v = dtau[k][p][a];
                                for b in 0..n {
                                    for c in 0..n {
                                        v += d.gamma_n[a * n * n + b * n + c] * d.df[b][k] * tau[p][c];
                                    }
                                }
                                v
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let dcov: Vec<Vec<Vec<Vec<f64>>>> = (0..m).map(|q| (0..m).map(|pp| self.d1(&cov1[q], pp)).collect()).collect();
        par_map(data.len(), |p| {
            let d = &data[p];
            let first: Matrix<f64> = (0..m).map(|k| cov1[k][p].clone()).collect();
            let second: Vec<Matrix<f64>> = (0..m)
                .map(|pp| {
                    (0..m)
                        .map(|q| {
                            (0..n)
                                .map(|a| {
                                    let mut v = dcov[q][pp][p][a];
                                    for b in 0..n {
                                        for c in 0..n {
                                            v += d.gamma_n[a * n * n + b * n + c] * d.df[b][pp] * first[q][c];
                                        }
                                    }
                                    for k in 0..m {
                                        v -= d.gamma_m[k * m * m + pp * m + q] * first[k][a];
                                    }
                                    v
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let fd = FieldDerivatives { value: tau[p].clone(), first, second };
            let riemann = if flat { None } else { Some(christoffel(&self.target, &d.image)?.riemann_tensor()) };
            Ok(jacobi_groups_from_parts(d, riemann.as_deref(), &fd).total())
        })
    }

    fn evaluate(&self, u: &[Vec<f64>]) -> Result<Evaluation> {
        let data = self.point_data(u)?;
        let tau: Vec<Vec<f64>> = data.iter().map(PointData::symphonic_tension).collect();
        let e_sym = pairwise_sum(&data.iter().zip(&self.nodes).map(|(d, node)| node.weight * d.energy_density()).collect::<Vec<_>>());
        let norms: Vec<f64> = data.iter().zip(&tau).map(|(d, t)| d.norm2(t).sqrt()).collect();
        let max_tau_s_norm = norms.iter().fold(0.0f64, |a, &b| a.max(b));
        match self.energy {
            Energy::Sym => Ok(Evaluation { e_sym, direction: tau, max_norm: max_tau_s_norm, max_tau_s_norm, e_2sym: None, objective: e_sym }),
            Energy::Bisym => {
                let e_2sym = pairwise_sum(&norms.iter().zip(&self.nodes).map(|(t, node)| node.weight * t * t).collect::<Vec<_>>());
                let tau2 = self.bi_tension(&data, &tau)?;
                // the measured sign of the bi-energy pairing makes −τ^s_2 the descent side
                let direction: Vec<Vec<f64>> = tau2.iter().map(|t| t.iter().map(|v| -v).collect()).collect();
                let max_norm = data.iter().zip(&direction).map(|(d, t)| d.norm2(t).sqrt()).fold(0.0f64, f64::max);
                Ok(Evaluation { e_sym, direction, max_norm, max_tau_s_norm, e_2sym: Some(e_2sym), objective: e_2sym })
            }
        }
    }

    fn push_trace(&mut self) {
        self.trace.push(TraceRow {
            step: self.iteration,
            epsilon: self.epsilon,
            e_sym: self.current.e_sym,
            max_tau_s_norm: self.current.max_tau_s_norm,
            e_2sym: self.current.e_2sym,
        });
    }

    /// One accepted step, halving `ε` on rejection. Returns `None` when the
    /// step was accepted, or the terminal status otherwise.
    pub fn step(&mut self) -> Result<Option<FlowStatus>> {
        for _ in 0..=MAX_HALVINGS {
            let eps = self.epsilon;
            let candidate: Vec<Vec<f64>> =
                self.periodic.iter().zip(&self.current.direction).map(|(u, t)| u.iter().zip(t).map(|(a, b)| a + eps * b).collect()).collect();
            let evaluation = match self.evaluate(&candidate) {
                Ok(e) => e,
                Err(Error::OutsideDomain { .. }) => return Ok(Some(FlowStatus::LeftChart)),
                Err(e) => return Err(e),
            };
            if evaluation.objective <= self.current.objective {
                self.periodic = candidate;
                self.current = evaluation;
                self.iteration += 1;
                self.energy_history.push(self.current.objective);
                self.push_trace();
                return Ok(None);
            }
            self.epsilon *= 0.5;
        }
        Ok(Some(FlowStatus::Stalled))
    }

    /// Steps until `max ‖direction‖_h ≤ tol` (scaled by
    /// [`BISYM_TOLERANCE_FACTOR`] for the bi-symphonic flow), a stall, or
    /// `max_steps` accepted steps.
    pub fn run(&mut self, max_steps: usize, tol: f64) -> Result<FlowStatus> {
        let tol = match self.energy {
            Energy::Sym => tol,
            Energy::Bisym => tol * BISYM_TOLERANCE_FACTOR,
        };
        let mut taken = 0;
        loop {
            if self.current.max_norm <= tol {
                return Ok(FlowStatus::Converged);
            }
            if taken >= max_steps {
                return Ok(FlowStatus::BudgetExhausted);
            }
            if let Some(status) = self.step()? {
                return Ok(status);
            }
            taken += 1;
        }
    }
}

fn linear(row: &[f64], x: &[f64], origin: &[f64]) -> f64 {
    row.iter().zip(x).zip(origin).map(|((w, x), o)| w * (x - o)).sum()
}

/// Slope of the linear part: `(φ(x + P_k e_k) − φ(x)) / P_k`, checked at a
/// second base point.
fn estimate_winding<M: ChartMap + ?Sized>(map: &M, origin: &[f64], periods: &[f64]) -> Result<Matrix<f64>> {
    let m = origin.len();
    let n = map.target().dim();
    let mut winding = vec![vec![0.0; m]; n];
    let probe: Vec<f64> = origin.iter().zip(periods).map(|(o, p)| o + 0.37 * p).collect();
    for k in 0..m {
        let mut slopes = Vec::with_capacity(2);
        for base in [origin, probe.as_slice()] {
            let mut shifted = base.to_vec();
            shifted[k] += periods[k];
            let (a, b) = (map.evaluate(base)?, map.evaluate(&shifted)?);
            slopes.push(a.iter().zip(&b).map(|(a, b)| (b - a) / periods[k]).collect::<Vec<_>>());
        }
        for a in 0..n {
            let (s0, s1) = (slopes[0][a], slopes[1][a]);
            if (s0 - s1).abs() > 1e-8 * (1.0 + s0.abs()) {
                return Err(Error::Invalid(format!("map component {a} is not periodic up to a linear winding along coordinate {k}")));
            }
            winding[a][k] = s0;
        }
    }
    Ok(winding)
}

/// Largest `‖τ^s_grid − τ^s_jet‖_h` over the grid of `map` at `resolution`.
pub fn grid_tension_error<M: ChartMap + ?Sized>(map: &M, resolution: usize) -> Result<f64> {
    let state = FlowState::new(map, resolution, 1.0, Energy::Sym)?;
    let grid = state.tension()?;
    let errors = par_map(state.len(), |p| {
        let exact = PointData::at(map, &state.nodes[p].x)?;
        let t = exact.symphonic_tension();
        let diff: Vec<f64> = t.iter().zip(&grid[p]).map(|(a, b)| a - b).collect();
        Ok(inner(&exact.h, &diff, &diff).sqrt())
    })?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}
