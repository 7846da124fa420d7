//! Weak-form consistency residuals of a discrete time history.
//!
//! For a test function `phi` the continuity, momentum and entropy residuals are
//! `[sum q phi h^2]_{tau1}^{tau2} - int_{tau1}^{tau2} sum F(q) . grad phi h^2 dt`
//! with cell-centre quadrature in space and the trapezoid rule over every
//! accepted step in time.

use std::f64::consts::PI;

use serde::Serialize;

use super::cesaro::flux_tensor;
use crate::eos::{entropy_from_conservative, pressure_from_conservative, GasParams};
use crate::error::{Error, Result};
use crate::grid::{cell_center, Boundary, ConservativeField, Mesh};

/// `phi(x, y) = cos(2 pi k x) cos(2 pi l y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TestFunction {
    pub k: u32,
    pub l: u32,
}

impl TestFunction {
    /// All `(k, l)` in `{0, 1, 2}^2`.
    pub fn library() -> Vec<TestFunction> {
        (0..3)
            .flat_map(|k| (0..3).map(move |l| TestFunction { k, l }))
            .collect()
    }

    pub fn is_constant(&self) -> bool {
        self.k == 0 && self.l == 0
    }

    /// Only the constant function is nonnegative in this family.
    pub fn is_nonnegative(&self) -> bool {
        self.is_constant()
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        (2.0 * PI * self.k as f64 * x).cos() * (2.0 * PI * self.l as f64 * y).cos()
    }

    pub fn grad(&self, x: f64, y: f64) -> [f64; 2] {
        let (wk, wl) = (2.0 * PI * self.k as f64, 2.0 * PI * self.l as f64);
        [
            -wk * (wk * x).sin() * (wl * y).cos(),
            -wl * (wk * x).cos() * (wl * y).sin(),
        ]
    }

    pub fn id(&self) -> String {
        format!("cos{}x_cos{}y", self.k, self.l)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyResidual {
    pub h: f64,
    pub phi_id: String,
    pub tau1: f64,
    pub tau2: f64,
    /// Continuity residual, signed.
    pub e2: f64,
    /// Euclidean norm of the momentum residuals for `phi e_x` and `phi e_y`.
    pub e3: f64,
    /// Entropy residual, signed; the entropy inequality predicts `e4 >= 0` for `phi >= 0`.
    pub e4: f64,
}

/// Instantaneous moments `sum q phi h^2` and fluxes `sum F(q) . grad phi h^2`.
#[derive(Debug, Clone, Copy, Default)]
struct Integrands {
    moment: [f64; 4],
    flux: [f64; 4],
}

struct PhiTable {
    phi: TestFunction,
    value: Vec<f64>,
    grad: Vec<[f64; 2]>,
}

struct Track {
    first: Integrands,
    last: Integrands,
    last_t: f64,
    integral: [f64; 4],
}

/// Streams a time history through the residual quadrature without storing it.
pub struct ResidualAccumulator {
    mesh: Mesh,
    g: GasParams,
    tau1: f64,
    tau2: f64,
    tables: Vec<PhiTable>,
    tracks: Vec<Track>,
    started: bool,
    finished: bool,
}

fn time_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

impl ResidualAccumulator {
    pub fn new(mesh: Mesh, phis: &[TestFunction], tau1: f64, tau2: f64, g: GasParams) -> Result<Self> {
        if mesh.bc != Boundary::Periodic {
            return Err(Error::TestFunction(
                "cosine test functions do not vanish on reflecting walls".into(),
            ));
        }
        if !(tau1 < tau2) {
            return Err(Error::OutOfRange(format!("need tau1 < tau2, got [{tau1}, {tau2}]")));
        }
        let mut tables = Vec::with_capacity(phis.len());
        for &phi in phis {
            let mut value = Vec::with_capacity(mesh.cell_count());
            let mut grad = Vec::with_capacity(mesh.cell_count());
            for idx in 0..mesh.cell_count() {
                let (i, j) = mesh.coords(idx);
                let (x, y) = cell_center(&mesh, i, j)?;
                value.push(phi.value(x, y));
                grad.push(phi.grad(x, y));
            }
            tables.push(PhiTable { phi, value, grad });
        }
        Ok(Self {
            mesh,
            g,
            tau1,
            tau2,
            tables,
            tracks: Vec::new(),
            started: false,
            finished: false,
        })
    }

    fn integrands(&self, field: &ConservativeField) -> Result<Vec<Integrands>> {
        let mut out = vec![Integrands::default(); self.tables.len()];
        for (idx, c) in field.cells.iter().enumerate() {
            let at = |e: Error| {
                let (i, j) = field.mesh.coords(idx);
                e.at_cell(i, j)
            };
            let p = pressure_from_conservative(c, &self.g).map_err(at)?;
            let s = entropy_from_conservative(c, &self.g);
            let t = flux_tensor(c.rho, c.mom, p);
            let u = c.velocity();
            for (acc, tab) in out.iter_mut().zip(&self.tables) {
                let (phi, [gx, gy]) = (tab.value[idx], tab.grad[idx]);
                acc.moment[0] += c.rho * phi;
                acc.moment[1] += c.mom[0] * phi;
                acc.moment[2] += c.mom[1] * phi;
                acc.moment[3] += s * phi;
                acc.flux[0] += c.mom[0] * gx + c.mom[1] * gy;
                acc.flux[1] += t[0] * gx + t[1] * gy;
                acc.flux[2] += t[1] * gx + t[2] * gy;
                acc.flux[3] += s * (u[0] * gx + u[1] * gy);
            }
        }
        let area = self.mesh.cell_area();
        for acc in &mut out {
            acc.moment = acc.moment.map(|v| v * area);
            acc.flux = acc.flux.map(|v| v * area);
        }
        Ok(out)
    }

    /// Feeds the state after one accepted step; states outside `[tau1, tau2]`
    /// are ignored. The first accepted state must sit at `tau1`.
    pub fn push(&mut self, field: &ConservativeField) -> Result<()> {
        if field.mesh != self.mesh {
            return Err(Error::Mesh("history changes mesh".into()));
        }
        let t = field.time;
        if self.finished || (t < self.tau1 && !time_eq(t, self.tau1)) {
            return Ok(());
        }
        if t > self.tau2 && !time_eq(t, self.tau2) {
            return Err(Error::OutOfRange(format!(
                "history skips tau2 = {}, next sample at {t}",
                self.tau2
            )));
        }
        let now = self.integrands(field)?;
        if !self.started {
            if !time_eq(t, self.tau1) {
                return Err(Error::OutOfRange(format!(
                    "history has no sample at tau1 = {}",
                    self.tau1
                )));
            }
            self.tracks = now
                .iter()
                .map(|&i| Track {
                    first: i,
                    last: i,
                    last_t: t,
                    integral: [0.0; 4],
                })
                .collect();
            self.started = true;
        } else {
            for (tr, cur) in self.tracks.iter_mut().zip(&now) {
                let dt = t - tr.last_t;
                for q in 0..4 {
                    tr.integral[q] += 0.5 * dt * (tr.last.flux[q] + cur.flux[q]);
                }
                tr.last = *cur;
                tr.last_t = t;
            }
        }
        if time_eq(t, self.tau2) {
            self.finished = true;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<Vec<ConsistencyResidual>> {
        if !self.finished {
            return Err(Error::OutOfRange(format!(
                "history does not reach tau2 = {}",
                self.tau2
            )));
        }
        Ok(self
            .tables
            .iter()
            .zip(&self.tracks)
            .map(|(tab, tr)| {
                let r = |q: usize| tr.last.moment[q] - tr.first.moment[q] - tr.integral[q];
                ConsistencyResidual {
                    h: self.mesh.h,
                    phi_id: tab.phi.id(),
                    tau1: self.tau1,
                    tau2: self.tau2,
                    e2: r(0),
                    e3: r(1).hypot(r(2)),
                    e4: r(3),
                }
            })
            .collect())
    }
}

/// Residuals of one test function over a stored history (every accepted step).
pub fn consistency_residual(
    snapshots: &[ConservativeField],
    phi: TestFunction,
    tau1: f64,
    tau2: f64,
    g: &GasParams,
) -> Result<ConsistencyResidual> {
    let first = snapshots
        .first()
        .ok_or_else(|| Error::OutOfRange("empty history".into()))?;
    let mut acc = ResidualAccumulator::new(first.mesh, &[phi], tau1, tau2, *g)?;
    for s in snapshots {
        acc.push(s)?;
    }
    Ok(acc.finish()?.remove(0))
}
