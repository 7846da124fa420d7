//! Cesàro ensembles of runs on nested meshes.
//!
//! Every run is projected onto the coarsest mesh of the hierarchy by block
//! averaging. Nonlinear quantities (entropy, flux tensor, energy in entropy
//! variables) are evaluated on the fine cells first and then averaged, so each
//! fine cell of each run acts as one atom of the ensemble's Young measure.

use std::ops::{AddAssign, Mul};

use crate::eos::{
    entropy_from_conservative, pressure_from_conservative, pressure_from_entropy, total_energy_from_entropy, Conserved,
    GasParams,
};
use crate::error::{Error, Result};
use crate::grid::{block_average, ConservativeField, Mesh};

/// Tensor `m (x) m / rho + p I` stored as `(xx, xy, yy)`.
pub fn flux_tensor(rho: f64, mom: [f64; 2], pressure: f64) -> [f64; 3] {
    [
        mom[0] * mom[0] / rho + pressure,
        mom[0] * mom[1] / rho,
        mom[1] * mom[1] / rho + pressure,
    ]
}

/// Entrywise absolute sum of a symmetric 2x2 tensor.
pub fn tensor_l1(t: [f64; 3]) -> f64 {
    t[0].abs() + 2.0 * t[1].abs() + t[2].abs()
}

/// Cell averages of one run: conservative state, entropy `S`, energy `E(rho, m, S)`
/// and the flux tensor evaluated through `p(rho, S)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub state: Conserved,
    pub entropy: f64,
    pub energy_s: f64,
    pub tensor: [f64; 3],
}

impl Moments {
    /// Moments of a single physical state.
    pub fn of_state(cell: &Conserved, g: &GasParams) -> Result<Self> {
        pressure_from_conservative(cell, g)?;
        let s = entropy_from_conservative(cell, g);
        let p = pressure_from_entropy(cell.rho, s, g);
        Ok(Self {
            state: *cell,
            entropy: s,
            energy_s: total_energy_from_entropy(cell.rho, cell.mom, s, g),
            tensor: flux_tensor(cell.rho, cell.mom, p),
        })
    }

    fn to_array(self) -> [f64; 10] {
        let s = self.state;
        [
            s.rho,
            s.mom[0],
            s.mom[1],
            s.energy,
            self.entropy,
            self.energy_s,
            self.tensor[0],
            self.tensor[1],
            self.tensor[2],
            0.0,
        ]
    }

    fn from_array(a: [f64; 10]) -> Self {
        Self {
            state: Conserved::new(a[0], [a[1], a[2]], a[3]),
            entropy: a[4],
            energy_s: a[5],
            tensor: [a[6], a[7], a[8]],
        }
    }
}

impl AddAssign for Moments {
    fn add_assign(&mut self, o: Moments) {
        let mut a = self.to_array();
        for (x, y) in a.iter_mut().zip(o.to_array()) {
            *x += y;
        }
        *self = Moments::from_array(a);
    }
}

impl Mul<f64> for Moments {
    type Output = Moments;
    fn mul(self, k: f64) -> Moments {
        Moments::from_array(self.to_array().map(|x| x * k))
    }
}

/// One run of the hierarchy, projected onto the ensemble mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    /// Resolution of the run before projection.
    pub source_n: usize,
    pub cells: Vec<Moments>,
}

impl Member {
    pub fn from_field(fine: &ConservativeField, coarse: &Mesh, g: &GasParams) -> Result<Self> {
        let mut local = Vec::with_capacity(fine.cells.len());
        for (idx, c) in fine.cells.iter().enumerate() {
            let m = Moments::of_state(c, g).map_err(|e| {
                let (i, j) = fine.mesh.coords(idx);
                e.at_cell(i, j)
            })?;
            local.push(m);
        }
        Ok(Self {
            source_n: fine.mesh.n,
            cells: block_average(&fine.mesh, &local, coarse, |m| *m)?,
        })
    }

    pub fn field(&self, mesh: Mesh, time: f64) -> ConservativeField {
        ConservativeField {
            mesh,
            time,
            cells: self.cells.iter().map(|m| m.state).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CesaroEnsemble {
    pub mesh: Mesh,
    pub time: f64,
    pub members: Vec<Member>,
    /// Cell-wise arithmetic mean of the members.
    pub mean: Vec<Moments>,
}

/// Mean as `x_0 + sum(x_k - x_0) / N`, exact when all members agree.
fn shifted_mean(values: impl Iterator<Item = f64> + Clone, first: f64, count: usize) -> f64 {
    let dev: f64 = values.map(|v| v - first).sum();
    first + dev / count as f64
}

impl CesaroEnsemble {
    pub fn from_members(mesh: Mesh, time: f64, members: Vec<Member>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Ensemble("an ensemble needs at least one member".into()));
        }
        if members.iter().any(|m| m.cells.len() != mesh.cell_count()) {
            return Err(Error::Ensemble("member does not live on the ensemble mesh".into()));
        }
        let count = members.len();
        let mean = (0..mesh.cell_count())
            .map(|c| {
                let first = members[0].cells[c].to_array();
                let mut out = [0.0; 10];
                for (q, o) in out.iter_mut().enumerate() {
                    *o = shifted_mean(members.iter().map(|m| m.cells[c].to_array()[q]), first[q], count);
                }
                Moments::from_array(out)
            })
            .collect();
        Ok(Self {
            mesh,
            time,
            members,
            mean,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Cesàro average of the conservative variables.
    pub fn cesaro_field(&self) -> ConservativeField {
        ConservativeField {
            mesh: self.mesh,
            time: self.time,
            cells: self.mean.iter().map(|m| m.state).collect(),
        }
    }

    /// Mean state described in conservative-entropy variables: `(rho~, m~)` with
    /// the energy `E(rho~, m~, S~)` built from the averaged entropy.
    pub fn entropy_mean_field(&self, g: &GasParams) -> ConservativeField {
        let cells = self
            .mean
            .iter()
            .map(|m| {
                let s = m.state;
                Conserved::new(s.rho, s.mom, total_energy_from_entropy(s.rho, s.mom, m.entropy, g))
            })
            .collect();
        ConservativeField {
            mesh: self.mesh,
            time: self.time,
            cells,
        }
    }

    /// The first `count` members as their own ensemble.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.len() {
            return Err(Error::Ensemble(format!("prefix {count} of {} members", self.len())));
        }
        Self::from_members(self.mesh, self.time, self.members[..count].to_vec())
    }
}

/// Projects every run onto the coarsest mesh and averages.
pub fn cesaro_build(runs: &[ConservativeField], g: &GasParams) -> Result<CesaroEnsemble> {
    let first = runs.first().ok_or_else(|| Error::Ensemble("no runs supplied".into()))?;
    let coarse = runs.iter().map(|r| r.mesh).min_by_key(|m| m.n).expect("non-empty");
    for r in runs {
        if (r.time - first.time).abs() > 1e-12 {
            return Err(Error::Ensemble(format!(
                "runs at different times: {} vs {}",
                r.time, first.time
            )));
        }
        if r.mesh.bc != coarse.bc || r.mesh.n % coarse.n != 0 {
            return Err(Error::NonNested {
                fine: r.mesh.n,
                coarse: coarse.n,
            });
        }
    }
    let members = runs
        .iter()
        .map(|r| Member::from_field(r, &coarse, g))
        .collect::<Result<Vec<_>>>()?;
    CesaroEnsemble::from_members(coarse, first.time, members)
}
