//! Reynolds, energy and entropy defects of a Cesàro ensemble.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cesaro::{flux_tensor, tensor_l1, CesaroEnsemble};
use crate::eos::{entropy_from_conservative, pressure_from_entropy, total_energy_from_entropy, GasParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReynoldsDefect {
    pub r1: f64,
    pub r2: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDefect {
    pub e1: f64,
    pub e2: f64,
    pub d_e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyDefect {
    pub s_tot: f64,
    pub d_ent: f64,
}

fn check_mean_density(ens: &CesaroEnsemble) -> Result<()> {
    for (idx, m) in ens.mean.iter().enumerate() {
        if !(m.state.rho > 0.0) {
            let (i, j) = ens.mesh.coords(idx);
            return Err(Error::InvalidState {
                cell: Some((i, j)),
                rho: m.state.rho,
                internal_energy: m.state.internal_energy(),
            });
        }
    }
    Ok(())
}

/// `L^1` norms (entrywise, times `h^2`) of the averaged flux tensor, of the
/// tensor of the averaged state `(rho~, m~, S~)`, and of their difference.
pub fn reynolds_defect(ens: &CesaroEnsemble, g: &GasParams) -> Result<ReynoldsDefect> {
    check_mean_density(ens)?;
    let (mut r1, mut r2, mut r) = (0.0, 0.0, 0.0);
    for m in &ens.mean {
        let s = m.state;
        let tc = flux_tensor(s.rho, s.mom, pressure_from_entropy(s.rho, m.entropy, g));
        r1 += tensor_l1(m.tensor);
        r2 += tensor_l1(tc);
        r += tensor_l1([m.tensor[0] - tc[0], m.tensor[1] - tc[1], m.tensor[2] - tc[2]]);
    }
    let area = ens.mesh.cell_area();
    Ok(ReynoldsDefect {
        r1: r1 * area,
        r2: r2 * area,
        r: r * area,
    })
}

/// `e1` integrates the averaged energy, `e2` the energy `E(rho~, m~, S~)`.
/// `d_e` is accumulated cell by cell as the Jensen gap, so it agrees with
/// `e1 - e2` up to round-off and vanishes exactly on degenerate ensembles.
pub fn energy_defect(ens: &CesaroEnsemble, g: &GasParams) -> Result<EnergyDefect> {
    check_mean_density(ens)?;
    let (mut e1, mut e2, mut d_e) = (0.0, 0.0, 0.0);
    for m in &ens.mean {
        let s = m.state;
        let e_mean = total_energy_from_entropy(s.rho, s.mom, m.entropy, g);
        e1 += s.energy;
        e2 += e_mean;
        d_e += m.energy_s - e_mean;
    }
    let area = ens.mesh.cell_area();
    Ok(EnergyDefect {
        e1: e1 * area,
        e2: e2 * area,
        d_e: d_e * area,
    })
}

/// Total averaged entropy and the gap `S(rho~, m~, E~) - S~`.
pub fn entropy_defect(ens: &CesaroEnsemble, g: &GasParams) -> Result<EntropyDefect> {
    check_mean_density(ens)?;
    let (mut s_tot, mut d_ent) = (0.0, 0.0);
    for (idx, m) in ens.mean.iter().enumerate() {
        let s_of_mean = entropy_from_conservative(&m.state, g);
        if !s_of_mean.is_finite() {
            let (i, j) = ens.mesh.coords(idx);
            return Err(Error::InvalidState {
                cell: Some((i, j)),
                rho: m.state.rho,
                internal_energy: m.state.internal_energy(),
            });
        }
        s_tot += m.entropy;
        d_ent += s_of_mean - m.entropy;
    }
    let area = ens.mesh.cell_area();
    Ok(EntropyDefect {
        s_tot: s_tot * area,
        d_ent: d_ent * area,
    })
}

/// One row of the defect time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub t: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "DE")]
    pub d_e: f64,
    #[serde(rename = "S")]
    pub s_tot: f64,
    #[serde(rename = "DEnt")]
    pub d_ent: f64,
}

pub fn defect_row(ens: &CesaroEnsemble, g: &GasParams) -> Result<DefectRow> {
    let rey = reynolds_defect(ens, g)?;
    let en = energy_defect(ens, g)?;
    let ent = entropy_defect(ens, g)?;
    Ok(DefectRow {
        t: ens.time,
        r1: rey.r1,
        r2: rey.r2,
        r: rey.r,
        e1: en.e1,
        e2: en.e2,
        d_e: en.d_e,
        s_tot: ent.s_tot,
        d_ent: ent.d_ent,
    })
}

pub const DEFECTS_HEADER: [&str; 9] = ["t", "R1", "R2", "R", "E1", "E2", "DE", "S", "DEnt"];

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_defects_csv(path: &Path, rows: &[DefectRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DEFECTS_HEADER)?;
    for r in rows {
        w.write_record([r.t, r.r1, r.r2, r.r, r.e1, r.e2, r.d_e, r.s_tot, r.d_ent].map(fmt17))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_defects_csv(path: &Path) -> Result<Vec<DefectRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != DEFECTS_HEADER {
        return Err(Error::Series(format!("unexpected defect header {header:?}")));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Trapezoidal integral of samples `(t, y)`.
pub fn trapezoid(samples: &[(f64, f64)]) -> f64 {
    samples
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[1].1 + w[0].1))
        .sum()
}

/// Time integrals of the defect series, one per row of the energy/entropy table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectIntegrals {
    pub e1: f64,
    pub e2: f64,
    pub d_e: f64,
    pub s_tot: f64,
    pub d_ent: f64,
}

pub fn defect_integrals(rows: &[DefectRow]) -> DefectIntegrals {
    let col = |f: fn(&DefectRow) -> f64| trapezoid(&rows.iter().map(|r| (r.t, f(r))).collect::<Vec<_>>());
    DefectIntegrals {
        e1: col(|r| r.e1),
        e2: col(|r| r.e2),
        d_e: col(|r| r.d_e),
        s_tot: col(|r| r.s_tot),
        d_ent: col(|r| r.d_ent),
    }
}
