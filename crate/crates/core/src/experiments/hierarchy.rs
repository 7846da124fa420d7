//! Mesh-hierarchy runs, Cesàro ensembles and defect time series.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::output::{ensure_dir, write_metadata};
use super::run::{has_time, initial_field};
use crate::diagnostics::cesaro::{CesaroEnsemble, Member};
use crate::diagnostics::defects::{defect_integrals, defect_row, fmt17, write_defects_csv, DefectIntegrals, DefectRow};
use crate::error::{Error, Result};
use crate::grid::Mesh;
use crate::measures::{measure_distance_field, write_distance_csv};
use crate::scheme::run_to_time;

/// One mesh of the hierarchy sampled at the output times.
struct MemberHistory {
    members: Vec<Member>,
    max_abs: Vec<f64>,
}

fn run_member(cfg: &RunConfig, n: usize, coarse: &Mesh, times: &[f64]) -> Result<MemberHistory> {
    let g = cfg.gas()?;
    let sp = cfg.scheme()?;
    let mesh = Mesh::new(n, cfg.boundary)?;
    let init = initial_field(cfg, &mesh, &g)?;
    let mut out = MemberHistory {
        members: vec![Member::from_field(&init, coarse, &g)?],
        max_abs: vec![init.max_abs()],
    };
    run_to_time(&init, cfg.t_end, times, &sp, &g, &mut |f| {
        if has_time(times, f.time) {
            out.members.push(Member::from_field(f, coarse, &g)?);
            out.max_abs.push(f.max_abs());
        }
        Ok(())
    })?;
    Ok(out)
}

pub struct HierarchyOutcome {
    pub meshes: Vec<usize>,
    pub coarse: Mesh,
    pub rows: Vec<DefectRow>,
    /// `max |U|` of every member at every output time, for the boundedness monitor.
    pub bounds: Vec<(f64, Vec<f64>)>,
    /// Ensembles at the requested capture times, in request order.
    pub captured: Vec<CesaroEnsemble>,
}

impl HierarchyOutcome {
    /// Cesàro energy `E1` at the initial time, the budget of the entropy bump.
    pub fn initial_energy(&self) -> f64 {
        self.rows[0].e1
    }

    pub fn entropy_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, r.s_tot)).collect()
    }
}

/// Runs every mesh (in parallel), forms the Cesàro ensemble at each output
/// time and evaluates the defects. `capture` times must be output times or `tau`.
pub fn run_hierarchy(cfg: &RunConfig, capture: &[f64]) -> Result<HierarchyOutcome> {
    cfg.validate()?;
    let g = cfg.gas()?;
    let meshes = cfg.hierarchy_meshes();
    let coarse = Mesh::new(meshes[0], cfg.boundary)?;
    let times = cfg.output_times();
    for &t in capture {
        if !has_time(&times, t) {
            return Err(Error::OutOfRange(format!("capture time {t} is not an output time")));
        }
    }
    let histories = meshes
        .par_iter()
        .map(|&n| run_member(cfg, n, &coarse, &times).map_err(|e| Error::Member { n, source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(times.len());
    let mut bounds = Vec::with_capacity(times.len());
    let mut captured = vec![None; capture.len()];
    for (k, &t) in times.iter().enumerate() {
        let members = histories.iter().map(|h| h.members[k].clone()).collect();
        let ens = CesaroEnsemble::from_members(coarse, t, members)?;
        rows.push(defect_row(&ens, &g)?);
        bounds.push((t, histories.iter().map(|h| h.max_abs[k]).collect()));
        for (slot, &c) in captured.iter_mut().zip(capture) {
            if has_time(&[c], t) {
                *slot = Some(ens.clone());
            }
        }
    }
    Ok(HierarchyOutcome {
        meshes,
        coarse,
        rows,
        bounds,
        captured: captured
            .into_iter()
            .map(|c| c.expect("capture times are output times"))
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceSummary {
    pub members_a: usize,
    pub members_b: usize,
    pub aggregate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HierarchySummary {
    pub meshes: Vec<usize>,
    pub ensemble_n: usize,
    pub samples: usize,
    pub integrals: DefectIntegrals,
    pub last: DefectRow,
    pub distances: Vec<DistanceSummary>,
}

fn write_bounds(path: &Path, meshes: &[usize], bounds: &[(f64, Vec<f64>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string()];
    header.extend(meshes.iter().enumerate().map(|(k, n)| format!("max_abs_{k}_n{n}")));
    w.write_record(&header)?;
    for (t, vals) in bounds {
        let mut rec = vec![fmt17(*t)];
        rec.extend(vals.iter().map(|v| fmt17(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_integrals(path: &Path, ints: &DefectIntegrals) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["quantity", "integral"])?;
    for (name, v) in [
        ("E1", ints.e1),
        ("E2", ints.e2),
        ("DE", ints.d_e),
        ("S", ints.s_tot),
        ("DEnt", ints.d_ent),
    ] {
        w.write_record([name.to_string(), fmt17(v)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `defects.csv`, `integrals.csv`, `bounds.csv`, the Cauchy distance
/// fields between ensembles of `N` and `N + 1` members at `t_end`, and metadata.
pub fn cmd_hierarchy(cfg: &RunConfig) -> Result<HierarchySummary> {
    let meshes = cfg.hierarchy_meshes();
    if meshes.len() < 2 {
        return Err(Error::Config(format!(
            "a hierarchy needs at least two meshes, got {meshes:?}"
        )));
    }
    let out = run_hierarchy(cfg, &[cfg.t_end])?;
    let dir = &cfg.out_dir;
    ensure_dir(dir)?;
    write_defects_csv(&dir.join("defects.csv"), &out.rows)?;
    let integrals = defect_integrals(&out.rows);
    write_integrals(&dir.join("integrals.csv"), &integrals)?;
    write_bounds(&dir.join("bounds.csv"), &out.meshes, &out.bounds)?;

    let last_ens = &out.captured[0];
    let component = cfg.component()?;
    let mut distances = Vec::new();
    for k in 1..last_ens.len() {
        let a = last_ens.prefix(k)?;
        let b = last_ens.prefix(k + 1)?;
        let field = measure_distance_field(&a, &b, component, cfg.distance_q)?;
        write_distance_csv(&dir.join(format!("distance_N{k}_N{}.csv", k + 1)), &field)?;
        distances.push(DistanceSummary {
            members_a: k,
            members_b: k + 1,
            aggregate: field.aggregate,
        });
    }
    let mut w = csv::Writer::from_path(dir.join("distances.csv"))?;
    w.write_record(["members_a", "members_b", "aggregate"])?;
    for d in &distances {
        w.write_record([d.members_a.to_string(), d.members_b.to_string(), fmt17(d.aggregate)])?;
    }
    w.flush()?;

    let summary = HierarchySummary {
        meshes: out.meshes.clone(),
        ensemble_n: out.coarse.n,
        samples: out.rows.len(),
        integrals,
        last: *out.rows.last().expect("at least the initial row"),
        distances,
    };
    write_metadata(dir, "hierarchy", cfg, &summary)?;
    Ok(summary)
}
