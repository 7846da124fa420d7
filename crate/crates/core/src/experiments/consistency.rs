//! Weak-form consistency residuals across a mesh sequence.

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::output::{ensure_dir, write_metadata};
use super::run::initial_field;
use crate::diagnostics::consistency::{ConsistencyResidual, ResidualAccumulator, TestFunction};
use crate::diagnostics::defects::fmt17;
use crate::error::{Error, Result};
use crate::grid::Mesh;
use crate::scheme::run_to_time;

/// Tolerance of the entropy-inequality sign check.
pub const E4_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct DecayVerdict {
    pub phi: String,
    pub constant: bool,
    /// `|e2|` strictly decreasing along the mesh sequence.
    pub e2_decreasing: bool,
    pub e3_decreasing: bool,
    /// `e4 >= -E4_SLACK` on every mesh; only checked for nonnegative `phi`.
    pub e4_nonnegative: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyStudy {
    pub meshes: Vec<usize>,
    pub residuals: Vec<ConsistencyResidual>,
    pub verdicts: Vec<DecayVerdict>,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Residuals over `[0, t_end]` for every mesh and every library test function.
pub fn consistency_study(cfg: &RunConfig) -> Result<ConsistencyStudy> {
    cfg.validate()?;
    let meshes = cfg.hierarchy_meshes();
    if meshes.len() < 3 {
        return Err(Error::Config(format!(
            "a consistency study needs at least three meshes, got {meshes:?}"
        )));
    }
    let lib = TestFunction::library();
    let per_mesh = meshes
        .par_iter()
        .map(|&n| -> Result<Vec<ConsistencyResidual>> {
            let run = || -> Result<Vec<ConsistencyResidual>> {
                let g = cfg.gas()?;
                let sp = cfg.scheme()?;
                let mesh = Mesh::new(n, cfg.boundary)?;
                let init = initial_field(cfg, &mesh, &g)?;
                let mut acc = ResidualAccumulator::new(mesh, &lib, 0.0, cfg.t_end, g)?;
                acc.push(&init)?;
                run_to_time(&init, cfg.t_end, &[], &sp, &g, &mut |f| acc.push(f))?;
                acc.finish()
            };
            run().map_err(|e| Error::Member { n, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let verdicts = lib
        .iter()
        .enumerate()
        .map(|(k, phi)| {
            let col: Vec<&ConsistencyResidual> = per_mesh.iter().map(|m| &m[k]).collect();
            let e2: Vec<f64> = col.iter().map(|r| r.e2.abs()).collect();
            let e3: Vec<f64> = col.iter().map(|r| r.e3).collect();
            DecayVerdict {
                phi: phi.id(),
                constant: phi.is_constant(),
                e2_decreasing: strictly_decreasing(&e2),
                e3_decreasing: strictly_decreasing(&e3),
                e4_nonnegative: phi.is_nonnegative().then(|| col.iter().all(|r| r.e4 >= -E4_SLACK)),
            }
        })
        .collect();
    Ok(ConsistencyStudy {
        meshes,
        residuals: per_mesh.into_iter().flatten().collect(),
        verdicts,
    })
}

/// Writes `consistency.csv`, `consistency_verdict.csv` and metadata.
pub fn cmd_consistency(cfg: &RunConfig) -> Result<ConsistencyStudy> {
    let study = consistency_study(cfg)?;
    let dir = &cfg.out_dir;
    ensure_dir(dir)?;
    let mut w = csv::Writer::from_path(dir.join("consistency.csv"))?;
    w.write_record(["h", "phi", "tau1", "tau2", "e2", "e3", "e4"])?;
    for r in &study.residuals {
        w.write_record([
            fmt17(r.h),
            r.phi_id.clone(),
            fmt17(r.tau1),
            fmt17(r.tau2),
            fmt17(r.e2),
            fmt17(r.e3),
            fmt17(r.e4),
        ])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("consistency_verdict.csv"))?;
    w.write_record(["phi", "e2_decreasing", "e3_decreasing", "e4_nonnegative"])?;
    for v in &study.verdicts {
        let e4 = v.e4_nonnegative.map_or("n/a".to_string(), |b| b.to_string());
        w.write_record([
            v.phi.clone(),
            v.e2_decreasing.to_string(),
            v.e3_decreasing.to_string(),
            e4,
        ])?;
    }
    w.flush()?;
    write_metadata(dir, "consistency", cfg, &study.verdicts_table())?;
    Ok(study)
}

impl ConsistencyStudy {
    fn verdicts_table(&self) -> VerdictTable<'_> {
        VerdictTable {
            meshes: &self.meshes,
            verdicts: &self.verdicts,
        }
    }
}

#[derive(Serialize)]
struct VerdictTable<'a> {
    meshes: &'a [usize],
    verdicts: &'a [DecayVerdict],
}
