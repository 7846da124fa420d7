//! Single-mesh simulation with snapshots, quicklooks and a conservation audit.

use std::path::PathBuf;

use serde::Serialize;

use super::config::{Problem, RunConfig};
use super::output::{ensure_dir, write_metadata};
use crate::diagnostics::defects::fmt17;
use crate::eos::{entropy_from_conservative, GasParams};
use crate::error::Result;
use crate::grid::{ConservativeField, Mesh};
use crate::initdata::{kh_initial_field, uniform_field};
use crate::scheme::run_to_time;
use crate::snapshot::{write_density_pgm, write_snapshot};

pub fn initial_field(cfg: &RunConfig, mesh: &Mesh, g: &GasParams) -> Result<ConservativeField> {
    match cfg.problem {
        Problem::Kh => kh_initial_field(&cfg.kh(), mesh, g),
        Problem::Uniform => Ok(uniform_field(mesh, &cfg.uniform_primitive(), g)),
    }
}

/// Whether `t` is one of `times`, with the tolerance used to merge sample grids.
pub fn has_time(times: &[f64], t: f64) -> bool {
    times.iter().any(|&s| (s - t).abs() <= 1e-9 * s.abs().max(1.0))
}

/// `sum S h^2`.
pub fn total_entropy(field: &ConservativeField, g: &GasParams) -> f64 {
    field.cells.iter().map(|c| entropy_from_conservative(c, g)).sum::<f64>() * field.mesh.cell_area()
}

/// Drift scales: `|Q(0)|` for mass and energy, `sum |m| h^2` at the initial
/// time for both momentum components (the net momentum may vanish).
pub fn conservation_scale(initial: &ConservativeField) -> [f64; 4] {
    let totals = initial.totals();
    let momentum: f64 = initial.cells.iter().map(|c| c.mom[0].hypot(c.mom[1])).sum::<f64>() * initial.mesh.cell_area();
    let pick = |v: f64| if v > 0.0 { v } else { 1.0 };
    [
        pick(totals[0].abs()),
        pick(momentum),
        pick(momentum),
        pick(totals[3].abs()),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationAudit {
    pub initial: [f64; 4],
    pub last: [f64; 4],
    pub scale: [f64; 4],
    pub relative_drift: [f64; 4],
}

impl ConservationAudit {
    pub fn new(initial: &ConservativeField, last: &ConservativeField) -> Self {
        let (a, b, s) = (initial.totals(), last.totals(), conservation_scale(initial));
        Self {
            initial: a,
            last: b,
            scale: s,
            relative_drift: [0, 1, 2, 3].map(|q| (b[q] - a[q]).abs() / s[q]),
        }
    }

    pub fn max_drift(&self) -> f64 {
        self.relative_drift.iter().fold(0.0, |m, v| m.max(*v))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub status: String,
    pub n: usize,
    pub steps: usize,
    pub final_time: f64,
    pub audit: ConservationAudit,
    pub snapshots: Vec<PathBuf>,
    /// Largest `sum S h^2` decrease between consecutive steps.
    pub worst_entropy_drop: f64,
}

/// Integrates one mesh, writing `snapshots/snap_KKKK.{vfv,pgm}`, `series.csv`
/// and `metadata.toml` into the output directory. On a positivity failure the
/// outputs gathered so far are still written before the error is returned.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunSummary> {
    let g = cfg.gas()?;
    let sp = cfg.scheme()?;
    let mesh = Mesh::new(cfg.n, cfg.boundary)?;
    let dir = cfg.out_dir.clone();
    let snap_dir = dir.join("snapshots");
    ensure_dir(&snap_dir)?;

    let init = initial_field(cfg, &mesh, &g)?;
    let snap_times = cfg.sample_times(cfg.snapshot_dt, &[]);
    let out_times = cfg.sample_times(cfg.output_dt, &[]);
    let stops = cfg.sample_times(cfg.output_dt, &snap_times);

    let mut snapshots = Vec::new();
    let mut series = Vec::new();
    let mut steps = 0;
    let mut last = init.clone();
    let mut prev_entropy = total_entropy(&init, &g);
    let mut worst_entropy_drop = 0.0_f64;

    let emit = |f: &ConservativeField, snapshots: &mut Vec<PathBuf>, series: &mut Vec<[f64; 7]>| -> Result<()> {
        if has_time(&snap_times, f.time) {
            let stem = format!("snap_{:04}", snapshots.len());
            let path = snap_dir.join(format!("{stem}.vfv"));
            write_snapshot(&path, f, g.gamma)?;
            write_density_pgm(&snap_dir.join(format!("{stem}.pgm")), f)?;
            snapshots.push(path);
        }
        if has_time(&out_times, f.time) {
            let t = f.totals();
            series.push([f.time, t[0], t[1], t[2], t[3], total_entropy(f, &g), f.max_abs()]);
        }
        Ok(())
    };

    emit(&init, &mut snapshots, &mut series)?;
    let outcome = run_to_time(&init, cfg.t_end, &stops, &sp, &g, &mut |f| {
        steps += 1;
        let s = total_entropy(f, &g);
        worst_entropy_drop = worst_entropy_drop.max(prev_entropy - s);
        prev_entropy = s;
        last = f.clone();
        emit(f, &mut snapshots, &mut series)
    });

    let mut w = csv::Writer::from_path(dir.join("series.csv"))?;
    w.write_record(["t", "mass", "mom_x", "mom_y", "energy", "entropy", "max_abs"])?;
    for row in &series {
        w.write_record(row.map(fmt17))?;
    }
    w.flush()?;

    let summary = RunSummary {
        status: match &outcome {
            Ok(_) => "completed".into(),
            Err(e) => format!("failed: {e}"),
        },
        n: mesh.n,
        steps,
        final_time: last.time,
        audit: ConservationAudit::new(&init, &last),
        snapshots,
        worst_entropy_drop,
    };
    write_metadata(&dir, "run", cfg, &summary)?;
    outcome?;
    Ok(summary)
}
