//! Plain-text summary of an output directory.

use std::fmt::Write;

use super::config::RunConfig;
use crate::diagnostics::defects::{defect_integrals, read_defects_csv};
use crate::error::{Error, Result};

/// Summarises `defects.csv` (time integrals and final values) and appends the
/// concatenation report when one is present.
pub fn cmd_report(cfg: &RunConfig) -> Result<String> {
    let dir = &cfg.out_dir;
    let path = dir.join("defects.csv");
    if !path.exists() {
        return Err(Error::Config(format!(
            "{} not found; run `hierarchy` first",
            path.display()
        )));
    }
    let rows = read_defects_csv(&path)?;
    let last = rows
        .last()
        .ok_or_else(|| Error::Series(format!("{} has no rows", path.display())))?;
    let ints = defect_integrals(&rows);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "defect series: {} samples on [{}, {}]",
        rows.len(),
        rows[0].t,
        last.t
    );
    let _ = writeln!(s, "{:<6} {:>22} {:>22}", "", "time integral", "final value");
    for (name, i, v) in [
        ("E1", ints.e1, last.e1),
        ("E2", ints.e2, last.e2),
        ("DE", ints.d_e, last.d_e),
        ("S", ints.s_tot, last.s_tot),
        ("DEnt", ints.d_ent, last.d_ent),
    ] {
        let _ = writeln!(s, "{name:<6} {i:>22.12e} {v:>22.12e}");
    }
    let _ = writeln!(
        s,
        "R1 {:.6e}  R2 {:.6e}  R {:.6e} at t = {}",
        last.r1, last.r2, last.r, last.t
    );
    let concat = dir.join("concat_report.toml");
    if concat.exists() {
        let _ = writeln!(s, "\nconcatenation:\n{}", std::fs::read_to_string(concat)?);
    }
    Ok(s)
}
