//! Viscous upwind finite-volume operator and SSP-RK3 time stepping.
//!
//! On a face with unit normal `n` pointing from the left cell into the right
//! cell, with `[[q]] = q_right - q_left` and `<q>` the arithmetic mean,
//!
//! ```text
//! F_U   = <U><u>.n - |<u>.n| [[U]] / 2 - h^eps [[U]]
//! F_m  += <p> n - h^(alpha-1) [[u]]
//! F_E  += W - h^(alpha-1) [[u]].<u>
//! ```
//!
//! where the pressure work `W` is `<p><u>.n` (averaged) or
//! `(<p><u>.n + <p u>.n) / 2` (as printed). Velocities are formed per cell
//! before averaging.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eos::{checked_internal_energy, pressure_from_conservative, sound_speed, Conserved, GasParams};
use crate::error::{Error, Result};
use crate::grid::{wall_ghost, Axis, Boundary, ConservativeField, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureWork {
    #[default]
    Averaged,
    AsPrinted,
}

impl std::str::FromStr for PressureWork {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "averaged" => Ok(Self::Averaged),
            "as_printed" => Ok(Self::AsPrinted),
            other => Err(Error::Config(format!("unknown pressure work form {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Exponent of the velocity viscosity `h^(alpha-1)`.
    pub alpha: f64,
    /// Exponent of the conservative-variable diffusion `h^eps`.
    pub eps_visc: f64,
    pub cfl: f64,
    pub pressure_work: PressureWork,
}

impl SchemeParams {
    pub fn new(alpha: f64, eps_visc: f64, cfl: f64, pressure_work: PressureWork) -> Result<Self> {
        if !(alpha > 0.0) || !(eps_visc > 0.0) || !(cfl > 0.0 && cfl < 1.0) {
            return Err(Error::Config(format!(
                "scheme parameters out of range: alpha = {alpha}, eps = {eps_visc}, cfl = {cfl}"
            )));
        }
        Ok(Self {
            alpha,
            eps_visc,
            cfl,
            pressure_work,
        })
    }
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            eps_visc: 2.0,
            cfl: 0.4,
            pressure_work: PressureWork::Averaged,
        }
    }
}

/// Flux of `(rho, m, E)` per unit face length.
pub type FaceFlux = Conserved;

#[derive(Debug, Clone, Copy, Default)]
struct Trace {
    vel: [f64; 2],
    pressure: f64,
}

fn trace(cell: &Conserved, g: &GasParams) -> Result<Trace> {
    Ok(Trace {
        vel: cell.velocity(),
        pressure: pressure_from_conservative(cell, g)?,
    })
}

fn mirror(t: &Trace, axis: Axis) -> Trace {
    let mut m = *t;
    match axis {
        Axis::X => m.vel[0] = -m.vel[0],
        Axis::Y => m.vel[1] = -m.vel[1],
    }
    m
}

#[derive(Debug, Clone, Copy)]
struct Coefficients {
    diffusion: f64,
    viscosity: f64,
    work: PressureWork,
}

impl Coefficients {
    fn new(h: f64, sp: &SchemeParams) -> Self {
        Self {
            diffusion: h.powf(sp.eps_visc),
            viscosity: h.powf(sp.alpha - 1.0),
            work: sp.pressure_work,
        }
    }
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn flux_kernel(l: &Conserved, tl: &Trace, r: &Conserved, tr: &Trace, n: [f64; 2], c: &Coefficients) -> FaceFlux {
    let avg_u = [0.5 * (tl.vel[0] + tr.vel[0]), 0.5 * (tl.vel[1] + tr.vel[1])];
    let jump_u = [tr.vel[0] - tl.vel[0], tr.vel[1] - tl.vel[1]];
    let un = dot(avg_u, n);
    let avg = (*l + *r) * 0.5;
    let jump = *r - *l;
    let mut f = avg * un - jump * (0.5 * un.abs() + c.diffusion);

    let p_avg = 0.5 * (tl.pressure + tr.pressure);
    f.mom[0] += p_avg * n[0] - c.viscosity * jump_u[0];
    f.mom[1] += p_avg * n[1] - c.viscosity * jump_u[1];

    let work = match c.work {
        PressureWork::Averaged => p_avg * un,
        PressureWork::AsPrinted => {
            let pu = [
                0.5 * (tl.pressure * tl.vel[0] + tr.pressure * tr.vel[0]),
                0.5 * (tl.pressure * tl.vel[1] + tr.pressure * tr.vel[1]),
            ];
            0.5 * (p_avg * un + dot(pu, n))
        }
    };
    f.energy += work - c.viscosity * dot(jump_u, avg_u);
    f
}

/// Numerical flux from `left` to `right` across a face of size `h` with unit normal `normal`.
pub fn upwind_flux(
    left: &Conserved,
    right: &Conserved,
    normal: [f64; 2],
    h: f64,
    sp: &SchemeParams,
    g: &GasParams,
) -> Result<FaceFlux> {
    let tl = trace(left, g)?;
    let tr = trace(right, g)?;
    Ok(flux_kernel(left, &tl, right, &tr, normal, &Coefficients::new(h, sp)))
}

fn traces(field: &ConservativeField, g: &GasParams) -> Result<Vec<Trace>> {
    let computed: Vec<Result<Trace>> = field.cells.par_iter().map(|c| trace(c, g)).collect();
    let mut out = Vec::with_capacity(computed.len());
    for (idx, t) in computed.into_iter().enumerate() {
        match t {
            Ok(t) => out.push(t),
            Err(e) => {
                let (i, j) = field.mesh.coords(idx);
                return Err(e.at_cell(i, j));
            }
        }
    }
    Ok(out)
}

/// Flux through the face between `lo` and `hi` along `axis`; `None` is a wall.
#[inline]
fn face_flux(
    cells: &[Conserved],
    tr: &[Trace],
    lo: Option<usize>,
    hi: Option<usize>,
    axis: Axis,
    c: &Coefficients,
) -> FaceFlux {
    let n = axis.normal();
    match (lo, hi) {
        (Some(a), Some(b)) => flux_kernel(&cells[a], &tr[a], &cells[b], &tr[b], n, c),
        (None, Some(b)) => {
            let ghost = wall_ghost(&cells[b], axis);
            flux_kernel(&ghost, &mirror(&tr[b], axis), &cells[b], &tr[b], n, c)
        }
        (Some(a), None) => {
            let ghost = wall_ghost(&cells[a], axis);
            flux_kernel(&cells[a], &tr[a], &ghost, &mirror(&tr[a], axis), n, c)
        }
        (None, None) => unreachable!("a face has at least one cell"),
    }
}

/// Neighbours of the `k`-th face along a line of `n` cells.
#[inline]
fn line_neighbors(k: usize, n: usize, bc: Boundary) -> (Option<usize>, Option<usize>) {
    match bc {
        Boundary::Periodic => (Some((k + n - 1) % n), Some(k)),
        Boundary::Reflecting => (k.checked_sub(1), (k < n).then_some(k)),
    }
}

/// Semi-discrete tendency `dU/dt` of every cell.
pub fn vfv_rhs(field: &ConservativeField, sp: &SchemeParams, g: &GasParams) -> Result<Vec<Conserved>> {
    let mesh = field.mesh;
    let n = mesh.n;
    let per_line = mesh.faces_per_row();
    let coef = Coefficients::new(mesh.h, sp);
    let tr = traces(field, g)?;
    let cells = &field.cells;

    // x-normal faces, row j, face k at x = k h
    let mut fx = vec![Conserved::ZERO; n * per_line];
    fx.par_chunks_mut(per_line).enumerate().for_each(|(j, row)| {
        for (k, f) in row.iter_mut().enumerate() {
            let (lo, hi) = line_neighbors(k, n, mesh.bc);
            *f = face_flux(
                cells,
                &tr,
                lo.map(|i| mesh.index(i, j)),
                hi.map(|i| mesh.index(i, j)),
                Axis::X,
                &coef,
            );
        }
    });
    // y-normal faces, face k at y = k h, column i
    let mut fy = vec![Conserved::ZERO; per_line * n];
    fy.par_chunks_mut(n).enumerate().for_each(|(k, line)| {
        let (lo, hi) = line_neighbors(k, n, mesh.bc);
        for (i, f) in line.iter_mut().enumerate() {
            *f = face_flux(
                cells,
                &tr,
                lo.map(|j| mesh.index(i, j)),
                hi.map(|j| mesh.index(i, j)),
                Axis::Y,
                &coef,
            );
        }
    });

    let inv_h = 1.0 / mesh.h;
    let next = |k: usize| match mesh.bc {
        Boundary::Periodic => (k + 1) % n,
        Boundary::Reflecting => k + 1,
    };
    let mut out = vec![Conserved::ZERO; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (i, d) in row.iter_mut().enumerate() {
            let west = fx[j * per_line + i];
            let east = fx[j * per_line + next(i)];
            let south = fy[j * n + i];
            let north = fy[next(j) * n + i];
            *d = ((east - west) + (north - south)) * -inv_h;
        }
    });
    Ok(out)
}

/// Largest stable step `cfl h / max(|u| + c)`.
pub fn cfl_dt(field: &ConservativeField, sp: &SchemeParams, g: &GasParams) -> Result<f64> {
    let mut max_speed = 0.0_f64;
    for (idx, c) in field.cells.iter().enumerate() {
        let p = pressure_from_conservative(c, g).map_err(|e| {
            let (i, j) = field.mesh.coords(idx);
            e.at_cell(i, j)
        })?;
        let u = c.velocity();
        max_speed = max_speed.max(dot(u, u).sqrt() + sound_speed(c.rho, p, g));
    }
    Ok(sp.cfl * field.mesh.h / max_speed)
}

/// Three-stage SSP Runge-Kutta update in Shu-Osher form. `op` receives the
/// 1-based stage number and the stage state.
pub fn ssp_rk3<F>(u0: &[Conserved], dt: f64, mut op: F) -> Result<Vec<Conserved>>
where
    F: FnMut(usize, &[Conserved]) -> Result<Vec<Conserved>>,
{
    let l0 = op(1, u0)?;
    let u1: Vec<Conserved> = u0.iter().zip(&l0).map(|(u, l)| *u + *l * dt).collect();
    let l1 = op(2, &u1)?;
    let u2: Vec<Conserved> = u0
        .iter()
        .zip(u1.iter().zip(&l1))
        .map(|(u, (v, l))| *u * 0.75 + (*v + *l * dt) * 0.25)
        .collect();
    let l2 = op(3, &u2)?;
    Ok(u0
        .iter()
        .zip(u2.iter().zip(&l2))
        .map(|(u, (v, l))| *u * (1.0 / 3.0) + (*v + *l * dt) * (2.0 / 3.0))
        .collect())
}

/// Cell with the smallest relative internal energy (non-positive density first).
fn worst_cell(cells: &[Conserved]) -> usize {
    let badness = |c: &Conserved| {
        if !(c.rho > 0.0) {
            f64::NEG_INFINITY
        } else {
            let r = c.internal_energy() / c.energy.abs();
            if r.is_nan() {
                f64::NEG_INFINITY
            } else {
                r
            }
        }
    };
    (0..cells.len())
        .min_by(|&a, &b| badness(&cells[a]).total_cmp(&badness(&cells[b])))
        .unwrap_or(0)
}

fn positivity(mesh: &Mesh, stage: usize, time: f64, cells: &[Conserved]) -> Error {
    let idx = worst_cell(cells);
    let c = cells[idx];
    Error::Positivity {
        stage,
        time,
        cell: mesh.coords(idx),
        rho: c.rho,
        internal_energy: c.internal_energy(),
    }
}

/// One SSP-RK3 step of the VFV operator. A non-physical state produced by
/// stage `k` is reported with `stage = k` (0 for an invalid input).
pub fn ssp_rk3_step(field: &ConservativeField, dt: f64, sp: &SchemeParams, g: &GasParams) -> Result<ConservativeField> {
    let mesh = field.mesh;
    let cells = ssp_rk3(&field.cells, dt, |stage, state| {
        let stage_field = ConservativeField {
            mesh,
            time: field.time,
            cells: state.to_vec(),
        };
        vfv_rhs(&stage_field, sp, g).map_err(|e| match e {
            Error::InvalidState { .. } => positivity(&mesh, stage - 1, field.time, state),
            other => other,
        })
    })?;
    if cells.iter().any(|c| checked_internal_energy(c).is_err()) {
        return Err(positivity(&mesh, 3, field.time, &cells));
    }
    Ok(ConservativeField {
        mesh,
        time: field.time + dt,
        cells,
    })
}

/// Integrates to `t_end`, landing exactly on every time in `stops` on the way.
/// `sink` sees every accepted step.
pub fn run_to_time(
    init: &ConservativeField,
    t_end: f64,
    stops: &[f64],
    sp: &SchemeParams,
    g: &GasParams,
    sink: &mut dyn FnMut(&ConservativeField) -> Result<()>,
) -> Result<ConservativeField> {
    if t_end < init.time {
        return Err(Error::Config(format!(
            "t_end {t_end} precedes the initial time {}",
            init.time
        )));
    }
    let mut field = init.clone();
    let mut stops: Vec<f64> = stops.iter().copied().filter(|&s| s > init.time && s < t_end).collect();
    stops.sort_by(f64::total_cmp);
    stops.push(t_end);
    let mut next = 0;
    while field.time < t_end {
        while stops[next] <= field.time {
            next += 1;
        }
        let target = stops[next];
        let mut dt = cfl_dt(&field, sp, g)?;
        let lands = field.time + dt * (1.0 + 1e-9) >= target;
        if lands {
            dt = target - field.time;
        }
        field = ssp_rk3_step(&field, dt, sp, g)?;
        if lands {
            field.time = target;
        }
        sink(&field)?;
    }
    Ok(field)
}
