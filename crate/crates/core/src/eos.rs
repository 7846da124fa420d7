//! Polytropic gas closure in conservative and conservative-entropy variables.
//!
//! The entropy is the total (density-weighted) entropy
//! `S(rho, m, E) = rho * ln((gamma - 1) * (E - |m|^2 / (2 rho)) / rho^gamma)`
//! and its inverse with respect to the internal energy is
//! `p(rho, S) = rho^gamma * exp(S / rho)`.
//! Outside the physical domain the functions take their semicontinuous
//! extensions, represented by IEEE infinities.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which the internal energy is treated as vacuum.
pub const VACUUM_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    pub gamma: f64,
    pub c_v: f64,
    /// Lower bound on the specific entropy, `S >= s_floor * rho`.
    pub s_floor: f64,
}

impl GasParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be > 1, got {gamma}")));
        }
        Ok(Self {
            gamma,
            c_v: 1.0 / (gamma - 1.0),
            s_floor: f64::NEG_INFINITY,
        })
    }

    pub fn with_s_floor(mut self, s_floor: f64) -> Self {
        self.s_floor = s_floor;
        self
    }
}

impl Default for GasParams {
    fn default() -> Self {
        Self::new(1.4).expect("gamma = 1.4 is valid")
    }
}

/// Conservative state `(rho, m, E)` of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Conserved {
    pub rho: f64,
    pub mom: [f64; 2],
    pub energy: f64,
}

impl Conserved {
    pub const ZERO: Conserved = Conserved {
        rho: 0.0,
        mom: [0.0, 0.0],
        energy: 0.0,
    };

    pub fn new(rho: f64, mom: [f64; 2], energy: f64) -> Self {
        Self { rho, mom, energy }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.rho, self.mom[0], self.mom[1], self.energy]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], [a[1], a[2]], a[3])
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.mom[0] / self.rho, self.mom[1] / self.rho]
    }

    pub fn internal_energy(&self) -> f64 {
        self.energy - kinetic_energy(self.rho, self.mom)
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

impl Add for Conserved {
    type Output = Conserved;
    fn add(self, o: Conserved) -> Conserved {
        Conserved::new(
            self.rho + o.rho,
            [self.mom[0] + o.mom[0], self.mom[1] + o.mom[1]],
            self.energy + o.energy,
        )
    }
}

impl Sub for Conserved {
    type Output = Conserved;
    fn sub(self, o: Conserved) -> Conserved {
        Conserved::new(
            self.rho - o.rho,
            [self.mom[0] - o.mom[0], self.mom[1] - o.mom[1]],
            self.energy - o.energy,
        )
    }
}

impl Mul<f64> for Conserved {
    type Output = Conserved;
    fn mul(self, a: f64) -> Conserved {
        Conserved::new(self.rho * a, [self.mom[0] * a, self.mom[1] * a], self.energy * a)
    }
}

impl Mul<Conserved> for f64 {
    type Output = Conserved;
    fn mul(self, u: Conserved) -> Conserved {
        u * self
    }
}

impl Neg for Conserved {
    type Output = Conserved;
    fn neg(self) -> Conserved {
        self * -1.0
    }
}

impl AddAssign for Conserved {
    fn add_assign(&mut self, o: Conserved) {
        *self = *self + o;
    }
}

/// Primitive state `(rho, u, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub rho: f64,
    pub vel: [f64; 2],
    pub pressure: f64,
}

impl Primitive {
    pub fn new(rho: f64, vel: [f64; 2], pressure: f64) -> Self {
        Self { rho, vel, pressure }
    }
}

/// Kinetic energy `|m|^2 / (2 rho)` with its convex l.s.c. extension to `rho = 0`.
pub fn kinetic_energy(rho: f64, mom: [f64; 2]) -> f64 {
    let m2 = mom[0] * mom[0] + mom[1] * mom[1];
    if rho > 0.0 {
        0.5 * m2 / rho
    } else if rho == 0.0 && m2 == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn invalid(cell: &Conserved) -> Error {
    Error::InvalidState {
        cell: None,
        rho: cell.rho,
        internal_energy: cell.internal_energy(),
    }
}

/// Internal energy density `rho e`, rejecting vacuum and near-vacuum states.
pub fn checked_internal_energy(cell: &Conserved) -> Result<f64> {
    if !(cell.rho > 0.0) || !cell.energy.is_finite() {
        return Err(invalid(cell));
    }
    let rho_e = cell.internal_energy();
    if !(rho_e > 0.0) || rho_e < VACUUM_RATIO * cell.energy.abs() {
        return Err(invalid(cell));
    }
    Ok(rho_e)
}

pub fn pressure_from_conservative(cell: &Conserved, g: &GasParams) -> Result<f64> {
    Ok((g.gamma - 1.0) * checked_internal_energy(cell)?)
}

/// Total entropy density; `-inf` outside the domain, `0` on the vacuum state.
pub fn entropy_from_conservative(cell: &Conserved, g: &GasParams) -> f64 {
    let rho = cell.rho;
    if rho > 0.0 {
        let rho_e = cell.internal_energy();
        if rho_e > 0.0 && rho_e.is_finite() {
            return rho * ((g.gamma - 1.0) * rho_e / rho.powf(g.gamma)).ln();
        }
        return f64::NEG_INFINITY;
    }
    if rho == 0.0 && cell.mom == [0.0, 0.0] && cell.energy >= 0.0 {
        return 0.0;
    }
    f64::NEG_INFINITY
}

/// Pressure as a function of density and total entropy density.
pub fn pressure_from_entropy(rho: f64, entropy: f64, g: &GasParams) -> f64 {
    if rho > 0.0 {
        rho.powf(g.gamma) * (entropy / rho).exp()
    } else if rho == 0.0 && entropy <= 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Internal energy density `rho e(rho, S)`.
pub fn internal_energy_from_entropy(rho: f64, entropy: f64, g: &GasParams) -> f64 {
    pressure_from_entropy(rho, entropy, g) * g.c_v
}

/// Total energy `E(rho, m, S)` in conservative-entropy variables.
pub fn total_energy_from_entropy(rho: f64, mom: [f64; 2], entropy: f64, g: &GasParams) -> f64 {
    kinetic_energy(rho, mom) + internal_energy_from_entropy(rho, entropy, g)
}

pub fn conservative_from_primitive(prim: &Primitive, g: &GasParams) -> Conserved {
    let mom = [prim.rho * prim.vel[0], prim.rho * prim.vel[1]];
    let kinetic = 0.5 * prim.rho * (prim.vel[0] * prim.vel[0] + prim.vel[1] * prim.vel[1]);
    Conserved::new(prim.rho, mom, prim.pressure * g.c_v + kinetic)
}

pub fn primitive_from_conservative(cell: &Conserved, g: &GasParams) -> Result<Primitive> {
    let pressure = pressure_from_conservative(cell, g)?;
    Ok(Primitive::new(cell.rho, cell.velocity(), pressure))
}

pub fn sound_speed(rho: f64, pressure: f64, g: &GasParams) -> f64 {
    (g.gamma * pressure / rho).sqrt()
}
