//! Kelvin-Helmholtz shear-layer initial data with randomly perturbed interfaces.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eos::{conservative_from_primitive, Conserved, GasParams, Primitive};
use crate::error::{Error, Result};
use crate::grid::{cell_center, ConservativeField, Mesh};
use crate::rng::SplitMix64;

/// Interface perturbation coefficients `a_j^k`, `b_j^k` for the two interfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhCoefficients {
    pub a: [Vec<f64>; 2],
    pub b: [Vec<f64>; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhSpec {
    pub modes: usize,
    pub amp: f64,
    pub j1: f64,
    pub j2: f64,
    pub seed: u64,
    /// Overrides the seeded draw when present.
    pub coeffs: Option<KhCoefficients>,
}

impl Default for KhSpec {
    fn default() -> Self {
        Self {
            modes: 10,
            amp: 0.01,
            j1: 0.25,
            j2: 0.75,
            seed: 42,
            coeffs: None,
        }
    }
}

/// Inner strip state `(rho, u, v, p) = (2, -0.5, 0, 2.5)`.
pub const INNER: Primitive = Primitive {
    rho: 2.0,
    vel: [-0.5, 0.0],
    pressure: 2.5,
};

/// Outer state `(1, 0.5, 0, 2.5)`.
pub const OUTER: Primitive = Primitive {
    rho: 1.0,
    vel: [0.5, 0.0],
    pressure: 2.5,
};

/// Draws `a` uniform on `[0, 1]` normalised to unit sum and `b` uniform on
/// `[0, 2 pi)`, in the order `a_1, b_1, a_2, b_2`.
pub fn draw_coefficients(seed: u64, modes: usize) -> Result<KhCoefficients> {
    if modes == 0 {
        return Err(Error::Config("KH perturbation needs at least one mode".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut draw = |scale: f64| -> Vec<f64> { (0..modes).map(|_| rng.next_f64() * scale).collect() };
    let mut a1 = draw(1.0);
    let b1 = draw(2.0 * PI);
    let mut a2 = draw(1.0);
    let b2 = draw(2.0 * PI);
    for a in [&mut a1, &mut a2] {
        let sum: f64 = a.iter().sum();
        a.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(KhCoefficients {
        a: [a1, a2],
        b: [b1, b2],
    })
}

impl KhSpec {
    pub fn coefficients(&self) -> Result<KhCoefficients> {
        match &self.coeffs {
            Some(c) => {
                if c.a.iter().zip(&c.b).any(|(a, b)| a.len() != b.len()) {
                    return Err(Error::Config("coefficient arrays differ in length".into()));
                }
                Ok(c.clone())
            }
            None => draw_coefficients(self.seed, self.modes),
        }
    }

    fn unperturbed(&self, j: usize) -> f64 {
        if j == 0 {
            self.j1
        } else {
            self.j2
        }
    }
}

/// Interface height `I_j(x) = J_j + amp * sum_k a_j^k cos(b_j^k + 2 k pi x)`, `j` in `{0, 1}`.
pub fn kh_interface(spec: &KhSpec, coeffs: &KhCoefficients, j: usize, x: f64) -> f64 {
    let y: f64 = coeffs.a[j]
        .iter()
        .zip(&coeffs.b[j])
        .enumerate()
        .map(|(k, (a, b))| a * (b + 2.0 * (k + 1) as f64 * PI * x).cos())
        .sum();
    spec.unperturbed(j) + spec.amp * y
}

/// Samples the shear-layer data at cell centres.
pub fn kh_initial_field(spec: &KhSpec, mesh: &Mesh, g: &GasParams) -> Result<ConservativeField> {
    let coeffs = spec.coefficients()?;
    let inner = conservative_from_primitive(&INNER, g);
    let outer = conservative_from_primitive(&OUTER, g);
    let mut cells = Vec::with_capacity(mesh.cell_count());
    for j in 0..mesh.n {
        for i in 0..mesh.n {
            let (x, y) = cell_center(mesh, i, j)?;
            let lower = kh_interface(spec, &coeffs, 0, x);
            let upper = kh_interface(spec, &coeffs, 1, x);
            cells.push(if lower <= y && y <= upper { inner } else { outer });
        }
    }
    ConservativeField::new(*mesh, 0.0, cells)
}

/// Constant state, used for debugging and degenerate experiments.
pub fn uniform_field(mesh: &Mesh, prim: &Primitive, g: &GasParams) -> ConservativeField {
    let state: Conserved = conservative_from_primitive(prim, g);
    ConservativeField::uniform(*mesh, 0.0, state)
}
