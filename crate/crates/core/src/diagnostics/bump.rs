//! Entropy-bump concatenation: raise the entropy of a state uniformly until the
//! total energy reaches a prescribed budget.

use crate::eos::{entropy_from_conservative, total_energy_from_entropy, Conserved, GasParams};
use crate::error::{Error, Result};
use crate::grid::ConservativeField;

/// Bisection stops once the bracket is narrower than this.
pub const BUMP_TOL: f64 = 1e-12;

/// Energy gaps below this fraction of the budget count as no defect.
pub const MIN_RELATIVE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyBump {
    pub field: ConservativeField,
    /// Uniform entropy increment added to every cell.
    pub delta: f64,
}

fn bumped_cells(rho_m_s: &[(f64, [f64; 2], f64)], delta: f64, g: &GasParams) -> Vec<Conserved> {
    rho_m_s
        .iter()
        .map(|&(rho, m, s)| Conserved::new(rho, m, total_energy_from_entropy(rho, m, s + delta, g)))
        .collect()
}

/// Keeps `(rho, m)` and replaces `S` by `S + delta` with the largest `delta`
/// (to [`BUMP_TOL`]) such that the total energy does not exceed `budget`.
pub fn concat_with_entropy_bump(field: &ConservativeField, budget: f64, g: &GasParams) -> Result<EntropyBump> {
    field.validate()?;
    let area = field.mesh.cell_area();
    let current = field.totals()[3];
    let states: Vec<_> = field
        .cells
        .iter()
        .map(|c| (c.rho, c.mom, entropy_from_conservative(c, g)))
        .collect();
    let energy = |delta: f64| -> f64 { bumped_cells(&states, delta, g).iter().map(|c| c.energy).sum::<f64>() * area };
    let room = budget - MIN_RELATIVE_GAP * budget.abs();
    if !(current < room) || !(energy(0.0) < room) {
        return Err(Error::NothingToBump { current, budget });
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while energy(hi) <= budget {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return Err(Error::NonBracketing);
        }
    }
    while hi - lo > BUMP_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if energy(mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EntropyBump {
        field: ConservativeField {
            mesh: field.mesh,
            time: field.time,
            cells: bumped_cells(&states, lo, g),
        },
        delta: lo,
    })
}
