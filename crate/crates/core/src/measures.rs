//! Empirical Young measures of a Cesàro ensemble and one-dimensional
//! Wasserstein distances between them.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::diagnostics::cesaro::CesaroEnsemble;
use crate::diagnostics::defects::fmt17;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Weighted atoms in state space `(rho, m_x, m_y, E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Uniform weights; duplicate atoms are kept.
    pub fn uniform(atoms: Vec<[f64; 4]>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Ensemble("a measure needs at least one atom".into()));
        }
        let w = 1.0 / atoms.len() as f64;
        Ok(Self {
            weights: vec![w; atoms.len()],
            atoms,
        })
    }

    /// Pushforward onto one state component.
    pub fn component(&self, c: usize) -> Vec<(f64, f64)> {
        self.atoms.iter().zip(&self.weights).map(|(a, &w)| (a[c], w)).collect()
    }

    /// Pushforward onto the direction `dir`.
    pub fn project(&self, dir: [f64; 4]) -> Vec<(f64, f64)> {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, &w)| (a.iter().zip(dir).map(|(x, d)| x * d).sum(), w))
            .collect()
    }
}

/// The `N` member states at one cell, each with weight `1/N`.
pub fn young_measure_at(ens: &CesaroEnsemble, cell: usize) -> Result<EmpiricalMeasure> {
    if cell >= ens.mesh.cell_count() {
        return Err(Error::OutOfRange(format!(
            "cell {cell} outside a mesh of {} cells",
            ens.mesh.cell_count()
        )));
    }
    EmpiricalMeasure::uniform(ens.members.iter().map(|m| m.cells[cell].state.to_array()).collect())
}

/// Exact `W_1` between weighted samples on the line: the integral of
/// `|F_a - F_b|` over the merged support. Symmetric bit for bit.
pub fn wasserstein1_scalar(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let sorted = |m: &[(f64, f64)]| {
        let mut v = m.to_vec();
        v.sort_by(|p, q| p.0.total_cmp(&q.0));
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let (mut ia, mut ib) = (0, 0);
    let (mut fa, mut fb) = (0.0_f64, 0.0_f64);
    let mut dist = 0.0;
    let mut prev: Option<f64> = None;
    while ia < a.len() || ib < b.len() {
        let x = match (a.get(ia), b.get(ib)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        if let Some(x0) = prev {
            dist += (fa - fb).abs() * (x - x0);
        }
        while ia < a.len() && a[ia].0 == x {
            fa += a[ia].1;
            ia += 1;
        }
        while ib < b.len() && b[ib].0 == x {
            fb += b[ib].1;
            ib += 1;
        }
        prev = Some(x);
    }
    dist
}

/// Number of random directions in [`sliced_wasserstein1`].
pub const SLICES: usize = 16;

/// Fixed unit directions in `R^4` drawn from `seed`.
pub fn slice_directions(seed: u64) -> Vec<[f64; 4]> {
    let mut rng = SplitMix64::new(seed);
    let mut dirs = Vec::with_capacity(SLICES);
    while dirs.len() < SLICES {
        let d = [0; 4].map(|_| 2.0 * rng.next_f64() - 1.0);
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            dirs.push(d.map(|x| x / norm));
        }
    }
    dirs
}

/// Mean of `W_1` over the projections onto [`slice_directions`].
pub fn sliced_wasserstein1(a: &EmpiricalMeasure, b: &EmpiricalMeasure, seed: u64) -> f64 {
    let dirs = slice_directions(seed);
    dirs.iter()
        .map(|&d| wasserstein1_scalar(&a.project(d), &b.project(d)))
        .sum::<f64>()
        / dirs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// Index into `(rho, m_x, m_y, E)`.
    State(usize),
    Sliced {
        seed: u64,
    },
}

impl std::str::FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rho" => Component::State(0),
            "mx" => Component::State(1),
            "my" => Component::State(2),
            "E" | "energy" => Component::State(3),
            "sliced" => Component::Sliced { seed: 0 },
            _ => return Err(Error::Config(format!("unknown measure component {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    /// Row-major per-cell distances.
    pub dist: Vec<f64>,
    pub n: usize,
    pub q: f64,
    /// `(sum dist^q h^2)^(1/q)`.
    pub aggregate: f64,
}

pub fn measure_distance_field(
    a: &CesaroEnsemble,
    b: &CesaroEnsemble,
    component: Component,
    q: f64,
) -> Result<DistanceField> {
    if a.mesh != b.mesh {
        return Err(Error::Mesh(format!(
            "ensembles on n = {} and n = {}",
            a.mesh.n, b.mesh.n
        )));
    }
    if !(q >= 1.0) {
        return Err(Error::Config(format!("aggregate exponent q must be >= 1, got {q}")));
    }
    let dist = (0..a.mesh.cell_count())
        .into_par_iter()
        .map(|c| -> Result<f64> {
            let (ma, mb) = (young_measure_at(a, c)?, young_measure_at(b, c)?);
            Ok(match component {
                Component::State(k) if k < 4 => wasserstein1_scalar(&ma.component(k), &mb.component(k)),
                Component::State(k) => return Err(Error::OutOfRange(format!("state component {k}"))),
                Component::Sliced { seed } => sliced_wasserstein1(&ma, &mb, seed),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sum: f64 = dist.iter().map(|d| d.powf(q)).sum::<f64>() * a.mesh.cell_area();
    Ok(DistanceField {
        dist,
        n: a.mesh.n,
        q,
        aggregate: sum.powf(1.0 / q),
    })
}

/// `i,j,dist` rows followed by an `aggregate,q,value` footer row.
pub fn write_distance_csv(path: &Path, field: &DistanceField) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "i,j,dist")?;
    for (idx, d) in field.dist.iter().enumerate() {
        writeln!(out, "{},{},{}", idx % field.n, idx / field.n, fmt17(*d))?;
    }
    writeln!(out, "aggregate,{},{}", field.q, fmt17(field.aggregate))?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::cesaro::cesaro_build;
    use crate::eos::{Conserved, GasParams};
    use crate::grid::{ConservativeField, Mesh};
    use proptest::prelude::*;

    fn dirac(x: f64) -> Vec<(f64, f64)> {
        vec![(x, 1.0)]
    }

    fn uniform(xs: &[f64]) -> Vec<(f64, f64)> {
        xs.iter().map(|&x| (x, 1.0 / xs.len() as f64)).collect()
    }

    #[test]
    fn closed_form_distances() {
        assert_eq!(wasserstein1_scalar(&dirac(0.3), &dirac(0.3)), 0.0);
        assert!((wasserstein1_scalar(&dirac(-1.0), &dirac(2.5)) - 3.5).abs() < 1e-15);
        assert!((wasserstein1_scalar(&uniform(&[0.0, 1.0]), &uniform(&[0.0, 2.0])) - 0.5).abs() < 1e-15);
    }

    fn ensemble(fields: &[ConservativeField]) -> CesaroEnsemble {
        cesaro_build(fields, &GasParams::default()).unwrap()
    }

    fn flat(n: usize, rho: f64) -> ConservativeField {
        ConservativeField::uniform(Mesh::periodic(n).unwrap(), 0.0, Conserved::new(rho, [0.0, 0.0], 3.0))
    }

    #[test]
    fn young_measure_keeps_duplicates() {
        let ens = ensemble(&[flat(2, 1.0), flat(2, 1.0), flat(2, 2.0)]);
        let m = young_measure_at(&ens, 3).unwrap();
        assert_eq!(m.atoms.len(), 3);
        assert_eq!(m.atoms[0], m.atoms[1]);
        assert_eq!(m.atoms[2], [2.0, 0.0, 0.0, 3.0]);
        assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(young_measure_at(&ens, 4).is_err());
        let single = young_measure_at(&ensemble(&[flat(2, 1.0)]), 0).unwrap();
        assert_eq!(single.weights, vec![1.0]);
    }

    #[test]
    fn distance_field_of_one_differing_cell() {
        let a = ensemble(&[flat(4, 1.0), flat(4, 1.0)]);
        assert_eq!(
            measure_distance_field(&a, &a, Component::State(0), 1.0)
                .unwrap()
                .aggregate,
            0.0
        );
        let mut f = flat(4, 1.0);
        f.cells[6].rho = 1.5;
        let b = ensemble(&[flat(4, 1.0), f]);
        let d = measure_distance_field(&a, &b, Component::State(0), 1.0).unwrap();
        // half the mass moves by 0.5
        assert!((d.dist[6] - 0.25).abs() < 1e-15);
        assert!((d.aggregate - 0.25 / 16.0).abs() < 1e-15);
        let s = measure_distance_field(&a, &b, Component::Sliced { seed: 7 }, 2.0).unwrap();
        assert!(s.dist[6] > 0.0 && s.dist[0] == 0.0);
        let c = ensemble(&[flat(2, 1.0)]);
        assert!(matches!(
            measure_distance_field(&a, &c, Component::State(0), 1.0),
            Err(Error::Mesh(_))
        ));
    }

    #[test]
    fn distance_csv_layout() {
        let a = ensemble(&[flat(2, 1.0)]);
        let b = ensemble(&[flat(2, 2.0)]);
        let d = measure_distance_field(&a, &b, Component::State(0), 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("dist.csv");
        write_distance_csv(&p, &d).unwrap();
        let text = std::fs::read_to_string(p).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "i,j,dist");
        assert_eq!(lines.len(), 6);
        assert!(lines[5].starts_with("aggregate,1,"));
    }

    #[test]
    fn slice_directions_are_unit_and_seeded() {
        let d = slice_directions(3);
        assert_eq!(d.len(), SLICES);
        assert_eq!(d, slice_directions(3));
        for v in d {
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    fn measure() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-5.0..5.0f64, 0.01..1.0f64), 1..6).prop_map(|v| {
            let total: f64 = v.iter().map(|p| p.1).sum();
            v.into_iter().map(|(x, w)| (x, w / total)).collect()
        })
    }

    proptest! {
        #[test]
        fn metric_axioms(a in measure(), b in measure(), c in measure()) {
            let ab = wasserstein1_scalar(&a, &b);
            prop_assert_eq!(ab, wasserstein1_scalar(&b, &a));
            prop_assert!(wasserstein1_scalar(&a, &a) <= 1e-14);
            prop_assert!(ab <= wasserstein1_scalar(&a, &c) + wasserstein1_scalar(&c, &b) + 1e-12);
            prop_assert!(ab >= 0.0);
        }
    }
}
