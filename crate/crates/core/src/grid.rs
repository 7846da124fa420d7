//! Uniform square meshes on the unit square and piecewise constant fields.

use serde::{Deserialize, Serialize};

use crate::eos::{checked_internal_energy, Conserved};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
    Reflecting,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub n: usize,
    pub h: f64,
    pub bc: Boundary,
}

impl Mesh {
    /// `n` cells per side; `n` must be a power of two.
    pub fn new(n: usize, bc: Boundary) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Mesh(format!("n must be a power of two, got {n}")));
        }
        Ok(Self {
            n,
            h: 1.0 / n as f64,
            bc,
        })
    }

    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, Boundary::Periodic)
    }

    pub fn cell_count(&self) -> usize {
        self.n * self.n
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    /// Row-major linear index, `i` along x and `j` along y.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.n, idx / self.n)
    }

    /// Faces normal to one axis: `n` per row when periodic, `n + 1` with walls.
    pub fn faces_per_row(&self) -> usize {
        match self.bc {
            Boundary::Periodic => self.n,
            Boundary::Reflecting => self.n + 1,
        }
    }

    pub fn face_count(&self) -> usize {
        2 * self.n * self.faces_per_row()
    }
}

pub fn cell_center(mesh: &Mesh, i: usize, j: usize) -> Result<(f64, f64)> {
    if i >= mesh.n || j >= mesh.n {
        return Err(Error::OutOfRange(format!("cell ({i}, {j}) on n = {}", mesh.n)));
    }
    Ok(((i as f64 + 0.5) * mesh.h, (j as f64 + 0.5) * mesh.h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn normal(self) -> [f64; 2] {
        match self {
            Axis::X => [1.0, 0.0],
            Axis::Y => [0.0, 1.0],
        }
    }
}

/// Cells adjacent to a face. `None` marks a wall, whose ghost state is the mirror
/// image of the interior cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceNeighbors {
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub axis: Axis,
    pub normal: [f64; 2],
}

/// Faces are numbered with all x-normal faces first. Face `(k, j)` of the x
/// family sits at `x = k h` in row `j`; the y family is the transpose.
pub fn face_neighbors(mesh: &Mesh, face: usize) -> Result<FaceNeighbors> {
    if face >= mesh.face_count() {
        return Err(Error::OutOfRange(format!(
            "face {face} of {} on n = {}",
            mesh.face_count(),
            mesh.n
        )));
    }
    let n = mesh.n;
    let per_row = mesh.faces_per_row();
    let family = n * per_row;
    let (axis, local) = if face < family {
        (Axis::X, face)
    } else {
        (Axis::Y, face - family)
    };
    let k = local % per_row;
    let row = local / per_row;
    let (lo, hi) = match mesh.bc {
        Boundary::Periodic => (Some((k + n - 1) % n), Some(k)),
        Boundary::Reflecting => (k.checked_sub(1), (k < n).then_some(k)),
    };
    let cell = |along: usize| match axis {
        Axis::X => mesh.index(along, row),
        Axis::Y => mesh.index(row, along),
    };
    Ok(FaceNeighbors {
        left: lo.map(cell),
        right: hi.map(cell),
        axis,
        normal: axis.normal(),
    })
}

/// Mirror state across a wall with the given normal axis.
pub fn wall_ghost(cell: &Conserved, axis: Axis) -> Conserved {
    let mut ghost = *cell;
    match axis {
        Axis::X => ghost.mom[0] = -ghost.mom[0],
        Axis::Y => ghost.mom[1] = -ghost.mom[1],
    }
    ghost
}

/// Piecewise constant conservative field at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservativeField {
    pub mesh: Mesh,
    pub time: f64,
    pub cells: Vec<Conserved>,
}

impl ConservativeField {
    pub fn new(mesh: Mesh, time: f64, cells: Vec<Conserved>) -> Result<Self> {
        if cells.len() != mesh.cell_count() {
            return Err(Error::Mesh(format!(
                "expected {} cells, got {}",
                mesh.cell_count(),
                cells.len()
            )));
        }
        Ok(Self { mesh, time, cells })
    }

    pub fn uniform(mesh: Mesh, time: f64, state: Conserved) -> Self {
        Self {
            mesh,
            time,
            cells: vec![state; mesh.cell_count()],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &Conserved {
        &self.cells[self.mesh.index(i, j)]
    }

    /// Integrals of `(rho, m_x, m_y, E)` over the domain.
    pub fn totals(&self) -> [f64; 4] {
        let mut acc = [0.0; 4];
        for c in &self.cells {
            for (a, v) in acc.iter_mut().zip(c.to_array()) {
                *a += v;
            }
        }
        acc.map(|a| a * self.mesh.cell_area())
    }

    /// Checks every cell against the vacuum threshold.
    pub fn validate(&self) -> Result<()> {
        for (idx, c) in self.cells.iter().enumerate() {
            if let Err(e) = checked_internal_energy(c) {
                let (i, j) = self.mesh.coords(idx);
                return Err(e.at_cell(i, j));
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.cells.iter().fold(0.0_f64, |m, c| m.max(c.max_abs()))
    }
}

fn refinement(fine: &Mesh, coarse: &Mesh) -> Result<usize> {
    if coarse.n == 0 || !fine.n.is_multiple_of(coarse.n) || fine.n < coarse.n || fine.bc != coarse.bc {
        return Err(Error::NonNested {
            fine: fine.n,
            coarse: coarse.n,
        });
    }
    Ok(fine.n / coarse.n)
}

/// Block average of any per-cell quantity onto a nested coarser mesh.
pub fn block_average<T, F>(fine: &Mesh, values: &[T], coarse: &Mesh, mut combine: F) -> Result<Vec<T>>
where
    T: Copy + Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    F: FnMut(&T) -> T,
{
    let k = refinement(fine, coarse)?;
    let mut out = vec![T::default(); coarse.cell_count()];
    let inv = 1.0 / (k * k) as f64;
    for jc in 0..coarse.n {
        for ic in 0..coarse.n {
            let mut acc = T::default();
            for jf in jc * k..(jc + 1) * k {
                let row = jf * fine.n;
                for v in &values[row + ic * k..row + (ic + 1) * k] {
                    acc += combine(v);
                }
            }
            out[coarse.index(ic, jc)] = acc * inv;
        }
    }
    Ok(out)
}

/// Conservative restriction by `k x k` block averaging.
pub fn restrict(fine: &ConservativeField, coarse_mesh: &Mesh) -> Result<ConservativeField> {
    let cells = block_average(&fine.mesh, &fine.cells, coarse_mesh, |c| *c)?;
    Ok(ConservativeField {
        mesh: *coarse_mesh,
        time: fine.time,
        cells,
    })
}
