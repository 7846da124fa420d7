use std::path::PathBuf;

/// Errors raised by the solver, the diagnostics and the experiment drivers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vacuum/invalid state{}: rho = {rho}, internal energy = {internal_energy}", fmt_cell(.cell))]
    InvalidState {
        cell: Option<(usize, usize)>,
        rho: f64,
        internal_energy: f64,
    },

    #[error("positivity failure in RK stage {stage} at t = {time}: worst cell ({}, {}) has rho = {rho}, internal energy = {internal_energy}", .cell.0, .cell.1)]
    Positivity {
        stage: usize,
        time: f64,
        cell: (usize, usize),
        rho: f64,
        internal_energy: f64,
    },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("meshes are not nested: fine n = {fine}, coarse n = {coarse}")]
    NonNested { fine: usize, coarse: usize },

    #[error("ensemble mismatch: {0}")]
    Ensemble(String),

    #[error("nothing to bump: field energy {current} is not below the budget {budget}")]
    NothingToBump { current: f64, budget: f64 },

    #[error("entropy bump bisection could not bracket the energy budget")]
    NonBracketing,

    #[error("series error: {0}")]
    Series(String),

    #[error("test function incompatible with the boundary conditions: {0}")]
    TestFunction(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed snapshot {path:?} at byte {offset}: {reason}")]
    Snapshot {
        path: PathBuf,
        offset: usize,
        reason: String,
    },

    #[error("failed on mesh n = {n}: {source}")]
    Member {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn fmt_cell(cell: &Option<(usize, usize)>) -> String {
    match cell {
        Some((i, j)) => format!(" in cell ({i}, {j})"),
        None => String::new(),
    }
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Positivity { .. } | Error::InvalidState { .. } => 2,
            Error::Config(_) | Error::Mesh(_) => 3,
            Error::NothingToBump { .. } | Error::NonBracketing | Error::Ensemble(_) | Error::Series(_) => 4,
            Error::Member { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    pub(crate) fn at_cell(self, i: usize, j: usize) -> Self {
        match self {
            Error::InvalidState {
                rho, internal_energy, ..
            } => Error::InvalidState {
                cell: Some((i, j)),
                rho,
                internal_energy,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
