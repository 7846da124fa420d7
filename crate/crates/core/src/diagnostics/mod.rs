//! Measure-valued diagnostics: Cesàro ensembles, defects, entropy production
//! and weak-form consistency residuals.

pub mod bump;
pub mod cesaro;
pub mod consistency;
pub mod dafermos;
pub mod defects;

pub use bump::{concat_with_entropy_bump, EntropyBump};
pub use cesaro::{cesaro_build, CesaroEnsemble, Member, Moments};
pub use consistency::{consistency_residual, ConsistencyResidual, ResidualAccumulator, TestFunction};
pub use dafermos::{dafermos_compare, entropy_production_rate, DafermosOrder, DafermosVerdict};
pub use defects::{
    defect_integrals, defect_row, energy_defect, entropy_defect, read_defects_csv, reynolds_defect, trapezoid,
    write_defects_csv, DefectIntegrals, DefectRow, EnergyDefect, EntropyDefect, ReynoldsDefect,
};
