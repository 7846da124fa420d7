//! Experiment drivers behind the command line: single runs, hierarchies,
//! the entropy-bump concatenation and the consistency study.

pub mod concat;
pub mod config;
pub mod consistency;
pub mod hierarchy;
pub mod output;
pub mod report;
pub mod run;

pub use concat::{cmd_concat, concat_from_baseline, ConcatReport};
pub use config::{Problem, RunConfig, FULL_SCALE_MESHES};
pub use consistency::{cmd_consistency, consistency_study, ConsistencyStudy, DecayVerdict};
pub use hierarchy::{cmd_hierarchy, run_hierarchy, HierarchyOutcome, HierarchySummary};
pub use report::cmd_report;
pub use run::{cmd_run, initial_field, total_entropy, ConservationAudit, RunSummary};
