//! `vfv`: run the viscous finite volume experiments from a TOML configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vfv_core::experiments::{
    cmd_concat, cmd_consistency, cmd_hierarchy, cmd_report, cmd_run, RunConfig, FULL_SCALE_MESHES,
};
use vfv_core::{Error, PressureWork};

/// Exit code for malformed command lines, shared with configuration errors.
const USAGE_EXIT: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "vfv",
    version,
    about = "Viscous finite volume ensembles, defect measures and entropy-bump experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a single mesh and write snapshots, series.csv and metadata.
    Run(Overrides),
    /// Run the mesh hierarchy and write the defect and distance series.
    Hierarchy(Overrides),
    /// Bump the Cesàro state at tau to the initial energy and compare entropy rates.
    Concat(Overrides),
    /// Test-function residuals of the weak formulation across the hierarchy.
    Consistency(Overrides),
    /// Summarise the results already present in the output directory.
    Report(Overrides),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WorkForm {
    Averaged,
    #[value(name = "as_printed")]
    AsPrinted,
}

#[derive(Debug, Args)]
struct Overrides {
    /// TOML configuration; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mesh hierarchy, coarsest first.
    #[arg(long, value_delimiter = ',')]
    meshes: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the 64..1024 hierarchy (multi-hour runtime).
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, value_enum)]
    pressure_work_form: Option<WorkForm>,
    /// Resolution of the single-mesh run.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
}

impl Overrides {
    fn resolve(&self) -> vfv_core::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(m) = &self.meshes {
            cfg.meshes = m.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.paper_scale {
            cfg.paper_scale = true;
        }
        if let Some(t) = self.tau {
            cfg.tau = t;
        }
        if let Some(w) = self.pressure_work_form {
            cfg.pressure_work_form = match w {
                WorkForm::Averaged => PressureWork::Averaged,
                WorkForm::AsPrinted => PressureWork::AsPrinted,
            };
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_toml<T: Serialize>(value: &T) {
    match toml::to_string(value) {
        Ok(s) => print!("{s}"),
        Err(e) => eprintln!("warning: summary not printable: {e}"),
    }
}

fn execute(command: Command) -> vfv_core::Result<()> {
    let (Command::Run(o) | Command::Hierarchy(o) | Command::Concat(o) | Command::Consistency(o) | Command::Report(o)) =
        &command;
    let cfg = o.resolve()?;
    if cfg.paper_scale && !matches!(command, Command::Run(_) | Command::Report(_)) {
        eprintln!("warning: --paper-scale runs the {FULL_SCALE_MESHES:?} hierarchy; expect several hours of wall time");
    }
    match command {
        Command::Run(_) => print_toml(&cmd_run(&cfg)?),
        Command::Hierarchy(_) => print_toml(&cmd_hierarchy(&cfg)?),
        Command::Concat(_) => print_toml(&cmd_concat(&cfg)?),
        Command::Consistency(_) => {
            let study = cmd_consistency(&cfg)?;
            println!("{:<12} {:>12} {:>12} {:>12} {:>12}", "phi", "h", "e2", "e3", "e4");
            for r in &study.residuals {
                println!(
                    "{:<12} {:>12.5e} {:>12.4e} {:>12.4e} {:>12.4e}",
                    r.phi_id, r.h, r.e2, r.e3, r.e4
                );
            }
            for v in &study.verdicts {
                if !v.constant {
                    println!(
                        "{}: e2 decreasing {}, e3 decreasing {}",
                        v.phi, v.e2_decreasing, v.e3_decreasing
                    );
                }
                if let Some(ok) = v.e4_nonnegative {
                    println!("{}: e4 nonnegative {ok}", v.phi);
                }
            }
        }
        Command::Report(_) => print!("{}", cmd_report(&cfg)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_EXIT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_with(&e)
        }
    }
}

fn exit_with(e: &Error) -> ExitCode {
    ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
}
