//! Flat TOML run configuration. Every field has a default, so an empty file is
//! a valid configuration for the desk-scale Kelvin-Helmholtz study.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eos::{GasParams, Primitive};
use crate::error::{Error, Result};
use crate::grid::{Boundary, Mesh};
use crate::initdata::KhSpec;
use crate::measures::Component;
use crate::scheme::{PressureWork, SchemeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    #[default]
    Kh,
    Uniform,
}

/// Mesh hierarchy used by `paper_scale`.
pub const FULL_SCALE_MESHES: [usize; 5] = [64, 128, 256, 512, 1024];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gamma: f64,
    pub alpha: f64,
    pub eps_visc: f64,
    pub cfl: f64,
    pub pressure_work_form: PressureWork,
    pub boundary: Boundary,

    pub problem: Problem,
    pub seed: u64,
    pub modes: usize,
    pub kh_amp: f64,
    pub kh_j1: f64,
    pub kh_j2: f64,
    /// Primitive `(rho, u, v, p)` of the uniform problem.
    pub uniform_state: [f64; 4],

    /// Resolution of the single-mesh `run` command.
    pub n: usize,
    /// Hierarchy for `hierarchy`, `concat` and `consistency`, coarsest first.
    pub meshes: Vec<usize>,
    pub paper_scale: bool,
    pub t_end: f64,
    pub output_dt: f64,
    pub snapshot_dt: f64,
    pub out_dir: PathBuf,

    pub tau: f64,
    /// Forward-difference window of entropy production rates, in output samples.
    pub window: usize,
    pub dafermos_tol: f64,

    /// `rho`, `mx`, `my`, `E` or `sliced`.
    pub distance_component: String,
    pub distance_q: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            alpha: 1.0,
            eps_visc: 2.0,
            cfl: 0.4,
            pressure_work_form: PressureWork::Averaged,
            boundary: Boundary::Periodic,
            problem: Problem::Kh,
            seed: 42,
            modes: 10,
            kh_amp: 0.01,
            kh_j1: 0.25,
            kh_j2: 0.75,
            uniform_state: [1.0, 0.0, 0.0, 1.0],
            n: 64,
            meshes: vec![16, 32, 64, 128],
            paper_scale: false,
            t_end: 2.0,
            output_dt: 0.02,
            snapshot_dt: 0.1,
            out_dir: PathBuf::from("out"),
            tau: 1.0,
            window: 8,
            dafermos_tol: 1e-10,
            distance_component: "rho".into(),
            distance_q: 1.0,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.gas()?;
        self.scheme()?;
        Mesh::new(self.n, self.boundary)?;
        let meshes = self.hierarchy_meshes();
        if meshes.is_empty() {
            return Err(Error::Config("mesh list is empty".into()));
        }
        for m in &meshes {
            Mesh::new(*m, self.boundary).map_err(|e| Error::Config(e.to_string()))?;
        }
        // a repeated entry is allowed so that degenerate hierarchies can be formed
        if meshes.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config(format!("meshes must be increasing, got {meshes:?}")));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.output_dt > 0.0) || !(self.snapshot_dt > 0.0) {
            return Err(Error::Config("output_dt and snapshot_dt must be positive".into()));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::Config(format!("tau must be nonnegative, got {}", self.tau)));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if !(self.kh_j1 < self.kh_j2) || self.modes == 0 {
            return Err(Error::Config("KH data needs j1 < j2 and at least one mode".into()));
        }
        self.component()?;
        if !(self.distance_q >= 1.0) {
            return Err(Error::Config("distance_q must be >= 1".into()));
        }
        Ok(())
    }

    pub fn gas(&self) -> Result<GasParams> {
        GasParams::new(self.gamma)
    }

    pub fn scheme(&self) -> Result<SchemeParams> {
        SchemeParams::new(self.alpha, self.eps_visc, self.cfl, self.pressure_work_form)
    }

    pub fn kh(&self) -> KhSpec {
        KhSpec {
            modes: self.modes,
            amp: self.kh_amp,
            j1: self.kh_j1,
            j2: self.kh_j2,
            seed: self.seed,
            coeffs: None,
        }
    }

    pub fn uniform_primitive(&self) -> Primitive {
        let [rho, u, v, p] = self.uniform_state;
        Primitive::new(rho, [u, v], p)
    }

    pub fn hierarchy_meshes(&self) -> Vec<usize> {
        if self.paper_scale {
            FULL_SCALE_MESHES.to_vec()
        } else {
            self.meshes.clone()
        }
    }

    pub fn component(&self) -> Result<Component> {
        let c: Component = self.distance_component.parse()?;
        Ok(match c {
            Component::Sliced { .. } => Component::Sliced { seed: self.seed },
            other => other,
        })
    }

    /// `0, dt, 2 dt, ...` up to `t_end` (always included) plus `extra` times.
    pub fn sample_times(&self, dt: f64, extra: &[f64]) -> Vec<f64> {
        let count = (self.t_end / dt - 1e-9).ceil() as usize;
        let mut times: Vec<f64> = (0..count).map(|k| k as f64 * dt).collect();
        times.push(self.t_end);
        for &t in extra {
            if (0.0..=self.t_end).contains(&t) {
                times.push(t);
            }
        }
        times.sort_by(f64::total_cmp);
        times.dedup_by(|b, a| (*b - *a).abs() <= 1e-9 * a.abs().max(1.0));
        times
    }

    pub fn output_times(&self) -> Vec<f64> {
        self.sample_times(self.output_dt, &[self.tau])
    }
}
