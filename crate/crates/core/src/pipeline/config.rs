use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ProblemConfig;
use crate::transport::{EpsSchedule, SinkhornParams};

/// A full run: problem, grids, solver, outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub simplex_resolution: u32,
    pub dual_resolution: u32,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Relative paths are resolved against the directory of the config file.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub report: ReportConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolverConfig {
    #[default]
    Exact,
    Entropic(EntropicConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropicConfig {
    pub eps_start: f64,
    pub eps_final: f64,
    pub eps_factor: f64,
    pub tol: f64,
    pub intermediate_tol: f64,
    pub max_iter: usize,
}

impl Default for EntropicConfig {
    fn default() -> Self {
        let p = SinkhornParams::default();
        EntropicConfig {
            eps_start: p.schedule.levels()[0],
            eps_final: p.schedule.final_eps(),
            eps_factor: 2.0,
            tol: p.tol,
            intermediate_tol: p.intermediate_tol,
            max_iter: p.max_iter,
        }
    }
}

impl EntropicConfig {
    pub fn params(&self) -> Result<SinkhornParams> {
        let schedule = EpsSchedule::geometric(self.eps_start, self.eps_final, self.eps_factor)
            .map_err(|e| Error::InvalidConfig(format!("solver: {e}")))?;
        if !(self.tol > 0.0 && self.intermediate_tol > 0.0) {
            return Err(Error::InvalidConfig("solver.tol: tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("solver.max_iter: must be positive".into()));
        }
        Ok(SinkhornParams { schedule, max_iter: self.max_iter, tol: self.tol, intermediate_tol: self.intermediate_tol })
    }
}

/// Which diagnostics go into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub oracle: bool,
    pub chambers: bool,
    pub mu_checks: bool,
    pub fs_ks: Vec<u32>,
    pub delta_wall: f64,
    /// Dual resolution of the pushforward histogram bins; by default 10 for
    /// `m = 1` and 5 otherwise.
    pub histogram_resolution: Option<u32>,
    pub monotonicity_trials: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            oracle: true,
            chambers: true,
            mu_checks: true,
            fs_ks: vec![4, 8, 16, 32],
            delta_wall: crate::chambers::DELTA_WALL,
            histogram_resolution: None,
            monotonicity_trials: 10_000,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        for (name, v) in [("simplex_resolution", self.simplex_resolution), ("dual_resolution", self.dual_resolution)] {
            if v < 2 {
                return Err(Error::InvalidConfig(format!("{name}: must be >= 2, got {v}")));
            }
        }
        if let SolverConfig::Entropic(e) = &self.solver {
            e.params()?;
        }
        let r = &self.report;
        if !(r.delta_wall > 0.0) {
            return Err(Error::InvalidConfig(format!("report.delta_wall: must be positive, got {}", r.delta_wall)));
        }
        if r.fs_ks.contains(&0) {
            return Err(Error::InvalidConfig("report.fs_ks: entries must be positive".into()));
        }
        if r.histogram_resolution == Some(0) {
            return Err(Error::InvalidConfig("report.histogram_resolution: must be positive".into()));
        }
        Ok(())
    }

    pub fn histogram_resolution(&self) -> u32 {
        self.report.histogram_resolution.unwrap_or(if self.problem.m == 1 { 10 } else { 5 })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::InvalidConfig(format!("{path}: {}", e.into_inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Reads and validates a config; relative output paths are anchored at the
/// file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if cfg.output_dir.is_relative() {
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.output_dir = base.join(&cfg.output_dir);
    }
    Ok(cfg)
}
