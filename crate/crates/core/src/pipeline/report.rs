use std::collections::BTreeMap;

use serde::Serialize;

use crate::geometry::ProblemConfig;
use crate::potential::FsRow;
use crate::transport::SolverReport;

pub const SCHEMA_VERSION: u32 = 1;

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub mode: &'static str,
    pub problem: ProblemConfig,
    pub grid: GridSummary,
    pub c1_closed_form: f64,
    pub c1_quadrature: f64,
    pub c1_relative_error: f64,
    pub source_mass: f64,
    pub target_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_pushforward: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idempotence_discrepancy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chambers: Option<ChamberSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub independence: Vec<IndependenceRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry_discrepancy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry_label_agreement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_sup_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fs: Option<FsSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotonicity: Option<Monotonicity>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub simplex_resolution: u32,
    pub dual_resolution: u32,
    pub simplex_points: usize,
    pub dual_points: usize,
    pub simplex_cells: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverSummary {
    #[serde(flatten)]
    pub report: SolverReport,
    pub achieved_cost: f64,
    pub support_size: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MuSummary {
    pub total: f64,
    pub c1: f64,
    pub total_relative_error: f64,
    pub interior_cells: usize,
    /// Mean of `Mu(cell) / (C_1 μ_0(cell))`.
    pub cell_mean_ratio: f64,
    /// Mean of `|Mu(cell) / (C_1 μ_0(cell)) - 1|`.
    pub cell_mean_abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChamberSummary {
    pub delta_wall: f64,
    pub wall_fraction: f64,
    pub unresolved_fraction: f64,
    pub counts: BTreeMap<String, usize>,
    pub wall_cells: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_location: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceRow {
    pub chamber: usize,
    pub interior_points: usize,
    pub deviation: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FsSummary {
    pub l_star: f64,
    pub rows: Vec<FsRow>,
    /// `error(k) / error(2k)` for consecutive entries.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Monotonicity {
    pub seed: u64,
    pub trials: usize,
    pub worst: f64,
}

/// One thresholded quantity.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, upper: f64) -> Self {
        Check { name: name.into(), value, lower: None, upper: Some(upper), pass: value <= upper }
    }

    pub fn at_least(name: &str, value: f64, lower: f64) -> Self {
        Check { name: name.into(), value, lower: Some(lower), upper: None, pass: value >= lower }
    }

    pub fn within(name: &str, value: f64, lower: f64, upper: f64) -> Self {
        Check { name: name.into(), value, lower: Some(lower), upper: Some(upper), pass: (lower..=upper).contains(&value) }
    }
}

impl Report {
    pub fn breaches(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}
