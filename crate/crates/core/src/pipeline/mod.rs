//! End-to-end runs: geometry, measures, transport, potential, chambers and
//! oracle comparisons, driven by a JSON [`RunConfig`].

mod config;
mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::SeedableRng;

pub use config::{load_config, EntropicConfig, ReportConfig, RunConfig, SolverConfig};
pub use report::{
    Check, ChamberSummary, FsSummary, GridSummary, IndependenceRow, Monotonicity, MuSummary, Report, SolverSummary,
    SCHEMA_VERSION,
};

use crate::chambers::{classify, independence_check, label_symmetry, unresolved_fraction, wall_fraction, wall_location_1d, ChamberMap, Label};
use crate::error::{Error, Result};
use crate::geometry::{DualGrid, DualPoint, SimplexGrid, SimplexPoint};
use crate::measures::{c1_closed_form, c1_quadrature, source_measure, target_measure, DiscreteMeasure};
use crate::oracle::{degree_symmetries, m1_slope, pushforward_histogram, symmetry_check, M1ClosedForm};
use crate::potential::{double_legendre, fs_sandwich, ma_measure, mu0_cell, potential_from_duals, ConvexPotential};
use crate::transport::{brenier_map, cyclical_monotonicity_check, solve_entropic, solve_exact, BrenierMap, CostSpec, TransportPlan};

/// Distance from the endpoints of `Δ` excluded from the `m = 1` oracle error.
pub const ORACLE_MARGIN: f64 = 0.02;
/// Distance from `∂Δ` excluded from the per-cell MA-type comparison.
pub const MU_CELL_MARGIN: f64 = 0.02;
/// Probe offsets and interior margin for the chamber independence check.
pub const INDEPENDENCE_OFFSETS: [f64; 2] = [0.05, -0.05];
pub const INDEPENDENCE_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub emit_plan: bool,
    /// Seeds Monte Carlo spot checks only; the solve is deterministic.
    pub seed: u64,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub files: Vec<PathBuf>,
}

/// Exit status for a failed run: 2 for configuration problems, 3 for solver
/// failures, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::InvalidSchedule(_) | Error::Json(_) => 2,
        Error::Infeasible(_)
        | Error::ResourceLimit { .. }
        | Error::NonConvergence { .. }
        | Error::NumericalUnderflow(_)
        | Error::ZeroMass
        | Error::EmptyGrid => 3,
        _ => 1,
    }
}

struct Setup {
    grid: SimplexGrid,
    mu: DiscreteMeasure<SimplexPoint>,
    nu: DiscreteMeasure<DualPoint>,
    report: Report,
}

fn setup(cfg: &RunConfig, mode: &'static str) -> Result<Setup> {
    cfg.validate()?;
    let problem = &cfg.problem;
    let grid = SimplexGrid::new(problem.dim(), cfg.simplex_resolution);
    let dual = DualGrid::new(problem, cfg.dual_resolution);
    let mu = source_measure(&grid)?;
    let nu = target_measure(&dual, problem)?;
    let closed = c1_closed_form(problem);
    let quad = c1_quadrature(problem, 1);
    let c1_relative_error = (quad - closed).abs() / closed;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        mode,
        problem: problem.clone(),
        grid: GridSummary {
            simplex_resolution: cfg.simplex_resolution,
            dual_resolution: cfg.dual_resolution,
            simplex_points: grid.len(),
            dual_points: dual.len(),
            simplex_cells: (cfg.simplex_resolution as usize).pow(problem.m),
        },
        c1_closed_form: closed,
        c1_quadrature: quad,
        c1_relative_error,
        source_mass: mu.weights.iter().sum(),
        target_mass: nu.weights.iter().sum(),
        solver: None,
        duality_gap: None,
        tv_pushforward: None,
        mu: None,
        idempotence_discrepancy: None,
        chambers: None,
        independence: vec![],
        symmetry_discrepancy: None,
        symmetry_label_agreement: None,
        oracle_sup_error: None,
        fs: None,
        monotonicity: None,
        checks: vec![Check::at_most("c1_relative_error", c1_relative_error, 1e-6)],
    };
    Ok(Setup { grid, mu, nu, report })
}

/// Cheap checks only: `C_1`, grid sizes, masses.
pub fn validate(cfg: &RunConfig) -> Result<Report> {
    let mut s = setup(cfg, "validate")?;
    s.report.checks.push(Check::at_most("source_mass_error", (s.report.source_mass - 1.0).abs(), 1e-12));
    s.report.checks.push(Check::at_most("target_mass_error", (s.report.target_mass - 1.0).abs(), 1e-12));
    Ok(s.report)
}

fn solve(cfg: &RunConfig, s: &Setup) -> Result<TransportPlan<SimplexPoint, DualPoint>> {
    match &cfg.solver {
        SolverConfig::Exact => solve_exact(&s.mu, &s.nu, &CostSpec),
        SolverConfig::Entropic(e) => solve_entropic(&s.mu, &s.nu, &CostSpec, &e.params()?),
    }
}

/// Mean ratio and mean absolute error of `Mu(cell) / (C_1 μ_0(cell))` over
/// cells whose corners all keep `MU_CELL_MARGIN` from `∂Δ`.
fn mu_summary(grid: &SimplexGrid, map: &BrenierMap, cfg: &RunConfig) -> MuSummary {
    let problem = &cfg.problem;
    let cells = grid.simplices();
    let c1 = c1_closed_form(problem);
    let total = ma_measure(map, &cells, problem);
    let unit = c1 * mu0_cell(grid);
    let ratios: Vec<f64> = cells
        .iter()
        .filter(|c| c.iter().all(|&i| grid.points[i].coords().iter().all(|&v| v >= MU_CELL_MARGIN)))
        .map(|c| ma_measure(map, std::slice::from_ref(c), problem) / unit)
        .collect();
    let n = ratios.len().max(1) as f64;
    MuSummary {
        total,
        c1,
        total_relative_error: (total - c1).abs() / c1,
        interior_cells: ratios.len(),
        cell_mean_ratio: ratios.iter().sum::<f64>() / n,
        cell_mean_abs_error: ratios.iter().map(|r| (r - 1.0).abs()).sum::<f64>() / n,
    }
}

fn chamber_summary(cmap: &ChamberMap, map: &BrenierMap, m: u32) -> ChamberSummary {
    let mut counts = BTreeMap::new();
    for l in &cmap.labels {
        let key = match l {
            Label::Wall(_) => "wall".to_string(),
            other => other.to_string(),
        };
        *counts.entry(key).or_insert(0) += 1;
    }
    ChamberSummary {
        delta_wall: cmap.delta_wall,
        wall_fraction: wall_fraction(cmap),
        unresolved_fraction: unresolved_fraction(cmap),
        counts,
        wall_cells: cmap.wall_cells.len(),
        wall_location: if m == 1 { wall_location_1d(map).ok() } else { None },
    }
}

/// `sup |m1_slope(T(x)) - u'(x)|` over `x_0 ∈ [margin, 1 - margin]`.
pub fn oracle_sup_error(map: &BrenierMap, oracle: &M1ClosedForm, margin: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (_, x, t) in map.entries() {
        let x0 = x.coords()[0];
        if x0 < margin || x0 > 1.0 - margin {
            continue;
        }
        worst = worst.max((m1_slope(t) - oracle.uprime(x0)?).abs());
    }
    Ok(worst)
}

fn emit<F>(dir: &Path, name: &str, files: &mut Vec<PathBuf>, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let path = dir.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    body(&mut out)?;
    out.flush()?;
    files.push(path);
    Ok(())
}

/// Runs the full pipeline and writes all artifacts into `cfg.output_dir`.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let s = setup(cfg, "run")?;
    let problem = cfg.problem.clone();
    let m = problem.m;
    let plan = solve(cfg, &s)?;
    let Setup { grid, mu, nu, mut report, .. } = s;
    let map = brenier_map(&plan, &problem)?;
    let pot = potential_from_duals(&plan, &problem)?;
    let exact = matches!(cfg.solver, SolverConfig::Exact);

    let r = &mut report;
    r.solver = Some(SolverSummary {
        report: plan.report.clone(),
        achieved_cost: plan.achieved_cost,
        support_size: plan.coupling.nnz(),
    });
    r.duality_gap = Some(plan.report.duality_gap);
    r.checks.push(Check::at_most("marginal_error", plan.report.marginal_error, 1e-7));
    let gap_bound = plan.report.final_eps.map_or(1e-9, |e| e * ((mu.len() * nu.len()) as f64).ln() + 1e-6);
    r.checks.push(Check::within("duality_gap", plan.report.duality_gap, -1e-9, gap_bound));

    let bins = DualGrid::new(&problem, cfg.histogram_resolution());
    let (_, tv) = pushforward_histogram(&map, &mu.weights, &bins.points, &nu);
    r.tv_pushforward = Some(tv);
    r.checks.push(Check::at_most("tv_pushforward", tv, if m == 1 { 0.05 } else { 0.08 }));

    if cfg.report.mu_checks {
        let summary = mu_summary(&grid, &map, cfg);
        // thresholds are calibrated on the one-dimensional instance only
        if m == 1 {
            r.checks.push(Check::at_most("mu_total_relative_error", summary.total_relative_error, 0.02));
            r.checks.push(Check::at_most("mu_cell_mean_abs_error", summary.cell_mean_abs_error, 0.05));
        }
        r.mu = Some(summary);
    }

    let raw = pot.dual_u().expect("potential built from duals");
    let idem = pot
        .simplex_points()
        .iter()
        .zip(raw)
        .map(|(x, u)| (double_legendre(&pot, x.coords()) - u).abs())
        .fold(0.0, f64::max);
    r.idempotence_discrepancy = Some(idem);
    r.checks.push(Check::at_most("idempotence_discrepancy", idem, if m == 1 { 5e-3 } else { 2e-2 }));

    let cmap = if cfg.report.chambers {
        let cmap = classify(&grid, &map, cfg.report.delta_wall, &problem)?;
        let summary = chamber_summary(&cmap, &map, m);
        if let (Some(x), true) = (summary.wall_location, m == 1) {
            let kink = M1ClosedForm::new(&problem)?.kink();
            r.checks.push(Check::at_most("wall_location_error", (x - kink).abs(), grid.spacing()));
        }
        r.chambers = Some(summary);
        let bound = 5e-3 + pot.dual_spacing();
        for k in 0..=m as usize {
            let interior = crate::chambers::chamber_interior(&cmap, k, INDEPENDENCE_MARGIN).len();
            if interior == 0 {
                continue;
            }
            let deviation = independence_check(&pot, &cmap, k, &INDEPENDENCE_OFFSETS, INDEPENDENCE_MARGIN)?;
            r.checks.push(Check::at_most(&format!("independence_chamber_{k}"), deviation, bound));
            r.independence.push(IndependenceRow { chamber: k, interior_points: interior, deviation, bound });
        }
        Some(cmap)
    } else {
        None
    };

    let symmetries: Vec<Vec<usize>> = degree_symmetries(&problem).into_iter().filter(|s| s.iter().enumerate().any(|(i, &v)| i != v)).collect();
    if !symmetries.is_empty() {
        let mut disc: f64 = 0.0;
        let mut agree: f64 = 1.0;
        for sigma in &symmetries {
            disc = disc.max(symmetry_check(&pot, sigma, &problem)?);
            if let Some(c) = &cmap {
                agree = agree.min(label_symmetry(c, sigma));
            }
        }
        r.symmetry_discrepancy = Some(disc);
        r.checks.push(Check::at_most("symmetry_discrepancy", disc, 2e-2));
        if cmap.is_some() {
            r.symmetry_label_agreement = Some(agree);
            r.checks.push(Check::at_least("symmetry_label_agreement", agree, 0.95));
        }
    }

    let oracle = if m == 1 && cfg.report.oracle { Some(M1ClosedForm::new(&problem)?) } else { None };
    if let Some(o) = &oracle {
        let err = oracle_sup_error(&map, o, ORACLE_MARGIN)?;
        r.oracle_sup_error = Some(err);
        r.checks.push(Check::at_most("oracle_sup_error", err, if exact { 0.03 } else { 0.05 }));
    }

    if !cfg.report.fs_ks.is_empty() {
        let rows = fs_sandwich(&pot, &cfg.report.fs_ks)?;
        let ratios: Vec<f64> = rows.windows(2).map(|w| w[0].error / w[1].error).collect();
        for row in &rows {
            r.checks.push(Check::at_least(&format!("fs_lower_k{}", row.k), row.min_diff, row.lower_bound));
            r.checks.push(Check::at_most(&format!("fs_upper_k{}", row.k), row.max_diff, row.slack));
        }
        for (w, ratio) in rows.windows(2).zip(&ratios) {
            r.checks.push(Check::within(&format!("fs_ratio_k{}_k{}", w[0].k, w[1].k), *ratio, 1.5, 3.0));
        }
        r.fs = Some(FsSummary { l_star: pot.dual_lipschitz(), rows, ratios });
    }

    if exact && cfg.report.monotonicity_trials > 0 {
        let mut rng = StdRng::seed_from_u64(opts.seed);
        let worst = cyclical_monotonicity_check(&plan, &CostSpec, cfg.report.monotonicity_trials, &mut rng);
        r.checks.push(Check::at_least("cyclical_monotonicity", worst, -1e-9));
        r.monotonicity = Some(Monotonicity { seed: opts.seed, trials: cfg.report.monotonicity_trials, worst });
    }

    let files = write_artifacts(cfg, opts, &plan, &map, &pot, cmap.as_ref(), oracle.as_ref(), &report)?;
    Ok(RunOutcome { report, files })
}

#[allow(clippy::too_many_arguments)]
fn write_artifacts(
    cfg: &RunConfig,
    opts: &RunOptions,
    plan: &TransportPlan<SimplexPoint, DualPoint>,
    map: &BrenierMap,
    pot: &ConvexPotential,
    cmap: Option<&ChamberMap>,
    oracle: Option<&M1ClosedForm>,
    report: &Report,
) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let labels = cmap.map(|c| c.labels.as_slice());
    emit(dir, "potential.csv", &mut files, |w| pot.write_csv(w, Some(map), labels))?;
    emit(dir, "dual.csv", &mut files, |w| pot.write_dual_csv(w))?;
    emit(dir, "map.csv", &mut files, |w| map.write_csv(w))?;
    if let Some(c) = cmap {
        emit(dir, "chambers.csv", &mut files, |w| c.write_csv(w))?;
        emit(dir, "walls.csv", &mut files, |w| c.write_walls_csv(w))?;
    }
    if let Some(o) = oracle {
        emit(dir, "oracle.csv", &mut files, |w| o.write_csv(w, cfg.simplex_resolution as usize, 2000))?;
    }
    if opts.emit_plan {
        emit(dir, "plan.csv", &mut files, |w| plan.coupling.write_csv(w))?;
    }
    emit(dir, "report.json", &mut files, |w| {
        serde_json::to_writer_pretty(&mut *w, report)?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(files)
}
