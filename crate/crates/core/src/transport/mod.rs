//! Discrete Kantorovich problem between the source and target measures.
//!
//! The cost is `½|x̂ - p̂|²` in reduced coordinates. Since
//! `½|x̂ - p̂|² = ½|x̂|² + ½|p̂|² - <x, p> + p_0`, this differs from `-<x, p>`
//! by terms separable in source and target, so both backends return the same
//! optimal plans as the full pairing would.

pub mod network_simplex;
pub mod sinkhorn;

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::{fmt_f64, write_row};
use crate::geometry::{DualPoint, ProblemConfig, SimplexPoint};
use crate::measures::{DiscreteMeasure, Support};

pub use network_simplex::NetworkSimplex;
pub use sinkhorn::{EpsSchedule, SinkhornParams};

/// Largest `rows * cols` accepted by the exact backend.
pub const EXACT_SIZE_CAP: usize = 25_000_000;

/// Quadratic cost in reduced coordinates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CostSpec;

impl CostSpec {
    #[inline]
    pub fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        0.5 * x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    }

    /// Dense row-major cost matrix.
    pub fn matrix<S: Support, T: Support>(&self, mu: &DiscreteMeasure<S>, nu: &DiscreteMeasure<T>) -> Vec<f64> {
        let mut out = Vec::with_capacity(mu.len() * nu.len());
        for x in &mu.points {
            for p in &nu.points {
                out.push(self.eval(x.reduced(), p.reduced()));
            }
        }
        out
    }
}

/// Sparse nonnegative matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    values: Vec<f64>,
}

impl Coupling {
    /// Builds from `(row, col, mass)` triplets; duplicates are summed and
    /// zero entries dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "triplet out of range");
            if v == 0.0 {
                continue;
            }
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            row_offsets[i + 1] += 1;
            col_indices.push(j as u32);
            values.push(v);
            last = Some((i, j));
        }
        for i in 0..rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Coupling { rows, cols, row_offsets, col_indices, values }
    }

    pub fn from_dense(rows: usize, cols: usize, dense: &[f64]) -> Self {
        let triplets = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(e, &v)| (e / cols, e % cols, v))
            .collect();
        Self::from_triplets(rows, cols, triplets)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .zip(&self.values[range])
            .map(|(&j, &v)| (j as usize, v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (_, j, v) in self.iter() {
            out[j] += v;
        }
        out
    }

    /// Triplet CSV `i,j,mass`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        write_row(out, &["i".into(), "j".into(), "mass".into()])?;
        for (i, j, v) in self.iter() {
            write_row(out, &[i.to_string(), j.to_string(), fmt_f64(v)])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Exact,
    Entropic,
}

/// Kantorovich potentials: `f` on source atoms, `g` on target atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Duals {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub backend: Backend,
    /// Sinkhorn iterations summed over levels (0 for the exact backend).
    pub iterations: usize,
    pub level_iterations: Vec<usize>,
    pub pivots: usize,
    pub final_eps: Option<f64>,
    /// `cost - (Σ f μ + Σ g ν)` with feasible duals (`f_i + g_j <= c_ij`).
    pub duality_gap: f64,
    /// L1 marginal violation of the returned coupling (rows plus columns).
    pub marginal_error: f64,
    pub elapsed_seconds: f64,
}

/// A coupling between two discrete measures.
#[derive(Debug, Clone)]
pub struct TransportPlan<S, T> {
    pub coupling: Coupling,
    pub source: DiscreteMeasure<S>,
    pub target: DiscreteMeasure<T>,
    pub achieved_cost: f64,
    pub duals: Option<Duals>,
    pub report: SolverReport,
}

impl<S: Support, T: Support> TransportPlan<S, T> {
    /// Wraps a hand-built coupling; no duals are attached.
    pub fn from_coupling(
        coupling: Coupling,
        source: DiscreteMeasure<S>,
        target: DiscreteMeasure<T>,
        cost: &CostSpec,
    ) -> Self {
        let achieved_cost = coupling
            .iter()
            .map(|(i, j, v)| v * cost.eval(source.points[i].reduced(), target.points[j].reduced()))
            .sum();
        let marginal_error = marginal_error(&coupling, &source, &target);
        TransportPlan {
            coupling,
            source,
            target,
            achieved_cost,
            duals: None,
            report: SolverReport {
                backend: Backend::Exact,
                iterations: 0,
                level_iterations: vec![],
                pivots: 0,
                final_eps: None,
                duality_gap: f64::NAN,
                marginal_error,
                elapsed_seconds: 0.0,
            },
        }
    }
}

fn marginal_error<S, T>(coupling: &Coupling, mu: &DiscreteMeasure<S>, nu: &DiscreteMeasure<T>) -> f64 {
    let rows: f64 = coupling.row_sums().iter().zip(&mu.weights).map(|(a, b)| (a - b).abs()).sum();
    let cols: f64 = coupling.col_sums().iter().zip(&nu.weights).map(|(a, b)| (a - b).abs()).sum();
    rows + cols
}

fn check_masses<S, T>(mu: &DiscreteMeasure<S>, nu: &DiscreteMeasure<T>) -> Result<()> {
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if (mu.total_mass - nu.total_mass).abs() > 1e-9 * mu.total_mass.max(nu.total_mass) {
        return Err(Error::Infeasible(format!(
            "total masses differ: {} vs {}",
            mu.total_mass, nu.total_mass
        )));
    }
    Ok(())
}

fn dual_objective<S, T>(f: &[f64], g: &[f64], mu: &DiscreteMeasure<S>, nu: &DiscreteMeasure<T>) -> f64 {
    f.iter().zip(&mu.weights).map(|(a, b)| a * b).sum::<f64>()
        + g.iter().zip(&nu.weights).map(|(a, b)| a * b).sum::<f64>()
}

/// Exact optimal plan by network simplex.
pub fn solve_exact<S: Support, T: Support>(
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<T>,
    cost: &CostSpec,
) -> Result<TransportPlan<S, T>> {
    check_masses(mu, nu)?;
    if mu.len().saturating_mul(nu.len()) > EXACT_SIZE_CAP {
        return Err(Error::ResourceLimit { rows: mu.len(), cols: nu.len() });
    }
    let start = Instant::now();
    let costs = cost.matrix(mu, nu);
    let sol = NetworkSimplex::new(&mu.weights, &nu.weights, &costs).solve();
    let coupling = Coupling::from_triplets(mu.len(), nu.len(), sol.flows);
    let duality_gap = sol.cost - dual_objective(&sol.f, &sol.g, mu, nu);
    let marginal_error = marginal_error(&coupling, mu, nu);
    Ok(TransportPlan {
        coupling,
        source: mu.clone(),
        target: nu.clone(),
        achieved_cost: sol.cost,
        duals: Some(Duals { f: sol.f, g: sol.g }),
        report: SolverReport {
            backend: Backend::Exact,
            iterations: 0,
            level_iterations: vec![],
            pivots: sol.pivots,
            final_eps: None,
            duality_gap,
            marginal_error,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Entropic plan by log-domain Sinkhorn, rounded onto the transport polytope.
///
/// The returned duals are the entropic potentials at the final epsilon. The
/// reported duality gap uses their hard c-transform on the source side, which
/// is feasible for the unregularized dual.
pub fn solve_entropic<S: Support, T: Support>(
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<T>,
    cost: &CostSpec,
    params: &SinkhornParams,
) -> Result<TransportPlan<S, T>> {
    check_masses(mu, nu)?;
    let start = Instant::now();
    let costs = cost.matrix(mu, nu);
    let out = sinkhorn::sinkhorn(&mu.weights, &nu.weights, &costs, params)?;
    let (ns, nt) = (mu.len(), nu.len());
    let achieved_cost: f64 = out.plan.iter().zip(&costs).map(|(p, c)| p * c).sum();
    let coupling = Coupling::from_dense(ns, nt, &out.plan);
    let f_feasible: Vec<f64> = (0..ns)
        .map(|i| {
            (0..nt)
                .map(|j| costs[i * nt + j] - out.g[j])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let duality_gap = achieved_cost - dual_objective(&f_feasible, &out.g, mu, nu);
    let marginal_error = marginal_error(&coupling, mu, nu);
    Ok(TransportPlan {
        coupling,
        source: mu.clone(),
        target: nu.clone(),
        achieved_cost,
        duals: Some(Duals { f: out.f, g: out.g }),
        report: SolverReport {
            backend: Backend::Entropic,
            iterations: out.iterations,
            level_iterations: out.level_iterations,
            pivots: 0,
            final_eps: Some(params.schedule.final_eps()),
            duality_gap,
            marginal_error,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Barycentric projection `Σ_j π_ij p̂_j / Σ_j π_ij` in reduced coordinates;
/// `None` for rows without mass.
pub fn barycentric_projection<S: Support, T: Support>(plan: &TransportPlan<S, T>) -> Vec<Option<Vec<f64>>> {
    let dim = plan.target.points[0].reduced().len();
    (0..plan.source.len())
        .map(|i| {
            let mut mass = 0.0;
            let mut acc = vec![0.0; dim];
            for (j, v) in plan.coupling.row(i) {
                mass += v;
                for (a, p) in acc.iter_mut().zip(plan.target.points[j].reduced()) {
                    *a += v * p;
                }
            }
            (mass > 0.0).then(|| acc.into_iter().map(|a| a / mass).collect())
        })
        .collect()
}

/// Discrete gradient map `x_i ↦ T(x_i)`.
#[derive(Debug, Clone)]
pub struct BrenierMap {
    pub points: Vec<SimplexPoint>,
    pub images: Vec<Option<DualPoint>>,
    /// Source atoms without mass, for which no image is defined.
    pub skipped: Vec<usize>,
}

impl BrenierMap {
    pub fn entries(&self) -> impl Iterator<Item = (usize, &SimplexPoint, &DualPoint)> {
        self.points
            .iter()
            .zip(&self.images)
            .enumerate()
            .filter_map(|(i, (x, t))| t.as_ref().map(|t| (i, x, t)))
    }

    pub fn image(&self, i: usize) -> Option<&DualPoint> {
        self.images[i].as_ref()
    }

    /// CSV `x0..xm, t0..tm` (canonical gradient coordinates).
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let m1 = self.points.first().map_or(0, |p| p.coords().len());
        let mut header = crate::export::coord_header("x", m1);
        header.extend(crate::export::coord_header("t", m1));
        write_row(out, &header)?;
        for (_, x, t) in self.entries() {
            let mut row = crate::export::floats(x.coords());
            row.extend(crate::export::floats(t.coords()));
            write_row(out, &row)?;
        }
        Ok(())
    }
}

/// Barycentric projection re-canonicalized onto `Δ^∨`.
pub fn brenier_map(plan: &TransportPlan<SimplexPoint, DualPoint>, cfg: &ProblemConfig) -> Result<BrenierMap> {
    let mut skipped = Vec::new();
    let mut images = Vec::with_capacity(plan.source.len());
    for (i, bary) in barycentric_projection(plan).into_iter().enumerate() {
        match bary {
            Some(hat) => images.push(Some(DualPoint::from_reduced(&hat, cfg)?)),
            None => {
                skipped.push(i);
                images.push(None);
            }
        }
    }
    Ok(BrenierMap { points: plan.source.points.clone(), images, skipped })
}

/// Samples `trials` pairs from the support and returns the most negative
/// value of `c(x,p') + c(x',p) - c(x,p) - c(x',p')`, or `0` if none is negative.
pub fn cyclical_monotonicity_check<S: Support, T: Support, R: Rng>(
    plan: &TransportPlan<S, T>,
    cost: &CostSpec,
    trials: usize,
    rng: &mut R,
) -> f64 {
    let support: Vec<(usize, usize)> = plan.coupling.iter().map(|(i, j, _)| (i, j)).collect();
    if support.len() < 2 {
        return 0.0;
    }
    let c = |i: usize, j: usize| cost.eval(plan.source.points[i].reduced(), plan.target.points[j].reduced());
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (i, j) = support[rng.gen_range(0..support.len())];
        let (k, l) = support[rng.gen_range(0..support.len())];
        let gain = c(i, l) + c(k, j) - c(i, j) - c(k, l);
        worst = worst.min(gain);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::EuclidPoint;
    use rand::SeedableRng;

    fn line(points: &[f64], weights: &[f64]) -> DiscreteMeasure<EuclidPoint> {
        DiscreteMeasure::new(points.iter().map(|&v| EuclidPoint(vec![v])).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn single_atom() {
        let mu = line(&[0.2], &[1.0]);
        let nu = line(&[0.7], &[1.0]);
        let exact = solve_exact(&mu, &nu, &CostSpec).unwrap();
        assert_eq!(exact.coupling.iter().collect::<Vec<_>>(), vec![(0, 0, 1.0)]);
        assert!((exact.achieved_cost - 0.125).abs() < 1e-15);
        let ent = solve_entropic(&mu, &nu, &CostSpec, &SinkhornParams::default()).unwrap();
        assert_eq!(ent.coupling.iter().collect::<Vec<_>>(), vec![(0, 0, 1.0)]);
    }

    #[test]
    fn identical_two_atoms_give_identity() {
        let mu = line(&[0.0, 1.0], &[0.5, 0.5]);
        let plan = solve_exact(&mu, &mu, &CostSpec).unwrap();
        assert_eq!(plan.achieved_cost, 0.0);
        assert_eq!(plan.coupling.iter().collect::<Vec<_>>(), vec![(0, 0, 0.5), (1, 1, 0.5)]);
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        assert_eq!(cyclical_monotonicity_check(&plan, &CostSpec, 100, &mut rng), 0.0);
    }

    #[test]
    fn swapped_coupling_is_detected() {
        // c(0,1)+c(1,0)-c(0,0)-c(1,1) = 2*0.5 - 0 = 1 for the optimal pairing,
        // so the swapped plan sees -1 on the cross pair.
        let mu = line(&[0.0, 1.0], &[0.5, 0.5]);
        let swapped = Coupling::from_triplets(2, 2, vec![(0, 1, 0.5), (1, 0, 0.5)]);
        let plan = TransportPlan::from_coupling(swapped, mu.clone(), mu, &CostSpec);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let v = cyclical_monotonicity_check(&plan, &CostSpec, 200, &mut rng);
        assert!((v + 1.0).abs() < 1e-15, "{v}");
    }

    #[test]
    fn infeasible_and_size_cap() {
        let mu = line(&[0.0], &[1.0]);
        let nu = line(&[0.0], &[0.5]);
        assert!(matches!(solve_exact(&mu, &nu, &CostSpec), Err(Error::Infeasible(_))));
        let big = line(&vec![0.0; 5001], &vec![1.0 / 5001.0; 5001]);
        assert!(matches!(solve_exact(&big, &big, &CostSpec), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn barycentric_map_of_identity() {
        let mu = line(&[0.1, 0.4, 0.9], &[0.2, 0.3, 0.5]);
        let id = Coupling::from_triplets(3, 3, vec![(0, 0, 0.2), (1, 1, 0.3), (2, 2, 0.5)]);
        let plan = TransportPlan::from_coupling(id, mu.clone(), mu, &CostSpec);
        let t = barycentric_projection(&plan);
        for (ti, x) in t.iter().zip([0.1, 0.4, 0.9]) {
            assert!((ti.as_ref().unwrap()[0] - x).abs() < 1e-15);
        }
        assert!(plan.duals.is_none());
    }

    /// Monotone rearrangement: the optimal 1-D map sends the CDF quantile of
    /// each source atom to the same quantile of the target.
    fn quantile_barycenters(mu: &DiscreteMeasure<EuclidPoint>, nu: &DiscreteMeasure<EuclidPoint>) -> Vec<f64> {
        let mut out = Vec::new();
        let mut j = 0;
        let mut left_in_j = nu.weights[0];
        for &w in &mu.weights {
            let mut need = w;
            let mut acc = 0.0;
            while need > 1e-15 {
                let take = need.min(left_in_j);
                acc += take * nu.points[j].0[0];
                need -= take;
                left_in_j -= take;
                if left_in_j <= 1e-15 && j + 1 < nu.len() {
                    j += 1;
                    left_in_j = nu.weights[j];
                }
            }
            out.push(acc / w);
        }
        out
    }

    #[test]
    fn uniform_to_uniform_is_monotone() {
        let n = 40;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let w = vec![1.0 / (n + 1) as f64; n + 1];
        let ys: Vec<f64> = (0..=2 * n).map(|i| i as f64 / (2 * n) as f64).collect();
        let wy = vec![1.0 / (2 * n + 1) as f64; 2 * n + 1];
        let mu = line(&xs, &w);
        let nu = line(&ys, &wy);
        let plan = solve_exact(&mu, &nu, &CostSpec).unwrap();
        let oracle = quantile_barycenters(&mu, &nu);
        let t = barycentric_projection(&plan);
        for i in 0..=n {
            let ti = t[i].as_ref().unwrap()[0];
            assert!((ti - oracle[i]).abs() < 1e-12, "atom {i}: {ti} vs {}", oracle[i]);
            assert!((ti - xs[i]).abs() <= 1.0 / n as f64);
        }
        assert!(plan.report.duality_gap.abs() <= 1e-9 * plan.achieved_cost.max(1e-300) + 1e-15);

        let ent = solve_entropic(&mu, &nu, &CostSpec, &SinkhornParams::default()).unwrap();
        let te = barycentric_projection(&ent);
        let bound = (1.0 / n as f64).max(3.0 * 1e-3f64.sqrt());
        for i in 0..=n {
            assert!((te[i].as_ref().unwrap()[0] - oracle[i]).abs() <= bound);
        }
        assert!(ent.achieved_cost >= plan.achieved_cost - 1e-10);
        assert!(ent.report.marginal_error <= 1e-7);
    }

    #[test]
    fn permutation_equivariance() {
        let mu = line(&[0.0, 0.3, 0.5, 0.9], &[0.1, 0.4, 0.3, 0.2]);
        let nu = line(&[0.2, 0.25, 0.8], &[0.5, 0.3, 0.2]);
        let base = solve_exact(&mu, &nu, &CostSpec).unwrap();
        let perm = [2usize, 0, 3, 1];
        let mu_p = DiscreteMeasure::new(
            perm.iter().map(|&i| mu.points[i].clone()).collect(),
            perm.iter().map(|&i| mu.weights[i]).collect(),
        )
        .unwrap();
        let nu_p = DiscreteMeasure::new(nu.points.iter().rev().cloned().collect(), nu.weights.iter().rev().copied().collect()).unwrap();
        let other = solve_exact(&mu_p, &nu_p, &CostSpec).unwrap();
        assert!((base.achieved_cost - other.achieved_cost).abs() < 1e-15);
        for (i, j, v) in other.coupling.iter() {
            let bi = perm[i];
            let bj = nu.len() - 1 - j;
            let orig = base.coupling.row(bi).find(|(c, _)| *c == bj).map_or(0.0, |(_, v)| v);
            assert!((orig - v).abs() < 1e-15);
        }
    }
}
