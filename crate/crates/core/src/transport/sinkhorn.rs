//! Log-domain Sinkhorn with epsilon scaling.

use crate::error::{Error, Result};

/// Strictly decreasing sequence of regularization strengths.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EpsSchedule {
    levels: Vec<f64>,
}

impl EpsSchedule {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSchedule("schedule is empty".into()));
        }
        if levels.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidSchedule("levels must be positive and finite".into()));
        }
        if levels.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSchedule("levels must be strictly decreasing".into()));
        }
        Ok(EpsSchedule { levels })
    }

    /// `start, start/factor, ...` down to (and ending exactly at) `end`.
    pub fn geometric(start: f64, end: f64, factor: f64) -> Result<Self> {
        if !(factor > 1.0) || !(start >= end) {
            return Err(Error::InvalidSchedule(format!(
                "need start >= end and factor > 1, got {start}, {end}, {factor}"
            )));
        }
        let mut levels = Vec::new();
        let mut eps = start;
        while eps > end * (1.0 + 1e-12) {
            levels.push(eps);
            eps /= factor;
        }
        levels.push(end);
        Self::new(levels)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn final_eps(&self) -> f64 {
        *self.levels.last().unwrap()
    }
}

impl Default for EpsSchedule {
    fn default() -> Self {
        EpsSchedule::geometric(0.1, 1e-3, 2.0).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SinkhornParams {
    pub schedule: EpsSchedule,
    /// Iteration cap per level.
    pub max_iter: usize,
    /// Row-marginal L1 error at which the final level stops.
    pub tol: f64,
    /// Stopping tolerance on the intermediate levels.
    pub intermediate_tol: f64,
}

impl Default for SinkhornParams {
    fn default() -> Self {
        SinkhornParams {
            schedule: EpsSchedule::default(),
            max_iter: 10_000,
            tol: 1e-8,
            intermediate_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SinkhornOutput {
    /// Plan after rounding onto the transport polytope, row-major dense.
    pub plan: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub iterations: usize,
    pub level_iterations: Vec<usize>,
    /// Row-marginal L1 error before rounding.
    pub marginal_error: f64,
}

fn log_weights(w: &[f64]) -> Vec<f64> {
    w.iter().map(|&v| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }).collect()
}

/// `-eps * log Σ_k exp(logw_k + (pot_k - c_k) / eps)`.
#[inline]
fn soft_min(costs: &[f64], pot: &[f64], logw: &[f64], inv_eps: f64, scratch: &mut [f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for k in 0..costs.len() {
        let z = logw[k] + (pot[k] - costs[k]) * inv_eps;
        scratch[k] = z;
        if z > max {
            max = z;
        }
    }
    if max == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let mut s = 0.0;
    for &z in scratch.iter() {
        s += (z - max).exp();
    }
    -(max + s.ln()) / inv_eps
}

/// Solves entropic OT between `a` and `b` for the row-major cost matrix.
pub fn sinkhorn(a: &[f64], b: &[f64], cost: &[f64], params: &SinkhornParams) -> Result<SinkhornOutput> {
    let ns = a.len();
    let nt = b.len();
    assert_eq!(cost.len(), ns * nt);
    let mut cost_t = vec![0.0; ns * nt];
    for i in 0..ns {
        for j in 0..nt {
            cost_t[j * ns + i] = cost[i * nt + j];
        }
    }
    let log_a = log_weights(a);
    let log_b = log_weights(b);
    let mut f = vec![0.0; ns];
    let mut g = vec![0.0; nt];
    let mut f_new = vec![0.0; ns];
    let mut scratch = vec![0.0; ns.max(nt)];
    let mut iterations = 0;
    let mut level_iterations = Vec::new();
    let mut marginal_error = f64::INFINITY;
    let levels = params.schedule.levels();

    for (level, &eps) in levels.iter().enumerate() {
        let inv_eps = 1.0 / eps;
        let tol = if level + 1 == levels.len() { params.tol } else { params.intermediate_tol };
        let update_g = |f: &[f64], g: &mut [f64], scratch: &mut [f64]| {
            for j in 0..nt {
                g[j] = soft_min(&cost_t[j * ns..(j + 1) * ns], f, &log_a, inv_eps, &mut scratch[..ns]);
            }
        };
        for i in 0..ns {
            f[i] = soft_min(&cost[i * nt..(i + 1) * nt], &g, &log_b, inv_eps, &mut scratch[..nt]);
        }
        update_g(&f, &mut g, &mut scratch);
        let mut count = 1;
        loop {
            // the next row update measures the current row-marginal error
            let mut err = 0.0;
            for i in 0..ns {
                f_new[i] =
                    soft_min(&cost[i * nt..(i + 1) * nt], &g, &log_b, inv_eps, &mut scratch[..nt]);
                if a[i] > 0.0 {
                    err += a[i] * (((f[i] - f_new[i]) * inv_eps).exp() - 1.0).abs();
                }
            }
            if f_new.iter().chain(g.iter()).any(|v| !v.is_finite()) || !err.is_finite() {
                return Err(Error::NumericalUnderflow(eps));
            }
            marginal_error = err;
            if err <= tol {
                break;
            }
            if count >= params.max_iter {
                return Err(Error::NonConvergence { eps, iterations: count, error: err });
            }
            std::mem::swap(&mut f, &mut f_new);
            update_g(&f, &mut g, &mut scratch);
            count += 1;
        }
        iterations += count;
        level_iterations.push(count);
    }

    let eps = params.schedule.final_eps();
    let inv_eps = 1.0 / eps;
    let mut plan = vec![0.0; ns * nt];
    for i in 0..ns {
        for j in 0..nt {
            let e = log_a[i] + log_b[j] + (f[i] + g[j] - cost[i * nt + j]) * inv_eps;
            plan[i * nt + j] = e.exp();
        }
    }
    round_to_polytope(&mut plan, a, b);
    Ok(SinkhornOutput { plan, f, g, iterations, level_iterations, marginal_error })
}

/// Projects a nonnegative matrix onto `{π >= 0 : π 1 = a, π^T 1 = b}` by
/// row/column down-scaling followed by a rank-one correction of the deficit.
pub fn round_to_polytope(plan: &mut [f64], a: &[f64], b: &[f64]) {
    let ns = a.len();
    let nt = b.len();
    for i in 0..ns {
        let row = &mut plan[i * nt..(i + 1) * nt];
        let s: f64 = row.iter().sum();
        if s > a[i] {
            let scale = a[i] / s;
            row.iter_mut().for_each(|v| *v *= scale);
        }
    }
    let mut col = vec![0.0; nt];
    for i in 0..ns {
        for j in 0..nt {
            col[j] += plan[i * nt + j];
        }
    }
    let col_scale: Vec<f64> = (0..nt)
        .map(|j| if col[j] > b[j] { b[j] / col[j] } else { 1.0 })
        .collect();
    for i in 0..ns {
        for j in 0..nt {
            plan[i * nt + j] *= col_scale[j];
        }
    }
    let err_r: Vec<f64> = (0..ns)
        .map(|i| (a[i] - plan[i * nt..(i + 1) * nt].iter().sum::<f64>()).max(0.0))
        .collect();
    let mut err_c = b.to_vec();
    for i in 0..ns {
        for j in 0..nt {
            err_c[j] -= plan[i * nt + j];
        }
    }
    err_c.iter_mut().for_each(|v| *v = v.max(0.0));
    let total: f64 = err_r.iter().sum();
    if total > 0.0 {
        for i in 0..ns {
            if err_r[i] == 0.0 {
                continue;
            }
            for j in 0..nt {
                plan[i * nt + j] += err_r[i] * err_c[j] / total;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_validation() {
        let s = EpsSchedule::default();
        assert_eq!(s.levels()[0], 0.1);
        assert_eq!(s.final_eps(), 1e-3);
        assert!(s.levels().windows(2).all(|w| w[1] < w[0]));
        assert!(EpsSchedule::new(vec![0.1, 0.1]).is_err());
        assert!(EpsSchedule::new(vec![0.1, 0.0]).is_err());
        assert!(EpsSchedule::new(vec![]).is_err());
    }

    #[test]
    fn rounding_restores_marginals() {
        let a = [0.3, 0.7];
        let b = [0.5, 0.25, 0.25];
        let mut plan = vec![0.2, 0.05, 0.1, 0.3, 0.3, 0.1];
        round_to_polytope(&mut plan, &a, &b);
        for i in 0..2 {
            let s: f64 = plan[i * 3..(i + 1) * 3].iter().sum();
            assert!((s - a[i]).abs() < 1e-15);
        }
        for j in 0..3 {
            let s = plan[j] + plan[3 + j];
            assert!((s - b[j]).abs() < 1e-15);
        }
        assert!(plan.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn marginals_met_after_solve() {
        let a = vec![0.25; 4];
        let b = vec![0.2; 5];
        let cost: Vec<f64> = (0..20)
            .map(|e| ((e / 5) as f64 / 3.0 - (e % 5) as f64 / 4.0).powi(2) * 0.5)
            .collect();
        let out = sinkhorn(&a, &b, &cost, &SinkhornParams::default()).unwrap();
        assert!(out.marginal_error <= 1e-8);
        for i in 0..4 {
            let s: f64 = out.plan[i * 5..(i + 1) * 5].iter().sum();
            assert!((s - a[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let a = vec![0.5, 0.5];
        let b = vec![0.9, 0.1];
        let cost = vec![0.0, 1.0, 1.0, 0.0];
        let params = SinkhornParams {
            schedule: EpsSchedule::new(vec![1e-3]).unwrap(),
            max_iter: 1,
            tol: 1e-14,
            intermediate_tol: 1e-14,
        };
        assert!(matches!(sinkhorn(&a, &b, &cost, &params), Err(Error::NonConvergence { .. })));
    }
}
