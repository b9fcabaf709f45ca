//! Independent ground truths: the closed-form `m = 1` solution, pushforward
//! histograms, and the permutation-symmetry comparator.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::export::{floats, write_row};
use crate::geometry::{DualPoint, ProblemConfig};
use crate::measures::DiscreteMeasure;
use crate::potential::ConvexPotential;
use crate::transport::BrenierMap;

/// Closed-form solution for a one-dimensional skeleton, in the variable
/// `x = x_0 ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct M1ClosedForm {
    n: f64,
    d0: f64,
    d1: f64,
}

impl M1ClosedForm {
    pub fn new(cfg: &ProblemConfig) -> Result<Self> {
        if cfg.m != 1 {
            return Err(Error::DomainError(format!("closed form needs m = 1, got m = {}", cfg.m)));
        }
        Ok(M1ClosedForm {
            n: cfg.n as f64,
            d0: cfg.degrees[0] as f64,
            d1: cfg.degrees[1] as f64,
        })
    }

    /// Kink location `x* = d_1 / (d_0 + d_1)`, where `u' = 0`.
    pub fn kink(&self) -> f64 {
        self.d1 / (self.d0 + self.d1)
    }

    fn check(x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::DomainError(format!("x = {x} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn uprime(&self, x: f64) -> Result<f64> {
        Self::check(x)?;
        let (d0, d1, s) = (self.d0, self.d1, self.d0 + self.d1);
        let v = if x <= self.kink() {
            (-1.0 + (s * x / d1).powf(1.0 / self.n)) / d0
        } else {
            (1.0 - (s * (1.0 - x) / d0).powf(1.0 / self.n)) / d1
        };
        Ok(v)
    }

    /// `u(x) = ∫_{x*}^{x} u'` by composite Simpson with `quad_n` panels.
    pub fn u(&self, x: f64, quad_n: usize) -> Result<f64> {
        Self::check(x)?;
        let a = self.kink();
        let panels = quad_n.max(2).next_multiple_of(2);
        let h = (x - a) / panels as f64;
        if h == 0.0 {
            return Ok(0.0);
        }
        let mut sum = self.uprime(a)? + self.uprime(x)?;
        for k in 1..panels {
            let t = (a + k as f64 * h).clamp(0.0, 1.0);
            sum += if k % 2 == 1 { 4.0 } else { 2.0 } * self.uprime(t)?;
        }
        Ok(sum * h / 3.0)
    }

    /// Relative residual of `(1 + d_0 u')^{n-1} u'' = 1/(n d_0) + 1/(n d_1)`
    /// (left of the kink) or `(1 - d_1 u')^{n-1} u'' = ...` (right of it),
    /// with `u''` from a centred difference of step `h`.
    pub fn ode_residual(&self, x: f64, h: f64) -> Result<f64> {
        Self::check(x - h)?;
        Self::check(x + h)?;
        let up = self.uprime(x)?;
        let upp = (self.uprime(x + h)? - self.uprime(x - h)?) / (2.0 * h);
        let base = if x <= self.kink() { 1.0 + self.d0 * up } else { 1.0 - self.d1 * up };
        let rhs = 1.0 / (self.n * self.d0) + 1.0 / (self.n * self.d1);
        Ok((base.powf(self.n - 1.0) * upp - rhs) / rhs)
    }

    /// Writes `x, u'(x), u(x)` on `samples + 1` equispaced points.
    pub fn write_csv<W: Write>(&self, out: &mut W, samples: usize, quad_n: usize) -> Result<()> {
        write_row(out, &["x".into(), "uprime".into(), "u".into()])?;
        for k in 0..=samples {
            let x = k as f64 / samples as f64;
            write_row(out, &floats(&[x, self.uprime(x)?, self.u(x, quad_n)?]))?;
        }
        Ok(())
    }
}

pub fn m1_uprime(x: f64, cfg: &ProblemConfig) -> Result<f64> {
    M1ClosedForm::new(cfg)?.uprime(x)
}

pub fn m1_u(x: f64, cfg: &ProblemConfig, quad_n: usize) -> Result<f64> {
    M1ClosedForm::new(cfg)?.u(x, quad_n)
}

/// Slope of the `m = 1` potential in the variable `x_0` encoded by a dual
/// point: `p_0 - p_1`.
pub fn m1_slope(p: &DualPoint) -> f64 {
    p.coords()[0] - p.coords()[1]
}

/// Index of the bin center nearest to `p̂`.
pub fn nearest_bin(hat: &[f64], bins: &[DualPoint]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (b, center) in bins.iter().enumerate() {
        let d: f64 = center.reduced().iter().zip(hat).map(|(a, c)| (a - c) * (a - c)).sum();
        if d < best_d {
            best_d = d;
            best = b;
        }
    }
    best
}

/// Bins the `μ`-weighted images `T(x_i)` and `ν` into the Voronoi cells (in
/// `p̂`) of `bins`; returns the binned pushforward and its total-variation
/// distance to binned `ν`.
pub fn pushforward_histogram(
    map: &BrenierMap,
    mu_weights: &[f64],
    bins: &[DualPoint],
    nu: &DiscreteMeasure<DualPoint>,
) -> (Vec<f64>, f64) {
    let mut pushed = vec![0.0; bins.len()];
    for (i, _, t) in map.entries() {
        pushed[nearest_bin(t.reduced(), bins)] += mu_weights[i];
    }
    let mut target = vec![0.0; bins.len()];
    for (p, w) in nu.points.iter().zip(&nu.weights) {
        target[nearest_bin(p.reduced(), bins)] += w;
    }
    let tv = 0.5 * pushed.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum::<f64>();
    (pushed, tv)
}

fn key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| v.to_bits()).collect()
}

/// Checks that `σ` preserves the degrees.
pub fn check_permutation(sigma: &[usize], cfg: &ProblemConfig) -> Result<()> {
    let m1 = cfg.degrees.len();
    let mut seen = vec![false; m1];
    if sigma.len() != m1 || sigma.iter().any(|&s| s >= m1 || std::mem::replace(&mut seen[s], true)) {
        return Err(Error::DomainError(format!("{sigma:?} is not a permutation of 0..{m1}")));
    }
    if (0..m1).any(|i| cfg.degrees[sigma[i]] != cfg.degrees[i]) {
        return Err(Error::DegreeMismatch);
    }
    Ok(())
}

/// `(σ·x)_{σ(i)} = x_i`.
pub fn permute(x: &[f64], sigma: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for (i, &s) in sigma.iter().enumerate() {
        out[s] = x[i];
    }
    out
}

/// Map from each grid point to the index of its image under `σ`.
pub fn permuted_indices(points: &[&[f64]], sigma: &[usize]) -> Vec<Option<usize>> {
    let index: HashMap<Vec<u64>, usize> = points.iter().enumerate().map(|(i, x)| (key(x), i)).collect();
    points.iter().map(|x| index.get(&key(&permute(x, sigma))).copied()).collect()
}

/// `sup |u(σ·x) - u(x)|` over the simplex grid of the potential.
pub fn symmetry_check(pot: &ConvexPotential, sigma: &[usize], cfg: &ProblemConfig) -> Result<f64> {
    check_permutation(sigma, cfg)?;
    let coords: Vec<&[f64]> = pot.simplex_points().iter().map(|p| p.coords()).collect();
    let mut worst: f64 = 0.0;
    for (i, image) in permuted_indices(&coords, sigma).into_iter().enumerate() {
        let j = image.ok_or_else(|| Error::DomainError("grid is not permutation invariant".into()))?;
        worst = worst.max((pot.u()[j] - pot.u()[i]).abs());
    }
    Ok(worst)
}

/// All permutations of `0..len` that preserve the degrees.
pub fn degree_symmetries(cfg: &ProblemConfig) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, cfg: &ProblemConfig, out: &mut Vec<Vec<usize>>) {
        let len = cfg.degrees.len();
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let i = prefix.len();
        for s in 0..len {
            if !used[s] && cfg.degrees[s] == cfg.degrees[i] {
                used[s] = true;
                prefix.push(s);
                rec(prefix, used, cfg, out);
                prefix.pop();
                used[s] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; cfg.degrees.len()], cfg, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, d: &[u32]) -> ProblemConfig {
        ProblemConfig::new(n, d.len() as u32 - 1, d.to_vec()).unwrap()
    }

    #[test]
    fn uprime_boundary_and_kink() {
        for c in [cfg(3, &[1, 2]), cfg(2, &[1, 1]), cfg(5, &[3, 2])] {
            let o = M1ClosedForm::new(&c).unwrap();
            let (d0, d1) = (c.degrees[0] as f64, c.degrees[1] as f64);
            assert!((o.uprime(0.0).unwrap() + 1.0 / d0).abs() < 1e-15);
            assert!((o.uprime(1.0).unwrap() - 1.0 / d1).abs() < 1e-15);
            let k = o.kink();
            assert!(o.uprime(k).unwrap().abs() < 1e-15);
            // right branch at the kink also vanishes
            let s = d0 + d1;
            let right = (1.0 - (s * (1.0 - k) / d0).powf(1.0 / c.n as f64)) / d1;
            assert!(right.abs() < 1e-15);
        }
    }

    #[test]
    fn uprime_value_and_domain() {
        let c = cfg(3, &[1, 2]);
        let v = m1_uprime(1.0 / 3.0, &c).unwrap();
        assert!((v - (-1.0 + 0.5f64.powf(1.0 / 3.0))).abs() < 1e-15);
        assert!((v + 0.20630).abs() < 1e-5);
        assert!(matches!(m1_uprime(1.5, &c), Err(Error::DomainError(_))));
        assert!(matches!(m1_uprime(0.5, &cfg(3, &[1, 1, 1])), Err(Error::DomainError(_))));
    }

    #[test]
    fn uprime_monotone() {
        let o = M1ClosedForm::new(&cfg(4, &[2, 3])).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=10_000 {
            let v = o.uprime(k as f64 / 10_000.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn u_normalization_and_symmetry() {
        let c = cfg(3, &[1, 2]);
        let o = M1ClosedForm::new(&c).unwrap();
        assert_eq!(o.u(o.kink(), 100).unwrap(), 0.0);
        assert!(o.u(0.0, 200).unwrap() > 0.0);
        assert!(o.u(1.0, 200).unwrap() > 0.0);
        let s = M1ClosedForm::new(&cfg(2, &[1, 1])).unwrap();
        for x in [0.0, 0.1, 0.3, 0.45] {
            let a = s.u(x, 400).unwrap();
            let b = s.u(1.0 - x, 400).unwrap();
            assert!((a - b).abs() < 1e-10, "{x}: {a} {b}");
        }
    }

    /// Antiderivative of the left branch, used only as a check.
    fn left_antiderivative(x: f64, n: f64, d0: f64, d1: f64) -> f64 {
        let a = (d0 + d1) / d1;
        (-x + a.powf(1.0 / n) * x.powf(1.0 + 1.0 / n) / (1.0 + 1.0 / n)) / d0
    }

    #[test]
    fn u_quadrature_converges() {
        let c = cfg(3, &[1, 2]);
        let o = M1ClosedForm::new(&c).unwrap();
        let k = o.kink();
        for x in [0.0, 0.05, 0.3, 0.6] {
            let exact = left_antiderivative(x, 3.0, 1.0, 2.0) - left_antiderivative(k, 3.0, 1.0, 2.0);
            assert!((o.u(x, 20_000).unwrap() - exact).abs() < 1e-6, "x = {x}");
        }
        // smooth integrand away from the endpoints: Simpson error drops fast
        for x in [0.1, 0.3, 0.9] {
            let e1 = (o.u(x, 16).unwrap() - o.u(x, 32).unwrap()).abs();
            let e2 = (o.u(x, 32).unwrap() - o.u(x, 64).unwrap()).abs();
            assert!(e2 <= e1 / 3.0 + 1e-15, "x = {x}: {e1} {e2}");
        }
    }

    #[test]
    fn ode_identity_on_closed_form() {
        let c = cfg(3, &[1, 2]);
        let o = M1ClosedForm::new(&c).unwrap();
        let rhs = 1.0 / 3.0 + 1.0 / 6.0;
        let h = 1e-5;
        for k in 0..=100 {
            let x = 0.05 + (o.kink() - 0.02 - 0.05) * k as f64 / 100.0;
            let up = o.uprime(x).unwrap();
            let upp = (o.uprime(x + h).unwrap() - o.uprime(x - h).unwrap()) / (2.0 * h);
            let lhs = (1.0 + up).powi(2) * upp;
            assert!((lhs - rhs).abs() / rhs < 0.01, "x = {x}: {lhs}");
            assert!(o.ode_residual(x, h).unwrap().abs() < 0.01);
        }
        for c in [cfg(5, &[3, 2]), cfg(4, &[1, 1]), cfg(6, &[4, 1])] {
            let o = M1ClosedForm::new(&c).unwrap();
            for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
                if (x - o.kink()).abs() > 0.02 {
                    assert!(o.ode_residual(x, 1e-5).unwrap().abs() < 1e-4, "{c:?} {x}");
                }
            }
        }
        assert!(o.ode_residual(0.0, 1e-3).is_err());
    }

    #[test]
    fn permutation_guards() {
        let c = cfg(3, &[1, 2]);
        assert!(matches!(check_permutation(&[1, 0], &c), Err(Error::DegreeMismatch)));
        assert!(check_permutation(&[0, 1], &c).is_ok());
        assert_eq!(degree_symmetries(&cfg(3, &[1, 1, 1])).len(), 6);
        assert_eq!(degree_symmetries(&cfg(4, &[2, 1, 2])).len(), 2);
        assert_eq!(permute(&[0.1, 0.2, 0.7], &[2, 0, 1]), vec![0.2, 0.7, 0.1]);
    }
}
