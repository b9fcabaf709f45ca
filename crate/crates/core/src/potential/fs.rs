use crate::error::{Error, Result};
use crate::geometry::{canonicalize_with_tolerance, dual_lattice, DualPoint, ProblemConfig, SimplexPoint, EXACT_TOL};

use super::{legendre_dual, ConvexPotential};

/// `φ_k(x) = max { <p, x> - u*(p) : p ∈ Δ^∨ ∩ (1/k) Z^{m+1} }` with `u*`
/// precomputed at the lattice points.
#[derive(Debug, Clone)]
pub struct FsApproximant {
    pub k: u32,
    lattice: Vec<DualPoint>,
    u_star: Vec<f64>,
}

impl FsApproximant {
    pub fn new(pot: &ConvexPotential, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::DomainError("k must be positive".into()));
        }
        let cfg = pot.config();
        let lattice: Vec<DualPoint> = dual_lattice(cfg, k)
            .into_iter()
            .map(|j| {
                let q: Vec<f64> = j.iter().map(|&v| -(v as f64) / k as f64).collect();
                canonicalize_with_tolerance(&q, cfg, EXACT_TOL)
            })
            .collect::<Result<_>>()?;
        let u_star = lattice.iter().map(|p| legendre_dual(pot, p)).collect();
        Ok(FsApproximant { k, lattice, u_star })
    }

    pub fn lattice(&self) -> &[DualPoint] {
        &self.lattice
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.lattice
            .iter()
            .zip(&self.u_star)
            .map(|(p, v)| p.pair(x) - v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The same function written as a Fubini-Study potential of degree `k`:
    /// one group per lattice point with `l = -k p`, `a = 0`, `c = -k u*(p)`.
    pub fn as_term_groups(&self) -> Vec<TermGroup> {
        let k = self.k as f64;
        self.lattice
            .iter()
            .zip(&self.u_star)
            .map(|(p, v)| TermGroup {
                terms: vec![Term { l: p.coords().iter().map(|c| (-c * k).round() as u32).collect(), a: 0 }],
                c: -k * v,
            })
            .collect()
    }
}

pub fn fs_approximant(pot: &ConvexPotential, k: u32, x: &SimplexPoint) -> Result<f64> {
    Ok(FsApproximant::new(pot, k)?.eval(x.coords()))
}

/// Sandwich statistics of `φ_k - u` over the simplex grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FsRow {
    pub k: u32,
    pub min_diff: f64,
    pub max_diff: f64,
    /// `max (u - φ_k)`.
    pub error: f64,
    /// `-L_*/k - slack`.
    pub lower_bound: f64,
    pub slack: f64,
    pub within: bool,
}

pub fn fs_sandwich(pot: &ConvexPotential, ks: &[u32]) -> Result<Vec<FsRow>> {
    let l_star = pot.dual_lipschitz();
    let slack = 2.0 * pot.lipschitz_bound() / pot.resolution() as f64;
    ks.iter()
        .map(|&k| {
            let fs = FsApproximant::new(pot, k)?;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (x, u) in pot.simplex_points().iter().zip(pot.u()) {
                let d = fs.eval(x.coords()) - u;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            let lower_bound = -l_star / k as f64 - slack;
            Ok(FsRow { k, min_diff: lo, max_diff: hi, error: -lo, lower_bound, slack, within: lo >= lower_bound && hi <= slack })
        })
        .collect()
}

/// A monomial term `(l, a)` contributing `<l, x> + a` on the skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub l: Vec<u32>,
    pub a: i64,
}

/// Terms sharing the constant `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermGroup {
    pub terms: Vec<Term>,
    pub c: f64,
}

fn check_term(t: &Term, len: usize, bound: Option<(&ProblemConfig, u32)>) -> Result<()> {
    if t.l.len() != len {
        return Err(Error::MalformedTerm(format!("expected {len} exponents, got {}", t.l.len())));
    }
    if t.l.iter().min() != Some(&0) {
        return Err(Error::MalformedTerm(format!("{:?} has no zero exponent", t.l)));
    }
    if let Some((cfg, degree)) = bound {
        let total: u64 = t.l.iter().zip(&cfg.degrees).map(|(&a, &d)| a as u64 * d as u64).sum();
        if total > degree as u64 {
            return Err(Error::MalformedTerm(format!("Σ d_i l_i = {total} exceeds {degree}")));
        }
    }
    Ok(())
}

/// `-log|s|` on the skeleton: `min <l, x> + a` over the terms of `s`.
pub fn tropical_valuation(terms: &[Term], x: &SimplexPoint, bound: Option<(&ProblemConfig, u32)>) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::EmptyTerms);
    }
    let mut best = f64::INFINITY;
    for t in terms {
        check_term(t, x.coords().len(), bound)?;
        let v: f64 = t.l.iter().zip(x.coords()).map(|(&a, b)| a as f64 * b).sum::<f64>() + t.a as f64;
        best = best.min(v);
    }
    Ok(best)
}

/// `(1/l) max (c - a - <l_vec, x>)` over all terms of all groups.
pub fn fs_potential_from_terms(groups: &[TermGroup], l: u32, x: &SimplexPoint, cfg: &ProblemConfig) -> Result<f64> {
    if l == 0 {
        return Err(Error::DomainError("degree l must be positive".into()));
    }
    if groups.iter().all(|g| g.terms.is_empty()) {
        return Err(Error::EmptyTerms);
    }
    let mut best = f64::NEG_INFINITY;
    for g in groups {
        for t in &g.terms {
            check_term(t, x.coords().len(), Some((cfg, l)))?;
            let pair: f64 = t.l.iter().zip(x.coords()).map(|(&a, b)| a as f64 * b).sum();
            best = best.max(g.c - t.a as f64 - pair);
        }
    }
    Ok(best / l as f64)
}
