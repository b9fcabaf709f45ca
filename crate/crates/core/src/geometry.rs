//! The skeleton simplex `Δ`, the dual complex `Δ^∨ = ∪_k Δ^∨_k`, and the
//! weight function on it.
//!
//! Points of `Δ^∨` live in `R^{m+1}` modulo the diagonal `R(1, ..., 1)`. The
//! canonical representative has maximum entry exactly `0`; its reduced
//! coordinates `p̂_i = p_i - p_0` (i = 1..m) identify the quotient with `R^m`.
//! Simplex points use `x̂ = (x_1, ..., x_m)`, so that on `Δ`
//! `<x, p> = p_0 + <x̂, p̂>`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice;

/// Membership tolerance for floating-point inputs.
pub const FLOAT_TOL: f64 = 1e-9;
/// Membership tolerance for exactly constructed lattice points.
pub const EXACT_TOL: f64 = 1e-12;

/// Degeneration data `(n, m, d_0..d_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: u32,
    pub m: u32,
    pub degrees: Vec<u32>,
}

impl ProblemConfig {
    pub fn new(n: u32, m: u32, degrees: Vec<u32>) -> Result<Self> {
        let cfg = ProblemConfig { n, m, degrees };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidConfig("m: skeleton dimension must be at least 1".into()));
        }
        if self.n < 2 || self.m > self.n - 1 {
            return Err(Error::InvalidConfig(format!(
                "m: requires 1 <= m <= n - 1, got n = {}, m = {}",
                self.n, self.m
            )));
        }
        if self.degrees.len() != self.m as usize + 1 {
            return Err(Error::InvalidConfig(format!(
                "degrees: expected m + 1 = {} entries, got {}",
                self.m + 1,
                self.degrees.len()
            )));
        }
        if let Some(i) = self.degrees.iter().position(|&d| d == 0) {
            return Err(Error::InvalidConfig(format!("degrees[{i}]: degrees must be >= 1")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.m as usize
    }

    /// Exponent `n - m` of the weight.
    pub fn codim(&self) -> u32 {
        self.n - self.m
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(1)
    }

    /// `<d, p>` for a full-coordinate vector.
    pub fn degree_pairing(&self, p: &[f64]) -> f64 {
        self.degrees.iter().zip(p).map(|(&d, &v)| d as f64 * v).sum()
    }
}

/// A point of `Δ = {x >= 0, Σ x_i = 1}` in full barycentric coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    x: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(x, FLOAT_TOL)
    }

    pub fn with_tolerance(x: Vec<f64>, tol: f64) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::OutOfSimplex("need at least two coordinates".into()));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::OutOfSimplex(format!("coordinates sum to {sum}")));
        }
        if let Some(v) = x.iter().find(|&&v| v < -tol) {
            return Err(Error::OutOfSimplex(format!("negative coordinate {v}")));
        }
        Ok(SimplexPoint { x })
    }

    /// Builds the point with reduced coordinates `x̂`, setting `x_0 = 1 - Σ x̂`.
    pub fn from_reduced(reduced: &[f64]) -> Result<Self> {
        let mut x = Vec::with_capacity(reduced.len() + 1);
        x.push(1.0 - reduced.iter().sum::<f64>());
        x.extend_from_slice(reduced);
        Self::new(x)
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    /// `x̂ = (x_1, ..., x_m)`.
    pub fn reduced(&self) -> &[f64] {
        &self.x[1..]
    }

    pub fn dim(&self) -> usize {
        self.x.len() - 1
    }
}

/// Canonical representative of a point of `Δ^∨`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    p: Vec<f64>,
    hat: Vec<f64>,
    cell: usize,
}

impl DualPoint {
    /// Full coordinates; every entry `<= 0` and the maximum is exactly `0`.
    pub fn coords(&self) -> &[f64] {
        &self.p
    }

    /// `p̂ = (p_1 - p_0, ..., p_m - p_0)`.
    pub fn reduced(&self) -> &[f64] {
        &self.hat
    }

    /// Smallest `k` with `p_k = 0`.
    pub fn cell(&self) -> usize {
        self.cell
    }

    /// The bookkeeping term `p_0` relating full and reduced pairings.
    pub fn p0(&self) -> f64 {
        self.p[0]
    }

    /// Indices `k` with `p_k = 0`, i.e. all cells containing the point.
    pub fn cells(&self) -> Vec<usize> {
        self.p
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0.0)
            .map(|(k, _)| k)
            .collect()
    }

    /// Reconstructs a dual point from reduced coordinates.
    pub fn from_reduced(hat: &[f64], cfg: &ProblemConfig) -> Result<Self> {
        let mut q = Vec::with_capacity(hat.len() + 1);
        q.push(0.0);
        q.extend_from_slice(hat);
        canonicalize(&q, cfg)
    }

    /// Full pairing `<x, p>`.
    pub fn pair(&self, x: &[f64]) -> f64 {
        self.p.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// Projects `q` to the canonical representative of its class in
/// `R^{m+1} / R(1, ..., 1)` and checks membership in `Δ^∨`.
pub fn canonicalize(q: &[f64], cfg: &ProblemConfig) -> Result<DualPoint> {
    canonicalize_with_tolerance(q, cfg, FLOAT_TOL)
}

pub fn canonicalize_with_tolerance(q: &[f64], cfg: &ProblemConfig, tol: f64) -> Result<DualPoint> {
    if q.len() != cfg.degrees.len() {
        return Err(Error::OutOfCone(format!(
            "expected {} coordinates, got {}",
            cfg.degrees.len(),
            q.len()
        )));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::OutOfCone("non-finite coordinate".into()));
    }
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p: Vec<f64> = q.iter().map(|v| v - max).collect();
    let pairing = cfg.degree_pairing(&p);
    if pairing < -1.0 - tol {
        return Err(Error::OutOfCone(format!("Σ d_i p_i = {pairing} < -1")));
    }
    let cell = p.iter().position(|&v| v == 0.0).expect("max entry shifted to zero");
    let hat = p[1..].iter().map(|v| v - p[0]).collect();
    Ok(DualPoint { p, hat, cell })
}

/// The weight `W(p) = (1 + Σ d_i p_i)^{n-m}`.
pub fn weight_w(p: &DualPoint, cfg: &ProblemConfig) -> f64 {
    weight_from_coords(p.coords(), cfg)
}

pub(crate) fn weight_from_coords(p: &[f64], cfg: &ProblemConfig) -> f64 {
    let base = (1.0 + cfg.degree_pairing(p)).max(0.0);
    base.powi(cfg.codim() as i32)
}

/// The `i`-th vertex `(0, ..., -1/d_i, ..., 0)` of `Δ̄^∨`.
pub fn dual_vertex(i: usize, cfg: &ProblemConfig) -> Result<DualPoint> {
    let m = cfg.dim();
    if i > m {
        return Err(Error::IndexOutOfRange { index: i, max: m });
    }
    let mut q = vec![0.0; m + 1];
    q[i] = -1.0 / cfg.degrees[i] as f64;
    canonicalize_with_tolerance(&q, cfg, EXACT_TOL)
}

/// The lattice `{x ∈ Δ : N x ∈ Z^{m+1}}` in lexicographically decreasing order
/// of the integer coordinates.
pub fn barycentric_grid(m: usize, resolution: u32) -> Vec<SimplexPoint> {
    SimplexGrid::new(m, resolution).points
}

/// A barycentric lattice together with its integer labels and Kuhn
/// triangulation.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    pub m: usize,
    pub resolution: u32,
    pub points: Vec<SimplexPoint>,
    pub lattice: Vec<Vec<u32>>,
}

impl SimplexGrid {
    pub fn new(m: usize, resolution: u32) -> Self {
        assert!(resolution >= 1, "grid resolution must be positive");
        let lattice = lattice::compositions(m + 1, resolution);
        let n = resolution as f64;
        let points = lattice
            .iter()
            .map(|j| SimplexPoint { x: j.iter().map(|&v| v as f64 / n).collect() })
            .collect();
        SimplexGrid { m, resolution, points, lattice }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    /// Kuhn simplices as lists of point indices.
    pub fn simplices(&self) -> Vec<Vec<usize>> {
        let index = lattice::LatticeIndex::new(&self.lattice);
        lattice::kuhn_simplices(self.m, self.resolution)
            .into_iter()
            .map(|s| s.iter().map(|j| index.get(j).expect("vertex on lattice")).collect())
            .collect()
    }
}

/// Lattice sample of `Δ^∨`, cell by cell, with shared faces deduplicated.
#[derive(Debug, Clone)]
pub struct DualGrid {
    pub resolution: u32,
    /// Spacing `1 / (N d_max)` in each free coordinate.
    pub spacing: f64,
    pub points: Vec<DualPoint>,
    /// Integer offsets `j` with `p = -j * spacing`.
    pub lattice: Vec<Vec<u32>>,
}

impl DualGrid {
    pub fn new(cfg: &ProblemConfig, resolution: u32) -> Self {
        assert!(resolution >= 1, "grid resolution must be positive");
        let budget = resolution * cfg.max_degree();
        let spacing = 1.0 / budget as f64;
        let lattice = dual_lattice(cfg, budget);
        let points = lattice
            .iter()
            .map(|j| {
                let q: Vec<f64> = j.iter().map(|&v| -(v as f64) * spacing).collect();
                canonicalize_with_tolerance(&q, cfg, EXACT_TOL).expect("lattice point in Δ^∨")
            })
            .collect();
        DualGrid { resolution, spacing, points, lattice }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Integer points `j >= 0` with some `j_k = 0` and `Σ d_i j_i <= budget`,
/// grouped by smallest zero index and ordered lexicographically within a cell.
pub(crate) fn dual_lattice(cfg: &ProblemConfig, budget: u32) -> Vec<Vec<u32>> {
    let m = cfg.dim();
    let mut out = Vec::new();
    for cell in 0..=m {
        let mut j = vec![0u32; m + 1];
        enumerate_cell(cfg, cell, 0, budget, &mut j, &mut out);
    }
    out
}

fn enumerate_cell(
    cfg: &ProblemConfig,
    cell: usize,
    slot: usize,
    remaining: u32,
    j: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if slot == j.len() {
        // belongs to the first cell whose coordinate vanishes
        if j.iter().position(|&v| v == 0) == Some(cell) {
            out.push(j.clone());
        }
        return;
    }
    if slot == cell {
        j[slot] = 0;
        enumerate_cell(cfg, cell, slot + 1, remaining, j, out);
        return;
    }
    let d = cfg.degrees[slot];
    for v in 0..=remaining / d {
        j[slot] = v;
        enumerate_cell(cfg, cell, slot + 1, remaining - v * d, j, out);
    }
    j[slot] = 0;
}

/// Samples of `Δ^∨` at spacing `1 / (N d_max)`.
pub fn dual_grid(cfg: &ProblemConfig, resolution: u32) -> Vec<DualPoint> {
    DualGrid::new(cfg, resolution).points
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, d: &[u32]) -> ProblemConfig {
        ProblemConfig::new(n, d.len() as u32 - 1, d.to_vec()).unwrap()
    }

    #[test]
    fn config_guards() {
        assert!(ProblemConfig::new(3, 1, vec![1, 2]).is_ok());
        assert!(ProblemConfig::new(2, 2, vec![1, 1, 1]).is_err());
        assert!(ProblemConfig::new(3, 1, vec![0, 2]).is_err());
        assert!(ProblemConfig::new(3, 1, vec![1, 2, 3]).is_err());
        let err = ProblemConfig::new(2, 2, vec![1, 1, 1]).unwrap_err().to_string();
        assert!(err.contains("m <= n - 1"), "{err}");
    }

    #[test]
    fn canonicalize_examples() {
        let c = cfg(3, &[1, 2]);
        let p = canonicalize(&[0.0, 0.0], &c).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.0]);
        assert_eq!(p.cell(), 0);
        let p = canonicalize(&[0.2, 0.2], &c).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.0]);
        let p = canonicalize(&[-0.1, -0.4], &c).unwrap();
        assert_eq!(p.coords()[0], 0.0);
        assert!((p.coords()[1] + 0.3).abs() < 1e-15);
        assert_eq!(p.cell(), 0);
        assert!(matches!(canonicalize(&[0.0, -0.7], &c), Err(Error::OutOfCone(_))));
    }

    #[test]
    fn weight_examples() {
        let c = cfg(3, &[1, 2]);
        let zero = canonicalize(&[0.0, 0.0], &c).unwrap();
        assert_eq!(weight_w(&zero, &c), 1.0);
        for k in 0..2 {
            assert_eq!(weight_w(&dual_vertex(k, &c).unwrap(), &c), 0.0);
        }
        let p = canonicalize(&[-0.5, 0.0], &c).unwrap();
        assert!((weight_w(&p, &c) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dual_vertex_examples() {
        let c = cfg(3, &[1, 2]);
        assert_eq!(dual_vertex(0, &c).unwrap().coords(), &[-1.0, 0.0]);
        assert_eq!(dual_vertex(1, &c).unwrap().coords(), &[0.0, -0.5]);
        let c3 = cfg(3, &[1, 1, 1]);
        assert_eq!(dual_vertex(2, &c3).unwrap().coords(), &[0.0, 0.0, -1.0]);
        assert!(matches!(dual_vertex(3, &c3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn barycentric_grid_examples() {
        let g = barycentric_grid(1, 2);
        let coords: Vec<_> = g.iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(coords, vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]]);
        assert_eq!(barycentric_grid(2, 1).len(), 3);
        assert_eq!(barycentric_grid(2, 10).len(), 66);
        for p in barycentric_grid(3, 7) {
            assert!(SimplexPoint::with_tolerance(p.coords().to_vec(), EXACT_TOL).is_ok());
        }
    }

    #[test]
    fn dual_grid_examples() {
        let c = ProblemConfig::new(2, 1, vec![1, 1]).unwrap();
        let pts: Vec<_> = dual_grid(&c, 1).iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(pts.len(), 3);
        for expected in [[-1.0, 0.0], [0.0, 0.0], [0.0, -1.0]] {
            assert!(pts.iter().any(|p| p == &expected));
        }
        let c = cfg(3, &[1, 2]);
        let g = DualGrid::new(&c, 2);
        assert_eq!(g.len(), 7);
        assert_eq!(g.spacing, 0.25);
        let c = cfg(4, &[1, 2, 3]);
        for p in dual_grid(&c, 3) {
            assert!(p.coords().iter().all(|&v| v <= 0.0));
            assert_eq!(p.coords().iter().copied().fold(f64::MIN, f64::max), 0.0);
            assert!(c.degree_pairing(p.coords()) >= -1.0 - EXACT_TOL);
        }
    }

    #[test]
    fn reduced_pairing_identity() {
        let c = cfg(4, &[1, 2, 2]);
        let x = SimplexPoint::new(vec![0.2, 0.5, 0.3]).unwrap();
        for p in dual_grid(&c, 3) {
            let full = p.pair(x.coords());
            let reduced: f64 = p.p0()
                + p.reduced().iter().zip(x.reduced()).map(|(a, b)| a * b).sum::<f64>();
            assert!((full - reduced).abs() < 1e-15);
            let back = DualPoint::from_reduced(p.reduced(), &c).unwrap();
            for (a, b) in back.coords().iter().zip(p.coords()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }
}
