//! Source measure on `Δ`, target measure `W dp` on `Δ^∨`, and the
//! normalization constant `C_1`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::export::{coord_header, floats, write_row};
use crate::geometry::{weight_from_coords, DualGrid, DualPoint, ProblemConfig, SimplexGrid, SimplexPoint};
use crate::lattice;
use crate::quadrature::{factorial, SimplexRule};

/// Anything that can sit in the support of a discrete measure.
pub trait Support: Clone {
    /// Coordinates used by the quadratic cost.
    fn reduced(&self) -> &[f64];
    /// Coordinates written to exports.
    fn coords(&self) -> &[f64];
}

impl Support for SimplexPoint {
    fn reduced(&self) -> &[f64] {
        SimplexPoint::reduced(self)
    }
    fn coords(&self) -> &[f64] {
        SimplexPoint::coords(self)
    }
}

impl Support for DualPoint {
    fn reduced(&self) -> &[f64] {
        DualPoint::reduced(self)
    }
    fn coords(&self) -> &[f64] {
        DualPoint::coords(self)
    }
}

/// A plain point of `R^k`, for transport instances outside the skeleton setting.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclidPoint(pub Vec<f64>);

impl Support for EuclidPoint {
    fn reduced(&self) -> &[f64] {
        &self.0
    }
    fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Weighted point cloud.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub total_mass: f64,
}

impl<P> DiscreteMeasure<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<P: Support> DiscreteMeasure<P> {
    pub fn new(points: Vec<P>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if points.len() != weights.len() {
            return Err(Error::Infeasible(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::Infeasible(format!("invalid weight {w}")));
        }
        let total_mass = weights.iter().sum();
        Ok(DiscreteMeasure { points, weights, total_mass })
    }

    /// Rescales to total mass one.
    pub fn normalized(mut self) -> Result<Self> {
        if !(self.total_mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        let total = self.total_mass;
        self.weights.iter_mut().for_each(|w| *w /= total);
        self.total_mass = self.weights.iter().sum();
        Ok(self)
    }

    /// One row per support point: coordinates then weight.
    pub fn write_csv<W: Write>(&self, out: &mut W, prefix: &str) -> Result<()> {
        let dim = self.points[0].coords().len();
        let mut header = coord_header(prefix, dim);
        header.push("weight".into());
        write_row(out, &header)?;
        for (p, w) in self.points.iter().zip(&self.weights) {
            let mut row = floats(p.coords());
            row.push(crate::export::fmt_f64(*w));
            write_row(out, &row)?;
        }
        Ok(())
    }
}

/// `C_1 = (d_0 + ... + d_m) / (d_0 ... d_m) · (n - m)! / n!`.
pub fn c1_closed_form(cfg: &ProblemConfig) -> f64 {
    let sum: f64 = cfg.degrees.iter().map(|&d| d as f64).sum();
    let prod: f64 = cfg.degrees.iter().map(|&d| d as f64).product();
    sum / prod * factorial(cfg.codim() as usize) / factorial(cfg.n as usize)
}

/// Integrates `f` over `Δ^∨` cell by cell: each cell is subdivided into
/// `resolution^m` Kuhn simplices carrying a collapsed Gauss rule exact to
/// `degree`. `f` receives full canonical coordinates.
pub fn integrate_over_dual<F: FnMut(&[f64]) -> f64>(
    cfg: &ProblemConfig,
    resolution: u32,
    degree: usize,
    mut f: F,
) -> f64 {
    let m = cfg.dim();
    let rule = SimplexRule::new(m, degree);
    let pieces = lattice::kuhn_simplices(m, resolution);
    let r = resolution as f64;
    let mut total = 0.0;
    let mut full = vec![0.0; m + 1];
    for cell in 0..=m {
        let free: Vec<usize> = (0..=m).filter(|&i| i != cell).collect();
        // vertex t > 0 of the cell lies at -1/d on the (t-1)-th free axis
        for piece in &pieces {
            let verts: Vec<Vec<f64>> = piece
                .iter()
                .map(|j| {
                    (0..m)
                        .map(|a| -(j[a + 1] as f64) / r / cfg.degrees[free[a]] as f64)
                        .collect()
                })
                .collect();
            total += rule.integrate(&verts, |y| {
                full.iter_mut().for_each(|v| *v = 0.0);
                for (a, &i) in free.iter().enumerate() {
                    full[i] = y[a];
                }
                f(&full)
            });
        }
    }
    total
}

/// Numerical `∫_{Δ^∨} W dp`.
pub fn c1_quadrature(cfg: &ProblemConfig, resolution: u32) -> f64 {
    integrate_over_dual(cfg, resolution, cfg.codim() as usize, |p| weight_from_coords(p, cfg))
}

/// Lumped (hat-function) weights of the Kuhn triangulation, normalized to a
/// probability measure: interior points weigh equally, boundary points less.
pub fn source_measure(grid: &SimplexGrid) -> Result<DiscreteMeasure<SimplexPoint>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut incidence = vec![0.0; grid.len()];
    for simplex in grid.simplices() {
        for v in simplex {
            incidence[v] += 1.0;
        }
    }
    DiscreteMeasure::new(grid.points.clone(), incidence)?.normalized()
}

/// Sub-samples per axis used for dual control volumes.
const CONTROL_SUBSAMPLES: usize = 8;

/// Volume of the part of each point's axis-aligned box (side = spacing)
/// that lies in `Δ^∨`, summed over every cell containing the point.
pub fn dual_control_volumes(grid: &DualGrid, cfg: &ProblemConfig) -> Vec<f64> {
    let m = cfg.dim();
    let h = grid.spacing;
    let s = CONTROL_SUBSAMPLES;
    let offsets: Vec<f64> = (0..s).map(|t| ((t as f64 + 0.5) / s as f64 - 0.5) * h).collect();
    let total_samples = s.pow(m as u32);
    let cell_volume = h.powi(m as i32);
    grid.points
        .iter()
        .map(|p| {
            let coords = p.coords();
            let mut vol = 0.0;
            for cell in p.cells() {
                let free: Vec<usize> = (0..=m).filter(|&i| i != cell).collect();
                let mut inside = 0usize;
                let mut idx = vec![0usize; m];
                'samples: for _ in 0..total_samples {
                    let mut pairing = 0.0;
                    let mut ok = true;
                    for (a, &i) in free.iter().enumerate() {
                        let v = coords[i] + offsets[idx[a]];
                        if v > 0.0 {
                            ok = false;
                        }
                        pairing += cfg.degrees[i] as f64 * v;
                    }
                    if ok && pairing >= -1.0 {
                        inside += 1;
                    }
                    for slot in idx.iter_mut() {
                        *slot += 1;
                        if *slot < s {
                            continue 'samples;
                        }
                        *slot = 0;
                    }
                }
                vol += inside as f64 / total_samples as f64 * cell_volume;
            }
            vol
        })
        .collect()
}

/// `ν ∝ W(p) · control volume`, normalized to a probability measure.
pub fn target_measure(grid: &DualGrid, cfg: &ProblemConfig) -> Result<DiscreteMeasure<DualPoint>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let volumes = dual_control_volumes(grid, cfg);
    let weights = grid
        .points
        .iter()
        .zip(&volumes)
        .map(|(p, v)| weight_from_coords(p.coords(), cfg) * v)
        .collect();
    DiscreteMeasure::new(grid.points.clone(), weights)?.normalized()
}
