//! The convex potential `u`, its Legendre transforms, the MA-type measure and
//! the Fubini-Study approximants.

mod fs;
mod ma;

use std::collections::HashMap;
use std::io::Write;

pub use fs::{
    fs_approximant, fs_potential_from_terms, fs_sandwich, tropical_valuation, FsApproximant, FsRow,
    Term, TermGroup,
};
pub use ma::{ma_density_m1, ma_measure, mu0_cell};

use crate::chambers::Label;
use crate::error::{Error, Result};
use crate::export::{coord_header, floats, write_row};
use crate::geometry::{DualGrid, DualPoint, ProblemConfig, SimplexGrid, SimplexPoint};
use crate::transport::{BrenierMap, TransportPlan};

/// Grid values of `u` on `Δ` and of `u*` on the dual grid.
#[derive(Debug, Clone)]
pub struct ConvexPotential {
    cfg: ProblemConfig,
    resolution: u32,
    points: Vec<SimplexPoint>,
    u: Vec<f64>,
    dual_spacing: f64,
    dual_points: Vec<DualPoint>,
    u_star: Vec<f64>,
    shift: f64,
    dual_u: Option<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn half_sq(v: &[f64]) -> f64 {
    0.5 * dot(v, v)
}

/// `max_i <x_i, p> - u_i`.
fn transform(points: &[SimplexPoint], u: &[f64], p: &[f64]) -> f64 {
    points.iter().zip(u).map(|(x, v)| dot(x.coords(), p) - v).fold(f64::NEG_INFINITY, f64::max)
}

/// `max_j <p_j, x> - u*_j`.
fn cotransform(dual: &[DualPoint], u_star: &[f64], x: &[f64]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (j, (p, v)) in dual.iter().zip(u_star).enumerate() {
        let val = p.pair(x) - v;
        if val > best.0 {
            best = (val, j);
        }
    }
    best
}

impl ConvexPotential {
    /// Builds a potential from simplex-grid values; `u*` is computed on the
    /// dual grid and both are shifted so that `min u = 0`.
    pub fn from_values(cfg: &ProblemConfig, grid: &SimplexGrid, u: Vec<f64>, dual: &DualGrid) -> Result<Self> {
        cfg.validate()?;
        if grid.is_empty() || dual.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if u.len() != grid.len() {
            return Err(Error::InvalidConfig(format!(
                "u: expected {} values, got {}",
                grid.len(),
                u.len()
            )));
        }
        let mut pot = ConvexPotential {
            cfg: cfg.clone(),
            resolution: grid.resolution,
            points: grid.points.clone(),
            u,
            dual_spacing: dual.spacing,
            dual_points: dual.points.clone(),
            u_star: vec![],
            shift: 0.0,
            dual_u: None,
        };
        pot.u_star = pot.dual_points.iter().map(|p| transform(&pot.points, &pot.u, p.coords())).collect();
        pot.normalize();
        Ok(pot)
    }

    fn normalize(&mut self) {
        let min = self.u.iter().copied().fold(f64::INFINITY, f64::min);
        for v in &mut self.u {
            *v -= min;
        }
        for v in &mut self.u_star {
            *v += min;
        }
        if let Some(d) = &mut self.dual_u {
            for v in d {
                *v -= min;
            }
        }
        self.shift = -min;
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn simplex_points(&self) -> &[SimplexPoint] {
        &self.points
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn dual_points(&self) -> &[DualPoint] {
        &self.dual_points
    }

    pub fn u_star(&self) -> &[f64] {
        &self.u_star
    }

    pub fn dual_spacing(&self) -> f64 {
        self.dual_spacing
    }

    /// Additive constant applied to `u` by the normalization.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `½|x̂|² - f` straight from the transport duals, before the
    /// convexification pass, under the same normalization as [`Self::u`].
    pub fn dual_u(&self) -> Option<&[f64]> {
        self.dual_u.as_deref()
    }

    /// `max |p̂|` over the dual grid: the Lipschitz constant of `u` in `x̂`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.dual_points.iter().map(|p| dot(p.reduced(), p.reduced()).sqrt()).fold(0.0, f64::max)
    }

    /// Largest ratio `|u*(p) - u*(p')| / |p̂ - p̂'|` over neighbouring dual
    /// grid points.
    pub fn dual_lipschitz(&self) -> f64 {
        let h = self.dual_spacing;
        let key = |p: &DualPoint| -> Vec<i64> { p.reduced().iter().map(|v| (v / h).round() as i64).collect() };
        let index: HashMap<Vec<i64>, usize> = self.dual_points.iter().enumerate().map(|(j, p)| (key(p), j)).collect();
        let m = self.cfg.dim();
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(m as u32))
            .map(|mut c| {
                (0..m)
                    .map(|_| {
                        let v = (c % 3) as i64 - 1;
                        c /= 3;
                        v
                    })
                    .collect()
            })
            .filter(|o: &Vec<i64>| o.iter().any(|&v| v != 0))
            .collect();
        let mut best: f64 = 0.0;
        for (j, p) in self.dual_points.iter().enumerate() {
            let base = key(p);
            for off in &offsets {
                let nb: Vec<i64> = base.iter().zip(off).map(|(a, b)| a + b).collect();
                if let Some(&l) = index.get(&nb) {
                    let dist = h * (off.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt();
                    best = best.max((self.u_star[j] - self.u_star[l]).abs() / dist);
                }
            }
        }
        best
    }

    /// `u**` at every simplex grid point.
    pub fn double_legendre_on_grid(&self) -> Vec<f64> {
        self.points.iter().map(|x| double_legendre(self, x.coords())).collect()
    }

    /// CSV `x0..xm, u, t0..tm, label`; missing images and labels are blank.
    pub fn write_csv<W: Write>(&self, out: &mut W, map: Option<&BrenierMap>, labels: Option<&[Label]>) -> Result<()> {
        let m1 = self.cfg.degrees.len();
        let mut header = coord_header("x", m1);
        header.push("u".into());
        header.extend(coord_header("t", m1));
        header.push("label".into());
        write_row(out, &header)?;
        for (i, x) in self.points.iter().enumerate() {
            let mut row = floats(x.coords());
            row.extend(floats(&[self.u[i]]));
            match map.and_then(|m| m.image(i)) {
                Some(t) => row.extend(floats(t.coords())),
                None => row.extend(std::iter::repeat_n(String::new(), m1)),
            }
            row.push(labels.map_or(String::new(), |l| l[i].to_string()));
            write_row(out, &row)?;
        }
        Ok(())
    }

    /// CSV `p0..pm, u_star`.
    pub fn write_dual_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let mut header = coord_header("p", self.cfg.degrees.len());
        header.push("u_star".into());
        write_row(out, &header)?;
        for (p, v) in self.dual_points.iter().zip(&self.u_star) {
            let mut row = floats(p.coords());
            row.extend(floats(&[*v]));
            write_row(out, &row)?;
        }
        Ok(())
    }
}

fn resolution_of(points: &[SimplexPoint]) -> u32 {
    let min = points
        .iter()
        .flat_map(|x| x.coords().iter().copied())
        .filter(|&v| v > 1e-12)
        .fold(1.0, f64::min);
    (1.0 / min).round() as u32
}

fn dual_spacing_of(points: &[DualPoint]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.coords().iter().map(|v| v.abs()))
        .filter(|&v| v > 1e-12)
        .fold(f64::INFINITY, f64::min)
}

/// Recovers `u` from the transport duals `(f, g)`:
/// `u = ½|x̂|² - f`, `u* = ½|p̂|² - g + p_0`, followed by one `u ↦ u**`
/// round trip over the dual grid and `min u = 0`.
pub fn potential_from_duals(
    plan: &TransportPlan<SimplexPoint, DualPoint>,
    cfg: &ProblemConfig,
) -> Result<ConvexPotential> {
    let duals = plan.duals.as_ref().ok_or(Error::MissingDuals)?;
    let points = plan.source.points.clone();
    let dual_points = plan.target.points.clone();
    if points.is_empty() || dual_points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let raw_u: Vec<f64> = points.iter().zip(&duals.f).map(|(x, f)| half_sq(x.reduced()) - f).collect();
    let raw_star: Vec<f64> = dual_points
        .iter()
        .zip(&duals.g)
        .map(|(p, g)| half_sq(p.reduced()) - g + p.p0())
        .collect();
    let u: Vec<f64> = points.iter().map(|x| cotransform(&dual_points, &raw_star, x.coords()).0).collect();
    let u_star = dual_points.iter().map(|p| transform(&points, &u, p.coords())).collect();
    let mut pot = ConvexPotential {
        cfg: cfg.clone(),
        resolution: resolution_of(&points),
        points,
        u,
        dual_spacing: dual_spacing_of(&dual_points),
        dual_points,
        u_star,
        shift: 0.0,
        dual_u: Some(raw_u),
    };
    pot.normalize();
    Ok(pot)
}

/// `u*(p) = max_x <x, p> - u(x)` over the simplex grid.
pub fn legendre_dual(pot: &ConvexPotential, p: &DualPoint) -> f64 {
    transform(&pot.points, &pot.u, p.coords())
}

/// `u**(x) = max_p <p, x> - u*(p)` over the dual grid; `x` may leave `Δ`.
pub fn double_legendre(pot: &ConvexPotential, x: &[f64]) -> f64 {
    cotransform(&pot.dual_points, &pot.u_star, x).0
}

/// [`double_legendre`] together with the maximizing dual point.
pub fn double_legendre_argmax<'a>(pot: &'a ConvexPotential, x: &[f64]) -> (f64, &'a DualPoint) {
    let (v, j) = cotransform(&pot.dual_points, &pot.u_star, x);
    (v, &pot.dual_points[j])
}
