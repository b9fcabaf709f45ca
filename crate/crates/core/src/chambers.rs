//! Wall-chamber structure of `∇u`: which dual cell each gradient lies in.

use std::io::Write;

use crate::error::{Error, Result};
use crate::export::{coord_header, floats, write_row};
use crate::geometry::{DualPoint, ProblemConfig, SimplexGrid, SimplexPoint};
use crate::measures::source_measure;
use crate::oracle::permuted_indices;
use crate::potential::{double_legendre, ConvexPotential};
use crate::transport::BrenierMap;

/// Default classification tolerance.
pub const DELTA_WALL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Chamber(usize),
    /// Sorted indices of the cells whose common face is within tolerance.
    Wall(Vec<usize>),
    Unresolved,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Chamber(k) => write!(f, "chamber:{k}"),
            Label::Wall(ks) => {
                let parts: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                write!(f, "wall:{}", parts.join(";"))
            }
            Label::Unresolved => write!(f, "unresolved"),
        }
    }
}

/// Distance from `p` to the internal faces of its cell, measured as
/// `min_{i != k} (-p_i)`.
pub fn cell_depth(p: &DualPoint) -> f64 {
    let k = p.cell();
    p.coords()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, v)| -v)
        .fold(f64::INFINITY, f64::min)
}

/// Label of a single gradient value.
pub fn label_of(t: Option<&DualPoint>, delta_wall: f64, cfg: &ProblemConfig) -> Label {
    let Some(p) = t else { return Label::Unresolved };
    if cfg.degree_pairing(p.coords()) < -1.0 - delta_wall {
        return Label::Unresolved;
    }
    if cell_depth(p) >= delta_wall {
        return Label::Chamber(p.cell());
    }
    let near: Vec<usize> = p.coords().iter().enumerate().filter(|(_, &v)| -v < delta_wall).map(|(i, _)| i).collect();
    Label::Wall(near)
}

#[derive(Debug, Clone)]
pub struct ChamberMap {
    pub points: Vec<SimplexPoint>,
    pub labels: Vec<Label>,
    pub simplices: Vec<Vec<usize>>,
    /// `μ_0`-mass carried by each grid point.
    pub mass: Vec<f64>,
    /// Indices into `simplices` of cells whose corners carry differing labels.
    pub wall_cells: Vec<usize>,
    pub delta_wall: f64,
}

pub fn classify(grid: &SimplexGrid, map: &BrenierMap, delta_wall: f64, cfg: &ProblemConfig) -> Result<ChamberMap> {
    if !(delta_wall > 0.0) {
        return Err(Error::InvalidConfig(format!("delta_wall: must be positive, got {delta_wall}")));
    }
    if grid.len() != map.points.len() {
        return Err(Error::InvalidConfig("map and grid sizes differ".into()));
    }
    let labels: Vec<Label> = (0..grid.len()).map(|i| label_of(map.image(i), delta_wall, cfg)).collect();
    let simplices = grid.simplices();
    let wall_cells = simplices
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|&v| labels[v] != labels[s[0]]))
        .map(|(c, _)| c)
        .collect();
    let mass = source_measure(grid)?.weights;
    Ok(ChamberMap { points: grid.points.clone(), labels, simplices, mass, wall_cells, delta_wall })
}

impl ChamberMap {
    pub fn count(&self, label: &Label) -> usize {
        self.labels.iter().filter(|l| *l == label).count()
    }

    /// CSV `x0..xm, label`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let mut header = coord_header("x", self.points.first().map_or(0, |p| p.coords().len()));
        header.push("label".into());
        write_row(out, &header)?;
        for (x, l) in self.points.iter().zip(&self.labels) {
            let mut row = floats(x.coords());
            row.push(l.to_string());
            write_row(out, &row)?;
        }
        Ok(())
    }

    /// CSV `cell, vertex, x0..xm`: one row per corner of every wall cell.
    pub fn write_walls_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let mut header = vec!["cell".to_string(), "vertex".to_string()];
        header.extend(coord_header("x", self.points.first().map_or(0, |p| p.coords().len())));
        write_row(out, &header)?;
        for &c in &self.wall_cells {
            for (v, &i) in self.simplices[c].iter().enumerate() {
                let mut row = vec![c.to_string(), v.to_string()];
                row.extend(floats(self.points[i].coords()));
                write_row(out, &row)?;
            }
        }
        Ok(())
    }
}

/// `μ_0`-mass of the points labelled `Wall` or `Unresolved`.
pub fn wall_fraction(cmap: &ChamberMap) -> f64 {
    cmap.labels.iter().zip(&cmap.mass).filter(|(l, _)| !matches!(l, Label::Chamber(_))).fold(0.0, |acc, (_, w)| acc + w)
}

/// `μ_0`-mass of the points labelled `Unresolved`.
pub fn unresolved_fraction(cmap: &ChamberMap) -> f64 {
    cmap.labels.iter().zip(&cmap.mass).filter(|(l, _)| **l == Label::Unresolved).fold(0.0, |acc, (_, w)| acc + w)
}

/// For `m = 1`: the `x_0` where `p̂` of the map changes sign, by linear
/// interpolation between neighbouring grid points.
pub fn wall_location_1d(map: &BrenierMap) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = map
        .entries()
        .map(|(_, x, t)| {
            if t.reduced().len() != 1 {
                return Err(Error::DomainError("wall location needs m = 1".into()));
            }
            Ok((x.coords()[0], t.reduced()[0]))
        })
        .collect::<Result<_>>()?;
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pts.windows(2) {
        let ((x0, h0), (x1, h1)) = (w[0], w[1]);
        if h0 > 0.0 && h1 <= 0.0 {
            return Ok(x0 + (x1 - x0) * h0 / (h0 - h1));
        }
    }
    Err(Error::DomainError("map gradient does not cross a wall".into()))
}

/// Centre of the points labelled `Wall` along `x_0` (for `m = 1`).
pub fn wall_band_center(cmap: &ChamberMap) -> Option<f64> {
    let xs: Vec<f64> =
        cmap.points.iter().zip(&cmap.labels).filter(|(_, l)| matches!(l, Label::Wall(_))).map(|(x, _)| x.coords()[0]).collect();
    let lo = xs.iter().copied().reduce(f64::min)?;
    let hi = xs.iter().copied().reduce(f64::max)?;
    Some(0.5 * (lo + hi))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Points labelled `Chamber(k)` whose `x̂`-distance to every other label and
/// to the boundary of `Δ` is at least `margin`.
pub fn chamber_interior(cmap: &ChamberMap, k: usize, margin: f64) -> Vec<usize> {
    let target = Label::Chamber(k);
    let others: Vec<&SimplexPoint> =
        cmap.points.iter().zip(&cmap.labels).filter(|(_, l)| **l != target).map(|(x, _)| x).collect();
    (0..cmap.points.len())
        .filter(|&i| cmap.labels[i] == target)
        .filter(|&i| {
            let x = &cmap.points[i];
            // distance to the facet x_j = 0 in x̂ coordinates
            let m = x.dim() as f64;
            let boundary = x.coords()[1..]
                .iter()
                .copied()
                .fold(x.coords()[0] / m.sqrt(), f64::min);
            boundary >= margin && others.iter().all(|o| dist(o.reduced(), x.reduced()) >= margin)
        })
        .collect()
}

/// `max |u**(x + s e_k) - u**(x)|` over interior points of `Chamber(k)` and
/// over the probe offsets `s`.
pub fn independence_check(pot: &ConvexPotential, cmap: &ChamberMap, k: usize, offsets: &[f64], margin: f64) -> Result<f64> {
    probe_deviation(pot, cmap, k, k, offsets, margin)
}

/// As [`independence_check`], probing `Chamber(chamber)` along `e_direction`.
pub fn probe_deviation(
    pot: &ConvexPotential,
    cmap: &ChamberMap,
    chamber: usize,
    direction: usize,
    offsets: &[f64],
    margin: f64,
) -> Result<f64> {
    let max = pot.config().dim();
    for index in [chamber, direction] {
        if index > max {
            return Err(Error::IndexOutOfRange { index, max });
        }
    }
    let k = direction;
    let interior = chamber_interior(cmap, chamber, margin);
    if interior.is_empty() {
        return Err(Error::EmptyChamber(chamber));
    }
    let mut worst: f64 = 0.0;
    for i in interior {
        let x = cmap.points[i].coords();
        let base = double_legendre(pot, x);
        for &s in offsets {
            let mut y = x.to_vec();
            y[k] += s;
            worst = worst.max((double_legendre(pot, &y) - base).abs());
        }
    }
    Ok(worst)
}

/// Fraction of chamber-labelled points `x` with `label(σx) = σ label(x)`.
pub fn label_symmetry(cmap: &ChamberMap, sigma: &[usize]) -> f64 {
    let coords: Vec<&[f64]> = cmap.points.iter().map(|p| p.coords()).collect();
    let images = permuted_indices(&coords, sigma);
    let mut total = 0usize;
    let mut agree = 0usize;
    for (i, l) in cmap.labels.iter().enumerate() {
        if let Label::Chamber(k) = l {
            total += 1;
            if images[i].is_some_and(|j| cmap.labels[j] == Label::Chamber(sigma[*k])) {
                agree += 1;
            }
        }
    }
    if total == 0 {
        return 1.0;
    }
    agree as f64 / total as f64
}
