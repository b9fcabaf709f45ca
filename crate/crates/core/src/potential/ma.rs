use crate::error::{Error, Result};
use crate::geometry::{weight_from_coords, ProblemConfig, SimplexGrid};
use crate::measures::c1_closed_form;
use crate::quadrature::SimplexRule;
use crate::transport::BrenierMap;

use super::ConvexPotential;

/// `W` at the class of `(0, p̂)`, zero outside `Δ̄^∨`.
fn weight_of_reduced(hat: &[f64], cfg: &ProblemConfig) -> f64 {
    let max = hat.iter().copied().fold(0.0, f64::max);
    let mut p = Vec::with_capacity(hat.len() + 1);
    p.push(-max);
    p.extend(hat.iter().map(|v| v - max));
    weight_from_coords(&p, cfg)
}

/// `Mu(E) = ∫_{∇u(E)} W dp` for a union `E` of grid simplices (vertex index
/// lists into `map.points`). The gradient image of each simplex is taken as
/// the simplex spanned by the images of its corners.
pub fn ma_measure(map: &BrenierMap, region: &[Vec<usize>], cfg: &ProblemConfig) -> f64 {
    let rule = SimplexRule::new(cfg.dim(), cfg.codim() as usize + 2);
    region
        .iter()
        .filter_map(|cell| {
            let verts: Option<Vec<Vec<f64>>> =
                cell.iter().map(|&i| map.image(i).map(|t| t.reduced().to_vec())).collect();
            verts.map(|v| rule.integrate(&v, |p| weight_of_reduced(p, cfg)))
        })
        .sum()
}

/// `μ_0` of one Kuhn simplex: `μ_0 = m! dx̂` has mass one on `Δ`.
pub fn mu0_cell(grid: &SimplexGrid) -> f64 {
    (grid.resolution as f64).powi(-(grid.m as i32))
}

/// For `m = 1`: `(x_0, u'' W(u') / C_1)` from centred differences of width
/// `stencil` grid steps. The ratio is `1` where the MA-type equation holds.
pub fn ma_density_m1(pot: &ConvexPotential, stencil: usize) -> Result<Vec<(f64, f64)>> {
    let cfg = pot.config();
    if cfg.m != 1 {
        return Err(Error::DomainError(format!("density check needs m = 1, got m = {}", cfg.m)));
    }
    let s = stencil.max(1);
    let h = s as f64 / pot.resolution() as f64;
    let c1 = c1_closed_form(cfg);
    // order by x̂ = x_1
    let mut idx: Vec<usize> = (0..pot.u().len()).collect();
    idx.sort_by(|&a, &b| pot.simplex_points()[a].reduced()[0].total_cmp(&pot.simplex_points()[b].reduced()[0]));
    let u: Vec<f64> = idx.iter().map(|&i| pot.u()[i]).collect();
    let mut out = Vec::new();
    for k in s..u.len().saturating_sub(s) {
        let second = (u[k + s] - 2.0 * u[k] + u[k - s]) / (h * h);
        let slope = (u[k + s] - u[k - s]) / (2.0 * h);
        let w = weight_of_reduced(&[slope], cfg);
        out.push((pot.simplex_points()[idx[k]].coords()[0], second * w / c1));
    }
    Ok(out)
}
