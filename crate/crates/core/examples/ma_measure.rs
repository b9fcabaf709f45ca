//! The MA-type measure Mu(E) = ∫_{∇u(E)} W dp against C1 μ0(E), and the
//! pointwise density u'' W(u') on the one-dimensional skeleton.
//!
//!     cargo run --release --example ma_measure

use skeleton_ot::potential::{ma_density_m1, ma_measure, mu0_cell, potential_from_duals};
use skeleton_ot::transport::{brenier_map, solve_exact, CostSpec};
use skeleton_ot::{c1_closed_form, source_measure, target_measure, DualGrid, ProblemConfig, SimplexGrid};

fn main() -> skeleton_ot::Result<()> {
    let cfg = ProblemConfig::new(3, 1, vec![1, 2])?;
    let grid = SimplexGrid::new(1, 400);
    let dual = DualGrid::new(&cfg, 400);
    let plan = solve_exact(&source_measure(&grid)?, &target_measure(&dual, &cfg)?, &CostSpec)?;
    let map = brenier_map(&plan, &cfg)?;
    let pot = potential_from_duals(&plan, &cfg)?;
    let c1 = c1_closed_form(&cfg);

    let cells = grid.simplices();
    println!("Mu(Δ) = {:.6}, C1 = {c1:.6}", ma_measure(&map, &cells, &cfg));
    // blocks of 40 cells
    for block in cells.chunks(40) {
        let first = grid.points[block[0][0]].coords()[0];
        let ratio = ma_measure(&map, block, &cfg) / (c1 * mu0_cell(&grid) * block.len() as f64);
        println!("  cells from x0 = {first:.3}: Mu / (C1 μ0) = {ratio:.4}");
    }

    println!("u'' W(u') / C1 at selected points:");
    for (x0, r) in ma_density_m1(&pot, 8)?.into_iter().step_by(40) {
        println!("  x0 = {x0:.3}: {r:.4}");
    }
    Ok(())
}
