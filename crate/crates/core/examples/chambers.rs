//! Wall-chamber structure of the gradient map and the independence of u on
//! the coordinate x_k inside chamber k.
//!
//!     cargo run --release --example chambers

use skeleton_ot::chambers::{
    classify, independence_check, probe_deviation, wall_band_center, wall_fraction, wall_location_1d, Label,
    DELTA_WALL,
};
use skeleton_ot::potential::potential_from_duals;
use skeleton_ot::transport::{brenier_map, solve_exact, CostSpec};
use skeleton_ot::{source_measure, target_measure, DualGrid, ProblemConfig, SimplexGrid};

fn main() -> skeleton_ot::Result<()> {
    let cfg = ProblemConfig::new(3, 1, vec![1, 2])?;
    let grid = SimplexGrid::new(1, 400);
    let dual = DualGrid::new(&cfg, 400);
    let plan = solve_exact(&source_measure(&grid)?, &target_measure(&dual, &cfg)?, &CostSpec)?;
    let map = brenier_map(&plan, &cfg)?;
    let pot = potential_from_duals(&plan, &cfg)?;

    for delta in [DELTA_WALL, DELTA_WALL / 2.0] {
        let cmap = classify(&grid, &map, delta, &cfg)?;
        println!(
            "δ = {delta}: chamber 0 {}, chamber 1 {}, wall fraction {:.4}, band centre {:?}",
            cmap.count(&Label::Chamber(0)),
            cmap.count(&Label::Chamber(1)),
            wall_fraction(&cmap),
            wall_band_center(&cmap)
        );
    }
    println!("gradient crosses the wall at x0 = {:.6}", wall_location_1d(&map)?);

    let cmap = classify(&grid, &map, DELTA_WALL, &cfg)?;
    for k in 0..=1 {
        let own = independence_check(&pot, &cmap, k, &[0.05, -0.05], 0.1)?;
        let other = probe_deviation(&pot, &cmap, 1 - k, k, &[0.05, -0.05], 0.1)?;
        println!("probe e_{k}: chamber {k} deviation {own:.2e}, chamber {} deviation {other:.2e}", 1 - k);
    }
    Ok(())
}
