//! Two-dimensional skeleton with degrees (1,1,1), solved by Sinkhorn; checks
//! the permutation symmetry of the potential and of the chambers.
//!
//!     cargo run --release --example m2_entropic -- 40 20

use skeleton_ot::chambers::{classify, label_symmetry, wall_fraction, DELTA_WALL};
use skeleton_ot::oracle::{degree_symmetries, symmetry_check};
use skeleton_ot::potential::potential_from_duals;
use skeleton_ot::transport::{brenier_map, solve_entropic, CostSpec, SinkhornParams};
use skeleton_ot::{source_measure, target_measure, DualGrid, ProblemConfig, SimplexGrid};

fn main() -> skeleton_ot::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u32>().ok());
    let n = args.next().flatten().unwrap_or(30);
    let dn = args.next().flatten().unwrap_or(n / 2);
    let cfg = ProblemConfig::new(3, 2, vec![1, 1, 1])?;
    let grid = SimplexGrid::new(2, n);
    let dual = DualGrid::new(&cfg, dn);
    let mu = source_measure(&grid)?;
    let nu = target_measure(&dual, &cfg)?;
    println!("{} source atoms, {} target atoms", mu.len(), nu.len());

    let plan = solve_entropic(&mu, &nu, &CostSpec, &SinkhornParams::default())?;
    println!(
        "sinkhorn: iterations per level {:?}, marginal error {:.1e}, gap {:.2e}",
        plan.report.level_iterations, plan.report.marginal_error, plan.report.duality_gap
    );
    let pot = potential_from_duals(&plan, &cfg)?;
    let map = brenier_map(&plan, &cfg)?;
    let cmap = classify(&grid, &map, DELTA_WALL, &cfg)?;
    println!("wall fraction {:.3}", wall_fraction(&cmap));
    for sigma in degree_symmetries(&cfg) {
        println!(
            "σ = {sigma:?}: sup|u∘σ - u| = {:.2e}, labels agree on {:.1}%",
            symmetry_check(&pot, &sigma, &cfg)?,
            100.0 * label_symmetry(&cmap, &sigma)
        );
    }
    Ok(())
}
