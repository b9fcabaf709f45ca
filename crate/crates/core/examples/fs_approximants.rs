//! Fubini-Study approximants φ_k built from lattice points of the dual
//! complex, and their sandwich around u.
//!
//!     cargo run --release --example fs_approximants

use skeleton_ot::potential::{fs_potential_from_terms, fs_sandwich, potential_from_duals, FsApproximant};
use skeleton_ot::transport::{solve_exact, CostSpec};
use skeleton_ot::{source_measure, target_measure, DualGrid, ProblemConfig, SimplexGrid};

fn main() -> skeleton_ot::Result<()> {
    let cfg = ProblemConfig::new(3, 1, vec![1, 2])?;
    let grid = SimplexGrid::new(1, 400);
    let dual = DualGrid::new(&cfg, 400);
    let plan = solve_exact(&source_measure(&grid)?, &target_measure(&dual, &cfg)?, &CostSpec)?;
    let pot = potential_from_duals(&plan, &cfg)?;

    println!("L_* = {:.4}", pot.dual_lipschitz());
    println!("{:>4} {:>12} {:>12} {:>12} {:>8}", "k", "min φ_k - u", "max φ_k - u", "lower bound", "ok");
    let rows = fs_sandwich(&pot, &[2, 4, 8, 16, 32, 64])?;
    for r in &rows {
        println!("{:>4} {:>12.3e} {:>12.3e} {:>12.3e} {:>8}", r.k, r.min_diff, r.max_diff, r.lower_bound, r.within);
    }
    for w in rows.windows(2) {
        println!("error ratio k={} -> k={}: {:.2}", w[0].k, w[1].k, w[0].error / w[1].error);
    }

    // the same φ_8 written as a degree-8 Fubini-Study potential
    let fs = FsApproximant::new(&pot, 8)?;
    let groups = fs.as_term_groups();
    let x = &grid.points[40];
    println!(
        "φ_8 at {:?}: lattice max {:.10}, from {} monomial groups {:.10}",
        x.coords(),
        fs.eval(x.coords()),
        groups.len(),
        fs_potential_from_terms(&groups, 8, x, &cfg)?
    );
    Ok(())
}
