//! Legendre duality: u from transport duals, u* on the dual grid, and u**
//! both on the simplex and off it.
//!
//!     cargo run --release --example legendre

use skeleton_ot::oracle::M1ClosedForm;
use skeleton_ot::potential::{double_legendre, double_legendre_argmax, legendre_dual, potential_from_duals};
use skeleton_ot::transport::{solve_exact, CostSpec};
use skeleton_ot::{source_measure, target_measure, DualGrid, ProblemConfig, SimplexGrid};

fn main() -> skeleton_ot::Result<()> {
    let cfg = ProblemConfig::new(3, 1, vec![1, 2])?;
    let grid = SimplexGrid::new(1, 200);
    let dual = DualGrid::new(&cfg, 200);
    let plan = solve_exact(&source_measure(&grid)?, &target_measure(&dual, &cfg)?, &CostSpec)?;
    let pot = potential_from_duals(&plan, &cfg)?;
    let oracle = M1ClosedForm::new(&cfg)?;

    println!("{:>6} {:>12} {:>12} {:>12}", "x0", "u", "u**", "closed form");
    for x0 in [0.0, 0.2, 0.4, 2.0 / 3.0, 0.8, 1.0] {
        let i = pot.simplex_points().iter().position(|x| (x.coords()[0] - x0).abs() < 2.5e-3).unwrap();
        let x = pot.simplex_points()[i].coords();
        println!(
            "{:>6.3} {:>12.6} {:>12.6} {:>12.6}",
            x[0],
            pot.u()[i],
            double_legendre(&pot, x),
            oracle.u(x[0], 2000)?
        );
    }

    let p = &pot.dual_points()[pot.dual_points().len() / 3];
    println!("u*({:?}) = {:.6}", p.coords(), legendre_dual(&pot, p));

    // off the simplex, u** grows along e_0 with slope p_0 of the active cell
    for x0 in [0.3, 0.8] {
        let x = [x0, 1.0 - x0];
        let (v, active) = double_legendre_argmax(&pot, &x);
        let moved = double_legendre(&pot, &[x0 + 0.01, 1.0 - x0]);
        println!(
            "x0 = {x0}: active p = {:?}, (u**(x + 0.01 e0) - u**(x)) / 0.01 = {:.4}",
            active.coords(),
            (moved - v) / 0.01
        );
    }
    Ok(())
}
