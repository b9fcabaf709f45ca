//! One-dimensional skeleton: exact transport against the closed-form
//! potential.
//!
//!     cargo run --release --example m1_exact_oracle -- 400

use skeleton_ot::chambers::wall_location_1d;
use skeleton_ot::oracle::{m1_slope, M1ClosedForm};
use skeleton_ot::transport::{brenier_map, solve_exact, CostSpec};
use skeleton_ot::{source_measure, target_measure, DualGrid, ProblemConfig, SimplexGrid};

fn main() -> skeleton_ot::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let cfg = ProblemConfig::new(3, 1, vec![1, 2])?;
    let grid = SimplexGrid::new(1, n);
    let dual = DualGrid::new(&cfg, n);
    let mu = source_measure(&grid)?;
    let nu = target_measure(&dual, &cfg)?;

    let plan = solve_exact(&mu, &nu, &CostSpec)?;
    println!(
        "N = {n}: cost {:.10}, {} pivots, gap {:.1e}, {:.2}s",
        plan.achieved_cost, plan.report.pivots, plan.report.duality_gap, plan.report.elapsed_seconds
    );

    let map = brenier_map(&plan, &cfg)?;
    let oracle = M1ClosedForm::new(&cfg)?;
    let mut worst: f64 = 0.0;
    println!("{:>8} {:>12} {:>12}", "x0", "slope(T)", "u'(x0)");
    for (i, x, t) in map.entries() {
        let x0 = x.coords()[0];
        let exact = oracle.uprime(x0)?;
        if (0.02..=0.98).contains(&x0) {
            worst = worst.max((m1_slope(t) - exact).abs());
        }
        if i % (n as usize / 10).max(1) == 0 {
            println!("{x0:>8.4} {:>12.6} {exact:>12.6}", m1_slope(t));
        }
    }
    println!("sup error on [0.02, 0.98]: {worst:.3e}");
    println!("wall at x0 = {:.6} (closed form {:.6})", wall_location_1d(&map)?, oracle.kink());
    Ok(())
}
