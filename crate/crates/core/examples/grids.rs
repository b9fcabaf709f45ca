//! Simplex and dual-complex grids, canonical dual points and the weight W.
//!
//!     cargo run --example grids

use skeleton_ot::geometry::{canonicalize, dual_vertex, weight_w, DualGrid, SimplexGrid};
use skeleton_ot::ProblemConfig;

fn main() -> skeleton_ot::Result<()> {
    let cfg = ProblemConfig::new(3, 1, vec![1, 2])?;

    let grid = SimplexGrid::new(1, 4);
    println!("simplex grid N=4: {} points", grid.len());
    for x in &grid.points {
        println!("  x = {:?}  x̂ = {:?}", x.coords(), x.reduced());
    }

    let dual = DualGrid::new(&cfg, 2);
    println!("dual grid N=2, spacing {}: {} points", dual.spacing, dual.len());
    for p in &dual.points {
        println!("  p = {:?}  cell {}  W = {:.4}", p.coords(), p.cell(), weight_w(p, &cfg));
    }

    // classes modulo the diagonal share one canonical representative
    let p = canonicalize(&[0.3, 0.1], &cfg)?;
    println!("canonical form of (0.3, 0.1): {:?}, cells {:?}", p.coords(), p.cells());
    for i in 0..=cfg.dim() {
        println!("vertex {i}: {:?}", dual_vertex(i, &cfg)?.coords());
    }
    Ok(())
}
