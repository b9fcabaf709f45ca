//! Total mass of the weight W over the dual complex: closed form against
//! cell-by-cell quadrature.
//!
//!     cargo run --example c1_constant

use skeleton_ot::{c1_closed_form, c1_quadrature, ProblemConfig};

fn main() -> skeleton_ot::Result<()> {
    let configs = [
        ProblemConfig::new(3, 1, vec![1, 2])?,
        ProblemConfig::new(3, 2, vec![1, 1, 1])?,
        ProblemConfig::new(6, 2, vec![4, 1, 3])?,
        ProblemConfig::new(5, 1, vec![2, 2])?,
    ];
    println!("{:>6} {:>3} {:>12} {:>22} {:>22} {:>10}", "n", "m", "degrees", "closed form", "quadrature", "rel err");
    for cfg in &configs {
        let closed = c1_closed_form(cfg);
        let quad = c1_quadrature(cfg, 1);
        println!(
            "{:>6} {:>3} {:>12} {:>22.16e} {:>22.16e} {:>10.1e}",
            cfg.n,
            cfg.m,
            format!("{:?}", cfg.degrees),
            closed,
            quad,
            (quad - closed).abs() / closed
        );
    }
    Ok(())
}
