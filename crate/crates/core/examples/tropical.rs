//! Valuations of sections on the skeleton: min-plus evaluation of a
//! monomial term list.
//!
//!     cargo run --example tropical

use skeleton_ot::potential::{tropical_valuation, Term};
use skeleton_ot::{ProblemConfig, SimplexPoint};

fn main() -> skeleton_ot::Result<()> {
    let cfg = ProblemConfig::new(3, 2, vec![1, 1, 1])?;
    let terms = vec![
        Term { l: vec![0, 0, 0], a: 1 },
        Term { l: vec![2, 0, 1], a: 0 },
        Term { l: vec![0, 3, 0], a: -1 },
        Term { l: vec![1, 0, 0], a: 0 },
    ];
    for x in [[1.0, 0.0, 0.0], [0.2, 0.5, 0.3], [1.0 / 3.0; 3], [0.0, 0.0, 1.0]] {
        let p = SimplexPoint::new(x.to_vec())?;
        println!("-log|s| at {x:?} = {:.4}", tropical_valuation(&terms, &p, Some((&cfg, 3)))?);
    }
    let bad = [Term { l: vec![1, 1, 1], a: 0 }];
    let p = SimplexPoint::new(vec![0.2, 0.3, 0.5])?;
    println!("term without a zero exponent: {}", tropical_valuation(&bad, &p, None).unwrap_err());
    Ok(())
}
