//! A complete configured run: solve, analyse, write CSV and JSON artifacts.
//!
//!     cargo run --release --example pipeline -- /tmp/skeleton-run

use skeleton_ot::pipeline::{run, RunConfig, RunOptions};

fn main() -> skeleton_ot::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "skeleton-run".into());
    let mut cfg = RunConfig::from_json(
        r#"{
            "problem": {"n": 3, "m": 1, "degrees": [1, 2]},
            "simplex_resolution": 200,
            "dual_resolution": 200,
            "solver": {"kind": "exact"},
            "report": {"fs_ks": [4, 8, 16]}
        }"#,
    )?;
    cfg.output_dir = out.into();
    let outcome = run(&cfg, &RunOptions { emit_plan: true, seed: 1 })?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    for c in &outcome.report.checks {
        println!("{:<28} {:>12.4e} {}", c.name, c.value, if c.pass { "ok" } else { "FAILED" });
    }
    Ok(())
}
