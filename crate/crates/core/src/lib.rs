//! Limiting Calabi-Yau potentials on the essential skeleton via optimal
//! transport.
//!
//! The skeleton of a polarised hypersurface degeneration with intermediate
//! complex structure limit is an `m`-simplex `Δ`. The limiting potential is a
//! convex function `u` on `Δ` whose gradient pushes the normalized Lebesgue
//! measure forward to the weighted measure `W(p) dp` on the dual complex
//! `Δ^∨`. This crate discretizes both sides, solves the transport problem
//! exactly (network simplex) or entropically (log-domain Sinkhorn), and
//! recovers `u`, its Legendre duals, the chamber structure of `∇u`, and the
//! Fubini-Study approximants built from `u*`.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`geometry`] | `Δ`, `Δ^∨`, canonical dual points, `W`, grids |
//! | [`measures`] | source/target measures, `C_1` |
//! | [`transport`] | exact and entropic solvers, Brenier map |
//! | [`potential`] | `u`, `u*`, `u**`, MA-type measure, FS approximants |
//! | [`chambers`] | wall-chamber classification |
//! | [`oracle`] | closed-form `m = 1` solution and comparators |
//! | [`pipeline`] | JSON-configured runs and file exports |

pub mod chambers;
pub mod error;
pub mod export;
pub mod geometry;
pub mod lattice;
pub mod measures;
pub mod oracle;
pub mod pipeline;
pub mod potential;
pub mod quadrature;
pub mod transport;

pub use error::{Error, Result};
pub use geometry::{
    barycentric_grid, canonicalize, dual_grid, dual_vertex, weight_w, DualGrid, DualPoint,
    ProblemConfig, SimplexGrid, SimplexPoint,
};
pub use measures::{c1_closed_form, c1_quadrature, source_measure, target_measure, DiscreteMeasure};
