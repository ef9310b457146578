//! Iteration analysis of fixed-point-free integer functions through their
//! local iteration matrices.
//!
//! A function `phi` on the non-negative integers with `phi(0) = 0` and no
//! fixed point in the positive integers is restricted to `{1..n}` (values
//! leaving the window collapse to 0). The restriction is encoded as an
//! `n x n` binary matrix `M` with at most one entry per column. `I - M` has
//! determinant 1 when the restricted iteration has no cycle and 0 when it
//! does; in the first case `M` is nilpotent and the inverse of `I - M` is
//! assembled column by column from orbits.
//!
//! Modules:
//! - [`function_model`]: spec DSL, evaluation, localization.
//! - [`orbit_engine`]: cycles, heights, orbits, classes, height partition.
//! - [`matrix_engine`]: partial-map matrices, powers, inverses, eigenvector.
//! - [`exact_oracle`]: dense big-integer linear algebra used for verification.
//! - [`report`]: analysis orchestration, JSON reports, SVG plots, range scans.

pub mod error;
pub mod exact_oracle;
pub mod function_model;
pub mod matrix_engine;
pub mod orbit_engine;
pub mod primes;
pub mod report;
pub mod svg;

pub use error::{Error, Result};
pub use function_model::{localize, parse_spec, FunctionSpec, LocalFunction, RcwaMap};
pub use matrix_engine::{PartialMapMatrix, SparseSignMatrix};
pub use orbit_engine::{CycleReport, HeightProfile, OrbitDecomposition};
pub use report::{run_analyze, run_oracle, scan_for_cycle, AnalysisReport, AnalyzeOptions};
