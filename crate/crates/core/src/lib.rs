//! Exact branch-and-price for one-dimensional bin packing and cutting stock.
//!
//! The solver works on a set-partitioning master LP over bin patterns,
//! generated by knapsack pricing. Fractional LP solutions are rounded by
//! diving on the bins that score best under a geometric criterion (a Lehmer
//! mean of the item weights in the bin), and the search is made exact by
//! binary branching: one child fixes a bin, the other forbids it.
//!
//! ```
//! use binpack::{solve, canonicalize, SolverConfig};
//!
//! let inst = canonicalize(100, &[72, 54, 34, 33, 19, 18]).unwrap();
//! let report = solve(&inst, &SolverConfig::default());
//! assert_eq!(report.optimum, 3);
//! assert!(report.proved_optimal);
//! ```
//!
//! Modules, bottom up:
//! - [`instance`], [`format`]: instances, patterns, solutions and file formats.
//! - [`knapsack`]: pricing solvers (bounded, binary, subset-sum, profit-capped).
//! - [`simplex`]: the restricted master LP.
//! - [`heuristics`]: constructive packings and combinatorial lower bounds.
//! - [`colgen`]: the column generation loop.
//! - [`diving`]: bin scoring and batch selection.
//! - [`bnp`]: the branch-and-price driver.
//! - [`bench`]: batch runs and reports.

pub mod bench;
pub mod bnp;
pub mod colgen;
pub mod diving;
pub mod format;
pub mod heuristics;
pub mod instance;
pub mod knapsack;
pub mod simplex;

pub use bnp::{solve, SolveReport, SolverConfig};
pub use diving::{BatchMode, BatchSense, DivingCriterion};
pub use format::{parse_instance, Format};
pub use instance::{canonicalize, verify_solution, Instance, Item, Pattern, Solution};
