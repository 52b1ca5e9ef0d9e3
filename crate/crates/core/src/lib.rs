//! Sparsity-ranked lasso.
//!
//! A weighted-L1 regression toolkit in which each covariate group is
//! penalized according to its size (`w_k = p_k^gamma`) or its cumulative
//! position (`w_k = (p_1 + ... + p_k)^gamma`). Includes interaction and
//! polynomial expansion, pathwise coordinate descent for gaussian and
//! binomial responses, cross-validation and information-criterion tuning,
//! and simulation harnesses for interaction and polynomial selection.

pub mod data;
pub mod error;
pub mod expand;
pub mod penalty;
pub mod rng;
pub mod simulate;
pub mod solver;
pub mod tuning;

pub use data::{load_dataset, Dataset, Family, GroupedDesign, StandardizationParams};
pub use error::{Result, SrlError};
pub use expand::{ExpansionSpec, HierarchyClass};
pub use penalty::{PenaltySpec, Scheme};
pub use solver::{FitPath, SolverConfig};
