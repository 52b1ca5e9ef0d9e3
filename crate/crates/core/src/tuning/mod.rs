//! Repeated K-fold cross-validation and information-criterion tuning of (gamma, lambda).

pub mod cv;
pub mod folds;
pub mod ic;
pub mod select;

pub use cv::{
    cross_validate, cross_validate_full, fold_design, CvFit, CvResult, CvSpec, PenaltyScheme,
};
pub use folds::{make_folds, Folds};
pub use ic::{information_criterion, select_by_ic, Criterion, IcResult};
pub use select::{select_rule, Choice, SelectionRule};
